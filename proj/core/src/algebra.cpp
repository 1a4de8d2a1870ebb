#include "magflow/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace magflow {

namespace {

void require_same_size(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
  }
}

bool is_real(const Matrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

Matrix unit(int n, int r, int c) {
  Matrix m = Matrix::Zero(n, n);
  m(r, c) = 1.0;
  return m;
}

std::vector<Element> so_basis(int n) {
  std::vector<Element> basis;
  if (n == 3) {
    // hat map: hat(v) w = v x w
    basis.emplace_back(unit(3, 2, 1) - unit(3, 1, 2));
    basis.emplace_back(unit(3, 0, 2) - unit(3, 2, 0));
    basis.emplace_back(unit(3, 1, 0) - unit(3, 0, 1));
    return basis;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      basis.emplace_back(unit(n, j, i) - unit(n, i, j));
    }
  }
  return basis;
}

std::vector<Element> su_basis(int n) {
  const Complex I(0.0, 1.0);
  std::vector<Element> basis;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      basis.emplace_back(I * (unit(n, j, k) + unit(n, k, j)));
      basis.emplace_back(unit(n, j, k) - unit(n, k, j));
    }
  }
  for (int l = 1; l < n; ++l) {
    Matrix d = Matrix::Zero(n, n);
    for (int m = 0; m < l; ++m) d(m, m) = 1.0;
    d(l, l) = -static_cast<double>(l);
    basis.emplace_back(I * std::sqrt(2.0 / (l * (l + 1.0))) * d);
  }
  return basis;
}

}  // namespace

double Element::norm() const { return std::sqrt(std::max(0.0, inner(*this, *this))); }

Element& Element::operator+=(const Element& o) {
  require_same_size(m_, o.m_, "Element::operator+=");
  m_ += o.m_;
  return *this;
}

Element& Element::operator-=(const Element& o) {
  require_same_size(m_, o.m_, "Element::operator-=");
  m_ -= o.m_;
  return *this;
}

Algebra::Algebra(Family family, int n) : family_(family), n_(n) {
  if (n < 2) throw std::invalid_argument("Algebra: matrix size n must be >= 2");
  basis_ = family == Family::SpecialOrthogonal ? so_basis(n) : su_basis(n);
}

std::string Algebra::name() const {
  return (family_ == Family::SpecialOrthogonal ? "so(" : "su(") + std::to_string(n_) + ")";
}

bool Algebra::contains(const Matrix& m, double tol) const {
  if (m.rows() != n_ || m.cols() != n_) return false;
  const double scale = std::max(1.0, m.norm());
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  if (family_ == Family::SpecialOrthogonal) {
    return m.imag().cwiseAbs().maxCoeff() <= tol * scale;
  }
  return std::abs(m.trace()) <= tol * scale;
}

Element Algebra::element(const Matrix& m, double tol) const {
  if (!contains(m, tol)) {
    throw std::invalid_argument("Algebra::element: matrix is not in " + name());
  }
  return Element(m);
}

Element Algebra::zero() const { return Element(Matrix::Zero(n_, n_)); }

Element Algebra::from_coords(const Coords& c) const {
  if (c.size() != dim()) {
    throw std::invalid_argument("Algebra::from_coords: expected " + std::to_string(dim()) +
                                " coordinates, got " + std::to_string(c.size()));
  }
  Matrix m = Matrix::Zero(n_, n_);
  for (int i = 0; i < dim(); ++i) m += c[i] * basis_[i].matrix();
  return Element(std::move(m));
}

Coords Algebra::coords(const Element& x) const {
  check_size(x);
  Coords c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = inner(basis_[i], x);
  return c;
}

Eigen::MatrixXd Algebra::ad_operator(const Element& x) const {
  check_size(x);
  Eigen::MatrixXd m(dim(), dim());
  for (int j = 0; j < dim(); ++j) {
    m.col(j) = coords(commutator(x, basis_[j]));
  }
  return m;
}

std::vector<int> Algebra::invariant_degrees() const {
  std::vector<int> degrees;
  for (int k = 2; k <= n_; ++k) {
    if (family_ == Family::SpecialOrthogonal && k % 2 != 0) continue;
    degrees.push_back(k);
  }
  return degrees;
}

void Algebra::check_size(const Element& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument(name() + ": element of size " + std::to_string(x.size()));
  }
}

Element commutator(const Element& x, const Element& y) {
  require_same_size(x.matrix(), y.matrix(), "commutator");
  const Matrix& a = x.matrix();
  const Matrix& b = y.matrix();
  return Element(a * b - b * a);
}

double inner(const Element& x, const Element& y) {
  require_same_size(x.matrix(), y.matrix(), "inner");
  // Re tr(XY) = sum_ij Re(X_ij Y_ji)
  const double tr = (x.matrix().array() * y.matrix().transpose().array()).real().sum();
  return -0.5 * tr;
}

Element adjoint_action(const GroupElement& g, const Element& x) {
  require_same_size(g.matrix(), x.matrix(), "adjoint_action");
  Matrix m = g.matrix() * x.matrix() * g.matrix().adjoint();
  if (is_real(x.matrix()) && is_real(g.matrix())) m = m.real().cast<Complex>();
  return Element(std::move(m));
}

SkewEigen skew_eigen(const Element& x) {
  const Complex minus_i(0.0, -1.0);
  const Matrix h = minus_i * x.matrix();
  // Hermitize to remove roundoff asymmetry before the self-adjoint solver.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Element from_skew_eigen(const Matrix& vectors, const Eigen::VectorXd& values, bool real) {
  const Complex I(0.0, 1.0);
  Eigen::VectorXcd d = I * values.cast<Complex>();
  Matrix m = vectors * d.asDiagonal() * vectors.adjoint();
  if (real) m = m.real().cast<Complex>();
  return Element(std::move(m));
}

GroupElement exp_map(const Element& x) {
  const SkewEigen eig = skew_eigen(x);
  Eigen::VectorXcd phases(eig.lambda.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, eig.lambda[k]);
  Matrix g = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  if (is_real(x.matrix())) g = g.real().cast<Complex>();
  return GroupElement(std::move(g));
}

std::vector<Complex> spectrum(const Element& x) {
  const SkewEigen eig = skew_eigen(x);
  std::vector<Complex> out;
  out.reserve(eig.lambda.size());
  for (Eigen::Index k = 0; k < eig.lambda.size(); ++k) out.emplace_back(0.0, eig.lambda[k]);
  std::stable_sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
  });
  return out;
}

Element random_element(const Algebra& algebra, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Coords c(algebra.dim());
  for (auto& v : c) v = normal(rng);
  return algebra.from_coords(c);
}

GroupElement random_group_element(const Algebra& algebra, std::uint64_t seed) {
  Element x = random_element(algebra, seed ^ 0x9e3779b97f4a7c15ULL);
  const double nrm = x.norm();
  if (nrm > 0.0) x *= M_PI / nrm;
  return exp_map(x);
}

}  // namespace magflow
