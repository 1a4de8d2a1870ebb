#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Coords = Eigen::VectorXd;

enum class Family { SpecialOrthogonal, SpecialUnitary };

/// An element of a compact matrix Lie algebra, stored as an n x n complex
/// matrix (real entries for so(n)). Coordinates are obtained through the
/// owning Algebra.
class Element {
 public:
  Element() = default;
  explicit Element(Matrix m) : m_(std::move(m)) {}

  const Matrix& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }

  /// sqrt(<X, X>)
  double norm() const;

  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  Element& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(double s, Element a) { return a *= s; }
  friend Element operator*(Element a, double s) { return a *= s; }
  friend Element operator-(Element a) { return a *= -1.0; }

 private:
  Matrix m_;
};

/// Orthogonal (so) or special unitary (su) matrix.
class GroupElement {
 public:
  explicit GroupElement(Matrix m) : m_(std::move(m)) {}

  static GroupElement identity(Eigen::Index n) { return GroupElement(Matrix::Identity(n, n)); }

  const Matrix& matrix() const { return m_; }
  GroupElement inverse() const { return GroupElement(m_.adjoint()); }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(a.m_ * b.m_);
  }

 private:
  Matrix m_;
};

/// so(n) or su(n) with the inner product <X, Y> = -1/2 Re tr(XY) and a fixed
/// orthonormal basis.
///
/// so(n): E_ji - E_ij for i < j in lexicographic order; for n = 3 the basis is
/// reordered to the hat map (e1, e2, e3) so that coordinates are R^3 vectors
/// and the bracket is the cross product.
/// su(n): i * generalized Gell-Mann matrices: for each j < k the symmetric
/// i(E_jk + E_kj) then E_jk - E_kj, followed by the n - 1 diagonal generators.
class Algebra {
 public:
  Algebra(Family family, int n);

  Family family() const { return family_; }
  int n() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Element>& basis() const { return basis_; }
  std::string name() const;

  /// Membership predicate: skew-Hermitian (real for so, traceless for su),
  /// tolerance scaled by max(1, ||X||).
  bool contains(const Matrix& m, double tol = 1e-12) const;

  /// Wraps a matrix, throwing std::invalid_argument if it is not a member.
  Element element(const Matrix& m, double tol = 1e-12) const;

  Element zero() const;
  Element from_coords(const Coords& c) const;
  Coords coords(const Element& x) const;

  /// dim x dim matrix of xi -> [x, xi] in the orthonormal basis; skew-symmetric.
  Eigen::MatrixXd ad_operator(const Element& x) const;

  /// Default invariant-polynomial degrees k = 2..n (even only for so(n)).
  std::vector<int> invariant_degrees() const;

 private:
  void check_size(const Element& x) const;

  Family family_;
  int n_;
  std::vector<Element> basis_;
};

Element commutator(const Element& x, const Element& y);
double inner(const Element& x, const Element& y);
Element adjoint_action(const GroupElement& g, const Element& x);
GroupElement exp_map(const Element& x);

/// Eigenvalues sorted by imaginary part, then real part.
std::vector<Complex> spectrum(const Element& x);

/// x = V diag(i * lambda) V^*, lambda ascending. Every element of so(n) and
/// su(n) is skew-Hermitian so this is a Hermitian eigenproblem for -i x.
struct SkewEigen {
  Eigen::VectorXd lambda;
  Matrix vectors;
};
SkewEigen skew_eigen(const Element& x);

/// V diag(i * values) V^*; real part only when `real` is set.
Element from_skew_eigen(const Matrix& vectors, const Eigen::VectorXd& values, bool real);

/// Standard normal coordinates; deterministic for a fixed seed.
Element random_element(const Algebra& algebra, std::uint64_t seed);
/// exp of a random element scaled to norm pi.
GroupElement random_group_element(const Algebra& algebra, std::uint64_t seed);

}  // namespace magflow
