#pragma once

#include <stdexcept>
#include <string>

namespace magflow {

/// A point whose spectrum has collapsed further than the orbit seed's, so the
/// splitting g = ann(x) + ann(x)^perp is no longer numerically well defined.
class DegenerateOrbitPoint : public std::runtime_error {
 public:
  explicit DegenerateOrbitPoint(const std::string& what) : std::runtime_error(what) {}
};

/// Argument of ad_x^{-1} has a component along ann(x).
class NotInImage : public std::runtime_error {
 public:
  explicit NotInImage(const std::string& what) : std::runtime_error(what) {}
};

class ProjectionFailure : public std::runtime_error {
 public:
  explicit ProjectionFailure(const std::string& what) : std::runtime_error(what) {}
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  explicit StepSizeUnderflow(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace magflow
