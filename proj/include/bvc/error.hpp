#pragma once

#include <stdexcept>
#include <string>

namespace bvc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroGradient : public Error {
  using Error::Error;
};
class NoIntersection : public Error {
  using Error::Error;
};
class NoConvergence : public Error {
  using Error::Error;
};
class InvalidResolution : public Error {
  using Error::Error;
};
class EmptyMesh : public Error {
  using Error::Error;
};
class UnsupportedOrder : public Error {
  using Error::Error;
};
class UnsupportedDegree : public Error {
  using Error::Error;
};
class DimensionMismatch : public Error {
  using Error::Error;
};
class DegenerateFit : public Error {
  using Error::Error;
};
class TooLarge : public Error {
  using Error::Error;
};
class IoError : public Error {
  using Error::Error;
};
class ConfigError : public Error {
  using Error::Error;
};

// Raised when LU factorization meets a pivot below the rank-deficiency
// threshold. `dof` is the unknown (in system numbering) owning that pivot.
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, long dof, double pivot)
      : Error(what), dof_(dof), pivot_(pivot) {}
  long dof() const noexcept { return dof_; }
  double pivot() const noexcept { return pivot_; }

 private:
  long dof_;
  double pivot_;
};

}  // namespace bvc
