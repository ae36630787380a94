#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddim {

/// Points are stored one per row: an N x d matrix, column-major, so each
/// coordinate axis is contiguous.
template <typename Scalar>
using PointMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using PointMatrix = PointMatrixT<double>;
using Index = Eigen::Index;

/// Default absolute tolerance for geometric comparisons.
inline constexpr double kDefaultTol = 1e-9;

enum class ErrorKind {
  invalid_input,   // precondition / validation failure
  singular_input,  // coincident points, zero diameter, ...
  resource_limit,  // size caps
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

class SingularInput : public Error {
 public:
  explicit SingularInput(const std::string& what) : Error(ErrorKind::singular_input, what) {}
};

class ResourceLimit : public Error {
 public:
  explicit ResourceLimit(const std::string& what) : Error(ErrorKind::resource_limit, what) {}
};

}  // namespace ddim
