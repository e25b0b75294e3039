#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure of an iterative numerical routine, carrying the iteration count
/// reached before giving up.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

inline std::string shape_string(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

/// Throws std::invalid_argument if any entry is NaN or infinite.
inline void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
}

/// Matrix product with an explicit shape check.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_string(a) + " by " + shape_string(b));
  }
  return a * b;
}

/// sqrt of the sum of squared entries.
inline double frobenius_norm(const Matrix& a) { return a.norm(); }

/// Sum of absolute values of all entries (the matrix seen as a long vector).
inline double l1_norm(const Matrix& a) { return a.cwiseAbs().sum(); }

/// Entry-wise soft threshold: x -> sign(x) * max(|x| - tau, 0).
/// An entry with |x| == tau maps to exactly zero.
inline Matrix shrink(const Matrix& a, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("shrink: tau must be finite and >= 0");
  }
  return a.unaryExpr([tau](double x) {
    const double mag = std::abs(x) - tau;
    if (mag <= 0.0) return 0.0;
    return x > 0.0 ? mag : -mag;
  });
}

}  // namespace rsp
