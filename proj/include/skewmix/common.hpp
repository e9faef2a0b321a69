#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace skewmix {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Thrown when an argument violates a documented precondition.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine cannot reach its accuracy target.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw precondition_error(msg);
}

inline void require_finite(double x, const char* name) {
  if (!std::isfinite(x))
    throw precondition_error(std::string(name) + " must be finite");
}

inline void require_finite(const Vec& v, const char* name) {
  if (!v.allFinite())
    throw precondition_error(std::string(name) + " must be finite");
}

inline void require_finite(const Mat& m, const char* name) {
  if (!m.allFinite())
    throw precondition_error(std::string(name) + " must be finite");
}

/// Complex value carried as log-magnitude plus unwrapped phase.
///
/// Transform ratios are needed at arguments where exp(-c^2 ...) underflows
/// any direct representation, so products and quotients are formed on the
/// (log_abs, phase) pair and only converted to a plain complex on demand.
struct LogComplex {
  double log_abs = 0.0;
  double phase = 0.0;

  Complex value() const {
    const double m = std::exp(log_abs);
    return {m * std::cos(phase), m * std::sin(phase)};
  }

  friend LogComplex operator*(const LogComplex& a, const LogComplex& b) {
    return {a.log_abs + b.log_abs, a.phase + b.phase};
  }
  friend LogComplex operator/(const LogComplex& a, const LogComplex& b) {
    return {a.log_abs - b.log_abs, a.phase - b.phase};
  }
};

inline LogComplex log_complex(const Complex& z) {
  return {std::log(std::abs(z)), std::arg(z)};
}

}  // namespace skewmix
