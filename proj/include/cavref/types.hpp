#pragma once
/** @file types.hpp
 *  @brief Shared scalar aliases and error types.
 */

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cavref {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx imag_unit{0.0, 1.0};

/// Raised when a formula would divide by a vanishing parameter.
class DegenerateParameter : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the time integrators and the reflection estimator.
class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { step_rejected, non_finite, not_converged, undefined_ratio, memory_budget };

  IntegrationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace cavref
