#pragma once
/** @file system.hpp
 *  @brief Parameters of the cavity + emitter-pair system seen by a single photon.
 *
 *  All rates share one unit (typically the cavity-mirror decay rate), hbar = 1.
 */

#include <cmath>
#include <stdexcept>

#include "types.hpp"

namespace cavref {

struct SystemParams {
  double omega_c = 0.0;      ///< cavity resonance; only fixes absolute phases
  double delta_e = 0.0;      ///< bright-state transition minus cavity frequency
  double delta_0 = 0.0;      ///< photon carrier minus cavity frequency
  cplx omega_rabi = 0.0;     ///< cavity to bright-state coupling
  double mu_c = 0.0;         ///< intracavity loss rate
  double kappa = 0.0;        ///< mirror decay rate into the waveguide
  double gamma_e = 0.0;      ///< bright-state radiative decay rate
  double gamma_el = 0.0;     ///< bright-state dephasing rate

  /// Total bright-state damping.
  double gamma() const { return gamma_e + 2.0 * gamma_el; }
  /// Total cavity damping.
  double kappa_sigma() const { return kappa + 0.5 * mu_c; }
  /// Complex bright-state damping including its detuning.
  cplx p_e() const { return {0.5 * gamma(), delta_e}; }
  double bright_frequency() const { return omega_c + delta_e; }

  /// Waveguide-cavity coupling for a waveguide of length `length`.
  double coupling(double length, double group_velocity) const {
    return std::sqrt(2.0 * group_velocity * kappa / length);
  }

  void validate() const {
    if (!(mu_c >= 0.0) || !(kappa >= 0.0) || !(gamma_e >= 0.0) || !(gamma_el >= 0.0))
      throw std::invalid_argument("decay and dephasing rates must be non-negative");
    if (!std::isfinite(delta_e) || !std::isfinite(delta_0) || !std::isfinite(omega_c) ||
        !std::isfinite(omega_rabi.real()) || !std::isfinite(omega_rabi.imag()))
      throw std::invalid_argument("frequencies must be finite");
  }
};

}  // namespace cavref
