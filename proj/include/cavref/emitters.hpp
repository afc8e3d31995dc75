#pragma once
/** @file emitters.hpp
 *  @brief Two dipole-coupled emitters: eigenstates, classical-pulse preparation of
 *         the dark (or bright) state, and the validity window of that preparation.
 */

#include <array>
#include <cmath>
#include <stdexcept>

#include "types.hpp"

namespace cavref {

struct EmitterParams {
  double W = 1.0;          ///< single-emitter transition energy
  double omega_dd = 0.0;   ///< dipole-dipole frequency
  double gamma_e = 0.0;    ///< population relaxation
  double gamma_el = 0.0;   ///< pure dephasing

  double gamma() const { return gamma_e + 2.0 * gamma_el; }

  void validate() const {
    if (!(gamma_e >= 0.0) || !(gamma_el >= 0.0))
      throw std::invalid_argument("emitter rates must be non-negative");
    if (!std::isfinite(W) || !std::isfinite(omega_dd))
      throw std::invalid_argument("emitter energies must be finite");
  }
};

/// Row order of the eigenbasis table.
enum class EmitterLevel { ground = 0, bright = 1, dark = 2, doubly_excited = 3 };

struct EmitterEigensystem {
  double E_g = 0.0;
  double E_ee = 0.0;
  double E_plus = 0.0;
  double E_minus = 0.0;
  /// basis[level][j]: coefficient on product state j in the order |0,0>, |1,0>, |0,1>, |1,1>.
  std::array<std::array<double, 4>, 4> basis{};
};

inline EmitterEigensystem build_eigensystem(const EmitterParams& p) {
  p.validate();
  const double r = 1.0 / std::sqrt(2.0);
  EmitterEigensystem s;
  s.E_g = 0.0;
  s.E_ee = 2.0 * p.W;
  s.E_plus = p.W + p.omega_dd;
  s.E_minus = p.W - p.omega_dd;
  s.basis[0] = {1.0, 0.0, 0.0, 0.0};
  s.basis[1] = {0.0, r, r, 0.0};
  s.basis[2] = {0.0, r, -r, 0.0};
  s.basis[3] = {0.0, 0.0, 0.0, 1.0};
  return s;
}

enum class PreparedState { dark, bright };

struct QEPreparation {
  cplx ground{1.0, 0.0};
  cplx target{0.0, 0.0};
  PreparedState target_state = PreparedState::dark;
};

/// Square resonant pulse acting on the ground <-> target two-level system.
inline QEPreparation prepare_with_classical_pulse(double rabi, double duration,
                                                  PreparedState target = PreparedState::dark) {
  if (!(rabi >= 0.0) || !(duration >= 0.0))
    throw std::invalid_argument("rabi frequency and duration must be non-negative");
  const double area = rabi * duration;
  return {cplx{std::cos(area), 0.0}, cplx{0.0, std::sin(area)}, target};
}

struct PreparationLimits {
  double margin = 5.0;            ///< numeric meaning of "much smaller than"
  double area_tolerance = 1e-3;   ///< allowed |area - pi/2|
};

struct PreparationReport {
  double pulse_area = 0.0;
  double single_emitter_rabi = 0.0;  ///< classical Rabi frequency seen by one emitter
  double symmetric_rabi = 0.0;       ///< leak into the symmetric channel
  double sqrt_n = 0.0;               ///< effective photon-number amplitude
  double window_low = 0.0;
  double window_high = 0.0;

  bool antisymmetric_ok = false;
  bool symmetric_ok = false;
  bool pulse_area_ok = false;
  bool duration_ok = false;
  bool photon_window_ok = false;

  bool field_strength_ok() const { return antisymmetric_ok && symmetric_ok; }
  bool all_ok() const {
    return field_strength_ok() && pulse_area_ok && duration_ok && photon_window_ok;
  }
};

/**
 * @param rabi_cl antisymmetric classical Rabi frequency driving ground -> dark
 * @param alpha symmetric-leak coefficient
 * @param ratio_L_over_Delta emitter spacing over the standing-wave scale; the
 *        single-emitter Rabi frequency is taken as ratio_L_over_Delta * rabi_cl
 * @param omega_c_rabi vacuum Rabi coupling to the cavity
 */
inline PreparationReport validate_preparation_constraints(const EmitterParams& p, double rabi_cl,
                                                          double duration, double alpha,
                                                          double ratio_L_over_Delta,
                                                          double omega_c_rabi,
                                                          const PreparationLimits& lim = {}) {
  p.validate();
  if (!(rabi_cl >= 0.0) || !(duration >= 0.0) || !(alpha >= 0.0) || !(ratio_L_over_Delta >= 0.0) ||
      !(omega_c_rabi >= 0.0) || !(p.omega_dd >= 0.0))
    throw std::invalid_argument("preparation inputs must be non-negative");
  if (alpha == 0.0) throw DegenerateParameter("symmetric-leak coefficient alpha must be non-zero");
  if (omega_c_rabi == 0.0) throw DegenerateParameter("cavity Rabi coupling must be non-zero");

  PreparationReport r;
  r.pulse_area = rabi_cl * duration;
  r.single_emitter_rabi = ratio_L_over_Delta * rabi_cl;
  r.symmetric_rabi = alpha * r.single_emitter_rabi;
  r.sqrt_n = r.single_emitter_rabi / omega_c_rabi;
  r.window_low = ratio_L_over_Delta * p.gamma() / omega_c_rabi;
  r.window_high = p.omega_dd / (alpha * omega_c_rabi);

  const double limit = 2.0 * p.omega_dd / lim.margin;
  r.antisymmetric_ok = rabi_cl <= limit;
  r.symmetric_ok = r.symmetric_rabi <= limit;
  r.pulse_area_ok = std::abs(r.pulse_area - 0.5 * pi) <= lim.area_tolerance;
  r.duration_ok = duration > 0.0 && 1.0 / duration > p.gamma();
  r.photon_window_ok = r.window_low < r.sqrt_n && r.sqrt_n < r.window_high;
  return r;
}

}  // namespace cavref
