#pragma once
/** @file analytic.hpp
 *  @brief Closed-form narrowband reflection of a single photon from the
 *         cavity + bright-state system, critical coupling, and dephasing-noise
 *         estimates.
 */

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "system.hpp"
#include "types.hpp"

namespace cavref {

/// Roots of (p + kappa_sigma)(p_e + p) + |Omega_c|^2 = 0; first carries the principal root.
inline std::pair<cplx, cplx> roots_P(const SystemParams& p) {
  const cplx ks = p.kappa_sigma();
  const cplx pe = p.p_e();
  const double om2 = std::norm(p.omega_rabi);
  const cplx mid = -0.5 * (ks + pe);
  const cplx root = std::sqrt(0.25 * (ks - pe) * (ks - pe) - om2);
  return {mid + root, mid - root};
}

/// Lineshape denominator (p_e - i d)(kappa_sigma - i d) + |Omega_c|^2 at carrier detuning d.
inline cplx reflection_denominator(const SystemParams& p, double detuning) {
  const cplx id{0.0, detuning};
  return (p.p_e() - id) * (p.kappa_sigma() - id) + std::norm(p.omega_rabi);
}

/// Reflection coefficient of the e1 polarization at carrier detuning `detuning`.
inline cplx reflection_at(const SystemParams& p, double detuning) {
  const cplx id{0.0, detuning};
  return 1.0 - 2.0 * p.kappa * (p.p_e() - id) / reflection_denominator(p, detuning);
}

/// Orientation of the reflected field in the emitter frame for an x-polarized
/// photon whose emitter-frame axis sits at angle phi. Real reflection only.
inline double rotation_angle(double phi, double R_real) {
  if (R_real == 0.0) return std::sin(phi) == 0.0 ? 0.0 : 0.5 * pi;
  return std::atan(-std::tan(phi) / R_real);
}

struct ReflectionOptions {
  double phi = 0.25 * pi;                 ///< incident emitter-frame angle
  std::optional<double> bandwidth;        ///< pulse bandwidth for the narrowband flag
  double margin = 5.0;                    ///< numeric meaning of "much smaller than"
};

struct ReflectionResult {
  cplx R1{0.0, 0.0};
  double phi_prime = 0.0;
  double loss_fraction = 0.0;
  bool strong_coupling = false;
  bool weak_coupling = false;
  bool narrowband_ok = false;  ///< false when no bandwidth was supplied
};

/// Major-axis orientation of a polarization (a1, a2), in (-pi/2, pi/2].
inline double major_axis_angle(cplx a1, cplx a2) {
  const double psi = 0.5 * std::atan2(2.0 * std::real(a1 * std::conj(a2)), std::norm(a1) - std::norm(a2));
  return psi <= -0.5 * pi ? psi + pi : psi;
}

inline ReflectionResult reflection_R1(const SystemParams& p, const ReflectionOptions& opt = {}) {
  p.validate();
  ReflectionResult r;
  r.R1 = reflection_at(p, p.delta_0);
  r.loss_fraction = 1.0 - std::norm(r.R1);
  // Incident x photon in the emitter frame is (cos phi, -sin phi).
  r.phi_prime = major_axis_angle(r.R1 * std::cos(opt.phi), -std::sin(opt.phi));

  const double om = std::abs(p.omega_rabi);
  const double ks = p.kappa_sigma();
  const double pe = std::abs(p.p_e());
  r.strong_coupling = om > opt.margin * std::max(ks, pe);
  r.weak_coupling = opt.margin * om < std::min(ks, pe);
  if (opt.bandwidth) {
    const auto [P1, P2] = roots_P(p);
    const double scale = r.weak_coupling ? ks : std::min(std::abs(P1), std::abs(P2));
    r.narrowband_ok = opt.margin * *opt.bandwidth <= scale;
  }
  return r;
}

enum class CriticalBranch { detuned, resonant };

struct CriticalCouplingSolution {
  CriticalBranch branch = CriticalBranch::resonant;
  double kappa = 0.0;
  std::vector<double> delta_0;  ///< one or two carrier detunings
  double max_abs_R1 = 0.0;      ///< largest |R1| over the returned detunings
};

/**
 * Mirror decay rates (and carrier detunings) giving zero reflection. Uses every
 * field of `p` except kappa and delta_0; the bright state must be resonant with
 * the cavity.
 */
inline std::vector<CriticalCouplingSolution> critical_coupling(const SystemParams& p) {
  p.validate();
  const double g = p.gamma();
  if (!(g > 0.0)) throw std::invalid_argument("critical coupling needs gamma > 0");
  if (p.delta_e != 0.0) throw std::invalid_argument("critical coupling needs a resonant bright state");
  const double om2 = std::norm(p.omega_rabi);

  auto finish = [&](CriticalCouplingSolution s) {
    SystemParams q = p;
    q.kappa = s.kappa;
    for (double d : s.delta_0) s.max_abs_R1 = std::max(s.max_abs_R1, std::abs(reflection_at(q, d)));
    return s;
  };

  std::vector<CriticalCouplingSolution> out;
  const double om = std::abs(p.omega_rabi);
  if (om >= 0.5 * g) {
    const double d = std::sqrt((om - 0.5 * g) * (om + 0.5 * g));
    CriticalCouplingSolution s{CriticalBranch::detuned, 0.5 * p.mu_c + 0.5 * g, {}, 0.0};
    if (d == 0.0)
      s.delta_0 = {0.0};
    else
      s.delta_0 = {-d, d};
    out.push_back(finish(s));
  }
  out.push_back(finish({CriticalBranch::resonant, 0.5 * p.mu_c + 2.0 * om2 / g, {0.0}, 0.0}));
  return out;
}

/// Mirror decay rate c^2 / (2 v_g l_d); `c` fixes the unit system.
inline double kappa_from_geometry(double v_g, double l_d, double c = 1.0) {
  if (!(v_g > 0.0) || !(c > 0.0)) throw std::invalid_argument("velocities must be positive");
  if (!(l_d > 0.0)) throw std::invalid_argument("decay length must be positive");
  return c * c / (2.0 * v_g * l_d);
}

/// Decay length of a Fabry-Perot cavity with mirror transmission |T|^2 and length l_c.
inline double l_d_fabry_perot(double transmission, double l_c) {
  if (!(transmission > 0.0) || !(l_c > 0.0))
    throw std::invalid_argument("transmission and cavity length must be positive");
  return transmission * l_c;
}

enum class DephasingRegime { cavity_resonant, polariton_resonant, critical };

struct DephasingEstimate {
  double fraction = 0.0;
  bool strong_coupling_ok = true;  ///< |Omega_c| above margin * polariton width
};

/// Reflected incoherent fraction caused by bright-state dephasing, to first order.
inline DephasingEstimate dephasing_fraction(const SystemParams& p, DephasingRegime regime,
                                            double margin = 5.0) {
  p.validate();
  const double width_sum = p.kappa + 0.5 * p.mu_c + 0.5 * p.gamma();
  const double om2 = std::norm(p.omega_rabi);
  DephasingEstimate e;
  e.strong_coupling_ok = std::sqrt(om2) > margin * 0.5 * width_sum;
  switch (regime) {
    case DephasingRegime::cavity_resonant:
      if (om2 == 0.0) throw DegenerateParameter("cavity-resonant estimate needs Omega_c != 0");
      e.fraction = 4.0 * p.gamma_el * p.kappa * p.kappa / (width_sum * om2);
      break;
    case DephasingRegime::polariton_resonant:
      if (width_sum == 0.0) throw DegenerateParameter("polariton-resonant estimate needs damping");
      e.fraction = 4.0 * p.gamma_el * p.kappa * p.kappa / (width_sum * width_sum * width_sum);
      break;
    case DephasingRegime::critical: {
      const double d = p.mu_c + p.gamma();
      e.fraction = d == 0.0 ? 0.0 : p.gamma_el / d;
      break;
    }
  }
  return e;
}

}  // namespace cavref
