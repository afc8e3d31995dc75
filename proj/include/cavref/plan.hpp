#pragma once
/** @file plan.hpp
 *  @brief Chooses grid, pulse and time stepping for a narrowband scattering run.
 */

#include <algorithm>
#include <cmath>
#include <optional>

#include "analytic.hpp"
#include "dynamics.hpp"
#include "pulse.hpp"
#include "system.hpp"

namespace cavref {

struct PlanOptions {
  double bandwidth_fraction = 0.05;  ///< pulse bandwidth over max(|Omega_c|, kappa_sigma)
  std::optional<double> bandwidth;   ///< absolute pulse bandwidth; overrides the fraction
  std::size_t min_modes = 2048;
  double resonance_cover = 3.0;      ///< grid half-span in units of the coupling scale
  double damping_cover = 10.0;       ///< extra half-span in units of the largest damping
  std::optional<double> center_detuning;  ///< defaults to the carrier detuning
  double separation_factor = 5.0;
  double tail_decay_times = 20.0;    ///< amplitude e-foldings waited after the transit
  double dt_safety = 0.8;            ///< fraction of the largest allowed step
  double group_velocity = 1.0;
  double omega_c = 1000.0;
  cplx e1{1.0, 0.0};
  cplx e2{0.0, 0.0};
};

struct ScatteringPlan {
  ModeGrid grid;
  WavepacketSpec pulse;
  PhotonAmplitudes photon;
  EvolveOptions evolve;
  double bandwidth = 0.0;  ///< pulse frequency bandwidth
};

inline ScatteringPlan make_plan(const SystemParams& p, const PlanOptions& o = {}) {
  p.validate();
  const double scale = std::max(std::abs(p.omega_rabi), p.kappa_sigma());
  if (!(scale > 0.0)) throw std::invalid_argument("cannot plan a run without coupling or damping");
  const double v = o.group_velocity;
  const double bw = o.bandwidth.value_or(o.bandwidth_fraction * scale);
  if (!(bw > 0.0)) throw std::invalid_argument("pulse bandwidth must be positive");
  const double sigma_w = 0.5 * bw;
  const double sigma_k = sigma_w / v;
  const double spacing = bw / 16.0;

  const double center = o.center_detuning.value_or(p.delta_0);
  const double damping = std::max(p.kappa_sigma(), 0.5 * p.gamma());
  const double reach = std::max({std::abs(p.delta_0 - center) + 8.0 * sigma_w,
                                 o.resonance_cover * (std::abs(p.omega_rabi) + std::abs(p.delta_e - center) + std::abs(center)) +
                                     o.damping_cover * damping});
  const auto modes = std::max<std::size_t>(o.min_modes, static_cast<std::size_t>(std::ceil(2.0 * reach / spacing)) + 1);

  ScatteringPlan plan;
  plan.bandwidth = bw;
  GridSpec gs;
  gs.omega_c = o.omega_c;
  gs.center_detuning = center;
  gs.bandwidth = bw;
  gs.modes = modes;
  gs.group_velocity = v;
  gs.length = 2.0 * pi * v / spacing;
  plan.grid = build_mode_grid(gs);

  const double lp = pulse_length(sigma_k);
  plan.pulse.s0 = -o.separation_factor * lp;
  plan.pulse.sigma_k = sigma_k;
  plan.pulse.carrier_detuning = p.delta_0;
  plan.pulse.e1 = o.e1;
  plan.pulse.e2 = o.e2;
  plan.pulse.separation_factor = o.separation_factor;
  plan.photon = gaussian_wavepacket(plan.grid, plan.pulse);

  const auto [P1, P2] = roots_P(p);
  const double slowest = std::min(std::abs(P1.real()), std::abs(P2.real()));
  const double tail = slowest > 0.0 ? o.tail_decay_times / slowest : 0.0;
  plan.evolve.t_end = (std::abs(plan.pulse.s0) + 2.0 * lp) / v + tail;
  if (plan.evolve.t_end > gs.length / v - 2.0 * lp / v)
    throw std::invalid_argument("run outlasts the recurrence time of the mode grid");
  plan.evolve.dt = o.dt_safety * max_stable_dt(p, plan.grid);
  return plan;
}

}  // namespace cavref
