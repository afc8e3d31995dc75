#pragma once
/** @file stochastic.hpp
 *  @brief Ensembles of noisy trajectories restoring the norm lost to damping.
 *
 *  Each step is the deterministic RK4 step followed by additive complex Gaussian
 *  increments on the emitter (dephasing) and on the ground-state sink (decay).
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "dynamics.hpp"

namespace cavref {

enum class NoiseClosure {
  self_consistent,  ///< intensities from the trajectory's own amplitudes
  reference         ///< intensities from the noise-free trajectory (first order in the noise)
};

struct EnsembleOptions {
  std::size_t trajectories = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0 uses the hardware concurrency
  NoiseClosure closure = NoiseClosure::self_consistent;
  std::size_t memory_budget_bytes = std::size_t{1} << 31;
  bool keep_final_states = true;
};

struct EnsembleSummary {
  std::size_t trajectories = 0;
  double mean_norm = 0.0;       ///< final total norm
  double norm_stderr = 0.0;
  double mean_sink = 0.0;       ///< final |C0|^2
  double mean_field_e1 = 0.0;   ///< final sum |C1k|^2
  double coherent_field_e1 = 0.0;  ///< sum_k |E[C1k]|^2, unbiased
  double incoherent_fraction = 0.0;  ///< fluctuating e1 field over initial e1 norm
  double incoherent_stderr = 0.0;
  std::vector<cplx> mean_e1;    ///< ensemble-mean final e1 envelopes
};

struct EnsembleResult {
  std::vector<TrajectoryRecord> trajectories;
  EnsembleSummary summary;
};

/// Per-trajectory engine keyed only by (seed, index).
inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace detail {

/// Unit-variance circular complex Gaussian.
inline cplx circular_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = n(rng);
  const double b = n(rng);
  return cplx{a, b} / std::sqrt(2.0);
}

struct ReferenceIntensities {
  std::vector<double> cavity, emitter;  ///< populations at the start of each step
};

inline ReferenceIntensities reference_run(const AmplitudeState& s0, const SystemParams& p, const ModeGrid& g,
                                          const EvolveOptions& o, std::size_t steps) {
  Propagator prop(s0, p, g, o);
  ReferenceIntensities r;
  r.cavity.reserve(steps);
  r.emitter.reserve(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    r.cavity.push_back(std::norm(prop.state().cavity));
    r.emitter.push_back(std::norm(prop.state().emitter));
    prop.step();
  }
  return r;
}

inline TrajectoryRecord run_trajectory(const AmplitudeState& s0, const SystemParams& p, const ModeGrid& g,
                                       const EvolveOptions& o, std::size_t steps, std::size_t stride,
                                       std::mt19937_64 rng, const ReferenceIntensities* ref) {
  Propagator prop(s0, p, g, o);
  TrajectoryRecord rec;
  rec.sample(prop.state(), prop.field_e1());
  const double dt = o.dt;
  for (std::size_t n = 1; n <= steps; ++n) {
    const AmplitudeState& before = prop.state();
    const double pc = ref ? ref->cavity[n - 1] : std::norm(before.cavity);
    const double pe = ref ? ref->emitter[n - 1] : std::norm(before.emitter);
    const double d00 = p.mu_c * pc + p.gamma_e * pe;
    const double dee = 2.0 * p.gamma_el * pe;
    prop.step();
    rec.max_leak_residual = std::max(rec.max_leak_residual, prop.last_residual());
    const cplx xi_e = circular_normal(rng);
    const cplx xi_0 = circular_normal(rng);
    AmplitudeState& s = prop.mutable_state();
    s.emitter += std::sqrt(dee * dt) * xi_e;
    s.sink += std::sqrt(d00 * dt) * xi_0;
    track_transit(rec, s, o.t1_threshold);
    if (n % stride == 0 || n == steps) rec.sample(s, prop.field_e1());
  }
  prop.flush();
  rec.final_state = prop.state();
  return rec;
}

}  // namespace detail

inline EnsembleSummary summarize(const std::vector<TrajectoryRecord>& trajs, const AmplitudeState& initial) {
  EnsembleSummary s;
  const std::size_t n = trajs.size();
  s.trajectories = n;
  if (n == 0) return s;
  const std::size_t modes = initial.e1.size();
  s.mean_e1.assign(modes, cplx{});
  std::vector<double> norms(n), fields(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& f = trajs[j].final_state;
    norms[j] = f.norm();
    fields[j] = f.field_e1();
    s.mean_sink += std::norm(f.sink);
    for (std::size_t i = 0; i < modes; ++i) s.mean_e1[i] += f.e1[i];
  }
  const double dn = static_cast<double>(n);
  for (auto& c : s.mean_e1) c /= dn;
  s.mean_sink /= dn;
  double var = 0.0;
  for (double v : norms) s.mean_norm += v;
  s.mean_norm /= dn;
  for (double v : norms) var += (v - s.mean_norm) * (v - s.mean_norm);
  s.norm_stderr = n > 1 ? std::sqrt(var / (dn - 1.0) / dn) : 0.0;
  for (double v : fields) s.mean_field_e1 += v;
  s.mean_field_e1 /= dn;

  // Per-trajectory deviation energy sum_k |C1k - mean|^2, rescaled for an unbiased variance.
  const double n1 = initial.field_e1();
  std::vector<double> dev(n, 0.0);
  double mean_dev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& f = trajs[j].final_state;
    for (std::size_t i = 0; i < modes; ++i) dev[j] += std::norm(f.e1[i] - s.mean_e1[i]);
    mean_dev += dev[j];
  }
  mean_dev /= dn;
  double coherent = 0.0;
  for (const auto& c : s.mean_e1) coherent += std::norm(c);
  const double bias = n > 1 ? dn / (dn - 1.0) : 1.0;
  const double incoherent = mean_dev * bias;
  s.coherent_field_e1 = coherent - incoherent / dn;
  if (n1 > 0.0) {
    s.incoherent_fraction = incoherent / n1;
    double vd = 0.0;
    for (double d : dev) vd += (d - mean_dev) * (d - mean_dev);
    s.incoherent_stderr = n > 1 ? bias * std::sqrt(vd / (dn - 1.0) / dn) / n1 : 0.0;
  }
  return s;
}

/**
 * Runs `trajectories` independent noisy trajectories. Results depend only on the
 * seed and each trajectory's index, never on the thread count.
 */
inline EnsembleResult evolve_stochastic(const AmplitudeState& state0, const SystemParams& p, const ModeGrid& grid,
                                        const EvolveOptions& opt, const EnsembleOptions& ens) {
  if (ens.trajectories < 1) throw std::invalid_argument("ensemble needs at least one trajectory");
  p.validate();
  const std::size_t steps = detail::step_count(opt, state0.time);
  const std::size_t stride = detail::record_stride(opt, steps);
  const std::size_t samples = steps / stride + 2;
  const std::size_t per_traj = samples * 7 * sizeof(double) + (ens.keep_final_states ? 2 * grid.size() * sizeof(cplx) : 0);
  if (per_traj > ens.memory_budget_bytes / ens.trajectories)
    throw IntegrationError(IntegrationError::Kind::memory_budget, "ensemble exceeds the memory budget");

  detail::ReferenceIntensities ref;
  if (ens.closure == NoiseClosure::reference) ref = detail::reference_run(state0, p, grid, opt, steps);
  const detail::ReferenceIntensities* ref_ptr = ens.closure == NoiseClosure::reference ? &ref : nullptr;

  EnsembleResult out;
  out.trajectories.resize(ens.trajectories);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t j; !failed && (j = next.fetch_add(1)) < ens.trajectories;) {
      try {
        out.trajectories[j] =
            detail::run_trajectory(state0, p, grid, opt, steps, stride, trajectory_rng(ens.seed, j), ref_ptr);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  unsigned threads = ens.threads ? ens.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, ens.trajectories));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  out.summary = summarize(out.trajectories, state0);
  if (!ens.keep_final_states)
    for (auto& t : out.trajectories) t.final_state.e1.clear(), t.final_state.e2.clear();
  return out;
}

/// Ensemble mean of each sampled series.
inline TrajectoryRecord ensemble_mean(const std::vector<TrajectoryRecord>& trajs) {
  TrajectoryRecord m;
  if (trajs.empty()) return m;
  const double n = static_cast<double>(trajs.size());
  m.t = trajs.front().t;
  auto avg = [&](auto member) {
    std::vector<double> v(m.t.size(), 0.0);
    for (const auto& r : trajs)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += (r.*member)[i] / n;
    return v;
  };
  m.cavity_pop = avg(&TrajectoryRecord::cavity_pop);
  m.emitter_pop = avg(&TrajectoryRecord::emitter_pop);
  m.field_e1 = avg(&TrajectoryRecord::field_e1);
  m.field_e2 = avg(&TrajectoryRecord::field_e2);
  m.sink_pop = avg(&TrajectoryRecord::sink_pop);
  m.norm = avg(&TrajectoryRecord::norm);
  return m;
}

}  // namespace cavref
