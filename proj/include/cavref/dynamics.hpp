#pragma once
/** @file dynamics.hpp
 *  @brief Time-domain integration of the single-photon amplitude equations.
 *
 *  Mode amplitudes are stored as envelopes s_k with C_k = s_k exp(-i omega_k t);
 *  cavity and emitter amplitudes carry exp(-i omega_c t). The e2 polarization
 *  does not couple, so its envelopes stay constant.
 */

#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pulse.hpp"
#include "system.hpp"
#include "types.hpp"

namespace cavref {

struct AmplitudeState {
  std::vector<cplx> e1;  ///< envelopes of the coupled polarization
  std::vector<cplx> e2;  ///< envelopes of the uncoupled polarization
  cplx cavity{0.0, 0.0};
  cplx emitter{0.0, 0.0};
  cplx sink{0.0, 0.0};   ///< amplitude absorbed into the ground-state reservoir
  double time = 0.0;

  static AmplitudeState from_photon(const PhotonAmplitudes& a) { return {a.e1, a.e2, {}, {}, {}, 0.0}; }

  double field_e1() const {
    double n = 0.0;
    for (const auto& c : e1) n += std::norm(c);
    return n;
  }
  double field_e2() const {
    double n = 0.0;
    for (const auto& c : e2) n += std::norm(c);
    return n;
  }
  double norm() const {
    return field_e1() + field_e2() + std::norm(cavity) + std::norm(emitter) + std::norm(sink);
  }
  /// Mode amplitudes C_k(t) including the free phase exp(-i omega_k t).
  std::vector<cplx> lab_e1(const ModeGrid& g) const {
    std::vector<cplx> out(e1.size());
    for (std::size_t i = 0; i < e1.size(); ++i) out[i] = e1[i] * std::polar(1.0, -g.omega(i) * time);
    return out;
  }
  void scale(cplx w) {
    for (auto& c : e1) c *= w;
    for (auto& c : e2) c *= w;
    cavity *= w;
    emitter *= w;
    sink *= w;
  }
};

struct TrajectoryRecord {
  std::vector<double> t, cavity_pop, emitter_pop, field_e1, field_e2, sink_pop, norm;
  AmplitudeState final_state;
  double peak_excitation = 0.0;   ///< max of |Cc|^2 + |Ce|^2
  double t_peak = 0.0;
  double t1 = std::numeric_limits<double>::quiet_NaN();  ///< transit end; NaN if not reached
  double max_leak_residual = 0.0; ///< worst norm-leak residual per unit time

  void sample(const AmplitudeState& s, double field1) {
    t.push_back(s.time);
    cavity_pop.push_back(std::norm(s.cavity));
    emitter_pop.push_back(std::norm(s.emitter));
    field_e1.push_back(field1);
    double f2 = 0.0;
    for (const auto& c : s.e2) f2 += std::norm(c);
    field_e2.push_back(f2);
    sink_pop.push_back(std::norm(s.sink));
    norm.push_back(field1 + f2 + cavity_pop.back() + emitter_pop.back() + sink_pop.back());
  }
};

struct EvolveOptions {
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t record_every = 0;    ///< 0 picks a stride giving about 2000 samples
  double leak_tolerance = 1e-4;    ///< allowed norm-leak residual per unit time
  double t1_threshold = 1e-6;      ///< relative excitation marking the end of the transit
  std::size_t resync_every = 1024; ///< exact recomputation of the phase table
};

/// Largest step allowed for the given parameters and grid.
inline double max_stable_dt(const SystemParams& p, const ModeGrid& g) {
  const double rate = std::max({std::abs(p.omega_rabi), p.kappa_sigma(), 0.5 * p.gamma(), std::abs(p.delta_e),
                                g.max_abs_detuning()});
  return rate > 0.0 ? 0.05 / rate : std::numeric_limits<double>::infinity();
}

namespace detail {

/// RK4 for the coupled system with the per-mode work fused into one pass per step.
class Propagator {
 public:
  Propagator(const AmplitudeState& s0, const SystemParams& p, const ModeGrid& g, const EvolveOptions& o)
      : p_(p), g_(g), o_(o), state_(s0) {
    p.validate();
    if (s0.e1.size() != g.size() || s0.e2.size() != g.size())
      throw std::invalid_argument("state does not match mode grid");
    if (!(o.dt > 0.0) || !(o.t_end >= s0.time)) throw std::invalid_argument("invalid time stepping");
    if (o.dt > max_stable_dt(p, g) * (1.0 + 1e-12))
      throw std::invalid_argument("time step does not resolve the fastest rate");
    const std::size_t n = g.size();
    coupling_ = p.coupling(g.length(), g.group_velocity());
    sr_.resize(n); si_.resize(n); pr_.resize(n); pi_.resize(n);
    hr_.resize(n); hi_.resize(n); h2r_.resize(n); h2i_.resize(n);
    h1_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sr_[i] = s0.e1[i].real();
      si_[i] = s0.e1[i].imag();
      const cplx h = std::polar(1.0, 0.5 * g.detuning(i) * o.dt);
      const cplx h2 = std::polar(1.0, g.detuning(i) * o.dt);
      hr_[i] = h.real(); hi_[i] = h.imag();
      h2r_[i] = h2.real(); h2i_[i] = h2.imag();
      h1_ += std::conj(h);
      hn_ += std::norm(h);
    }
    resync_phases();
    compute_sums();
  }

  const AmplitudeState& state() const { return state_; }
  AmplitudeState& mutable_state() { return state_; }
  double field_e1() const { return norm_s_; }
  double last_residual() const { return residual_; }

  /// Deterministic step; throws on a rejected step or non-finite values.
  void step() {
    const double dt = o_.dt;
    const double t = state_.time;
    const cplx e0 = std::polar(1.0, p_.delta_e * t);
    const cplx eh = std::polar(1.0, p_.delta_e * (t + 0.5 * dt));
    const cplx e1 = std::polar(1.0, p_.delta_e * (t + dt));
    const cplx iL{0.0, coupling_};
    const cplx c = state_.cavity, f = state_.emitter;

    const cplx S1 = A1_;
    const cplx kc1 = rhs_c(c, f, S1, e0), kf1 = rhs_f(c, f, e0);
    const cplx c2 = c + 0.5 * dt * kc1, f2 = f + 0.5 * dt * kf1;
    const cplx S2 = A2_ + 0.5 * dt * iL * c * h1_;
    const cplx kc2 = rhs_c(c2, f2, S2, eh), kf2 = rhs_f(c2, f2, eh);
    const cplx c3 = c + 0.5 * dt * kc2, f3 = f + 0.5 * dt * kf2;
    const cplx S3 = A2_ + 0.5 * dt * iL * c2 * hn_;
    const cplx kc3 = rhs_c(c3, f3, S3, eh), kf3 = rhs_f(c3, f3, eh);
    const cplx c4 = c + dt * kc3, f4 = f + dt * kf3;
    const cplx S4 = A4_ + dt * iL * c3 * h1_;
    const cplx kc4 = rhs_c(c4, f4, S4, e1), kf4 = rhs_f(c4, f4, e1);

    const cplx c_new = c + dt / 6.0 * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4);
    const cplx f_new = f + dt / 6.0 * (kf1 + 2.0 * kf2 + 2.0 * kf3 + kf4);
    const double norm_before = norm_s_ + std::norm(c) + std::norm(f);

    update_modes(iL * (dt / 6.0), c, 2.0 * (c2 + c3), c4);
    state_.time = t + dt;
    state_.cavity = c_new;
    state_.emitter = f_new;
    ++steps_;
    if (o_.resync_every != 0 && steps_ % o_.resync_every == 0) {
      resync_phases();
      compute_sums();
    }

    if (!std::isfinite(norm_s_) || !std::isfinite(std::norm(c_new)) || !std::isfinite(std::norm(f_new)))
      throw IntegrationError(IntegrationError::Kind::non_finite, "non-finite amplitude encountered");

    const cplx kc_end = rhs_c(c_new, f_new, A1_, e1), kf_end = rhs_f(c_new, f_new, e1);
    const double gam = p_.gamma(), mu = p_.mu_c;
    const double g0 = mu * std::norm(c) + gam * std::norm(f);
    const double g1 = mu * std::norm(c_new) + gam * std::norm(f_new);
    const double d0 = 2.0 * (mu * std::real(std::conj(c) * kc1) + gam * std::real(std::conj(f) * kf1));
    const double d1 = 2.0 * (mu * std::real(std::conj(c_new) * kc_end) + gam * std::real(std::conj(f_new) * kf_end));
    const double leak = 0.5 * dt * (g0 + g1) + dt * dt / 12.0 * (d0 - d1);
    const double norm_after = norm_s_ + std::norm(c_new) + std::norm(f_new);
    residual_ = std::abs(norm_after - norm_before + leak) / dt;
    if (residual_ > o_.leak_tolerance)
      throw IntegrationError(IntegrationError::Kind::step_rejected,
                             "norm-leak residual " + std::to_string(residual_) + " exceeds tolerance; reduce dt");
  }

  /// Copies the envelopes back into the state.
  void flush() {
    for (std::size_t i = 0; i < sr_.size(); ++i) state_.e1[i] = {sr_[i], si_[i]};
  }

 private:
  cplx rhs_c(cplx c, cplx f, cplx S, cplx phase) const {
    return -0.5 * p_.mu_c * c + cplx{0.0, coupling_} * S + imag_unit * std::conj(p_.omega_rabi) * f * std::conj(phase);
  }
  cplx rhs_f(cplx c, cplx f, cplx phase) const {
    return -0.5 * p_.gamma() * f + imag_unit * p_.omega_rabi * c * phase;
  }

  void resync_phases() {
    const std::size_t n = sr_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ph = std::polar(1.0, g_.detuning(i) * state_.time);
      pr_[i] = ph.real();
      pi_[i] = ph.imag();
    }
  }

  void compute_sums() {
    cplx a1{}, a2{}, a4{};
    double nn = 0.0;
    for (std::size_t i = 0; i < sr_.size(); ++i) {
      const cplx q = cplx{sr_[i], si_[i]} * cplx{pr_[i], -pi_[i]};
      const cplx q2 = q * cplx{hr_[i], -hi_[i]};
      a1 += q;
      a2 += q2;
      a4 += q2 * cplx{hr_[i], -hi_[i]};
      nn += sr_[i] * sr_[i] + si_[i] * si_[i];
    }
    A1_ = a1; A2_ = a2; A4_ = a4; norm_s_ = nn;
  }

  /// s += coef * P * (w0 + w1 h + w2 h^2); P *= h^2; then the sums for the next step.
  void update_modes(cplx coef, cplx w0, cplx w1, cplx w2) {
    const std::size_t n = sr_.size();
    const double w0r = w0.real(), w0i = w0.imag(), w1r = w1.real(), w1i = w1.imag();
    const double w2r = w2.real(), w2i = w2.imag(), cr = coef.real(), ci = coef.imag();
    double a1r = 0, a1i = 0, a2r = 0, a2i = 0, a4r = 0, a4i = 0, nn = 0;
    double* __restrict sr = sr_.data();
    double* __restrict si = si_.data();
    double* __restrict pr = pr_.data();
    double* __restrict pim = pi_.data();
    const double* __restrict hr = hr_.data();
    const double* __restrict hi = hi_.data();
    const double* __restrict h2r = h2r_.data();
    const double* __restrict h2i = h2i_.data();
#pragma omp simd reduction(+ : a1r, a1i, a2r, a2i, a4r, a4i, nn)
    for (std::size_t i = 0; i < n; ++i) {
      const double tr = w0r + (w1r * hr[i] - w1i * hi[i]) + (w2r * h2r[i] - w2i * h2i[i]);
      const double ti = w0i + (w1r * hi[i] + w1i * hr[i]) + (w2r * h2i[i] + w2i * h2r[i]);
      const double ur = cr * pr[i] - ci * pim[i];
      const double ui = cr * pim[i] + ci * pr[i];
      const double s_r = sr[i] + (ur * tr - ui * ti);
      const double s_i = si[i] + (ur * ti + ui * tr);
      const double p_r = pr[i] * h2r[i] - pim[i] * h2i[i];
      const double p_i = pr[i] * h2i[i] + pim[i] * h2r[i];
      sr[i] = s_r; si[i] = s_i; pr[i] = p_r; pim[i] = p_i;
      const double qr = s_r * p_r + s_i * p_i;
      const double qi = s_i * p_r - s_r * p_i;
      const double q2r = qr * hr[i] + qi * hi[i];
      const double q2i = qi * hr[i] - qr * hi[i];
      a1r += qr; a1i += qi;
      a2r += q2r; a2i += q2i;
      a4r += q2r * hr[i] + q2i * hi[i];
      a4i += q2i * hr[i] - q2r * hi[i];
      nn += s_r * s_r + s_i * s_i;
    }
    A1_ = {a1r, a1i}; A2_ = {a2r, a2i}; A4_ = {a4r, a4i}; norm_s_ = nn;
  }

  SystemParams p_;
  const ModeGrid& g_;
  EvolveOptions o_;
  AmplitudeState state_;
  double coupling_ = 0.0;
  std::vector<double> sr_, si_, pr_, pi_, hr_, hi_, h2r_, h2i_;
  cplx h1_{}, A1_{}, A2_{}, A4_{};
  double hn_ = 0.0, norm_s_ = 0.0, residual_ = 0.0;
  std::size_t steps_ = 0;
};

inline std::size_t step_count(const EvolveOptions& o, double t0) {
  return static_cast<std::size_t>(std::ceil((o.t_end - t0) / o.dt - 1e-9));
}

inline std::size_t record_stride(const EvolveOptions& o, std::size_t steps) {
  if (o.record_every != 0) return o.record_every;
  return std::max<std::size_t>(1, steps / 2000);
}

/// Tracks the excitation peak and the transit end.
inline void track_transit(TrajectoryRecord& rec, const AmplitudeState& s, double threshold) {
  const double ex = std::norm(s.cavity) + std::norm(s.emitter);
  if (ex > rec.peak_excitation) {
    rec.peak_excitation = ex;
    rec.t_peak = s.time;
    rec.t1 = std::numeric_limits<double>::quiet_NaN();
  } else if (std::isnan(rec.t1) && rec.peak_excitation > 0.0 && ex < threshold * rec.peak_excitation) {
    rec.t1 = s.time;
  }
}

}  // namespace detail

inline TrajectoryRecord evolve_deterministic(const AmplitudeState& state0, const SystemParams& p,
                                             const ModeGrid& grid, const EvolveOptions& opt) {
  detail::Propagator prop(state0, p, grid, opt);
  const std::size_t steps = detail::step_count(opt, state0.time);
  const std::size_t stride = detail::record_stride(opt, steps);
  TrajectoryRecord rec;
  rec.sample(prop.state(), prop.field_e1());
  for (std::size_t n = 1; n <= steps; ++n) {
    prop.step();
    rec.max_leak_residual = std::max(rec.max_leak_residual, prop.last_residual());
    detail::track_transit(rec, prop.state(), opt.t1_threshold);
    if (n % stride == 0 || n == steps) rec.sample(prop.state(), prop.field_e1());
  }
  prop.flush();
  rec.final_state = prop.state();
  return rec;
}

struct ReflectionEstimate {
  cplx R_est{0.0, 0.0};      ///< amplitude-weighted mean ratio for e1
  cplx R_e2{1.0, 0.0};       ///< same for e2 (1 when e2 is empty)
  std::vector<cplx> ratios;  ///< per-mode e1 ratios; NaN where the initial amplitude is negligible
};

inline ReflectionEstimate extract_reflection(const TrajectoryRecord& rec, const PhotonAmplitudes& initial,
                                             const ModeGrid& grid, double threshold = 1e-4) {
  const AmplitudeState& f = rec.final_state;
  if (initial.e1.size() != grid.size() || f.e1.size() != grid.size())
    throw std::invalid_argument("amplitudes do not match grid");
  const double n1 = initial.norm_e1();
  if (!(n1 > 0.0)) throw IntegrationError(IntegrationError::Kind::undefined_ratio, "initial e1 amplitudes vanish");
  if (std::norm(f.cavity) + std::norm(f.emitter) > threshold * n1)
    throw IntegrationError(IntegrationError::Kind::not_converged,
                           "cavity and emitter still excited at the final time");
  ReflectionEstimate r;
  cplx acc{};
  double amax = 0.0;
  for (const auto& c : initial.e1) amax = std::max(amax, std::abs(c));
  r.ratios.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    acc += std::conj(initial.e1[i]) * f.e1[i];
    r.ratios[i] = std::abs(initial.e1[i]) > 1e-8 * amax ? f.e1[i] / initial.e1[i]
                                                         : cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
  }
  r.R_est = acc / n1;
  const double n2 = initial.norm_e2();
  if (n2 > 0.0) {
    cplx a2{};
    for (std::size_t i = 0; i < grid.size(); ++i) a2 += std::conj(initial.e2[i]) * f.e2[i];
    r.R_e2 = a2 / n2;
  }
  return r;
}

/// Projection of a final state onto the spectral envelope of the incident photon.
struct BranchPolarization {
  cplx e1{0.0, 0.0};
  cplx e2{0.0, 0.0};
};

inline BranchPolarization project_on_envelope(const AmplitudeState& s, const PhotonAmplitudes& incident) {
  // Envelope shared by both polarizations of the incident photon.
  const double n = incident.norm();
  BranchPolarization b;
  if (!(n > 0.0)) return b;
  const bool use_e1 = incident.norm_e1() >= incident.norm_e2();
  const auto& ref = use_e1 ? incident.e1 : incident.e2;
  double nr = 0.0;
  for (const auto& c : ref) nr += std::norm(c);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    b.e1 += std::conj(ref[i]) * s.e1[i];
    b.e2 += std::conj(ref[i]) * s.e2[i];
  }
  b.e1 /= std::sqrt(nr);
  b.e2 /= std::sqrt(nr);
  return b;
}

struct DarkBranchOptions {
  double energy_offset = 0.0;  ///< dark-state energy relative to the frame
  double decay_rate = 0.0;     ///< only used for the lifetime warning
};

struct SuperpositionRecord {
  cplx G{1.0, 0.0}, D{0.0, 0.0};
  TrajectoryRecord bright, dark;
  cplx dark_phase{1.0, 0.0};      ///< exp(-i W_d t_end) carried by the dark branch
  bool dark_lifetime_warning = false;
};

/**
 * Emitters in G |bright> + D |dark> scatter one photon. The dark branch sees no
 * emitter coupling; the two branches never mix.
 */
inline SuperpositionRecord evolve_superposition(const PhotonAmplitudes& photon, cplx G, cplx D,
                                                const SystemParams& p, const ModeGrid& grid,
                                                const EvolveOptions& opt, const DarkBranchOptions& dark = {}) {
  if (std::abs(std::norm(G) + std::norm(D) - 1.0) > 1e-12)
    throw std::invalid_argument("branch weights must satisfy |G|^2 + |D|^2 = 1");
  SuperpositionRecord r;
  r.G = G;
  r.D = D;
  auto run = [&](cplx w, const SystemParams& q) {
    AmplitudeState s = AmplitudeState::from_photon(photon);
    s.scale(w);
    if (w == cplx{0.0, 0.0}) {
      TrajectoryRecord rec;
      s.time = opt.t_end;
      rec.sample(s, 0.0);
      rec.final_state = s;
      return rec;
    }
    return evolve_deterministic(s, q, grid, opt);
  };
  r.bright = run(G, p);
  SystemParams q = p;
  q.omega_rabi = 0.0;
  r.dark = run(D, q);
  r.dark_phase = std::polar(1.0, -dark.energy_offset * opt.t_end);
  r.dark.final_state.scale(r.dark_phase);
  r.dark_lifetime_warning = dark.decay_rate * opt.t_end >= 1.0;
  return r;
}

inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& r) {
  os << "# units: rates and times in the reference-rate unit, hbar = 1\n";
  os << "t,cavity_pop,emitter_pop,field_e1,field_e2,sink_pop,norm\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.t.size(); ++i)
    os << r.t[i] << ',' << r.cavity_pop[i] << ',' << r.emitter_pop[i] << ',' << r.field_e1[i] << ','
       << r.field_e2[i] << ',' << r.sink_pop[i] << ',' << r.norm[i] << '\n';
}

inline nlohmann::json complex_array(std::span<const cplx> v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : v) a.push_back({c.real(), c.imag()});
  return a;
}

inline nlohmann::json state_to_json(const AmplitudeState& s) {
  return {{"time", s.time},
          {"e1", complex_array(s.e1)},
          {"e2", complex_array(s.e2)},
          {"cavity", {s.cavity.real(), s.cavity.imag()}},
          {"emitter", {s.emitter.real(), s.emitter.imag()}},
          {"sink", {s.sink.real(), s.sink.imag()}}};
}

}  // namespace cavref
