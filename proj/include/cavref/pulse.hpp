#pragma once
/** @file pulse.hpp
 *  @brief Discretized waveguide modes and single-photon Gaussian wavepackets.
 *
 *  Modes obey periodic boundary conditions k L = 2 pi n with positive n and a
 *  linear dispersion omega_n = omega_c + v_g (k_n - k_c).
 */

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace cavref {

struct GridSpec {
  double omega_c = 0.0;          ///< cavity reference frequency
  double center_detuning = 0.0;  ///< grid center relative to omega_c
  double bandwidth = 1.0;        ///< pulse bandwidth the spacing must resolve
  std::size_t modes = 2;
  double length = 2.0 * pi;      ///< quantization length L
  double group_velocity = 1.0;
};

class ModeGrid {
 public:
  std::size_t size() const { return detuning_.size(); }
  double length() const { return length_; }
  double group_velocity() const { return v_g_; }
  double omega_c() const { return omega_c_; }
  double k_c() const { return k_c_; }
  /// Frequency spacing between neighbouring modes.
  double spacing() const { return 2.0 * pi * v_g_ / length_; }
  double k_spacing() const { return 2.0 * pi / length_; }
  double k(std::size_t i) const { return k_[i]; }
  double omega(std::size_t i) const { return omega_c_ + detuning_[i]; }
  double detuning(std::size_t i) const { return detuning_[i]; }
  const std::vector<double>& wavenumbers() const { return k_; }
  const std::vector<double>& detunings() const { return detuning_; }
  double k_span() const { return k_.back() - k_.front(); }
  double max_abs_detuning() const {
    return std::max(std::abs(detuning_.front()), std::abs(detuning_.back()));
  }
  /// Wavenumber of a mode with the given detuning (need not lie on the lattice).
  double k_of_detuning(double d) const { return k_c_ + d / v_g_; }

 private:
  friend ModeGrid build_mode_grid(const GridSpec&);
  double length_ = 0.0, v_g_ = 1.0, omega_c_ = 0.0, k_c_ = 0.0;
  std::vector<double> k_, detuning_;
};

/**
 * Lattice of N consecutive integers n, centred on the requested detuning. k_c is
 * shifted so that detunings are exactly symmetric about center_detuning.
 */
inline ModeGrid build_mode_grid(const GridSpec& s) {
  if (!(s.bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (s.modes < 2) throw std::invalid_argument("mode grid needs at least two modes");
  if (!(s.length > 0.0)) throw std::invalid_argument("quantization length must be positive");
  if (!(s.group_velocity > 0.0)) throw std::invalid_argument("group velocity must be positive");
  const double delta = 2.0 * pi * s.group_velocity / s.length;
  if (delta > s.bandwidth / 16.0)
    throw std::invalid_argument("mode spacing undersamples the pulse spectrum");

  const double dk = 2.0 * pi / s.length;
  const double half = 0.5 * static_cast<double>(s.modes - 1);
  const double k_target = std::max(s.omega_c, 0.0) / s.group_velocity + s.center_detuning / s.group_velocity;
  const double n_first = std::max(1.0, std::round(k_target / dk - half));

  ModeGrid g;
  g.length_ = s.length;
  g.v_g_ = s.group_velocity;
  g.omega_c_ = s.omega_c;
  g.k_c_ = (n_first + half) * dk - s.center_detuning / s.group_velocity;
  g.k_.resize(s.modes);
  g.detuning_.resize(s.modes);
  for (std::size_t j = 0; j < s.modes; ++j) {
    g.k_[j] = (n_first + static_cast<double>(j)) * dk;
    g.detuning_[j] = s.center_detuning + (static_cast<double>(j) - half) * delta;
  }
  return g;
}

struct WavepacketSpec {
  double s0 = -1.0;               ///< initial centre, left of the cavity
  double sigma_k = 1.0;           ///< spectral width of the amplitude envelope
  double carrier_detuning = 0.0;  ///< carrier frequency minus omega_c
  cplx e1{1.0, 0.0};              ///< relative amplitude along e1
  cplx e2{0.0, 0.0};              ///< relative amplitude along e2
  double separation_factor = 5.0; ///< required |s0| / pulse length
  double margin_sigmas = 8.0;     ///< grid margin around the carrier
  double locality_tolerance = 1e-3;
};

/// Spectral full width 2 sigma_k.
inline double pulse_bandwidth_k(double sigma_k) { return 2.0 * sigma_k; }
/// Pulse length 2 pi / bandwidth.
inline double pulse_length(double sigma_k) { return 2.0 * pi / pulse_bandwidth_k(sigma_k); }

struct PhotonAmplitudes {
  std::vector<cplx> e1, e2;

  double norm_e1() const {
    double n = 0.0;
    for (const auto& c : e1) n += std::norm(c);
    return n;
  }
  double norm_e2() const {
    double n = 0.0;
    for (const auto& c : e2) n += std::norm(c);
    return n;
  }
  double norm() const { return norm_e1() + norm_e2(); }
};

/// Normalized Gaussian single-photon state on the grid, up to a global phase.
inline PhotonAmplitudes gaussian_wavepacket(const ModeGrid& g, const WavepacketSpec& w) {
  if (!(w.s0 < 0.0)) throw std::invalid_argument("pulse must start left of the cavity (s0 < 0)");
  if (!(w.sigma_k > 0.0)) throw std::invalid_argument("spectral width must be positive");
  const double lp = pulse_length(w.sigma_k);
  if (std::abs(w.s0) < w.separation_factor * lp)
    throw std::invalid_argument("pulse starts too close to the cavity for its length");
  if (g.k_spacing() > pulse_bandwidth_k(w.sigma_k) / 16.0)
    throw std::invalid_argument("mode spacing undersamples the pulse spectrum");
  const double k0 = g.k_of_detuning(w.carrier_detuning);
  if (k0 - w.margin_sigmas * w.sigma_k < g.k(0) || k0 + w.margin_sigmas * w.sigma_k > g.k(g.size() - 1))
    throw std::invalid_argument("mode grid does not cover the pulse spectrum");
  const double pol = std::norm(w.e1) + std::norm(w.e2);
  if (!(pol > 0.0)) throw std::invalid_argument("polarization amplitudes are both zero");

  std::vector<cplx> env(g.size());
  double n = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.k(i) - k0;
    env[i] = std::exp(-x * x / (4.0 * w.sigma_k * w.sigma_k)) * std::polar(1.0, -x * w.s0);
    n += std::norm(env[i]);
  }
  const double scale = 1.0 / std::sqrt(n * pol);
  PhotonAmplitudes a;
  a.e1.resize(g.size());
  a.e2.resize(g.size());
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    a.e1[i] = w.e1 * env[i] * scale;
    a.e2[i] = w.e2 * env[i] * scale;
    sum += env[i];
  }
  if (std::abs(sum) > w.locality_tolerance * std::sqrt(n))
    throw std::invalid_argument("pulse overlaps the cavity at t = 0");
  return a;
}

/**
 * Field intensity at position s and time t for one polarization, with the
 * transverse prefactor fixed to 1/L so that the result is independent of L.
 */
inline double intensity_profile(std::span<const cplx> amps, const ModeGrid& g, double s, double t,
                                bool include_vacuum) {
  if (amps.size() != g.size()) throw std::invalid_argument("amplitudes do not match grid");
  const double x = s - g.group_velocity() * t;
  const double k_ref = g.k(g.size() / 2);
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) sum += amps[i] * std::polar(1.0, (g.k(i) - k_ref) * x);
  double v = 2.0 * std::norm(sum) / g.length();
  if (include_vacuum) v += g.k_span() / (2.0 * pi);
  return v;
}

/// Writes rows (s, t, I) for every (s, t) pair.
inline void write_intensity_csv(std::ostream& os, std::span<const cplx> amps, const ModeGrid& g,
                                std::span<const double> s_values, std::span<const double> t_values,
                                bool include_vacuum) {
  os << "s,t,intensity\n";
  os.precision(17);
  for (double t : t_values)
    for (double s : s_values) os << s << ',' << t << ',' << intensity_profile(amps, g, s, t, include_vacuum) << '\n';
}

}  // namespace cavref
