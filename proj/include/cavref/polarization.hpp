#pragma once
/** @file polarization.hpp
 *  @brief Single-photon polarization states, unitary changes of polarization
 *         basis, reflection-induced rotation, and detection statistics of a
 *         photon entangled with the emitter qubit.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "types.hpp"

namespace cavref {

/// One photon in two orthogonal modes: A|1,0> + B|0,1> + C|0,0>.
struct PolarizationState {
  cplx A{0.0, 0.0};
  cplx B{0.0, 0.0};
  cplx C{0.0, 0.0};
  std::string basis = "xy";
  double basis_angle = 0.0;  ///< rotation of the basis relative to the lab frame

  double photon_probability() const { return std::norm(A) + std::norm(B); }
  double norm() const { return photon_probability() + std::norm(C); }
  PolarizationState normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero state");
    PolarizationState s = *this;
    const double r = 1.0 / std::sqrt(n);
    s.A *= r;
    s.B *= r;
    s.C *= r;
    return s;
  }
};

using Matrix2c = std::array<std::array<cplx, 2>, 2>;

class BasisTransform {
 public:
  /// Rows (alpha, beta; -conj(beta) e^{i chi}, conj(alpha) e^{i chi}).
  static BasisTransform general(cplx alpha, cplx beta, double chi, std::string label = "custom") {
    const cplx e = std::polar(1.0, chi);
    return BasisTransform({{{alpha, beta}, {-std::conj(beta) * e, std::conj(alpha) * e}}}, std::move(label), 0.0);
  }
  static BasisTransform rotation(double phi) {
    BasisTransform t({{{std::cos(phi), std::sin(phi)}, {-std::sin(phi), std::cos(phi)}}}, "rotated", phi);
    return t;
  }
  static BasisTransform circular() {
    const double r = 1.0 / std::sqrt(2.0);
    return BasisTransform({{{r, cplx{0.0, r}}, {r, cplx{0.0, -r}}}}, "circular", 0.0);
  }
  /// Accepts any matrix; unitarity is checked on use.
  static BasisTransform from_matrix(const Matrix2c& m, std::string label = "custom") {
    return BasisTransform(m, std::move(label), 0.0);
  }

  const Matrix2c& matrix() const { return m_; }
  const std::string& label() const { return label_; }
  double angle() const { return angle_; }

  BasisTransform inverse() const {
    Matrix2c h{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h[i][j] = std::conj(m_[j][i]);
    return BasisTransform(h, label_ + "^-1", -angle_);
  }

  /// Largest entry of |T T^dagger - 1|.
  double unitarity_error() const {
    double e = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cplx s = m_[i][0] * std::conj(m_[j][0]) + m_[i][1] * std::conj(m_[j][1]);
        if (i == j) s -= 1.0;
        e = std::max(e, std::abs(s));
      }
    return e;
  }

 private:
  BasisTransform(const Matrix2c& m, std::string label, double angle) : m_(m), label_(std::move(label)), angle_(angle) {}
  Matrix2c m_{};
  std::string label_;
  double angle_ = 0.0;
};

inline void require_unitary(const BasisTransform& t, double tol = 1e-12) {
  if (t.unitarity_error() > tol) throw std::invalid_argument("basis transform is not unitary");
}

/// Re-expresses the state in the new basis: new mode operators are T applied to the old ones.
inline PolarizationState transform_state(const PolarizationState& s, const BasisTransform& t) {
  require_unitary(t);
  const auto& m = t.matrix();
  PolarizationState r;
  r.A = std::conj(m[0][0]) * s.A + std::conj(m[0][1]) * s.B;
  r.B = std::conj(m[1][0]) * s.A + std::conj(m[1][1]) * s.B;
  r.C = s.C;
  if (t.label() == "rotated" || t.label() == "rotated^-1") {
    r.basis = s.basis;
    r.basis_angle = s.basis_angle + t.angle();
  } else {
    r.basis = t.label();
    r.basis_angle = s.basis_angle;
  }
  return r;
}

/// Two-mode Fock state truncated at `max_photons` total photons; amp[p][q] on |p,q>.
struct FockState2 {
  std::size_t max_photons = 1;
  std::vector<std::vector<cplx>> amp;

  explicit FockState2(std::size_t n = 1) : max_photons(n), amp(n + 1, std::vector<cplx>(n + 1, cplx{})) {}
  cplx& at(std::size_t p, std::size_t q) { return amp[p][q]; }
  cplx at(std::size_t p, std::size_t q) const { return amp[p][q]; }
  /// Probability of finding exactly n photons.
  double sector_probability(std::size_t n) const {
    double s = 0.0;
    for (std::size_t p = 0; p <= std::min(n, max_photons); ++p)
      if (n - p <= max_photons) s += std::norm(amp[p][n - p]);
    return s;
  }
};

/// Expands each |p,q> into the new modes; never changes the photon number of a component.
inline FockState2 transform_fock(const FockState2& s, const BasisTransform& t) {
  require_unitary(t);
  const auto& m = t.matrix();
  const std::size_t N = s.max_photons;
  std::vector<double> fact(2 * N + 1, 1.0);
  for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
  auto binom = [&](std::size_t n, std::size_t k) { return fact[n] / (fact[k] * fact[n - k]); };
  auto ipow = [](cplx z, std::size_t e) {
    cplx r{1.0, 0.0};
    for (std::size_t i = 0; i < e; ++i) r *= z;
    return r;
  };
  // Old creation operators in terms of new ones: a1+ = conj(t11) b1+ + conj(t21) b2+,
  // a2+ = conj(t12) b1+ + conj(t22) b2+.
  const cplx u11 = std::conj(m[0][0]), u21 = std::conj(m[1][0]);
  const cplx u12 = std::conj(m[0][1]), u22 = std::conj(m[1][1]);
  FockState2 r(N);
  for (std::size_t p = 0; p <= N; ++p)
    for (std::size_t q = 0; p + q <= N; ++q) {
      const cplx a = s.at(p, q);
      if (a == cplx{}) continue;
      const double norm_in = 1.0 / std::sqrt(fact[p] * fact[q]);
      for (std::size_t k = 0; k <= p; ++k)
        for (std::size_t l = 0; l <= q; ++l) {
          const std::size_t n1 = p + q - k - l, n2 = k + l;
          const cplx c = binom(p, k) * binom(q, l) * ipow(u11, p - k) * ipow(u21, k) * ipow(u12, q - l) * ipow(u22, l);
          r.at(n1, n2) += a * norm_in * c * std::sqrt(fact[n1] * fact[n2]);
        }
    }
  return r;
}

inline FockState2 to_fock(const PolarizationState& s) {
  FockState2 f(1);
  f.at(0, 0) = s.C;
  f.at(1, 0) = s.A;
  f.at(0, 1) = s.B;
  return f;
}

struct ReflectedPolarization {
  PolarizationState state;     ///< emitter frame (e1, e2)
  double phi_prime = 0.0;      ///< orientation of the reflected field in the emitter frame
  bool elliptical = false;     ///< phi_prime is a major-axis orientation
  bool photon_lost = false;    ///< nothing is reflected
};

/**
 * Reflects a lab-frame (x, y) photon from a cavity whose emitter axes are rotated
 * by phi: e1 is scaled by R1, e2 is untouched, lost amplitude goes to vacuum.
 */
inline ReflectedPolarization reflect_polarization(const PolarizationState& incident, double phi, cplx R1) {
  if (std::abs(incident.norm() - 1.0) > 1e-9) throw std::invalid_argument("incident state must be normalized");
  PolarizationState e = transform_state(incident, BasisTransform::rotation(phi));
  e.basis = "emitter";
  ReflectedPolarization out;
  e.A *= R1;
  const double kept = std::norm(e.A) + std::norm(e.B);
  e.C = std::sqrt(std::max(0.0, 1.0 - kept));
  out.state = e;
  out.photon_lost = kept < 1e-24;
  out.elliptical = std::abs(R1.imag()) > 1e-12 * std::max(1.0, std::abs(R1));
  if (!out.elliptical && std::abs(incident.A.imag()) + std::abs(incident.B.imag()) == 0.0 &&
      incident.B == cplx{} && incident.A != cplx{})
    out.phi_prime = rotation_angle(phi, R1.real());
  else
    out.phi_prime = major_axis_angle(e.A, e.B);
  return out;
}

class EntangledOutput {
 public:
  EntangledOutput(cplx G, cplx D, PolarizationState bright, PolarizationState dark, double phi)
      : G_(G), D_(D), bright_(std::move(bright)), dark_(std::move(dark)) {
    const auto back = BasisTransform::rotation(phi).inverse();
    lab_bright_ = transform_state(bright_, back);
    lab_dark_ = transform_state(dark_, back);
    z_ = 0.5 * pi * (std::norm(G_) * lab_bright_.photon_probability() + std::norm(D_) * lab_dark_.photon_probability());
  }

  cplx G() const { return G_; }
  cplx D() const { return D_; }
  const PolarizationState& bright() const { return bright_; }
  const PolarizationState& dark() const { return dark_; }

  /// Density of detecting linear polarization at angle theta from the lab x axis,
  /// given that a photon is detected.
  double density(double theta) const {
    if (z_ == 0.0) return 0.0;
    const double c = std::cos(theta), s = std::sin(theta);
    return (std::norm(G_) * std::norm(lab_bright_.A * c + lab_bright_.B * s) +
            std::norm(D_) * std::norm(lab_dark_.A * c + lab_dark_.B * s)) /
           z_;
  }
  double operator()(double theta) const { return density(theta); }

  /// Overlap |<bright|dark>| of the photon parts, normalized.
  double branch_overlap() const {
    const double nb = bright_.photon_probability(), nd = dark_.photon_probability();
    if (nb == 0.0 || nd == 0.0) return 0.0;
    return std::abs(std::conj(bright_.A) * dark_.A + std::conj(bright_.B) * dark_.B) / std::sqrt(nb * nd);
  }
  /// The photon factorizes from the emitter qubit.
  bool separable(double tol = 1e-12) const { return std::abs(branch_overlap() - 1.0) <= tol || G_ == cplx{} || D_ == cplx{}; }

  void write_csv(std::ostream& os, std::size_t points = 181) const {
    os << "# theta in radians from the lab x axis\n";
    os << "theta,density\n";
    os.precision(17);
    for (std::size_t i = 0; i < points; ++i) {
      const double th = -0.5 * pi + pi * static_cast<double>(i) / static_cast<double>(points - 1);
      os << th << ',' << density(th) << '\n';
    }
  }

 private:
  cplx G_, D_;
  PolarizationState bright_, dark_, lab_bright_, lab_dark_;
  double z_ = 0.0;
};

/**
 * Photon with real emitter-frame components (c1, c2) reflected while the emitters
 * are in G|bright> + D|dark>.
 */
inline EntangledOutput reflect_superposition(double c1, double c2, double phi, cplx G, cplx D, cplx R_bright = 1.0,
                                             cplx R_dark = -1.0) {
  if (std::abs(std::norm(G) + std::norm(D) - 1.0) > 1e-12)
    throw std::invalid_argument("branch weights must satisfy |G|^2 + |D|^2 = 1");
  if (std::abs(c1 * c1 + c2 * c2 - 1.0) > 1e-12) throw std::invalid_argument("photon components must be normalized");
  auto branch = [&](cplx R) {
    PolarizationState s;
    s.A = R * c1;
    s.B = c2;
    s.C = std::sqrt(std::max(0.0, 1.0 - std::norm(s.A) - std::norm(s.B)));
    s.basis = "emitter";
    s.basis_angle = phi;
    return s;
  };
  return EntangledOutput(G, D, branch(R_bright), branch(R_dark), phi);
}

}  // namespace cavref
