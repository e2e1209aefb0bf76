#ifndef QUADMAP_STATES_HPP
#define QUADMAP_STATES_HPP

// Closed-form free-particle wavefunctions and harmonic-oscillator
// eigenstates used to seed scenarios and to cross-check the maps.

#include <utility>
#include <vector>

#include "quadmap/core.hpp"

namespace quadmap {

// ---------------------------------------------------------------------------
// Freely dispersing Gaussian packet
//
//   phi(x,t) = (sqrt(pi) sigma(t))^(-1/2)
//              * exp[ i M v0 (x-x0) sigma0 / (hbar sigma(t)) ]
//              * exp[ -(x-x0)^2 / (2 sigma0 sigma(t))
//                     - i (M v0^2/2) t sigma0 / (hbar sigma(t)) ]
//   sigma(t) = sigma0 + i t hbar / (sigma0 M)
//
// The momentum phase carries +i so that <p> = +p0 and the density center
// moves as x0 + (p0/M) t. Solves the free Schroedinger equation exactly;
// unit L2 norm at every t.
struct GaussianPacket {
  double x0 = 0.0;      // center at t = 0
  double p0 = 0.0;      // mean momentum, p0 = M v0
  double sigma0 = 1.0;  // initial position spread
  PhysicalParams params{};

  GaussianPacket(double x0_, double p0_, double sigma0_,
                 PhysicalParams pp = PhysicalParams{})
      : x0(x0_), p0(p0_), sigma0(sigma0_), params(pp) {
    params.validate();
    if (!(sigma0 > 0.0))
      throw ValidationError("GaussianPacket: sigma0 must be positive");
  }

  // Complex spread sigma(t); Re sigma > 0, so principal square roots are safe.
  Complex sigma(double t) const {
    return Complex(sigma0, t * params.hbar / (sigma0 * params.mass));
  }
};

inline Complex gaussian_value(const GaussianPacket& pkt, double x, double t) {
  const double hbar = pkt.params.hbar;
  const double mass = pkt.params.mass;
  const double v0 = pkt.p0 / mass;
  const Complex sig = pkt.sigma(t);
  const double u = x - pkt.x0;

  const Complex prefactor = 1.0 / std::sqrt(std::sqrt(pi) * sig);
  const Complex exponent = imag_unit * (mass * v0 * u * pkt.sigma0 / (hbar * sig)) -
                           u * u / (2.0 * pkt.sigma0 * sig) -
                           imag_unit * (mass * v0 * v0 / 2.0) * (t * pkt.sigma0 / (hbar * sig));
  return prefactor * std::exp(exponent);
}

inline WaveEvaluator gaussian_evaluator(const GaussianPacket& pkt) {
  return [pkt](double x, double t) { return gaussian_value(pkt, x, t); };
}

// ---------------------------------------------------------------------------
// Superposition

// Pointwise linear combination; never renormalizes.
inline WaveEvaluator superpose(std::vector<std::pair<Complex, WaveEvaluator>> terms) {
  if (terms.empty()) throw ValidationError("superpose: empty term list");
  for (const auto& [c, w] : terms)
    if (!w) throw ValidationError("superpose: empty evaluator in term list");
  return [terms = std::move(terms)](double x, double t) {
    Complex acc = 0.0;
    for (const auto& [c, w] : terms) acc += c * w(x, t);
    return acc;
  };
}

// ---------------------------------------------------------------------------
// Harmonic-oscillator eigenstates (verification aid)

// Stationary states u_n(xi) exp(-i (n+1/2) omega tau). The Hermite part is
// evaluated through the weighted three-term recurrence on Hermite functions
// h_n = H_n(y) exp(-y^2/2) / sqrt(2^n n! sqrt(pi)), which stays bounded.
struct HOEigenstate {
  int n = 0;
  double omega = 1.0;
  double center = 0.0;
  PhysicalParams params{};

  static constexpr int max_level = 50;  // recurrence-stability bound

  HOEigenstate(int n_, double omega_, double center_ = 0.0,
               PhysicalParams pp = PhysicalParams{})
      : n(n_), omega(omega_), center(center_), params(pp) {
    params.validate();
    if (n < 0 || n > max_level)
      throw ValidationError("HOEigenstate: level n must be in [0, " +
                            std::to_string(max_level) + "]");
    if (!(omega > 0.0))
      throw ValidationError("HOEigenstate: omega must be positive");
  }
};

namespace detail {

// Weighted Hermite function h_n(y); h_0 = pi^(-1/4) exp(-y^2/2).
inline double hermite_function(int n, double y) {
  const double h0 = std::pow(pi, -0.25) * std::exp(-0.5 * y * y);
  if (n == 0) return h0;
  double hm1 = h0;
  double h = std::sqrt(2.0) * y * h0;
  for (int m = 1; m < n; ++m) {
    const double next =
        std::sqrt(2.0 / (m + 1.0)) * y * h - std::sqrt(m / (m + 1.0)) * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

}  // namespace detail

inline Complex ho_eigenstate_value(const HOEigenstate& e, double xi, double tau) {
  const double scale = std::sqrt(e.params.mass * e.omega / e.params.hbar);
  const double y = scale * (xi - e.center);
  const double amplitude = std::sqrt(scale) * detail::hermite_function(e.n, y);
  const double phase = -(e.n + 0.5) * e.omega * tau;
  return amplitude * std::exp(imag_unit * phase);
}

inline WaveEvaluator ho_eigenstate_evaluator(const HOEigenstate& e) {
  return [e](double xi, double tau) { return ho_eigenstate_value(e, xi, tau); };
}

}  // namespace quadmap

#endif  // QUADMAP_STATES_HPP
