#ifndef QUADMAP_MAPS_HPP
#define QUADMAP_MAPS_HPP

// Closed-form equivalence maps between the free particle and particles in
// quadratic potentials: harmonic traps (optionally laterally shifted),
// inverted oscillators, uniform acceleration, plus the thin-lens free-to-free
// map and the half-period extension of trap evolution beyond the principal
// branch of the tan-based time map.

#include <cmath>

#include "quadmap/core.hpp"

namespace quadmap {

// Evaluations closer than this to a branch edge of a tan/cos time map are
// rejected rather than extrapolated.
inline constexpr double branch_edge_tol = 1e-9;

// ---------------------------------------------------------------------------
// TrapParams

// Harmonic trap description. k is the spring-constant magnitude; the sign of
// the potential is chosen by the map applied (trapping vs inverted). b is the
// stretch parameter of the time map t = b tan(omega tau); splicing always
// uses the smooth choice b = 1/omega.
struct TrapParams {
  double k;
  double center = 0.0;
  double b;
  PhysicalParams params{};

  TrapParams(double k_, double center_, double b_,
             PhysicalParams pp = PhysicalParams{})
      : k(k_), center(center_), b(b_), params(pp) {
    params.validate();
    if (k_ == 0.0) throw ValidationError("TrapParams: k must be nonzero");
    if (!(b > 0.0)) throw ValidationError("TrapParams: b must be positive");
  }

  // Smooth choice b = 1/omega, identity map at the transition instant.
  static TrapParams smooth(double k, double center = 0.0,
                           PhysicalParams pp = PhysicalParams{}) {
    pp.validate();
    if (k == 0.0) throw ValidationError("TrapParams: k must be nonzero");
    const double omega = std::sqrt(std::abs(k) / pp.mass);
    return TrapParams(k, center, 1.0 / omega, pp);
  }

  double omega() const { return std::sqrt(std::abs(k) / params.mass); }
  bool smooth_choice() const { return std::abs(b * omega() - 1.0) <= 1e-12; }
  double half_period() const { return pi / omega(); }
};

namespace detail {

inline void require_smooth(const TrapParams& tp, const char* who) {
  if (!tp.smooth_choice())
    throw ValidationError(std::string(who) +
                          ": requires the smooth choice b = 1/omega (b*omega = " +
                          fmt_double(tp.b * tp.omega()) + ")");
}

// Principal branch of the trap time map: omega*tau in (-pi/2, pi/2), with a
// guard band near the edges where tan/cos blow up.
inline void check_principal_branch(double omega, double tau, const char* who) {
  const double u = omega * tau;
  if (!(pi / 2 - std::abs(u) >= branch_edge_tol))
    throw BranchError(std::string(who) + ": tau=" + fmt_double(tau) +
                      " outside the principal domain omega*tau in (-pi/2, pi/2)" +
                      " (omega=" + fmt_double(omega) + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CoordinateMap

struct TimeInterval {
  double lo;
  double hi;
};

// A transformation between equivalent systems as a first-class value:
// psi(xi, tau) = phi(position_map(xi,tau), time_map(tau)) / form_factor(xi,tau).
struct CoordinateMap {
  std::function<double(double xi, double tau)> position_map;
  std::function<double(double tau)> time_map;
  std::function<Complex(double xi, double tau)> form_factor;
  TimeInterval principal_domain{-INFINITY, INFINITY};
};

inline WaveEvaluator apply_map(const CoordinateMap& m, WaveEvaluator phi) {
  if (!phi) throw ValidationError("apply_map: empty evaluator");
  return [m, phi = std::move(phi)](double xi, double tau) {
    const double t = m.time_map(tau);  // throws BranchError off-domain
    return phi(m.position_map(xi, tau), t) / m.form_factor(xi, tau);
  };
}

// ---------------------------------------------------------------------------
// Free <-> trapped coordinates and form factor

// x = xi sqrt(b w) / cos(w tau),  t = b tan(w tau)  on the principal branch.
inline std::pair<double, double> coord_free_to_trapped(double xi, double tau,
                                                       const TrapParams& tp) {
  const double w = tp.omega();
  detail::check_principal_branch(w, tau, "coord_free_to_trapped");
  const double x = xi * std::sqrt(tp.b * w) / std::cos(w * tau);
  const double t = tp.b * std::tan(w * tau);
  return {x, t};
}

// Inverse pair: xi = x / (sqrt(b w) sqrt(1 + t^2/b^2)), tau = arctan(t/b)/w.
inline std::pair<double, double> coord_trapped_to_free(double x, double t,
                                                       const TrapParams& tp) {
  const double w = tp.omega();
  const double r = t / tp.b;
  const double xi = x / (std::sqrt(tp.b * w) * std::sqrt(1.0 + r * r));
  const double tau = std::atan(r) / w;
  return {xi, tau};
}

// f(x,t;b) = exp(i M t x^2 / (2 hbar (t^2+b^2))) / (1 + t^2/b^2)^(1/4).
// The modulus (1+t^2/b^2)^(-1/4) preserves the norm of the mapped state.
inline Complex form_factor_f(double x, double t, double b,
                             const PhysicalParams& params = PhysicalParams{}) {
  if (!(b > 0.0)) throw ValidationError("form_factor_f: b must be positive");
  const double phase = params.mass * t * x * x / (2.0 * params.hbar * (t * t + b * b));
  const double modulus = std::pow(1.0 + (t / b) * (t / b), 0.25);
  return std::polar(modulus, phase);
}

// ---------------------------------------------------------------------------
// Map factories

// Free -> harmonic trap with spring constant k = M w^2 centered at tp.center.
// A nonzero center requires the smooth choice: the shifted coordinate map
// drops sqrt(b w), and the +center compensation keeps outgoing and incoming
// waves matched at the transition while the dividing form factor stays
// unshifted.
inline CoordinateMap make_free_to_trapped_map(const TrapParams& tp) {
  if (!(tp.k > 0.0))
    throw ValidationError("make_free_to_trapped_map: k must be positive");
  if (tp.center != 0.0) detail::require_smooth(tp, "make_free_to_trapped_map");
  const double w = tp.omega();
  const double root_bw = std::sqrt(tp.b * w);
  const double c = tp.center;
  const double b = tp.b;
  const PhysicalParams pp = tp.params;

  CoordinateMap m;
  m.principal_domain = {-pi / (2 * w), pi / (2 * w)};
  m.time_map = [w, b](double tau) {
    detail::check_principal_branch(w, tau, "free_to_trapped");
    return b * std::tan(w * tau);
  };
  m.position_map = [w, c, root_bw](double xi, double tau) {
    return (xi - c) * root_bw / std::cos(w * tau) + c;
  };
  m.form_factor = [w, c, b, root_bw, pp](double xi, double tau) {
    const double x = (xi - c) * root_bw / std::cos(w * tau);
    return form_factor_f(x, b * std::tan(w * tau), b, pp);
  };
  return m;
}

// Free -> inverted oscillator, potential -(k/2)(xi-center)^2. Obtained from
// the trap map by omega -> i omega; defined for all real tau, the free time
// stays inside (-1/w, 1/w).
inline CoordinateMap make_free_to_inverted_map(const TrapParams& tp) {
  detail::require_smooth(tp, "make_free_to_inverted_map");
  const double w = tp.omega();
  const double c = tp.center;
  const double b = tp.b;
  const PhysicalParams pp = tp.params;

  CoordinateMap m;
  m.time_map = [w](double tau) { return std::tanh(w * tau) / w; };
  m.position_map = [w, c](double xi, double tau) {
    return (xi - c) / std::cosh(w * tau) + c;
  };
  m.form_factor = [w, c, b, pp](double xi, double tau) {
    const double x = (xi - c) / std::cosh(w * tau);
    return form_factor_f(x, std::tanh(w * tau) / w, b, pp);
  };
  return m;
}

// Unit-modulus form factor of the free-fall map,
//   g(x,t;a) = exp( i (M a t/hbar) (x - a t^2/3) ).
// Equivalently exp(i (M/hbar)(a t xi + a^2 t^3/6)) at xi = x - a t^2/2;
// direct substitution into the accelerated-frame Schroedinger equation
// confirms this phase.
inline Complex form_factor_g(double x, double t, double a,
                             const PhysicalParams& params = PhysicalParams{}) {
  const double phase = params.mass * a * t * (x - a * t * t / 3.0) / params.hbar;
  return std::polar(1.0, phase);
}

// Free -> uniformly accelerated particle, potential M a xi. Densities are
// rigidly translated free densities.
inline CoordinateMap make_free_to_falling_map(double a,
                                              const PhysicalParams& params = PhysicalParams{}) {
  params.validate();
  CoordinateMap m;
  m.time_map = [](double tau) { return tau; };
  m.position_map = [a](double xi, double tau) { return xi + 0.5 * a * tau * tau; };
  m.form_factor = [a, params](double xi, double tau) {
    return form_factor_g(xi + 0.5 * a * tau * tau, tau, a, params);
  };
  return m;
}

// Thin-lens free -> free map: at tau=0 it multiplies the state by the
// quadratic chirp exp(i M gamma xi^2 / (2 hbar)). Used to absorb residual
// quadratic phases when gluing branches.
inline CoordinateMap make_free_lens_map(double gamma,
                                        const PhysicalParams& params = PhysicalParams{}) {
  params.validate();
  CoordinateMap m;
  if (gamma > 0.0)
    m.principal_domain = {-1.0 / gamma, INFINITY};
  else if (gamma < 0.0)
    m.principal_domain = {-INFINITY, -1.0 / gamma};
  m.time_map = [gamma](double tau) {
    const double den = 1.0 + gamma * tau;
    if (!(den > branch_edge_tol))
      throw BranchError("free_lens: tau=" + detail::fmt_double(tau) +
                        " outside the principal domain 1 + gamma*tau > 0 (gamma=" +
                        detail::fmt_double(gamma) + ")");
    return tau / den;
  };
  m.position_map = [gamma](double xi, double tau) { return xi / (1.0 + gamma * tau); };
  m.form_factor = [gamma, params](double xi, double tau) {
    const double den = 1.0 + gamma * tau;
    const double phase = -params.mass * gamma * xi * xi / (2.0 * params.hbar * den);
    return std::polar(std::sqrt(den), phase);
  };
  return m;
}

// ---------------------------------------------------------------------------
// Wavefunction-level maps

inline WaveEvaluator map_free_to_trapped(WaveEvaluator phi, const TrapParams& tp) {
  return apply_map(make_free_to_trapped_map(tp), std::move(phi));
}

// Shifted-trap map for the potential (k/2)(xi - xi0)^2; at tau = 0 it equals
// inner(xi, 0) exactly.
inline WaveEvaluator apply_lateral_shift(WaveEvaluator inner, double xi0,
                                         const TrapParams& tp) {
  detail::require_smooth(tp, "apply_lateral_shift");
  TrapParams shifted = tp;
  shifted.center = xi0;
  return apply_map(make_free_to_trapped_map(shifted), std::move(inner));
}

inline WaveEvaluator map_free_to_inverted(WaveEvaluator phi, const TrapParams& tp) {
  return apply_map(make_free_to_inverted_map(tp), std::move(phi));
}

inline WaveEvaluator map_free_to_falling(WaveEvaluator phi, double a,
                                         const PhysicalParams& params = PhysicalParams{}) {
  return apply_map(make_free_to_falling_map(a, params), std::move(phi));
}

inline WaveEvaluator map_free_lens(WaveEvaluator phi, double gamma,
                                   const PhysicalParams& params = PhysicalParams{}) {
  return apply_map(make_free_lens_map(gamma, params), std::move(phi));
}

// Exact inverse of map_free_to_trapped: phi = psi * f, with the coordinates
// inverted. Defined for every real (x, t).
inline WaveEvaluator map_trapped_to_free(WaveEvaluator psi, const TrapParams& tp) {
  if (!psi) throw ValidationError("map_trapped_to_free: empty evaluator");
  if (!(tp.k > 0.0))
    throw ValidationError("map_trapped_to_free: k must be positive");
  if (tp.center != 0.0) detail::require_smooth(tp, "map_trapped_to_free");
  const double w = tp.omega();
  const double b = tp.b;
  const double c = tp.center;
  const double root_bw = std::sqrt(b * w);
  const PhysicalParams pp = tp.params;
  return [psi = std::move(psi), w, b, c, root_bw, pp](double x, double t) {
    const double r = t / b;
    const double xi = c + (x - c) / (root_bw * std::sqrt(1.0 + r * r));
    const double tau = std::atan(r) / w;
    return psi(xi, tau) * form_factor_f(x - c, t, b, pp);
  };
}

// Inverse of map_free_to_inverted; only free times |t| < 1/omega correspond
// to inverted-oscillator history.
inline WaveEvaluator map_inverted_to_free(WaveEvaluator psi, const TrapParams& tp) {
  if (!psi) throw ValidationError("map_inverted_to_free: empty evaluator");
  detail::require_smooth(tp, "map_inverted_to_free");
  const double w = tp.omega();
  const double c = tp.center;
  const double b = tp.b;
  const PhysicalParams pp = tp.params;
  return [psi = std::move(psi), w, c, b, pp](double x, double t) {
    const double s = w * t;
    if (!(1.0 - std::abs(s) >= branch_edge_tol))
      throw BranchError("map_inverted_to_free: t=" + detail::fmt_double(t) +
                        " outside the image |t| < 1/omega of the inverted time map");
    const double tau = std::atanh(s) / w;
    const double xi = c + (x - c) / std::sqrt(1.0 - s * s);
    return psi(xi, tau) * form_factor_f(x - c, t, b, pp);
  };
}

// Inverse of map_free_to_falling.
inline WaveEvaluator map_falling_to_free(WaveEvaluator psi, double a,
                                         const PhysicalParams& params = PhysicalParams{}) {
  if (!psi) throw ValidationError("map_falling_to_free: empty evaluator");
  params.validate();
  return [psi = std::move(psi), a, params](double x, double t) {
    return psi(x - 0.5 * a * t * t, t) * form_factor_g(x, t, a, params);
  };
}

// Composed trap(k) -> trap(K) map in closed form:
//   Xi = xi / sqrt(cos^2(W tau) + (k/K) sin^2(W tau)),
//   T  = arctan(sqrt(k/K) tan(W tau)) / w,
//   Psi = psi(Xi, T) * f(x,t;1/w) / f(x,t;1/W),    W = sqrt(K/M).
// Equals the composition through the free picture; both traps must use the
// smooth choice at the shared transition time.
inline WaveEvaluator map_trap_to_trap(WaveEvaluator psi, const TrapParams& from,
                                      const TrapParams& to) {
  if (!psi) throw ValidationError("map_trap_to_trap: empty evaluator");
  if (!(from.k > 0.0) || !(to.k > 0.0))
    throw ValidationError("map_trap_to_trap: both spring constants must be positive");
  detail::require_smooth(from, "map_trap_to_trap (source)");
  detail::require_smooth(to, "map_trap_to_trap (target)");
  if (from.center != to.center)
    throw ValidationError("map_trap_to_trap: traps must share a center; route "
                          "center changes through the free picture");
  const double w = from.omega();
  const double W = to.omega();
  const double ratio = from.k / to.k;  // = (w/W)^2
  const double c = from.center;
  const PhysicalParams pp = from.params;
  return [psi = std::move(psi), w, W, ratio, c, pp](double xi, double tau) {
    detail::check_principal_branch(W, tau, "map_trap_to_trap");
    const double cs = std::cos(W * tau);
    const double sn = std::sin(W * tau);
    const double stretch = std::sqrt(cs * cs + ratio * sn * sn);
    const double Xi = c + (xi - c) / stretch;
    const double T = std::atan(std::sqrt(ratio) * std::tan(W * tau)) / w;
    const double x = (xi - c) / cs;
    const double t = std::tan(W * tau) / W;
    return psi(Xi, T) * form_factor_f(x, t, 1.0 / w, pp) /
           form_factor_f(x, t, 1.0 / W, pp);
  };
}

// ---------------------------------------------------------------------------
// Half-period extension
//
// The tan-based time map only covers omega*tau in (-pi/2, pi/2); trap
// evolution continues past the branch with
//   psi(xi, tau + pi/omega) = exp(-i pi/2) * psi(2*center - xi, tau),
// the eigenstate phases exp(-i (n+1/2) pi) = (-1)^n exp(-i pi/2) combined
// with parity about the trap center. Validated against the reference
// propagator in the test suite.
inline WaveEvaluator extend_half_period(WaveEvaluator psi_principal,
                                        const TrapParams& tp) {
  if (!psi_principal)
    throw ValidationError("extend_half_period: empty evaluator");
  if (!(tp.k > 0.0))
    throw ValidationError("extend_half_period: k must be positive");
  const double w = tp.omega();
  const double c = tp.center;
  return [psi = std::move(psi_principal), w, c](double xi, double tau) {
    const double u = w * tau;
    const double m = std::floor((u + pi / 2) / pi);  // one-sided reduction
    const double u_red = u - m * pi;
    if (!(pi / 2 - std::abs(u_red) >= branch_edge_tol))
      throw BranchError("extend_half_period: tau=" + detail::fmt_double(tau) +
                        " reduces onto a branch edge (odd multiple of pi/(2*omega))");
    const long long mi = static_cast<long long>(m);
    static constexpr Complex quarter_phases[4] = {
        {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    const Complex phase = quarter_phases[((mi % 4) + 4) % 4];
    const double xi_eff = (mi % 2 != 0) ? 2.0 * c - xi : xi;
    return phase * psi(xi_eff, u_red / w);
  };
}

}  // namespace quadmap

#endif  // QUADMAP_MAPS_HPP
