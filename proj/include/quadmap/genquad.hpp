#ifndef QUADMAP_GENQUAD_HPP
#define QUADMAP_GENQUAD_HPP

// General time-dependent quadratic machinery: maps built from user-supplied
// profiles A(tau), B(tau), Xi0(tau) with X = A xi + B and T = integral of A^2,
// the phase condition that cancels the momentum-operator term, the generated
// potential, and the two built-in profiles A1/A2.

#include <algorithm>
#include <memory>
#include <vector>

#include "quadmap/core.hpp"
#include "quadmap/maps.hpp"

namespace quadmap {

// ---------------------------------------------------------------------------
// ProfileCurve

// Scalar profile with first and second derivatives. Derivatives may be
// analytic or generated by central differences. First differences use step
// 1e-6; second differences use a wider 1e-4 step to stay above rounding
// noise.
struct ProfileCurve {
  std::function<double(double)> value;
  std::function<double(double)> first_derivative;
  std::function<double(double)> second_derivative;

  static ProfileCurve analytic(std::function<double(double)> v,
                               std::function<double(double)> d1,
                               std::function<double(double)> d2) {
    return ProfileCurve{std::move(v), std::move(d1), std::move(d2)};
  }

  static ProfileCurve numeric(std::function<double(double)> v) {
    auto d1 = [v](double tau) {
      const double h = 1e-6;
      return (v(tau + h) - v(tau - h)) / (2.0 * h);
    };
    auto d2 = [v](double tau) {
      const double h = 1e-4;
      return (v(tau + h) - 2.0 * v(tau) + v(tau - h)) / (h * h);
    };
    return ProfileCurve{std::move(v), std::move(d1), std::move(d2)};
  }

  static ProfileCurve constant(double c) {
    return ProfileCurve{[c](double) { return c; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }};
  }
};

// ---------------------------------------------------------------------------
// Built-in profiles
//
//   A1(tau) = exp(tau^4/8 + tau^2/4)
//   A2(tau) = exp((tau-1)^4/8 + (tau-1)^2/4 - 3/8)
//
// Both equal 1 at tau = 0, as the smooth-linkage condition requires.
enum class BuiltinProfile { A1, A2 };

inline ProfileCurve builtin_profile(BuiltinProfile name) {
  const double shift = (name == BuiltinProfile::A1) ? 0.0 : 1.0;
  const double offset = (name == BuiltinProfile::A1) ? 0.0 : -3.0 / 8.0;
  auto alpha = [shift, offset](double tau) {
    const double s = tau - shift;
    return s * s * s * s / 8.0 + s * s / 4.0 + offset;
  };
  auto alpha1 = [shift](double tau) {
    const double s = tau - shift;
    return s * s * s / 2.0 + s / 2.0;
  };
  auto alpha2 = [shift](double tau) {
    const double s = tau - shift;
    return 1.5 * s * s + 0.5;
  };
  return ProfileCurve::analytic(
      [alpha](double tau) { return std::exp(alpha(tau)); },
      [alpha, alpha1](double tau) { return alpha1(tau) * std::exp(alpha(tau)); },
      [alpha, alpha1, alpha2](double tau) {
        const double a1 = alpha1(tau);
        return (alpha2(tau) + a1 * a1) * std::exp(alpha(tau));
      });
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fm = f(0.5 * (a + b));
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GeneralQuadraticMap

// Map defined by X(xi,tau) = A(tau) xi + B(tau) and T(tau) = int_tau0 A^2.
// T is cached on a dense lattice over the declared window (cumulative
// adaptive Simpson, relative tolerance 1e-10) and interpolated with cubic
// Hermite segments whose end derivatives A^2 are exact, so the interpolant
// is monotone.
class GeneralQuadraticMap {
 public:
  GeneralQuadraticMap(ProfileCurve A, ProfileCurve B, ProfileCurve Xi0,
                      double tau0, PhysicalParams params, TimeInterval window)
      : A_(std::move(A)),
        B_(std::move(B)),
        Xi0_(std::move(Xi0)),
        tau0_(tau0),
        params_(params),
        window_(window) {
    params_.validate();
    if (!(window_.lo < window_.hi))
      throw ValidationError("GeneralQuadraticMap: empty tau window");
    if (!(tau0_ >= window_.lo && tau0_ <= window_.hi))
      throw ValidationError("GeneralQuadraticMap: tau0 outside the window");
    const double a0 = A_.value(tau0_);
    if (std::abs(a0 - 1.0) > 1e-9)
      throw ValidationError("GeneralQuadraticMap: smooth linkage requires "
                            "A(tau0) = 1, got A(tau0) = " +
                            detail::fmt_double(a0));
    build_cache();
  }

  const ProfileCurve& A() const { return A_; }
  const ProfileCurve& B() const { return B_; }
  const ProfileCurve& Xi0() const { return Xi0_; }
  double tau0() const { return tau0_; }
  const PhysicalParams& params() const { return params_; }
  const TimeInterval& window() const { return window_; }

  void check_window(double tau, const char* who) const {
    if (!(tau >= window_.lo && tau <= window_.hi))
      throw BranchError(std::string(who) + ": tau=" + detail::fmt_double(tau) +
                        " outside the map window [" +
                        detail::fmt_double(window_.lo) + ", " +
                        detail::fmt_double(window_.hi) + "]");
  }

  // T(tau), strictly increasing, T(tau0) = 0.
  double time_map(double tau) const {
    check_window(tau, "time_map");
    const auto& c = *cache_;
    const double pos = (tau - c.lo) / c.dx;
    int i = static_cast<int>(std::floor(pos));
    i = std::clamp(i, 0, static_cast<int>(c.value.size()) - 2);
    const double x0 = c.lo + i * c.dx;
    const double s = (tau - x0) / c.dx;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * c.value[i] + h10 * c.dx * c.deriv[i] + h01 * c.value[i + 1] +
           h11 * c.dx * c.deriv[i + 1];
  }

  // tau with time_map(tau) = t, by safeguarded Newton on the cached map.
  double invert_time_map(double t) const {
    const auto& c = *cache_;
    if (!(t >= c.value.front() && t <= c.value.back()))
      throw BranchError("invert_time_map: t=" + detail::fmt_double(t) +
                        " outside the image [" + detail::fmt_double(c.value.front()) +
                        ", " + detail::fmt_double(c.value.back()) + "] of the time map");
    auto it = std::upper_bound(c.value.begin(), c.value.end(), t);
    int i = std::clamp(static_cast<int>(it - c.value.begin()) - 1, 0,
                       static_cast<int>(c.value.size()) - 2);
    double lo = c.lo + i * c.dx;
    double hi = lo + c.dx;
    double tau = 0.5 * (lo + hi);
    for (int iter = 0; iter < 60; ++iter) {
      const double err = time_map(tau) - t;
      if (err > 0)
        hi = tau;
      else
        lo = tau;
      const double slope = c.deriv[std::clamp(
          static_cast<int>((tau - c.lo) / c.dx), 0,
          static_cast<int>(c.deriv.size()) - 1)];
      double next = tau - err / std::max(slope, 1e-300);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - tau) <= 1e-15 * std::max(1.0, std::abs(tau))) return next;
      tau = next;
    }
    return tau;
  }

 private:
  struct TCache {
    double lo, hi, dx;
    std::vector<double> value;  // T at nodes
    std::vector<double> deriv;  // A^2 at nodes
  };

  void build_cache() {
    auto cache = std::make_shared<TCache>();
    const double span = window_.hi - window_.lo;
    const int intervals = std::clamp(static_cast<int>(span / 1e-3) + 1, 512, 65536);
    cache->lo = window_.lo;
    cache->hi = window_.hi;
    cache->dx = span / intervals;
    cache->value.resize(intervals + 1);
    cache->deriv.resize(intervals + 1);

    auto a_sq = [this](double tau) {
      const double a = A_.value(tau);
      return a * a;
    };
    for (int i = 0; i <= intervals; ++i) {
      const double tau = cache->lo + i * cache->dx;
      const double a = A_.value(tau);
      if (!std::isfinite(a) || !(a > 0.0))
        throw ValidationError("GeneralQuadraticMap: A(tau) must be finite and "
                              "positive on the window; A(" +
                              detail::fmt_double(tau) + ") = " +
                              detail::fmt_double(a));
      cache->deriv[i] = a * a;
    }
    double acc = 0.0;
    cache->value[0] = 0.0;
    for (int i = 1; i <= intervals; ++i) {
      const double a = cache->lo + (i - 1) * cache->dx;
      const double b = cache->lo + i * cache->dx;
      const double piece = detail::adaptive_simpson(a_sq, a, b,
                                                    1e-10 * std::max(1.0, std::abs(acc)) / intervals);
      acc += piece;
      cache->value[i] = acc;
      if (!std::isfinite(acc))
        throw ValidationError("GeneralQuadraticMap: integral of A^2 is not "
                              "finite on the window");
    }
    // Shift so that T(tau0) = 0 exactly.
    const int j = std::clamp(static_cast<int>((tau0_ - cache->lo) / cache->dx),
                             0, intervals);
    const double node_j = cache->lo + j * cache->dx;
    const double t0 =
        cache->value[j] + detail::adaptive_simpson(a_sq, node_j, tau0_, 1e-14);
    for (auto& v : cache->value) v -= t0;
    cache_ = std::move(cache);
  }

  ProfileCurve A_, B_, Xi0_;
  double tau0_;
  PhysicalParams params_;
  TimeInterval window_;
  std::shared_ptr<const TCache> cache_;
};

inline GeneralQuadraticMap make_general_map(ProfileCurve A, double tau0,
                                            PhysicalParams params,
                                            TimeInterval window) {
  return GeneralQuadraticMap(std::move(A), ProfileCurve::constant(0.0),
                             ProfileCurve::constant(0.0), tau0, params, window);
}

// ---------------------------------------------------------------------------
// Operations

inline double time_map_T(const GeneralQuadraticMap& m, double tau) {
  return m.time_map(tau);
}

// Real phase epsilon with
//   epsilon(xi,tau) = (M / (hbar A)) * [ A' xi^2/2 + B' xi + Xi0(tau) ].
// The quadratic and linear parts are the tau-derivative of X-bracket terms;
// Xi0 enters by value (its antiderivative never appears anywhere else).
// This choice cancels the mixed first-derivative (momentum) term exactly.
inline double epsilon_phase(const GeneralQuadraticMap& m, double xi, double tau) {
  m.check_window(tau, "epsilon_phase");
  const double a = m.A().value(tau);
  if (!(a > 0.0))
    throw ValidationError("epsilon_phase: A(tau) must be positive");
  const double a1 = m.A().first_derivative(tau);
  const double b1 = m.B().first_derivative(tau);
  const double x0 = m.Xi0().value(tau);
  const double mass = m.params().mass;
  const double hbar = m.params().hbar;
  return mass / (hbar * a) * (0.5 * a1 * xi * xi + b1 * xi + x0);
}

// Generated potential:
//   V = (xi^2/2)(M/A^2)[A A'' - 2 A'^2]
//     + xi M [B''/A - 2 B' A'/A^2]
//     + M [ d/dtau (Xi0/A) - B'^2/(2 A^2) ].
// The constant bracket is the exact partner of epsilon_phase; for A == 1 it
// reduces to M [Xi0' - B'^2/2].
inline double potential_V(const GeneralQuadraticMap& m, double xi, double tau) {
  m.check_window(tau, "potential_V");
  const double a = m.A().value(tau);
  if (!(a > 0.0)) throw ValidationError("potential_V: A(tau) must be positive");
  const double a1 = m.A().first_derivative(tau);
  const double a2 = m.A().second_derivative(tau);
  const double b1 = m.B().first_derivative(tau);
  const double b2 = m.B().second_derivative(tau);
  const double x0 = m.Xi0().value(tau);
  const double x1 = m.Xi0().first_derivative(tau);
  const double mass = m.params().mass;
  const double quad = 0.5 * mass / (a * a) * (a * a2 - 2.0 * a1 * a1);
  const double lin = mass * (b2 / a - 2.0 * b1 * a1 / (a * a));
  const double cst = mass * ((x1 * a - x0 * a1) / (a * a) - b1 * b1 / (2.0 * a * a));
  return quad * xi * xi + lin * xi + cst;
}

// Quadratic coefficient in the alpha = ln A form:
//   V_Q / xi^2 = (M/2) [alpha'' - alpha'^2].
// Positive means instantaneously attractive.
inline double quadratic_coefficient_VQ(const GeneralQuadraticMap& m, double tau) {
  m.check_window(tau, "quadratic_coefficient_VQ");
  const double a = m.A().value(tau);
  if (!(a > 0.0))
    throw ValidationError("quadratic_coefficient_VQ: requires A(tau) > 0");
  const double ap = m.A().first_derivative(tau) / a;
  const double app = m.A().second_derivative(tau) / a - ap * ap;
  return 0.5 * m.params().mass * (app - ap * ap);
}

// psi(xi,tau) = phi(A xi + B, T(tau)) * sqrt(A) * exp(-i epsilon).
inline WaveEvaluator map_free_to_general(WaveEvaluator phi,
                                         const GeneralQuadraticMap& m) {
  if (!phi) throw ValidationError("map_free_to_general: empty evaluator");
  return [phi = std::move(phi), m](double xi, double tau) {
    m.check_window(tau, "map_free_to_general");
    const double a = m.A().value(tau);
    const double x = a * xi + m.B().value(tau);
    const double t = m.time_map(tau);
    const double eps = epsilon_phase(m, xi, tau);
    return phi(x, t) * std::sqrt(a) * std::exp(-imag_unit * eps);
  };
}

// Inverse of map_free_to_general on the image of the time map.
inline WaveEvaluator map_general_to_free(WaveEvaluator psi,
                                         const GeneralQuadraticMap& m) {
  if (!psi) throw ValidationError("map_general_to_free: empty evaluator");
  return [psi = std::move(psi), m](double x, double t) {
    const double tau = m.invert_time_map(t);
    const double a = m.A().value(tau);
    const double xi = (x - m.B().value(tau)) / a;
    const double eps = epsilon_phase(m, xi, tau);
    return psi(xi, tau) * std::exp(imag_unit * eps) / std::sqrt(a);
  };
}

// ---------------------------------------------------------------------------
// Gluing gauge
//
// A(tau0) = 1 alone leaves the residual quadratic phase
// exp(-i M alpha'(tau0) xi^2 / (2 hbar)) at the transition when
// alpha'(tau0) != 0 (the A2 profile). Composing with the thin-lens map of
// gamma = alpha'(tau0) is a gauge transformation that generates the same
// potential but has form factor exactly 1 at tau0:
//   A~ = A / (1 + gamma T),  B~ = B / (1 + gamma T),  T~ = T / (1 + gamma T).
// The reanchored map's window is clipped to 1 + gamma T > 0.
inline GeneralQuadraticMap reanchor_for_gluing(const GeneralQuadraticMap& m) {
  const double gamma = m.A().first_derivative(m.tau0()) / m.A().value(m.tau0());
  if (std::abs(gamma) < 1e-12) return m;

  auto inner = std::make_shared<GeneralQuadraticMap>(m);
  auto den = [inner, gamma](double tau) {
    return 1.0 + gamma * inner->time_map(tau);
  };

  // Clip the window before 1 + gamma T reaches zero.
  TimeInterval w = m.window();
  const double den_lo = 1.0 + gamma * m.time_map(w.lo);
  const double den_hi = 1.0 + gamma * m.time_map(w.hi);
  const double eps = 1e-6;
  if (den_hi <= eps) {
    const double t_edge = (eps - 1.0) / gamma;
    w.hi = m.invert_time_map(t_edge);
  }
  if (den_lo <= eps) {
    const double t_edge = (eps - 1.0) / gamma;
    w.lo = m.invert_time_map(t_edge);
  }

  auto a_val = [inner, den](double tau) { return inner->A().value(tau) / den(tau); };
  auto alpha1 = [inner, den, gamma](double tau) {
    const double a = inner->A().value(tau);
    return inner->A().first_derivative(tau) / a - gamma * a * a / den(tau);
  };
  auto a_d1 = [a_val, alpha1](double tau) { return alpha1(tau) * a_val(tau); };
  auto a_d2 = [inner, den, gamma, a_val, alpha1](double tau) {
    const double a = inner->A().value(tau);
    const double a1 = inner->A().first_derivative(tau);
    const double a2 = inner->A().second_derivative(tau);
    const double ap = a1 / a;
    const double app = a2 / a - ap * ap;
    const double d = den(tau);
    const double alpha2 = app - 2.0 * gamma * a * a1 / d +
                          gamma * gamma * a * a * a * a / (d * d);
    const double al1 = alpha1(tau);
    return (alpha2 + al1 * al1) * a_val(tau);
  };

  auto b_val = [inner, den](double tau) { return inner->B().value(tau) / den(tau); };
  auto b_d1 = [inner, den, gamma](double tau) {
    const double d = den(tau);
    const double a = inner->A().value(tau);
    return inner->B().first_derivative(tau) / d -
           gamma * a * a * inner->B().value(tau) / (d * d);
  };
  auto b_d2 = [inner, den, gamma](double tau) {
    const double d = den(tau);
    const double a = inner->A().value(tau);
    const double a1 = inner->A().first_derivative(tau);
    const double b = inner->B().value(tau);
    const double b1 = inner->B().first_derivative(tau);
    const double b2 = inner->B().second_derivative(tau);
    return b2 / d - 2.0 * gamma * a * a * b1 / (d * d) -
           2.0 * gamma * a * a1 * b / (d * d) +
           2.0 * gamma * gamma * a * a * a * a * b / (d * d * d);
  };

  auto xi0_val = [inner, den, gamma](double tau) {
    const double d = den(tau);
    const double a = inner->A().value(tau);
    const double b = inner->B().value(tau);
    return inner->Xi0().value(tau) / d - 0.5 * gamma * a * b * b / (d * d);
  };

  return GeneralQuadraticMap(
      ProfileCurve::analytic(a_val, a_d1, a_d2),
      ProfileCurve::analytic(b_val, b_d1, b_d2),
      ProfileCurve::numeric(xi0_val), m.tau0(), m.params(), w);
}

}  // namespace quadmap

#endif  // QUADMAP_GENQUAD_HPP
