#ifndef QUADMAP_VERIFY_HPP
#define QUADMAP_VERIFY_HPP

// Independent verification machinery: finite-difference Schroedinger
// residuals, a unitary implicit-trapezoidal (Cayley / Crank-Nicolson)
// reference propagator with hard-wall boundaries, quadrature observables and
// classical-correspondence checks.

#include <map>
#include <vector>

#include "quadmap/core.hpp"
#include "quadmap/potential.hpp"
#include "quadmap/timeline.hpp"

namespace quadmap {

// ---------------------------------------------------------------------------
// Schroedinger residual

struct ResidualReport {
  double max_abs_residual = 0.0;
  double max_abs_psi = 0.0;
  double relative = 0.0;
  int probe_count = 0;
};

namespace detail {

// Residual of [-hbar^2/(2M) d2/dx2 - i hbar d/dt + V] w at one probe,
// fourth-order central stencils in both x and t.
inline Complex residual_at(const WaveEvaluator& w, const PotentialSpec& potential,
                           double x, double t, double h,
                           const PhysicalParams& params) {
  const Complex w0 = w(x, t);
  const Complex d2x = (-w(x + 2 * h, t) + 16.0 * w(x + h, t) - 30.0 * w0 +
                       16.0 * w(x - h, t) - w(x - 2 * h, t)) /
                      (12.0 * h * h);
  const Complex dt = (-w(x, t + 2 * h) + 8.0 * w(x, t + h) - 8.0 * w(x, t - h) +
                      w(x, t - 2 * h)) /
                     (12.0 * h);
  const double v = potential_value(potential, x, t, params);
  return -(params.hbar * params.hbar / (2.0 * params.mass)) * d2x -
         imag_unit * params.hbar * dt + v * w0;
}

}  // namespace detail

// Applies the Schroedinger operator of `potential` by central differences at
// each probe. A Richardson sanity pass re-evaluates the worst probe at h/2;
// residuals above the rounding floor must shrink consistently with a
// truncation-dominated stencil (factor <= 40), otherwise the step h has left
// the trustworthy regime.
inline ResidualReport schrodinger_residual(
    const WaveEvaluator& w, const PotentialSpec& potential,
    const std::vector<std::pair<double, double>>& probes, double h,
    const PhysicalParams& params = PhysicalParams{}) {
  if (!w) throw ValidationError("schrodinger_residual: empty evaluator");
  if (probes.empty())
    throw ValidationError("schrodinger_residual: no probes given");
  if (!(h > 0.0)) throw ValidationError("schrodinger_residual: h must be > 0");

  ResidualReport rep;
  rep.probe_count = static_cast<int>(probes.size());
  double worst_x = probes.front().first;
  double worst_t = probes.front().second;
  for (const auto& [x, t] : probes) {
    const Complex r = detail::residual_at(w, potential, x, t, h, params);
    const double ra = std::abs(r);
    if (ra >= rep.max_abs_residual) {
      rep.max_abs_residual = ra;
      worst_x = x;
      worst_t = t;
    }
    rep.max_abs_psi = std::max(rep.max_abs_psi, std::abs(w(x, t)));
  }
  if (!(rep.max_abs_psi > 0.0))
    throw NumericsError("schrodinger_residual: evaluator vanishes on every probe");
  rep.relative = rep.max_abs_residual / rep.max_abs_psi;

  const double noise_floor = 1e-9 * rep.max_abs_psi;
  if (rep.max_abs_residual > noise_floor) {
    const double half = std::abs(
        detail::residual_at(w, potential, worst_x, worst_t, 0.5 * h, params));
    if (half > noise_floor) {
      const double ratio = std::max(rep.max_abs_residual / half,
                                    half / rep.max_abs_residual);
      if (ratio > 40.0)
        throw NumericsError(
            "schrodinger_residual: h and h/2 residuals differ by a factor " +
            detail::fmt_double(ratio) +
            "; step h=" + detail::fmt_double(h) +
            " is outside the truncation-dominated regime");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Reference propagator (Cayley form, hard walls)

enum class OracleScheme { ImplicitTrapezoidalUnitary };
enum class OracleBoundary { HardWall };

struct OracleConfig {
  Grid grid;
  double dt;
  OracleScheme scheme = OracleScheme::ImplicitTrapezoidalUnitary;
  OracleBoundary boundary = OracleBoundary::HardWall;

  void validate() const {
    if (!(dt > 0.0)) throw ValidationError("OracleConfig: dt must be positive");
  }
};

struct OracleRunStats {
  double max_step_norm_drift = 0.0;  // plain discrete norm, per step
  double max_boundary_density = 0.0;
  long long steps = 0;
};

// Propagates `initial` from t0 to t1 with the unitary scheme
//   (1 + i dt H/(2 hbar)) psi_{n+1} = (1 - i dt H/(2 hbar)) psi_n.
// The potential is sampled at the step midpoint to keep second order for
// time-dependent potentials. Hard walls pin the endpoint amplitudes to zero;
// the run aborts if density reaches the walls.
inline std::vector<Complex> oracle_propagate(
    std::vector<Complex> initial,
    const std::function<double(double, double)>& potential_of_t,
    const OracleConfig& cfg, double t0, double t1,
    const PhysicalParams& params = PhysicalParams{},
    OracleRunStats* stats = nullptr) {
  cfg.validate();
  params.validate();
  if (!potential_of_t)
    throw ValidationError("oracle_propagate: missing potential function");
  const int n = cfg.grid.n_points;
  if (static_cast<int>(initial.size()) != n)
    throw ValidationError("oracle_propagate: initial vector does not match grid");
  const double span = t1 - t0;
  if (span < 0.0)
    throw ValidationError("oracle_propagate: t1 must not precede t0");
  const double raw_steps = span / cfg.dt;
  const long long steps = static_cast<long long>(std::llround(raw_steps));
  if (std::abs(raw_steps - static_cast<double>(steps)) >
      1e-9 * std::max(1.0, raw_steps))
    throw ValidationError("oracle_propagate: (t1 - t0)/dt = " +
                          detail::fmt_double(raw_steps) + " is not an integer");

  std::vector<Complex>& psi = initial;
  psi.front() = 0.0;
  psi.back() = 0.0;
  if (steps == 0) {
    if (stats) stats->steps = 0;
    return psi;
  }

  const double dx = cfg.grid.dx();
  const double koff = -params.hbar * params.hbar / (2.0 * params.mass * dx * dx);
  const Complex lam = imag_unit * cfg.dt / (2.0 * params.hbar);
  const Complex off = lam * koff;

  std::vector<double> vdiag(n);
  std::vector<Complex> rhs(n), cprime(n), rprime(n);

  auto discrete_norm = [&]() {
    double acc = 0.0;
    for (const Complex& v : psi) acc += std::norm(v);
    return std::sqrt(acc * dx);
  };

  double norm_prev = discrete_norm();
  OracleRunStats local;
  for (long long step = 0; step < steps; ++step) {
    const double t_mid = t0 + (static_cast<double>(step) + 0.5) * cfg.dt;
    for (int j = 1; j < n - 1; ++j)
      vdiag[j] = -2.0 * koff + potential_of_t(cfg.grid.point(j), t_mid);

    for (int j = 1; j < n - 1; ++j) {
      const Complex hd = lam * vdiag[j];
      rhs[j] = (1.0 - hd) * psi[j] - off * (psi[j + 1] + psi[j - 1]);
      if (!std::isfinite(rhs[j].real()) || !std::isfinite(rhs[j].imag()))
        throw NumericsError("oracle_propagate: non-finite data at step " +
                            std::to_string(step) + " (check the potential)");
    }

    // Thomas sweep over interior nodes, constant off-diagonals.
    {
      const Complex d1 = 1.0 + lam * vdiag[1];
      cprime[1] = off / d1;
      rprime[1] = rhs[1] / d1;
      for (int j = 2; j < n - 1; ++j) {
        const Complex m = (1.0 + lam * vdiag[j]) - off * cprime[j - 1];
        cprime[j] = off / m;
        rprime[j] = (rhs[j] - off * rprime[j - 1]) / m;
      }
      psi[n - 2] = rprime[n - 2];
      for (int j = n - 3; j >= 1; --j) psi[j] = rprime[j] - cprime[j] * psi[j + 1];
    }

    const double norm_now = discrete_norm();
    local.max_step_norm_drift =
        std::max(local.max_step_norm_drift, std::abs(norm_now - norm_prev));
    norm_prev = norm_now;

    const double boundary =
        std::max(std::norm(psi[1]), std::norm(psi[n - 2]));
    local.max_boundary_density = std::max(local.max_boundary_density, boundary);
    if (boundary > 1e-8)
      throw NumericsError(
          "oracle_propagate: boundary density " + detail::fmt_double(boundary) +
          " exceeded 1e-8 at step " + std::to_string(step) +
          "; widen the window");
  }
  local.steps = steps;
  if (stats) *stats = local;
  return psi;
}

// ---------------------------------------------------------------------------
// Observables

struct Observables {
  double norm = 0.0;
  double mean_x = 0.0;
  double var_x = 0.0;
  double mean_p = 0.0;
  double kinetic = 0.0;
  double potential_energy = 0.0;
  double total = 0.0;
};

namespace detail {

inline void check_window_leak(const std::vector<Complex>& samples, double dx,
                              double norm2, const char* who) {
  const double edge_mass =
      (std::norm(samples.front()) + std::norm(samples.back())) * dx;
  if (edge_mass > 1e-6 * norm2)
    throw NumericsError(std::string(who) +
                        ": window too narrow, boundary density mass fraction " +
                        fmt_double(edge_mass / norm2) + " exceeds 1e-6");
}

}  // namespace detail

// Quadrature moments of the sampled state. Momentum and kinetic energy use
// fourth-order finite-difference derivatives of the samples; expectation
// values are normalized by the quadrature norm. v_at is the potential at the
// evaluation instant.
inline Observables observables(const WaveEvaluator& w, const Grid& g, double t,
                               const std::function<double(double)>& v_at,
                               const PhysicalParams& params = PhysicalParams{}) {
  const int n = g.n_points;
  if (n < 9) throw ValidationError("observables: grid too coarse");
  const std::vector<Complex> s = sample_on_grid(w, g, t);
  const double dx = g.dx();

  double norm2 = 0.0, mx = 0.0, pot = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double dens = std::norm(s[i]);
    norm2 += wgt * dens * dx;
    mx += wgt * g.point(i) * dens * dx;
    pot += wgt * v_at(g.point(i)) * dens * dx;
  }
  detail::check_window_leak(s, dx, norm2, "observables");
  mx /= norm2;

  double vx = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double u = g.point(i) - mx;
    vx += wgt * u * u * std::norm(s[i]) * dx;
  }
  vx /= norm2;

  // d/dx and d2/dx2 by 5-point stencils on the interior; the skipped edge
  // band carries negligible density (enforced by the leak guard).
  Complex mp = 0.0, kin = 0.0;
  for (int i = 2; i < n - 2; ++i) {
    const Complex d1 =
        (-s[i + 2] + 8.0 * s[i + 1] - 8.0 * s[i - 1] + s[i - 2]) / (12.0 * dx);
    const Complex d2 = (-s[i + 2] + 16.0 * s[i + 1] - 30.0 * s[i] +
                        16.0 * s[i - 1] - s[i - 2]) /
                       (12.0 * dx * dx);
    const Complex cbar = std::conj(s[i]);
    mp += cbar * (-imag_unit * params.hbar) * d1 * dx;
    kin += cbar * (-params.hbar * params.hbar / (2.0 * params.mass)) * d2 * dx;
  }

  Observables out;
  out.norm = std::sqrt(norm2);
  out.mean_x = mx;
  out.var_x = vx;
  out.mean_p = mp.real() / norm2;
  out.kinetic = kin.real() / norm2;
  out.potential_energy = pot / norm2;
  out.total = out.kinetic + out.potential_energy;
  return out;
}

inline Observables observables(const WaveEvaluator& w, const Grid& g, double t,
                               const PotentialSpec& potential,
                               const PhysicalParams& params = PhysicalParams{}) {
  return observables(
      w, g, t,
      [&](double x) { return potential_value(potential, x, t, params); }, params);
}

// ---------------------------------------------------------------------------
// Classical correspondence

// Compares <x>(t) of the scenario against the classical trajectory of the
// active potential, with constants fixed by the transition-time moments.
// Returns the maximum deviation over the requested times.
inline double ehrenfest_check(const Scenario& s, const Grid& g,
                              const std::vector<double>& times,
                              const PhysicalParams& params = PhysicalParams{}) {
  validate_scenario(s);
  if (times.empty()) throw ValidationError("ehrenfest_check: no times given");
  const WaveEvaluator psi = build_timeline(s, params);

  // Segment-start moments, computed on demand.
  std::map<std::size_t, std::pair<double, double>> anchors;
  auto anchor = [&](std::size_t idx) {
    auto it = anchors.find(idx);
    if (it != anchors.end()) return it->second;
    const Observables obs = observables(psi, g, s.segments[idx].start_time,
                                        s.segments[idx].potential, params);
    auto val = std::make_pair(obs.mean_x, obs.mean_p / params.mass);
    anchors.emplace(idx, val);
    return val;
  };

  double worst = 0.0;
  for (double t : times) {
    std::size_t idx = s.segments.size() - 1;
    while (idx > 0 && s.segments[idx].start_time > t) --idx;
    const auto [xc, vc] = anchor(idx);
    const double dt = t - s.segments[idx].start_time;

    const double classical = std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, FreePotential>) {
            return xc + vc * dt;
          } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
            const double w0 = std::sqrt(p.k / params.mass);
            return p.center + (xc - p.center) * std::cos(w0 * dt) +
                   vc / w0 * std::sin(w0 * dt);
          } else if constexpr (std::is_same_v<T, InvertedPotential>) {
            const double w0 = std::sqrt(p.k / params.mass);
            return p.center + (xc - p.center) * std::cosh(w0 * dt) +
                   vc / w0 * std::sinh(w0 * dt);
          } else if constexpr (std::is_same_v<T, GravityPotential>) {
            return xc + vc * dt - 0.5 * p.a * dt * dt;
          } else {
            throw ValidationError(
                "ehrenfest_check: no closed-form classical reference for "
                "general quadratic segments");
          }
        },
        s.segments[idx].potential);

    const Observables obs =
        observables(psi, g, t, s.segments[idx].potential, params);
    worst = std::max(worst, std::abs(obs.mean_x - classical));
  }
  return worst;
}

}  // namespace quadmap

#endif  // QUADMAP_VERIFY_HPP
