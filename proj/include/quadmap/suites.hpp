#ifndef QUADMAP_SUITES_HPP
#define QUADMAP_SUITES_HPP

// Named verification suites behind `quadmap verify`: Schroedinger residuals
// of every mapped evaluator family, reference-propagator cross checks and
// self-validation, and transition-continuity sweeps over the figure presets.

#include "quadmap/scenario_io.hpp"

namespace quadmap {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::vector<std::pair<double, double>> probe_lattice(double x0, double x1,
                                                            int nx, double t0,
                                                            double t1, int nt) {
  std::vector<std::pair<double, double>> probes;
  probes.reserve(static_cast<std::size_t>(nx) * nt);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j)
      probes.emplace_back(x0 + (x1 - x0) * i / (nx - 1),
                          t0 + (t1 - t0) * j / (nt - 1));
  return probes;
}

// Normalized two-packet superposition used by the figure presets, as a plain
// free evaluator anchored at t = 0.
inline WaveEvaluator preset_packet(double p0, double sigma0) {
  const PhysicalParams pp{};
  auto plus = gaussian_evaluator(GaussianPacket(0.0, p0, sigma0, pp));
  auto minus = gaussian_evaluator(GaussianPacket(0.0, -p0, sigma0, pp));
  const Complex c{1.0 / std::sqrt(2.0), 0.0};
  return superpose({{c, plus}, {c, minus}});
}

inline CheckResult residual_check(const std::string& name, const WaveEvaluator& w,
                                  const PotentialSpec& pot,
                                  const std::vector<std::pair<double, double>>& probes) {
  const ResidualReport rep = schrodinger_residual(w, pot, probes, 1e-3);
  return CheckResult{name, rep.relative < 1e-4, rep.relative, 1e-4,
                     "relative FD residual on " + std::to_string(rep.probe_count) +
                         " probes"};
}

}  // namespace detail

// Relative Schroedinger residual < 1e-4 (FD step 1e-3) for each mapped
// evaluator family on a 21 x 11 probe lattice.
inline SuiteReport verify_residual_suite() {
  SuiteReport rep;
  const PhysicalParams pp{};

  {
    const auto phi = detail::preset_packet(4.0, 1.5);
    const auto tp = TrapParams::smooth(5.0, 0.0, pp);
    rep.checks.push_back(detail::residual_check(
        "residual/trapped-k5", map_free_to_trapped(phi, tp),
        HarmonicPotential{5.0, 0.0},
        detail::probe_lattice(-3.0, 3.0, 21, -0.55, 0.55, 11)));
  }
  {
    const auto phi = detail::preset_packet(2.0, 1.5);
    const auto tp = TrapParams::smooth(1.0, 0.0, pp);
    rep.checks.push_back(detail::residual_check(
        "residual/shifted-k1-xi2", apply_lateral_shift(phi, 2.0, tp),
        HarmonicPotential{1.0, 2.0},
        detail::probe_lattice(-1.0, 5.0, 21, -1.2, 1.2, 11)));
  }
  {
    const auto phi = detail::preset_packet(2.0, 1.5);
    const auto tp = TrapParams::smooth(1.0, 2.0, pp);
    rep.checks.push_back(detail::residual_check(
        "residual/inverted-k1-xi2", map_free_to_inverted(phi, tp),
        InvertedPotential{1.0, 2.0},
        detail::probe_lattice(-4.0, 5.0, 21, 0.0, 1.4, 11)));
  }
  {
    const auto phi = gaussian_evaluator(GaussianPacket(0.0, 1.0, 1.0, pp));
    rep.checks.push_back(detail::residual_check(
        "residual/falling-a2", map_free_to_falling(phi, 2.0, pp),
        GravityPotential{2.0},
        detail::probe_lattice(-5.0, 3.0, 21, 0.0, 1.4, 11)));
  }
  {
    const auto phi = detail::preset_packet(2.0, 1.5);
    const auto m = make_general_map(builtin_profile(BuiltinProfile::A1), 0.0, pp,
                                    {-0.4, 1.5});
    rep.checks.push_back(detail::residual_check(
        "residual/general-A1", map_free_to_general(phi, m),
        GeneralQuadraticPotential{m},
        detail::probe_lattice(-4.0, 4.0, 21, 0.0, 1.2, 11)));
  }
  {
    const auto phi = detail::preset_packet(2.0, 1.5);
    const auto m = make_general_map(builtin_profile(BuiltinProfile::A2), 0.0, pp,
                                    {-0.4, 1.6});
    rep.checks.push_back(detail::residual_check(
        "residual/general-A2", map_free_to_general(phi, m),
        GeneralQuadraticPotential{m},
        detail::probe_lattice(-4.0, 4.0, 21, 0.0, 1.2, 11)));
  }
  return rep;
}

// Reference-propagator suite: map-vs-oracle on the first figure scenario,
// measured second-order convergence, and per-step unitarity.
inline SuiteReport verify_oracle_suite() {
  SuiteReport rep;
  const PhysicalParams pp{};

  {
    // Captured two-packet state propagated to a quarter period.
    const RuntimeScenario rt = build_runtime(figure_preset("fig1"));
    const WaveEvaluator psi = build_timeline(rt.scenario, pp);
    const double quarter = 2.0 * pi / std::sqrt(5.0) / 4.0;
    const double dt = 1e-4;
    const long long steps = std::llround((quarter - 1e-5) / dt);
    const double t_probe = static_cast<double>(steps) * dt;

    std::vector<Complex> init = sample_on_grid(psi, rt.grid, 0.0);
    const auto v_of_t = scenario_potential(rt.scenario, pp);
    OracleRunStats stats;
    const std::vector<Complex> prop = oracle_propagate(
        std::move(init), v_of_t, OracleConfig{rt.grid, dt}, 0.0, t_probe, pp,
        &stats);
    const std::vector<Complex> mapped = sample_on_grid(psi, rt.grid, t_probe);
    const double dist = l2_distance(mapped, prop, rt.grid.dx());
    rep.checks.push_back(CheckResult{"oracle/fig1-quarter-period", dist < 1e-3,
                                     dist, 1e-3,
                                     "L2(map, reference) at t=" +
                                         detail::fmt_double(t_probe)});
    rep.checks.push_back(CheckResult{"oracle/unitarity-drift",
                                     stats.max_step_norm_drift < 1e-12,
                                     stats.max_step_norm_drift, 1e-12,
                                     "max per-step discrete norm drift"});
  }
  {
    // Convergence order against the analytic free Gaussian.
    const GaussianPacket pkt(0.0, 2.0, 1.0, pp);
    const Grid g(-12.0, 12.0, 8192);
    const double t_final = 0.8;
    auto free_v = [](double, double) { return 0.0; };
    auto error_at = [&](double dt) {
      std::vector<Complex> init = sample_on_grid(gaussian_evaluator(pkt), g, 0.0);
      const std::vector<Complex> prop =
          oracle_propagate(std::move(init), free_v, OracleConfig{g, dt}, 0.0,
                           t_final, pp);
      const std::vector<Complex> exact =
          sample_on_grid(gaussian_evaluator(pkt), g, t_final);
      return l2_distance(prop, exact, g.dx());
    };
    const double e1 = error_at(0.04);
    const double e2 = error_at(0.02);
    const double factor = e1 / e2;
    rep.checks.push_back(CheckResult{
        "oracle/convergence-order", std::abs(factor - 4.0) < 0.5, factor, 4.0,
        "error ratio under dt halving (expect 4 +- 0.5)"});
  }
  return rep;
}

// Sup-norm wavefunction mismatch across every transition of every figure
// preset, on the preset grid.
inline SuiteReport verify_continuity_suite() {
  SuiteReport rep;
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "fig5"}) {
    const RuntimeScenario rt = build_runtime(figure_preset(name));
    double worst = 0.0;
    for (int i = 1; i < static_cast<int>(rt.scenario.segments.size()); ++i)
      worst = std::max(worst, transition_mismatch(rt.scenario, i, rt.grid,
                                                  rt.file.params));
    rep.checks.push_back(CheckResult{std::string("continuity/") + name,
                                     worst < 1e-12, worst, 1e-12,
                                     "sup |psi_left - psi_right| over grid"});
  }
  return rep;
}

inline SuiteReport run_verify_suite(const std::string& which) {
  SuiteReport rep;
  auto append = [&](const SuiteReport& r) {
    rep.checks.insert(rep.checks.end(), r.checks.begin(), r.checks.end());
  };
  if (which == "residual")
    append(verify_residual_suite());
  else if (which == "oracle")
    append(verify_oracle_suite());
  else if (which == "continuity")
    append(verify_continuity_suite());
  else if (which == "all") {
    append(verify_residual_suite());
    append(verify_oracle_suite());
    append(verify_continuity_suite());
  } else {
    throw ValidationError("unknown verify suite '" + which +
                          "'; available: residual oracle continuity all");
  }
  return rep;
}

}  // namespace quadmap

#endif  // QUADMAP_SUITES_HPP
