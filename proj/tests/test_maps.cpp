#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "quadmap/maps.hpp"
#include "quadmap/states.hpp"

using namespace quadmap;

namespace {
const PhysicalParams pp{};

double sup_grid_diff(const WaveEvaluator& a, const WaveEvaluator& b,
                     const Grid& g, double ta, double tb) {
  double worst = 0.0;
  for (int i = 0; i < g.n_points; ++i)
    worst = std::max(worst, std::abs(a(g.point(i), ta) - b(g.point(i), tb)));
  return worst;
}
}  // namespace

TEST_CASE("coord_free_to_trapped: displayed values") {
  const TrapParams tp(1.0, 0.0, 1.0, pp);  // omega = 1, b = 1
  auto [x0, t0] = coord_free_to_trapped(1.0, 0.0, tp);
  CHECK(x0 == Catch::Approx(1.0));
  CHECK(t0 == Catch::Approx(0.0));
  auto [x1, t1] = coord_free_to_trapped(1.0, pi / 4, tp);
  CHECK(x1 == Catch::Approx(std::sqrt(2.0)));
  CHECK(t1 == Catch::Approx(1.0));

  const TrapParams smooth4 = TrapParams::smooth(4.0, 0.0, pp);  // omega=2, b=1/2
  CHECK(smooth4.b == Catch::Approx(0.5));
  auto [x2, t2] = coord_free_to_trapped(3.0, 0.0, smooth4);
  CHECK(x2 == Catch::Approx(3.0));
  CHECK(t2 == Catch::Approx(0.0));
}

TEST_CASE("coord_free_to_trapped: branch edge rejected with domain name") {
  const TrapParams tp(1.0, 0.0, 1.0, pp);
  try {
    coord_free_to_trapped(1.0, pi / 2, tp);
    FAIL("expected BranchError");
  } catch (const BranchError& e) {
    CHECK(std::string(e.what()).find("principal domain") != std::string::npos);
  }
  CHECK_THROWS_AS(coord_free_to_trapped(1.0, pi / 2 - 1e-12, tp), BranchError);
  CHECK_NOTHROW(coord_free_to_trapped(1.0, pi / 2 - 1e-6, tp));
}

TEST_CASE("coord_trapped_to_free: inverse values and round trip") {
  const TrapParams tp(1.0, 0.0, 1.0, pp);
  auto [xi, tau] = coord_trapped_to_free(std::sqrt(2.0), 1.0, tp);
  CHECK(xi == Catch::Approx(1.0));
  CHECK(tau == Catch::Approx(pi / 4));

  auto [xi0, tau0] = coord_trapped_to_free(0.7, 0.0, tp);
  CHECK(xi0 == Catch::Approx(0.7 / std::sqrt(tp.b * tp.omega())));
  CHECK(tau0 == 0.0);

  oracles::Rng rng;
  const TrapParams tp2(3.7, 0.0, 0.41, pp);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double xi_in = rng.uniform(-5, 5);
    const double tau_in = rng.uniform(-0.9, 0.9) * pi / (2 * tp2.omega());
    auto [x, t] = coord_free_to_trapped(xi_in, tau_in, tp2);
    auto [xi_out, tau_out] = coord_trapped_to_free(x, t, tp2);
    worst = std::max({worst, std::abs(xi_out - xi_in), std::abs(tau_out - tau_in)});
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("form_factor_f: modulus and phase") {
  CHECK(form_factor_f(2.4, 0.0, 1.3, pp) == Complex{1.0, 0.0});
  const Complex f = form_factor_f(1.0, 1.0, 1.0, pp);
  CHECK(std::abs(f) == Catch::Approx(std::pow(2.0, -0.25)));
  CHECK(std::arg(f) == Catch::Approx(0.25));
  CHECK_THROWS_AS(form_factor_f(1.0, 1.0, 0.0, pp), ValidationError);

  oracles::Rng rng;
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(-6, 6), b = rng.uniform(0.2, 3.0);
    const double x = rng.uniform(-4, 4);
    CHECK(std::abs(form_factor_f(x, t, b, pp)) ==
          Catch::Approx(std::pow(1.0 + t * t / (b * b), -0.25)));
  }
}

TEST_CASE("map_free_to_trapped: ground-width packet maps to stationary density") {
  const double k = 3.0;
  const TrapParams tp = TrapParams::smooth(k, 0.0, pp);
  const double sigma_match = std::sqrt(pp.hbar / (pp.mass * tp.omega()));
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 0.0, sigma_match));
  const auto psi = map_free_to_trapped(phi, tp);
  const Grid g(-6.0, 6.0, 801);
  const auto d0 = sample_on_grid(psi, g, 0.0);
  for (double tau : {0.3, 0.6}) {
    const auto dt = sample_on_grid(psi, g, tau);
    double worst = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
      const double rel = std::abs(std::norm(dt[i]) - std::norm(d0[i])) /
                         std::max(std::norm(d0[i]), 1e-30);
      if (std::norm(d0[i]) > 1e-12) worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("smooth linkage: every map is the identity at the transition instant") {
  const Grid g(-8.0, 8.0, 2001);
  const auto phi = oracles::two_packet_state(2.0, 1.5);

  const TrapParams trap = TrapParams::smooth(5.0, 0.0, pp);
  CHECK(sup_grid_diff(map_free_to_trapped(phi, trap), phi, g, 0.0, 0.0) < 1e-12);

  const TrapParams shifted = TrapParams::smooth(1.0, 2.0, pp);
  CHECK(sup_grid_diff(apply_lateral_shift(phi, 2.0, TrapParams::smooth(1.0, 0.0, pp)),
                      phi, g, 0.0, 0.0) < 1e-12);
  CHECK(sup_grid_diff(map_free_to_trapped(phi, shifted), phi, g, 0.0, 0.0) < 1e-12);

  const TrapParams inv = TrapParams::smooth(1.0, 2.0, pp);
  CHECK(sup_grid_diff(map_free_to_inverted(phi, inv), phi, g, 0.0, 0.0) < 1e-12);

  CHECK(sup_grid_diff(map_free_to_falling(phi, 2.0, pp), phi, g, 0.0, 0.0) < 1e-12);

  const auto psi = map_free_to_trapped(phi, trap);
  CHECK(sup_grid_diff(map_trap_to_trap(psi, trap, TrapParams::smooth(1.0, 0.0, pp)),
                      psi, g, 0.0, 0.0) < 1e-12);
}

TEST_CASE("map_trapped_to_free: exact inverse composition") {
  const TrapParams tp = TrapParams::smooth(5.0, 0.0, pp);
  const auto phi = oracles::two_packet_state(4.0, 1.5);
  const auto round = map_trapped_to_free(map_free_to_trapped(phi, tp), tp);
  oracles::Rng rng;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-5, 5);
    const double t = rng.uniform(-3, 3);
    worst = std::max(worst, std::abs(round(x, t) - phi(x, t)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("map_trapped_to_free: oscillator ground state releases to a Gaussian") {
  const double k = 2.0;
  const TrapParams tp = TrapParams::smooth(k, 0.0, pp);
  const auto ground = ho_eigenstate_evaluator(HOEigenstate(0, tp.omega()));
  const auto released = map_trapped_to_free(ground, tp);
  const double sigma_match = std::sqrt(pp.hbar / (pp.mass * tp.omega()));
  const auto reference = gaussian_evaluator(GaussianPacket(0.0, 0.0, sigma_match));
  oracles::Rng rng;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x = rng.uniform(-4, 4);
    const double t = rng.uniform(-4, 4);
    worst = std::max(worst, std::abs(released(x, t) - reference(x, t)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("map_trap_to_trap: identity at equal spring constants") {
  const TrapParams tp = TrapParams::smooth(2.0, 0.0, pp);
  const auto psi =
      map_free_to_trapped(gaussian_evaluator(GaussianPacket(0.0, 1.0, 1.0)), tp);
  const auto same = map_trap_to_trap(psi, tp, tp);
  oracles::Rng rng;
  for (int i = 0; i < 200; ++i) {
    const double xi = rng.uniform(-4, 4);
    const double tau = rng.uniform(-0.9, 0.9) * pi / (2 * tp.omega());
    CHECK(std::abs(same(xi, tau) - psi(xi, tau)) < 1e-12);
  }
}

TEST_CASE("map_trap_to_trap: there-and-back is the identity") {
  const TrapParams from = TrapParams::smooth(5.0, 0.0, pp);
  const TrapParams to = TrapParams::smooth(1.0, 0.0, pp);
  const auto psi = map_free_to_trapped(oracles::two_packet_state(4.0, 1.5), from);
  const auto back = map_trap_to_trap(map_trap_to_trap(psi, from, to), to, from);
  oracles::Rng rng;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double xi = rng.uniform(-3, 3);
    // Stay inside the principal branch of both traps along the chain.
    const double tau = rng.uniform(-0.9, 0.9) * pi / (2 * from.omega());
    worst = std::max(worst, std::abs(back(xi, tau) - psi(xi, tau)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("map_trap_to_trap: closed form equals the free-picture composition") {
  const TrapParams from = TrapParams::smooth(5.0, 0.0, pp);
  const TrapParams to = TrapParams::smooth(1.0, 0.0, pp);
  const auto psi = map_free_to_trapped(oracles::two_packet_state(4.0, 1.5), from);
  const auto direct = map_trap_to_trap(psi, from, to);
  const auto composed = map_free_to_trapped(map_trapped_to_free(psi, from), to);
  oracles::Rng rng;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double xi = rng.uniform(-3, 3);
    const double tau = rng.uniform(-0.9, 0.9) * pi / (2 * to.omega());
    worst = std::max(worst, std::abs(direct(xi, tau) - composed(xi, tau)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("apply_lateral_shift: zero shift is the plain map") {
  const TrapParams tp = TrapParams::smooth(1.0, 0.0, pp);
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 2.0, 1.5));
  const auto a = apply_lateral_shift(phi, 0.0, tp);
  const auto b = map_free_to_trapped(phi, tp);
  oracles::Rng rng;
  for (int i = 0; i < 200; ++i) {
    const double xi = rng.uniform(-4, 4), tau = rng.uniform(-1.4, 1.4);
    CHECK(std::abs(a(xi, tau) - b(xi, tau)) < 1e-14);
  }
  const TrapParams stiff(1.0, 0.0, 0.3, pp);  // b != 1/omega
  CHECK_THROWS_AS(apply_lateral_shift(phi, 1.0, stiff), ValidationError);
}

TEST_CASE("apply_lateral_shift: density at the transition equals the free density") {
  const TrapParams tp = TrapParams::smooth(1.0, 0.0, pp);
  const auto phi = oracles::two_packet_state(2.0, 1.5);
  const auto psi = apply_lateral_shift(phi, 2.0, tp);
  const Grid g(-10.0, 12.0, 2048);
  CHECK(sup_grid_diff(psi, phi, g, 0.0, 0.0) < 1e-12);
}

TEST_CASE("map_free_to_inverted: linkage, bounded time map, spreading variance") {
  const TrapParams tp = TrapParams::smooth(1.0, 0.0, pp);
  const auto m = make_free_to_inverted_map(tp);
  CHECK(m.time_map(0.0) == 0.0);
  CHECK(m.position_map(1.3, 0.0) == Catch::Approx(1.3));
  CHECK(m.time_map(40.0) == Catch::Approx(1.0 / tp.omega()).epsilon(1e-12));

  const auto phi = oracles::two_packet_state(2.0, 1.5);
  const auto psi = map_free_to_inverted(phi, TrapParams::smooth(1.0, 2.0, pp));
  double prev = oracles::position_variance(psi, 0.0, -40.0, 25.0, 30000);
  for (double tau : {0.5, 1.0, 1.5}) {
    const double var = oracles::position_variance(psi, tau, -40.0, 25.0, 30000);
    CHECK(var > prev);
    prev = var;
  }
}

TEST_CASE("map_free_to_falling: identity at a=0 and unit-modulus factor") {
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 1.0, 1.0));
  const auto same = map_free_to_falling(phi, 0.0, pp);
  oracles::Rng rng;
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-4, 4), t = rng.uniform(-3, 3);
    CHECK(std::abs(same(x, t) - phi(x, t)) < 1e-15);
    CHECK(std::abs(form_factor_g(x, 0.0, 2.0, pp) - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(std::abs(form_factor_g(x, t, 2.0, pp)) - 1.0) < 1e-15);
  }
}

TEST_CASE("map_free_to_falling: Ehrenfest parabola") {
  // x0=0, v0=1, a=2 -> <xi>(tau) = tau - tau^2.
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 1.0, 1.0));
  const auto psi = map_free_to_falling(phi, 2.0, pp);
  for (double tau : {0.3, 0.8, 1.3}) {
    const double mean = oracles::mean_position(psi, tau, -25.0, 25.0, 40000);
    CHECK(mean == Catch::Approx(tau - tau * tau).margin(1e-8));
  }
}

TEST_CASE("norm preservation: smooth maps exactly, general b up to (b w)^(-1/4)") {
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 1.0, 1.2));
  const Grid g(-24.0, 24.0, 8001);

  const TrapParams smooth = TrapParams::smooth(2.0, 0.0, pp);
  const auto psi = map_free_to_trapped(phi, smooth);
  CHECK(std::abs(l2_norm(sample_on_grid(psi, g, 0.45), g.dx()) - 1.0) < 1e-6);

  const auto fall = map_free_to_falling(phi, 1.5, pp);
  CHECK(std::abs(l2_norm(sample_on_grid(fall, g, 0.8), g.dx()) - 1.0) < 1e-6);

  const TrapParams stretched(2.0, 0.0, 1.9, pp);
  const auto psi_b = map_free_to_trapped(phi, stretched);
  const double expected = std::pow(stretched.b * stretched.omega(), -0.25);
  CHECK(std::abs(l2_norm(sample_on_grid(psi_b, g, 0.3), g.dx()) - expected) < 1e-6);
}

TEST_CASE("argmax-level classical correspondence in the trap") {
  const TrapParams tp = TrapParams::smooth(5.0, 0.0, pp);
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 4.0, 1.5));
  const auto psi = map_free_to_trapped(phi, tp);
  const Grid g(-6.0, 6.0, 4001);
  for (double tau : {0.15, 0.3, 0.45, 0.6}) {
    const auto v = sample_on_grid(psi, g, tau);
    int arg = 0;
    for (int i = 1; i < g.n_points; ++i)
      if (std::norm(v[i]) > std::norm(v[arg])) arg = i;
    const double classical =
        4.0 / (pp.mass * tp.omega()) * std::sin(tp.omega() * tau);
    CHECK(std::abs(g.point(arg) - classical) < 3.0 * g.dx());
  }
}

TEST_CASE("extend_half_period: full period restores values up to the phase") {
  const TrapParams tp = TrapParams::smooth(5.0, 0.0, pp);
  const auto psi =
      extend_half_period(map_free_to_trapped(oracles::two_packet_state(4.0, 1.5), tp), tp);
  const double period = 2.0 * pi / tp.omega();
  oracles::Rng rng;
  for (int i = 0; i < 300; ++i) {
    const double xi = rng.uniform(-4, 4);
    const double tau = rng.uniform(0.05, 0.55);
    const Complex a = psi(xi, tau);
    const Complex b = psi(xi, tau + period);
    // One full period applies the half-period rule twice: phase exp(-i pi).
    CHECK(std::abs(b + a) < 1e-12);
    CHECK(std::abs(std::norm(b) - std::norm(a)) < 1e-12);
  }
}

TEST_CASE("extend_half_period: matches stationary-state phases") {
  const double omega = 1.7;
  const TrapParams tp = TrapParams::smooth(omega * omega * pp.mass, 0.0, pp);
  REQUIRE(tp.omega() == Catch::Approx(omega));
  for (int n = 0; n <= 3; ++n) {
    const HOEigenstate state(n, omega);
    const auto principal = ho_eigenstate_evaluator(state);
    const auto extended = extend_half_period(principal, tp);
    oracles::Rng rng;
    for (int i = 0; i < 100; ++i) {
      const double xi = rng.uniform(-3, 3);
      const double tau = rng.uniform(-9.0, 9.0);
      if (std::abs(std::remainder(omega * tau, pi)) > pi / 2 - 1e-6) continue;
      CHECK(std::abs(extended(xi, tau) - ho_eigenstate_value(state, xi, tau)) <
            1e-12);
    }
  }
}

TEST_CASE("extend_half_period: shifted trap reflects about the center") {
  const TrapParams tp = TrapParams::smooth(1.0, 2.0, pp);
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 0.0, 1.5));
  const auto psi = extend_half_period(
      apply_map(make_free_to_trapped_map(tp), phi), tp);
  // Half a period swings the packet from xi=0 to the mirror point xi=4.
  const Grid g(-6.0, 10.0, 4001);
  const auto v = sample_on_grid(psi, g, pi);
  int arg = 0;
  for (int i = 1; i < g.n_points; ++i)
    if (std::norm(v[i]) > std::norm(v[arg])) arg = i;
  CHECK(std::abs(g.point(arg) - 4.0) < 3 * g.dx());
}

TEST_CASE("extend_half_period: branch edges rejected") {
  const TrapParams tp = TrapParams::smooth(1.0, 0.0, pp);
  const auto psi = extend_half_period(
      map_free_to_trapped(gaussian_evaluator(GaussianPacket(0.0, 0.0, 1.0)), tp), tp);
  CHECK_THROWS_AS(psi(0.5, pi / 2), BranchError);
  CHECK_THROWS_AS(psi(0.5, 3 * pi / 2), BranchError);
  CHECK_NOTHROW(psi(0.5, pi / 2 + 0.2));
}

TEST_CASE("map_free_lens: quadratic chirp at tau=0 and principal domain") {
  const double gamma = -0.8;
  const auto phi = gaussian_evaluator(GaussianPacket(0.0, 1.0, 1.0));
  const auto chirped = map_free_lens(phi, gamma, pp);
  oracles::Rng rng;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-4, 4);
    const Complex expected =
        phi(x, 0.0) * std::exp(imag_unit * (pp.mass * gamma * x * x / (2 * pp.hbar)));
    CHECK(std::abs(chirped(x, 0.0) - expected) < 1e-14);
  }
  CHECK_THROWS_AS(chirped(0.3, 1.0 / 0.8), BranchError);
  CHECK_NOTHROW(chirped(0.3, 1.0 / 0.8 - 0.01));
}
