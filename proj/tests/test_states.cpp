#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "quadmap/states.hpp"

using namespace quadmap;

TEST_CASE("gaussian_value: prefactor and spread") {
  const GaussianPacket pkt(0.0, 0.0, 1.0);
  CHECK(std::abs(gaussian_value(pkt, 0.0, 0.0) - std::pow(pi, -0.25)) < 1e-15);
  CHECK(pkt.sigma(1.0) == Complex{1.0, 1.0});
  CHECK_THROWS_AS(GaussianPacket(0.0, 0.0, -1.0), ValidationError);
}

TEST_CASE("gaussian_value: spreading law against brute-force moments") {
  const GaussianPacket pkt(0.0, 0.0, 1.0);
  const auto w = gaussian_evaluator(pkt);
  const double t = 2.0;
  // var = (sigma0^2 + (t hbar/(sigma0 M))^2)/2
  const double expected = (1.0 + 4.0) / 2.0;
  const double measured = oracles::position_variance(w, t, -30.0, 30.0, 60000);
  CHECK(measured == Catch::Approx(expected).epsilon(1e-8));
}

TEST_CASE("gaussian_value: unit norm at every time") {
  const GaussianPacket pkt(0.5, 3.0, 0.8);
  const auto w = gaussian_evaluator(pkt);
  for (double t : {0.0, 0.3, 1.0, 2.5, -1.7}) {
    const double hw = 10.0 * std::abs(pkt.sigma(t)) + std::abs(0.5 + 3.0 * t);
    const Grid g(-hw, hw, 8001);
    CHECK(std::abs(l2_norm(sample_on_grid(w, g, t), g.dx()) - 1.0) < 1e-8);
  }
}

TEST_CASE("gaussian_value: free Ehrenfest drift") {
  const double x0 = 0.3, p0 = 1.2, t = 1.7;
  const auto w = gaussian_evaluator(GaussianPacket(x0, p0, 1.0));
  const double mean = oracles::mean_position(w, t, -25.0, 25.0, 60000);
  CHECK(mean == Catch::Approx(x0 + p0 * t).margin(1e-8));
}

TEST_CASE("superpose basics") {
  const auto w = gaussian_evaluator(GaussianPacket(0.0, 2.0, 1.0));
  const auto one = superpose({{Complex{1.0, 0.0}, w}});
  CHECK(one(0.37, 0.21) == w(0.37, 0.21));

  const auto zero = superpose({{Complex{1, 0}, w}, {Complex{-1, 0}, w}});
  CHECK(std::abs(zero(0.4, 0.9)) == 0.0);

  CHECK_THROWS_AS(superpose({}), ValidationError);
}

TEST_CASE("superpose: two-packet state has even density at t=0") {
  const auto w = oracles::two_packet_state(4.0, 1.5);
  const Grid g(-8.0, 8.0, 1001);
  const auto v = sample_on_grid(w, g, 0.0);
  for (int i = 0; i < g.n_points; ++i) {
    const double d = std::norm(v[i]);
    const double dm = std::norm(v[g.n_points - 1 - i]);
    CHECK(std::abs(d - dm) < 1e-14);
  }
}

TEST_CASE("ho_eigenstate_value: closed-form anchors") {
  const HOEigenstate ground(0, 1.0);
  CHECK(std::abs(ho_eigenstate_value(ground, 0.0, 0.0) - std::pow(pi, -0.25)) <
        1e-15);
  const HOEigenstate first(1, 1.0);
  for (double tau : {0.0, 0.7, 2.9})
    CHECK(std::abs(ho_eigenstate_value(first, 0.0, tau)) < 1e-15);
  CHECK_THROWS_AS(HOEigenstate(51, 1.0), ValidationError);
  CHECK_THROWS_AS(HOEigenstate(2, -1.0), ValidationError);
}

TEST_CASE("ho_eigenstate_value: stationary density") {
  const HOEigenstate e(3, 2.0, 0.5);
  for (double xi : {-1.0, 0.2, 1.7})
    for (double tau : {0.0, 0.9, 4.4})
      CHECK(std::abs(ho_eigenstate_value(e, xi, tau)) ==
            Catch::Approx(std::abs(ho_eigenstate_value(e, xi, 0.0))));
}

TEST_CASE("ho_eigenstate_value: orthonormality by quadrature") {
  auto overlap = [](int m, int n) {
    const HOEigenstate em(m, 1.0), en(n, 1.0);
    Complex acc = 0.0;
    const int pts = 40001;
    const double a = -12.0, b = 12.0, h = (b - a) / (pts - 1);
    for (int i = 0; i < pts; ++i) {
      const double x = a + i * h;
      const double wgt = (i == 0 || i == pts - 1) ? 0.5 : 1.0;
      acc += wgt * std::conj(ho_eigenstate_value(em, x, 0.0)) *
             ho_eigenstate_value(en, x, 0.0) * h;
    }
    return acc;
  };
  CHECK(std::abs(overlap(0, 2)) < 1e-10);
  for (int m = 0; m <= 5; ++m)
    for (int n = m; n <= 5; ++n) {
      const double expect = (m == n) ? 1.0 : 0.0;
      CHECK(std::abs(overlap(m, n) - expect) < 1e-10);
    }
}

TEST_CASE("ho_eigenstate_value: recurrence matches explicit polynomials") {
  const double omega = 1.3, center = -0.4;
  const PhysicalParams pp{};
  for (int n = 0; n <= 10; ++n) {
    const HOEigenstate e(n, omega, center, pp);
    double log_fact = 0.0;
    for (int j = 2; j <= n; ++j) log_fact += std::log(double(j));
    for (double xi : {-2.0, -0.3, 0.0, 0.9, 2.4}) {
      const double y = std::sqrt(omega) * (xi - center);
      const double norm_const =
          std::pow(omega / pi, 0.25) /
          std::exp(0.5 * (n * std::log(2.0) + log_fact));
      const double expected =
          norm_const * oracles::hermite_explicit(n, y) * std::exp(-0.5 * y * y);
      const Complex got = ho_eigenstate_value(e, xi, 0.0);
      CHECK(got.real() == Catch::Approx(expected).margin(1e-12));
      CHECK(std::abs(got.imag()) < 1e-15);
    }
  }
}
