#ifndef QUADMAP_TESTS_ORACLES_HPP
#define QUADMAP_TESTS_ORACLES_HPP

// Test-only reference machinery, independent of the library's evaluation
// paths: dense Simpson quadrature for moments, explicit Hermite polynomials,
// and a deterministic RNG.

#include <functional>
#include <random>

#include "quadmap/core.hpp"
#include "quadmap/states.hpp"

namespace oracles {

// Composite Simpson with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// integral of x^k |w(x,t)|^2 over [a,b].
inline double density_moment(const quadmap::WaveEvaluator& w, double t, int k,
                             double a, double b, int n = 20000) {
  return simpson(
      [&](double x) { return std::pow(x, k) * std::norm(w(x, t)); }, a, b, n);
}

inline double mean_position(const quadmap::WaveEvaluator& w, double t, double a,
                            double b, int n = 20000) {
  const double norm2 = density_moment(w, t, 0, a, b, n);
  return density_moment(w, t, 1, a, b, n) / norm2;
}

inline double position_variance(const quadmap::WaveEvaluator& w, double t,
                                double a, double b, int n = 20000) {
  const double norm2 = density_moment(w, t, 0, a, b, n);
  const double m1 = density_moment(w, t, 1, a, b, n) / norm2;
  const double m2 = density_moment(w, t, 2, a, b, n) / norm2;
  return m2 - m1 * m1;
}

// Physicists' Hermite polynomials, explicit forms up to n = 10.
inline double hermite_explicit(int n, double x) {
  const double x2 = x * x;
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0 * x;
    case 2: return 4.0 * x2 - 2.0;
    case 3: return x * (8.0 * x2 - 12.0);
    case 4: return 16.0 * x2 * x2 - 48.0 * x2 + 12.0;
    case 5: return x * (32.0 * x2 * x2 - 160.0 * x2 + 120.0);
    case 6: return 64.0 * x2 * x2 * x2 - 480.0 * x2 * x2 + 720.0 * x2 - 120.0;
    case 7:
      return x * (128.0 * x2 * x2 * x2 - 1344.0 * x2 * x2 + 3360.0 * x2 - 1680.0);
    case 8:
      return 256.0 * std::pow(x2, 4) - 3584.0 * x2 * x2 * x2 +
             13440.0 * x2 * x2 - 13440.0 * x2 + 1680.0;
    case 9:
      return x * (512.0 * std::pow(x2, 4) - 9216.0 * x2 * x2 * x2 +
                  48384.0 * x2 * x2 - 80640.0 * x2 + 30240.0);
    case 10:
      return 1024.0 * std::pow(x2, 5) - 23040.0 * std::pow(x2, 4) +
             161280.0 * x2 * x2 * x2 - 403200.0 * x2 * x2 + 302400.0 * x2 -
             30240.0;
    default:
      throw std::invalid_argument("hermite_explicit: n must be <= 10");
  }
}

struct Rng {
  std::mt19937 gen{123457};
  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  }
};

// Normalized equal superposition of +-p0 packets anchored at t = 0.
inline quadmap::WaveEvaluator two_packet_state(double p0, double sigma0) {
  using namespace quadmap;
  auto plus = gaussian_evaluator(GaussianPacket(0.0, p0, sigma0));
  auto minus = gaussian_evaluator(GaussianPacket(0.0, -p0, sigma0));
  const Complex c{1.0 / std::sqrt(2.0), 0.0};
  return superpose({{c, plus}, {c, minus}});
}

}  // namespace oracles

#endif
