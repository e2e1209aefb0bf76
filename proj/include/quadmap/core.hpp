#ifndef QUADMAP_CORE_HPP
#define QUADMAP_CORE_HPP

// Foundational types shared by the whole library: physical parameters,
// uniform spatial grids, the wave-evaluator contract and grid-level numerics.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace quadmap {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr Complex imag_unit{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid construction parameters or malformed input.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Evaluation outside the principal domain of a coordinate map.
class BranchError : public Error {
 public:
  explicit BranchError(const std::string& msg) : Error(msg) {}
};

// Runtime numerical failures (leaking windows, non-finite data, ...).
class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& msg) : Error(msg) {}
};

// Wraps an evaluator failure with the offending coordinate attached.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& msg) : Error(msg) {}
};

namespace detail {
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// PhysicalParams

// hbar and particle mass; defaults are the natural units used throughout.
struct PhysicalParams {
  double hbar = 1.0;
  double mass = 1.0;

  bool operator==(const PhysicalParams&) const = default;

  void validate() const {
    if (!(hbar > 0.0) || !(mass > 0.0))
      throw ValidationError("PhysicalParams: hbar and mass must be positive");
  }
};

// ---------------------------------------------------------------------------
// Grid

// Uniform sampling window [x_min, x_max] with n_points nodes (endpoints
// included).
struct Grid {
  double x_min;
  double x_max;
  int n_points;

  Grid(double xmin, double xmax, int n) : x_min(xmin), x_max(xmax), n_points(n) {
    if (!(x_min < x_max))
      throw ValidationError("Grid: x_min must be smaller than x_max");
    if (n_points < 2) throw ValidationError("Grid: n_points must be at least 2");
  }

  double dx() const { return (x_max - x_min) / (n_points - 1); }
  double point(int i) const { return x_min + i * dx(); }
};

// ---------------------------------------------------------------------------
// WaveEvaluator

// The universal state representation: a pure map (position, time) -> amplitude.
// Every closed-form state, mapped state and spliced timeline is one of these.
using WaveEvaluator = std::function<Complex(double x, double t)>;

// ---------------------------------------------------------------------------
// Parallel grid evaluation

namespace detail {

// QUADMAP_THREADS caps parallel grid evaluation; 0 or unset means auto.
inline int configured_threads() {
  static const int cached = [] {
    const char* env = std::getenv("QUADMAP_THREADS");
    long req = 0;
    if (env != nullptr && *env != '\0') {
      char* end = nullptr;
      req = std::strtol(env, &end, 10);
      if (end == env || req < 0) req = 0;
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (req == 0) return static_cast<int>(hw);
    return static_cast<int>(std::min<long>(req, hw));
  }();
  return cached;
}

}  // namespace detail

// Samples w on the grid at fixed time t. Element i is w(x_min + i*dx, t).
// Evaluation order has no observable effect; points may be computed in
// parallel (bounded by QUADMAP_THREADS).
inline std::vector<Complex> sample_on_grid(const WaveEvaluator& w, const Grid& g,
                                           double t) {
  if (!w) throw ValidationError("sample_on_grid: empty evaluator");
  const int n = g.n_points;
  std::vector<Complex> out(static_cast<std::size_t>(n));

  auto eval_range = [&](int lo, int hi, std::exception_ptr& err) {
    for (int i = lo; i < hi; ++i) {
      try {
        out[i] = w(g.point(i), t);
      } catch (const std::exception& e) {
        err = std::make_exception_ptr(EvaluationError(
            "evaluator failed at grid point " + std::to_string(i) + " (x=" +
            detail::fmt_double(g.point(i)) + ", t=" + detail::fmt_double(t) +
            "): " + e.what()));
        return;
      }
    }
  };

  const int threads = std::min(detail::configured_threads(), std::max(1, n / 256));
  if (threads <= 1) {
    std::exception_ptr err;
    eval_range(0, n, err);
    if (err) std::rethrow_exception(err);
    return out;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(threads));
  const int chunk = (n + threads - 1) / threads;
  for (int th = 0; th < threads; ++th) {
    const int lo = th * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, th] { eval_range(lo, hi, errs[th]); });
  }
  for (auto& thr : pool) thr.join();
  for (auto& err : errs)
    if (err) std::rethrow_exception(err);
  return out;
}

// ---------------------------------------------------------------------------
// Norms and distances (trapezoid quadrature, end weights 1/2)

inline double l2_norm(const std::vector<Complex>& samples, double dx) {
  if (samples.empty()) throw ValidationError("l2_norm: empty sample vector");
  if (!(dx > 0.0)) throw ValidationError("l2_norm: dx must be positive");
  double acc = 0.0;
  for (const auto& v : samples) acc += std::norm(v);
  acc -= 0.5 * (std::norm(samples.front()) + std::norm(samples.back()));
  return std::sqrt(acc * dx);
}

inline double l2_distance(const std::vector<Complex>& a,
                          const std::vector<Complex>& b, double dx) {
  if (a.size() != b.size())
    throw ValidationError("l2_distance: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  if (a.empty()) throw ValidationError("l2_distance: empty sample vectors");
  if (!(dx > 0.0)) throw ValidationError("l2_distance: dx must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  acc -= 0.5 * (std::norm(a.front() - b.front()) + std::norm(a.back() - b.back()));
  return std::sqrt(acc * dx);
}

}  // namespace quadmap

#endif  // QUADMAP_CORE_HPP
