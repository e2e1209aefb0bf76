#ifndef QUADMAP_TIMELINE_HPP
#define QUADMAP_TIMELINE_HPP

// Splices potential regimes at instantaneous transition times into one global
// evaluator. Per segment: shift the time origin to the transition, apply the
// smooth-choice map for the segment's potential, evolve to the next
// transition, invert back to free form, repeat. Each segment re-derives its
// free-form ancestor once, so evaluation cost stays linear in segment count.

#include <algorithm>
#include <memory>
#include <vector>

#include "quadmap/core.hpp"
#include "quadmap/maps.hpp"
#include "quadmap/potential.hpp"
#include "quadmap/states.hpp"

namespace quadmap {

struct Segment {
  double start_time;
  PotentialSpec potential;
};

// initial_state is the free-particle evaluator feeding the first segment; its
// time argument is global (the first segment starts at start_time, not at 0).
struct Scenario {
  WaveEvaluator initial_state;
  std::vector<Segment> segments;
};

inline void validate_scenario(const Scenario& s) {
  if (!s.initial_state)
    throw ValidationError("Scenario: missing initial state evaluator");
  if (s.segments.empty()) throw ValidationError("Scenario: no segments");
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    validate_potential(s.segments[i].potential);
    if (i > 0 && !(s.segments[i].start_time > s.segments[i - 1].start_time))
      throw ValidationError(
          "Scenario: segment start_times must be strictly increasing "
          "(segment " + std::to_string(i) + ")");
  }
}

namespace detail {

// Branch evaluator for one segment (local time, 0 at the transition) plus the
// pieces needed to hand the state over to the next segment.
struct SegmentBranch {
  double start = 0.0;
  WaveEvaluator branch;
};

inline WaveEvaluator shift_time(WaveEvaluator w, double delta) {
  if (delta == 0.0) return w;
  return [w = std::move(w), delta](double x, double t) { return w(x, t + delta); };
}

// B and Xi0 must vanish for a general segment to be exited; the scenario
// format only builds such maps.
inline void require_plain_general(const GeneralQuadraticMap& m, const char* who) {
  for (double tau : {m.window().lo, m.tau0(), m.window().hi}) {
    if (std::abs(m.B().value(tau)) > 1e-12 || std::abs(m.Xi0().value(tau)) > 1e-12)
      throw ValidationError(std::string(who) +
                            ": only B = 0, Xi0 = 0 general segments can hand "
                            "over to a following segment");
  }
}

class TimelineImpl {
 public:
  explicit TimelineImpl(const Scenario& s, PhysicalParams params)
      : params_(params) {
    validate_scenario(s);
    WaveEvaluator ancestor = s.initial_state;
    const std::size_t n = s.segments.size();
    branches_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Segment& seg = s.segments[i];
      WaveEvaluator branch = make_branch(seg.potential, ancestor);
      branches_.push_back({seg.start_time, branch});
      if (i + 1 < n) {
        const double duration = s.segments[i + 1].start_time - seg.start_time;
        ancestor = make_exit(seg.potential, branch, duration);
      }
    }
  }

  Complex value(double x, double t) const {
    if (t < branches_.front().start)
      throw ValidationError("timeline: t=" + fmt_double(t) +
                            " precedes the scenario start " +
                            fmt_double(branches_.front().start));
    auto it = std::upper_bound(
        branches_.begin(), branches_.end(), t,
        [](double v, const SegmentBranch& b) { return v < b.start; });
    const std::size_t idx = static_cast<std::size_t>(it - branches_.begin()) - 1;
    return branches_[idx].branch(x, t - branches_[idx].start);
  }

  const std::vector<SegmentBranch>& pieces() const { return branches_; }

 private:
  WaveEvaluator make_branch(const PotentialSpec& spec, WaveEvaluator ancestor) {
    return std::visit(
        [&](const auto& p) -> WaveEvaluator {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, FreePotential>) {
            return ancestor;
          } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
            const TrapParams tp = TrapParams::smooth(p.k, p.center, params_);
            return extend_half_period(
                apply_map(make_free_to_trapped_map(tp), std::move(ancestor)), tp);
          } else if constexpr (std::is_same_v<T, InvertedPotential>) {
            const TrapParams tp = TrapParams::smooth(p.k, p.center, params_);
            return map_free_to_inverted(std::move(ancestor), tp);
          } else if constexpr (std::is_same_v<T, GravityPotential>) {
            return map_free_to_falling(std::move(ancestor), p.a, params_);
          } else {
            return map_free_to_general(std::move(ancestor),
                                       reanchor_for_gluing(p.map));
          }
        },
        spec);
  }

  WaveEvaluator make_exit(const PotentialSpec& spec, const WaveEvaluator& branch,
                          double duration) {
    WaveEvaluator shifted = shift_time(branch, duration);
    return std::visit(
        [&](const auto& p) -> WaveEvaluator {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, FreePotential>) {
            return shifted;
          } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
            const TrapParams tp = TrapParams::smooth(p.k, p.center, params_);
            return map_trapped_to_free(std::move(shifted), tp);
          } else if constexpr (std::is_same_v<T, InvertedPotential>) {
            const TrapParams tp = TrapParams::smooth(p.k, p.center, params_);
            return map_inverted_to_free(std::move(shifted), tp);
          } else if constexpr (std::is_same_v<T, GravityPotential>) {
            return map_falling_to_free(std::move(shifted), p.a, params_);
          } else {
            return make_general_exit(p.map, std::move(shifted), duration);
          }
        },
        spec);
  }

  // Hand-over out of a general segment: rebase the (gauge-fixed) profiles to
  // the segment end where A rescales to 1, gauge-fix once more, and invert.
  WaveEvaluator make_general_exit(const GeneralQuadraticMap& m,
                                  WaveEvaluator shifted, double duration) {
    require_plain_general(m, "timeline general exit");
    const GeneralQuadraticMap glued = reanchor_for_gluing(m);
    glued.check_window(duration, "timeline general exit");
    auto base = std::make_shared<GeneralQuadraticMap>(glued);
    const double a_end = base->A().value(duration);
    auto val = [base, duration, a_end](double tau) {
      return base->A().value(duration + tau) / a_end;
    };
    auto d1 = [base, duration, a_end](double tau) {
      return base->A().first_derivative(duration + tau) / a_end;
    };
    auto d2 = [base, duration, a_end](double tau) {
      return base->A().second_derivative(duration + tau) / a_end;
    };
    TimeInterval w{base->window().lo - duration, base->window().hi - duration};
    GeneralQuadraticMap exit_map = reanchor_for_gluing(make_general_map(
        ProfileCurve::analytic(val, d1, d2), 0.0, params_, w));
    return map_general_to_free(std::move(shifted), exit_map);
  }

  PhysicalParams params_;
  std::vector<SegmentBranch> branches_;
};

}  // namespace detail

// Global evaluator for the whole scenario, defined for t >= first start_time.
// Continuous at every transition; within each segment it satisfies that
// segment's Schroedinger equation.
inline WaveEvaluator build_timeline(const Scenario& s,
                                    PhysicalParams params = PhysicalParams{}) {
  auto impl = std::make_shared<detail::TimelineImpl>(s, params);
  return [impl](double x, double t) { return impl->value(x, t); };
}

// Point access; prefer build_timeline when evaluating many points.
inline Complex wave_at(const Scenario& s, double x, double t,
                       PhysicalParams params = PhysicalParams{}) {
  return build_timeline(s, params)(x, t);
}

// Sup over the grid of |left limit - right limit| at the transition into
// segment transition_index. The branches glue exactly; this measures the
// floating-point seam.
inline double transition_mismatch(const Scenario& s, int transition_index,
                                  const Grid& g,
                                  PhysicalParams params = PhysicalParams{}) {
  validate_scenario(s);
  if (transition_index < 1 ||
      transition_index >= static_cast<int>(s.segments.size()))
    throw ValidationError("transition_mismatch: index must select a transition");
  detail::TimelineImpl impl(s, params);
  const auto& pieces = impl.pieces();
  const auto& left = pieces[transition_index - 1];
  const auto& right = pieces[transition_index];
  const double delta = right.start - left.start;
  double worst = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.point(i);
    worst = std::max(worst, std::abs(left.branch(x, delta) - right.branch(x, 0.0)));
  }
  return worst;
}

// Potential of the active segment as a function of (x, global time); segments
// receive local time internally.
inline std::function<double(double, double)> scenario_potential(
    const Scenario& s, PhysicalParams params = PhysicalParams{}) {
  validate_scenario(s);
  auto segments = std::make_shared<std::vector<Segment>>(s.segments);
  return [segments, params](double x, double t) {
    std::size_t idx = segments->size() - 1;
    while (idx > 0 && (*segments)[idx].start_time > t) --idx;
    return potential_value((*segments)[idx].potential, x,
                           t - (*segments)[idx].start_time, params);
  };
}

// E_after - E_before across transition `transition_index` (the transition
// into segment transition_index), by quadrature of (V_new - V_old) against
// the unchanged transition-time density.
inline double energy_jump(const Scenario& s, int transition_index, const Grid& g,
                          PhysicalParams params = PhysicalParams{}) {
  validate_scenario(s);
  if (transition_index < 1 ||
      transition_index >= static_cast<int>(s.segments.size()))
    throw ValidationError("energy_jump: transition_index must select a "
                          "transition between segments");
  const Segment& before = s.segments[transition_index - 1];
  const Segment& after = s.segments[transition_index];
  const double t_star = after.start_time;

  const WaveEvaluator psi = build_timeline(s, params);
  const std::vector<Complex> samples = sample_on_grid(psi, g, t_star);
  const double dx = g.dx();

  double norm2 = 0.0, jump = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double wgt = (i == 0 || i == g.n_points - 1) ? 0.5 : 1.0;
    const double dens = std::norm(samples[i]);
    const double x = g.point(i);
    const double v_new = potential_value(after.potential, x, 0.0, params);
    const double v_old = potential_value(before.potential, x,
                                         t_star - before.start_time, params);
    norm2 += wgt * dens * dx;
    jump += wgt * (v_new - v_old) * dens * dx;
  }
  const double edge_mass =
      (std::norm(samples.front()) + std::norm(samples.back())) * dx;
  if (edge_mass > 1e-6 * norm2)
    throw NumericsError("energy_jump: grid too narrow, boundary density mass " +
                        detail::fmt_double(edge_mass / norm2) +
                        " of the total exceeds 1e-6");
  return jump / norm2;
}

}  // namespace quadmap

#endif  // QUADMAP_TIMELINE_HPP
