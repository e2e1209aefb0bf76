#ifndef QUADMAP_POTENTIAL_HPP
#define QUADMAP_POTENTIAL_HPP

// Tagged description of one potential regime. Times are local to the regime:
// t = 0 is the instant the regime becomes active.

#include <variant>

#include "quadmap/genquad.hpp"

namespace quadmap {

struct FreePotential {};

// V = (k/2)(x - center)^2, k > 0.
struct HarmonicPotential {
  double k;
  double center = 0.0;
};

// V = -(k/2)(x - center)^2 with k > 0 the magnitude.
struct InvertedPotential {
  double k;
  double center = 0.0;
};

// V = M a x.
struct GravityPotential {
  double a;
};

// Time-dependent quadratic potential generated by profile curves.
struct GeneralQuadraticPotential {
  GeneralQuadraticMap map;
};

using PotentialSpec = std::variant<FreePotential, HarmonicPotential,
                                   InvertedPotential, GravityPotential,
                                   GeneralQuadraticPotential>;

inline void validate_potential(const PotentialSpec& spec) {
  if (const auto* h = std::get_if<HarmonicPotential>(&spec)) {
    if (!(h->k > 0.0))
      throw ValidationError("HarmonicPotential: k must be positive");
  } else if (const auto* iv = std::get_if<InvertedPotential>(&spec)) {
    if (!(iv->k > 0.0))
      throw ValidationError("InvertedPotential: k magnitude must be positive");
  }
}

inline double potential_value(const PotentialSpec& spec, double x, double t,
                              const PhysicalParams& params = PhysicalParams{}) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FreePotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
          const double u = x - p.center;
          return 0.5 * p.k * u * u;
        } else if constexpr (std::is_same_v<T, InvertedPotential>) {
          const double u = x - p.center;
          return -0.5 * p.k * u * u;
        } else if constexpr (std::is_same_v<T, GravityPotential>) {
          return params.mass * p.a * x;
        } else {
          return potential_V(p.map, x, t);
        }
      },
      spec);
}

inline std::string potential_name(const PotentialSpec& spec) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FreePotential>) return "free";
        if constexpr (std::is_same_v<T, HarmonicPotential>) return "harmonic";
        if constexpr (std::is_same_v<T, InvertedPotential>) return "inverted";
        if constexpr (std::is_same_v<T, GravityPotential>) return "gravity";
        return "general";
      },
      spec);
}

}  // namespace quadmap

#endif  // QUADMAP_POTENTIAL_HPP
