#pragma once

#include <vector>

#include "pseudogroup/monotone.hpp"
#include "pseudogroup/pmap.hpp"

namespace pseudogroup {

inline constexpr int kDefaultSegments = 64;
inline constexpr int kMaxLinearizeRange = 10;
inline constexpr int kDefaultMaxOrbit = 2000;
/// f(x0) - x0 at or below this counts as a fixed point.
inline constexpr double kFixedPointTol = 1e-12;

/// ψ with ψ(x0) = 0 and ψ(f(x)) = ψ(x) + 1, sampled on a union of
/// fundamental segments [f^j(x0), f^(j+1)(x0)].
struct Linearization {
  SampledMonotoneMap psi;
  Word f;
  double x0 = 0.0;
  int k_lo = 0;                // first full segment index
  int k_hi = 0;                // orbit runs f^k_lo(x0) .. f^k_hi(x0)
  std::vector<double> orbit;   // f^j(x0), j = k_lo..k_hi
  bool partial_lo = false;     // nodes beyond the orbit reach toward -1
  bool partial_hi = false;     // and toward +1
  double residual = 0.0;       // max |ψ(f(x)) - ψ(x) - 1| at segment midpoints

  double orbit_point(int j) const { return orbit.at(static_cast<std::size_t>(j - k_lo)); }
};

/// Builds ψ on I_range_k = (f^-k(x0), f^k(x0)). The base segment map is the
/// cubic with h(x0) = 0, h(f(x0)) = 1 and end slopes d0, d0/f'(x0) averaging
/// to the affine slope, so ψ is C¹ across the seams and affine when f is a
/// translation. Throws FixedPointInput if f(x0) <= x0 + kFixedPointTol and
/// OutOfDomain if f^±k(x0) is undefined.
Linearization linearize(const GeneratorSet& gens, const Word& f, double x0,
                        int segments = kDefaultSegments, int range_k = kMaxLinearizeRange);

/// Same construction, continued in both directions while images stay in
/// (-1,1), at most max_k segments per side. The last segment on each side
/// may be partial.
Linearization linearize_domain(const GeneratorSet& gens, const Word& f, double x0,
                               int segments = kDefaultSegments, int max_k = kDefaultMaxOrbit);

}  // namespace pseudogroup
