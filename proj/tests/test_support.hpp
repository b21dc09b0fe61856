#pragma once

// Shared generators of test families. Header-only; used by unit and
// acceptance suites.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pseudogroup/pmap.hpp"

namespace pseudogroup::testing {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// x/(1 - a x) + c + b x², with the sampled C¹ distance kept below `bound`.
inline std::string random_near_identity(std::mt19937& rng, double bound = 0.01) {
  std::uniform_real_distribution<double> ua(-0.003, 0.003);
  std::uniform_real_distribution<double> uc(-0.004, 0.004);
  std::uniform_real_distribution<double> ub(-0.001, 0.001);
  for (;;) {
    double a = ua(rng), c = uc(rng), b = ub(rng);
    std::string text = "x/(1 - " + fmt(a) + "*x) + " + fmt(c) + " + " + fmt(b) + "*x*x";
    Expression f = parse(text);
    if (c1_distance(f, differentiate(f), 2048) < bound * 0.98) return text;
  }
}

/// Möbius map x/(1 - a x); these commute and compose by adding parameters.
inline std::string mobius(double a) { return "x/(1 - " + fmt(a) + "*x)"; }

inline std::string translation(double t) { return "x + " + fmt(t); }

/// Words (F1, F2) over generators 0 and 1, chosen among the generators,
/// their inverses and a swap, so that F1^-1(x0) < x0 <= F2(x0) <= F1(x0).
/// Returns false when x0 is fixed by both generators.
inline bool canonical_pair(const GeneratorSet& gens, double x0, Word& f1, Word& f2) {
  Word a = Word::letter(0), b = Word::letter(1);
  if (apply(gens, a, x0) < x0) a = a.inverse();
  if (apply(gens, b, x0) < x0) b = b.inverse();
  double da = apply(gens, a, x0) - x0, db = apply(gens, b, x0) - x0;
  if (da <= 0 && db <= 0) return false;
  if (db > da) std::swap(a, b);
  f1 = a;
  f2 = b;
  return true;
}

}  // namespace pseudogroup::testing
