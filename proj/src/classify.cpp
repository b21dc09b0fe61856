#include "pseudogroup/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "pseudogroup/errors.hpp"
#include "pseudogroup/parallel.hpp"

namespace pseudogroup {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinMergeGap = 1e-7;
constexpr int kRefineSteps = 100;
constexpr int kGapProbes = 257;
constexpr double kMinGapWidth = 1e-6;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double merge_gap(double tol) { return std::max(2.0 * tol, kMinMergeGap); }

// w(x) - x, NaN where w is undefined.
double displacement(const GeneratorSet& gens, const Word& w, double x) {
  WordValue r = eval_word(gens, w, x);
  return r.ok() ? r.value - x : kNaN;
}

// Bisection on a predicate that holds at `in` and fails at `out`.
template <class Pred>
double bisect_boundary(double in, double out, Pred&& pred) {
  for (int i = 0; i < kRefineSteps && in != out; ++i) {
    double mid = 0.5 * (in + out);
    if (mid == in || mid == out) break;
    (pred(mid) ? in : out) = mid;
  }
  return in;
}

template <class F>
double bisect_root(double a, double b, double ga, F&& g) {
  for (int i = 0; i < kRefineSteps; ++i) {
    double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    double gm = g(mid);
    if (std::isnan(gm)) break;
    if ((gm < 0) == (ga < 0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Golden-section minimum of |g| on [a, b].
template <class F>
double golden_min(double a, double b, F&& g) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  auto cost = [&](double x) {
    double v = g(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : std::abs(v);
  };
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = cost(c), fd = cost(d);
  for (int i = 0; i < kRefineSteps && b - a > 1e-15; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = cost(d);
    }
  }
  return fc <= fd ? c : d;
}

std::vector<Segment> normalize_components(std::vector<Segment> comps, double gap) {
  std::sort(comps.begin(), comps.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  std::vector<Segment> out;
  for (const Segment& s : comps) {
    if (!out.empty() && s.lo <= out.back().hi + gap) {
      Segment& last = out.back();
      // A point merged into a point stays a point at their midpoint.
      if (last.is_point() && s.is_point()) {
        last.lo = last.hi = 0.5 * (last.lo + s.lo);
      } else {
        last.hi = std::max(last.hi, s.hi);
      }
      continue;
    }
    out.push_back(s);
  }
  return out;
}

bool commutators_fix(const GeneratorSet& gens, const std::vector<Word>& comms, double x, double tol) {
  for (const Word& c : comms) {
    WordValue r = eval_word(gens, c, x);
    if (r.ok() && !(std::abs(r.value - x) < tol)) return false;
  }
  return true;
}

bool strictly_commutators_fix(const GeneratorSet& gens, const std::vector<Word>& comms, double x,
                              double tol) {
  for (const Word& c : comms) {
    WordValue r = eval_word(gens, c, x);
    if (!r.ok() || !(std::abs(r.value - x) < tol)) return false;
  }
  return true;
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Returns g = gcd(a, b) >= 0 with a x + b y = g.
long long ext_gcd(long long a, long long b, long long& x, long long& y) {
  long long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    long long q = floor_div(a, b);
    long long t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

// Point in (lo, hi) closest to `target` among a probe grid where every
// order-1 commutator is defined and moves it by less than tol.
std::optional<double> commutator_fixed_near(const GeneratorSet& gens, double lo, double hi,
                                            double target, double tol) {
  const auto comms = order_one_commutators(gens.size());
  if (target > lo && target < hi && strictly_commutators_fix(gens, comms, target, tol)) return target;
  std::vector<double> probes;
  for (int j = 0; j < kGapProbes; ++j) probes.push_back(lo + (hi - lo) * (j + 0.5) / kGapProbes);
  std::stable_sort(probes.begin(), probes.end(), [target](double a, double b) {
    return std::abs(a - target) < std::abs(b - target);
  });
  for (double x : probes) {
    if (strictly_commutators_fix(gens, comms, x, tol)) return x;
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> FixedPointSet::points() const {
  std::vector<double> out;
  for (const Segment& s : components) {
    if (s.is_point()) out.push_back(s.lo);
  }
  return out;
}

bool FixedPointSet::has_plateau() const {
  return std::any_of(components.begin(), components.end(), [](const Segment& s) { return !s.is_point(); });
}

bool FixedPointSet::contains(double x, double slack) const {
  return std::any_of(components.begin(), components.end(),
                     [&](const Segment& s) { return s.contains(x, slack); });
}

FixedPointSet fixed_points(const GeneratorSet& gens, const Word& w, const Interval& interval,
                           double tol, int grid) {
  if (interval.is_empty()) throw EmptyDomain("fixed-point scan on an empty interval");
  if (grid < 3) throw Error("fixed-point scan needs a grid of at least 3 points");
  FixedPointSet out;
  out.tol = tol;
  out.source_word = w;

  const double lo = interval.lo, hi = interval.hi;
  const std::size_t n = static_cast<std::size_t>(grid);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / grid;
  const std::vector<double> g = parallel_map(n, [&](std::size_t i) { return displacement(gens, w, xs[i]); });
  auto gfun = [&](double x) { return displacement(gens, w, x); };
  auto near = [&](double x) {
    double v = gfun(x);
    return !std::isnan(v) && std::abs(v) < tol;
  };
  auto is_near = [&](std::size_t i) { return !std::isnan(g[i]) && std::abs(g[i]) < tol; };

  std::vector<Segment> comps;
  std::vector<bool> in_plateau(n, false);
  for (std::size_t i = 0; i < n;) {
    if (!is_near(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && is_near(j + 1)) ++j;
    if (j - i + 1 >= 3) {
      double a = i == 0 ? lo : bisect_boundary(xs[i], xs[i - 1], near);
      double b = j + 1 == n ? hi : bisect_boundary(xs[j], xs[j + 1], near);
      comps.push_back({a, b});
      for (std::size_t k = i; k <= j; ++k) in_plateau[k] = true;
    }
    i = j + 1;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::isnan(g[i]) || std::isnan(g[i + 1])) continue;
    if (in_plateau[i] && in_plateau[i + 1]) continue;
    if (g[i] == 0.0) {
      comps.push_back({xs[i], xs[i]});
    } else if ((g[i] < 0) != (g[i + 1] < 0) && g[i + 1] != 0.0) {
      double x = bisect_root(xs[i], xs[i + 1], g[i], gfun);
      comps.push_back({x, x});
    }
  }
  // Touching zeros: local minima of |g| (strict on the left, weak on the right).
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (in_plateau[i] || std::isnan(g[i - 1]) || std::isnan(g[i]) || std::isnan(g[i + 1])) continue;
    double a = std::abs(g[i - 1]), b = std::abs(g[i]), c = std::abs(g[i + 1]);
    if (!(b < a && b <= c)) continue;
    if ((g[i - 1] < 0) != (g[i] < 0) || (g[i] < 0) != (g[i + 1] < 0)) continue;
    double x = golden_min(xs[i - 1], xs[i + 1], gfun);
    double v = gfun(x);
    if (!std::isnan(v) && std::abs(v) < tol) comps.push_back({x, x});
  }

  const double gap = merge_gap(tol);
  std::vector<Segment> merged = normalize_components(std::move(comps), gap);
  out.components = std::move(merged);
  return out;
}

FixedPointSet common_fixed_points(const GeneratorSet& gens, double tol, int grid) {
  FixedPointSet out;
  out.tol = tol;
  if (gens.size() == 0) return out;
  const double slack = merge_gap(tol);
  std::vector<Segment> current =
      fixed_points(gens, Word::letter(0), Interval::unit(), tol, grid).components;
  for (std::size_t i = 1; i < gens.size() && !current.empty(); ++i) {
    auto other = fixed_points(gens, Word::letter(static_cast<int>(i)), Interval::unit(), tol, grid);
    std::vector<Segment> next;
    for (const Segment& a : current) {
      for (const Segment& b : other.components) {
        if (a.is_point() && b.contains(a.lo, slack)) {
          next.push_back(a);
        } else if (b.is_point() && a.contains(b.lo, slack)) {
          next.push_back(b);
        } else if (!a.is_point() && !b.is_point()) {
          double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
          if (l <= h) next.push_back({l, h});
        }
      }
    }
    current = normalize_components(std::move(next), slack);
  }
  // Confirm by direct evaluation of every generator.
  for (const Segment& s : current) {
    double x = s.is_point() ? s.lo : 0.5 * (s.lo + s.hi);
    bool fixed = true;
    for (std::size_t i = 0; i < gens.size() && fixed; ++i) {
      double d = displacement(gens, Word::letter(static_cast<int>(i)), x);
      fixed = !std::isnan(d) && std::abs(d) < tol;
    }
    if (fixed) out.components.push_back(s);
  }
  return out;
}

bool InvariantSetApprox::contains(double x) const {
  return std::any_of(members.begin(), members.end(),
                     [&](const Segment& s) { return s.contains(x, resolution); });
}

InvariantSetApprox invariant_commuting_set(const GeneratorSet& gens, double tol, int grid,
                                           double fixed_tol) {
  if (grid < 2) throw Error("invariant set approximation needs a grid of at least 2 points");
  InvariantSetApprox out;
  out.tol = tol;
  const double lo = -1.0, hi = 1.0;
  const double h = (hi - lo) / grid;
  out.resolution = h;
  const std::size_t n = static_cast<std::size_t>(grid);
  auto x_at = [&](std::size_t i) { return lo + h * (static_cast<double>(i) + 0.5); };

  const auto comms = order_one_commutators(gens.size());
  const std::vector<char> start = parallel_map(n, [&](std::size_t i) -> char {
    return commutators_fix(gens, comms, x_at(i), tol) ? 1 : 0;
  });
  std::vector<char> member = start;

  // Images of every grid point under each generator and inverse, as grid
  // indices; -1 when the image is undefined or leaves (-1,1).
  std::vector<Word> moves;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    moves.push_back(Word::letter(static_cast<int>(i)));
    moves.push_back(Word::letter(static_cast<int>(i), -1));
  }
  const auto images = parallel_map(n, [&](std::size_t i) {
    std::vector<long> idx;
    for (const Word& m : moves) {
      WordValue r = eval_word(gens, m, x_at(i));
      if (!r.ok() || !(r.value > lo && r.value < hi)) {
        idx.push_back(-1);
        continue;
      }
      idx.push_back(std::clamp(static_cast<long>(std::floor((r.value - lo) / h)), 0L,
                               static_cast<long>(n) - 1));
    }
    return idx;
  });
  auto has_member_near = [&](long k) {
    for (long d = -1; d <= 1; ++d) {
      long j = k + d;
      if (j >= 0 && j < static_cast<long>(n) && member[static_cast<std::size_t>(j)]) return true;
    }
    return false;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!member[i]) continue;
      for (long k : images[i]) {
        if (k >= 0 && !has_member_near(k)) {
          member[i] = 0;
          ++out.removed;
          changed = true;
          break;
        }
      }
    }
  }

  std::vector<Segment> segs;
  for (std::size_t i = 0; i < n;) {
    if (!member[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && member[j + 1]) ++j;
    segs.push_back({x_at(i), x_at(j)});
    i = j + 1;
  }
  for (const Segment& s : common_fixed_points(gens, fixed_tol, grid).components) segs.push_back(s);
  out.members = normalize_components(std::move(segs), 0.0);
  if (out.members.empty()) {
    throw ResolutionFailure("no grid point survives the invariance sweep at resolution " + num(h) +
                            "; refine the grid or loosen tol");
  }
  return out;
}

double conjugacy_residual(const GeneratorSet& gens, const SampledMonotoneMap& phi,
                          const std::vector<double>& a, int samples, double phase) {
  if (a.size() != gens.size()) throw Error("one constant a_i per generator is required");
  const Segment J = phi.domain();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    double t = J.lo + (J.hi - J.lo) * (s + phase) / samples;
    double x = phi(t);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      double t2 = t + a[i];
      if (!(t2 >= J.lo && t2 <= J.hi)) continue;
      WordValue r = eval_word(gens, Word::letter(static_cast<int>(i)), x);
      if (!r.ok()) continue;
      worst = std::max(worst, std::abs(r.value - phi(t2)));
    }
  }
  return worst;
}

SemiConjugacy build_semi_conjugacy(const GeneratorSet& gens, const Word& base,
                                   const std::vector<double>& a, double x0, int segments,
                                   int residual_samples, int max_k) {
  Linearization lin = linearize_domain(gens, base, x0, segments, max_k);
  SemiConjugacy sc;
  sc.phi = lin.psi.inverted();
  sc.J = sc.phi.domain();
  sc.a = a;
  sc.base = base;
  sc.x0 = x0;
  sc.residual_samples = residual_samples;
  sc.residual = conjugacy_residual(gens, sc.phi, a, residual_samples);
  return sc;
}

Word maximizing_letter(const GeneratorSet& gens, double x) {
  Word best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (int sign : {1, -1}) {
      Word w = Word::letter(static_cast<int>(i), sign);
      WordValue r = eval_word(gens, w, x);
      if (r.ok() && r.value > best_value) {
        best_value = r.value;
        best = w;
      }
    }
  }
  if (best.empty()) throw OutOfDomain(0, "no generator or inverse is defined at " + num(x));
  return best;
}

PeriodicChain find_periodic_chain(const GeneratorSet& gens, double x0, const ChainOptions& opt) {
  const std::size_t n = gens.size();
  if (n == 0) throw Error("periodic chain needs at least one generator");
  PeriodicChain chain;
  chain.base = maximizing_letter(gens, x0);
  const double fx0 = apply(gens, chain.base, x0);
  if (!(fx0 > x0 + kFixedPointTol)) {
    throw FixedPointInput("x0 = " + num(x0) + " is fixed by every generator");
  }

  TauOptions topt;
  topt.n_iters = opt.n_iters;
  topt.commutator_tol = opt.commutator_tol;
  long long q = 1;
  for (std::size_t i = 0; i < n; ++i) {
    auto est = rational_identify(
        relative_translation_number(gens, chain.base, Word::letter(static_cast<int>(i)), x0, topt),
        opt.q_max);
    if (!est.rational) {
      throw RationalityMismatch("tau(" + gens[i].name() + ", " + to_string(chain.base, gens) +
                                ") = " + num(est.value) + " has no rational form with q <= " +
                                std::to_string(opt.q_max));
    }
    q = std::lcm(q, est.rational->q);
    chain.tau.push_back(est);
  }
  if (q > opt.q_max) {
    throw RationalityMismatch("common denominator " + std::to_string(q) + " exceeds q_max = " +
                              std::to_string(opt.q_max));
  }
  chain.q = q;
  for (const auto& est : chain.tau) chain.a.push_back(est.rational->p * (q / est.rational->q));

  // Step word: a combination of generators advancing the index by one.
  std::vector<long long> coef(n, 0);
  auto unit = std::find_if(chain.a.begin(), chain.a.end(), [](long long v) { return std::llabs(v) == 1; });
  if (unit != chain.a.end()) {
    std::size_t i = static_cast<std::size_t>(unit - chain.a.begin());
    coef[i] = *unit;
  } else {
    long long g = 0;
    for (std::size_t i = 0; i < n; ++i) {
      long long x = 0, y = 0;
      long long ng = ext_gcd(g, chain.a[i], x, y);
      for (std::size_t j = 0; j < i; ++j) coef[j] *= x;
      coef[i] = y;
      g = ng;
    }
    if (g != 1) {
      throw ChainInconsistent("constants a_i have common factor " + std::to_string(g));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (coef[i] != 0) chain.step = chain.step * Word::power(static_cast<int>(i), static_cast<int>(coef[i]));
  }

  // y0: common fixed point of the return words f_i^-1 step^{a_i} in [x0, f(x0)].
  std::vector<Word> returns;
  for (std::size_t i = 0; i < n; ++i) {
    Word r = Word::letter(static_cast<int>(i), -1) * chain.step.pow(static_cast<int>(chain.a[i]));
    if (!r.empty()) returns.push_back(r);
  }
  auto all_fixed = [&](double y) {
    for (const Word& r : returns) {
      double d = displacement(gens, r, y);
      if (std::isnan(d) || !(std::abs(d) < opt.tol)) return false;
    }
    return true;
  };
  std::optional<double> y0;
  if (returns.empty() || all_fixed(x0)) {
    y0 = x0;
  } else {
    const double width = fx0 - x0;
    Interval window = Interval{x0 - 1e-3 * width, fx0}.intersect(word_domain(gens, returns.front()));
    if (!window.is_empty()) {
      auto fp = fixed_points(gens, returns.front(), window, opt.fixed_tol, opt.grid);
      for (const Segment& s : fp.components) {
        double cand = s.contains(x0) ? x0 : s.is_point() ? s.lo : 0.5 * (s.lo + s.hi);
        if (all_fixed(cand)) {
          y0 = cand;
          break;
        }
      }
    }
  }
  if (!y0) {
    throw ChainInconsistent("no common fixed point of the return words in [" + num(x0) + ", " +
                            num(fx0) + "]");
  }

  // Residues y_0 .. y_{q-1} by the step word, then the rest by the base word.
  std::vector<double> up{*y0};
  for (long long r = 1; r < q; ++r) {
    WordValue v = eval_word(gens, chain.step, up.back());
    if (!v.ok() || !(v.value > -1.0 && v.value < 1.0)) {
      throw ChainInconsistent("step word leaves (-1,1) within the first period");
    }
    up.push_back(v.value);
  }
  const Word finv = chain.base.inverse();
  for (;;) {
    WordValue v = eval_word(gens, chain.base, up[up.size() - static_cast<std::size_t>(q)]);
    if (!v.ok() || !(v.value > -1.0 && v.value < 1.0)) break;
    up.push_back(v.value);
  }
  std::vector<double> down;  // down[j] = y_{-1-j}
  auto value_at_index = [&](long long k) {
    return k >= 0 ? up[static_cast<std::size_t>(k)] : down[static_cast<std::size_t>(-k - 1)];
  };
  for (long long k = -1;; --k) {
    if (k + q >= static_cast<long long>(up.size())) break;
    WordValue v = eval_word(gens, finv, value_at_index(k + q));
    if (!v.ok() || !(v.value > -1.0 && v.value < 1.0)) break;
    down.push_back(v.value);
  }

  const long long D = static_cast<long long>(down.size());
  const long long U = static_cast<long long>(up.size());
  long long amax = 0;
  for (long long v : chain.a) amax = std::max(amax, std::llabs(v));
  const double eps = gens.epsilon();
  long long best_c = 0, best_N = -1;
  for (long long N = amax + 1; N <= (U + D) / 2 && best_N < 0; ++N) {
    for (long long off = 0; off <= U + D; ++off) {
      for (long long c : {off, -off}) {
        if (c - N < -D || c + N > U - 1) continue;
        if (value_at_index(c + N) > 1.0 - eps && value_at_index(c - N) < -1.0 + eps) {
          best_c = c;
          best_N = N;
          break;
        }
      }
      if (best_N >= 0) break;
    }
  }
  if (best_N < 0) {
    throw ChainInconsistent("chain of " + std::to_string(U + D) + " points does not reach past ±(1 - " +
                            num(eps) + ") with N > max |a_i| = " + std::to_string(amax));
  }
  chain.N = static_cast<int>(best_N);
  for (long long k = -best_N; k <= best_N; ++k) chain.y.push_back(value_at_index(best_c + k));

  for (std::size_t k = 0; k + 1 < chain.y.size(); ++k) {
    if (!(chain.y[k] < chain.y[k + 1])) {
      throw ChainInconsistent("chain is not increasing at index " +
                              std::to_string(static_cast<long long>(k) - best_N));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = -chain.N; k <= chain.N; ++k) {
      long long target = k + chain.a[i];
      if (target < -chain.N || target > chain.N) continue;
      WordValue v = eval_word(gens, Word::letter(static_cast<int>(i)), chain.at(k));
      double defect = v.ok() ? std::abs(v.value - chain.at(static_cast<int>(target)))
                             : std::numeric_limits<double>::infinity();
      chain.max_defect = std::max(chain.max_defect, defect);
      if (!(defect <= opt.tol)) {
        throw ChainInconsistent(gens[i].name() + "(y_" + std::to_string(k) + ") misses y_" +
                                std::to_string(target) + " by " + num(defect));
      }
    }
  }
  return chain;
}

std::vector<Word> StabilizerReduction::all() const {
  std::vector<Word> out = reduced;
  out.insert(out.end(), commutators.begin(), commutators.end());
  return out;
}

StabilizerReduction stabilizer_reduction(const GeneratorSet& gens, const PeriodicChain& chain,
                                         double tol) {
  const std::size_t n = gens.size();
  if (chain.a.size() != n) throw Error("chain constants do not match the generator count");
  if (chain.N < 1) throw ChainInconsistent("chain needs y_0 and y_1");
  StabilizerReduction out;
  out.pivot = -1;
  for (std::size_t i = n; i-- > 0;) {
    if (chain.a[i] != 0) {
      out.pivot = static_cast<int>(i);
      break;
    }
  }
  if (out.pivot < 0) throw ChainInconsistent("every a_i is zero");
  out.pivot_sign = chain.a[static_cast<std::size_t>(out.pivot)] > 0 ? 1 : -1;
  const long long an = std::llabs(chain.a[static_cast<std::size_t>(out.pivot)]);
  const Word fn = Word::letter(out.pivot, out.pivot_sign);

  const double y0 = chain.at(0), y1 = chain.at(1);
  auto check = [&](const Word& w, const std::string& what) {
    for (double y : {y0, y1}) {
      WordValue v = eval_word(gens, w, y);
      double defect = v.ok() ? std::abs(v.value - y) : std::numeric_limits<double>::infinity();
      out.max_defect = std::max(out.max_defect, defect);
      if (!(defect <= tol)) {
        throw ChainInconsistent(what + " moves " + num(y) + " by " + num(defect));
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == out.pivot) continue;
    Word F;
    long long m = 0;  // F(y_0) = y_m, 0 <= m < a_n
    for (long long j = 0; j < an; ++j) {
      long long k = m + chain.a[i];
      long long fl = floor_div(k, an);
      F = fn.pow(static_cast<int>(-fl)) * Word::letter(static_cast<int>(i)) * F;
      m = k - fl * an;
    }
    check(F, "reduced word " + to_string(F, gens));
    out.reduced.push_back(F);
  }
  for (const Word& c : order_one_commutators(n)) {
    check(c, "commutator " + to_string(c, gens));
    out.commutators.push_back(c);
  }
  return out;
}

const char* to_string(EndBehaviour e) {
  switch (e) {
    case EndBehaviour::Infinite:
      return "infinite";
    case EndBehaviour::Finite:
      return "finite";
    case EndBehaviour::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Iterates g from b. ψ(g^k(b)) = ±k by the functional equation, so the end
// of J is infinite once more than kDivergenceBound steps stay defined.
EndBehaviour end_behaviour(const GeneratorSet& gens, const Word& g, double b) {
  double x = b;
  for (int k = 1; k <= kDivergenceBound + 1; ++k) {
    WordValue r = eval_word(gens, g, x);
    if (!r.ok() || !(r.value > -1.0 && r.value < 1.0)) return EndBehaviour::Finite;
    if (r.value == x) return EndBehaviour::Inconclusive;
    x = r.value;
  }
  return EndBehaviour::Infinite;
}

struct TauSet {
  std::vector<RotationEstimate> tau;  // rational_identify applied
  std::vector<double> a;              // refined constants
  std::vector<std::string> warnings;
};

// τ(f_i, base, x0) for every generator. The constants used for φ come from
// the orbit average of the circle lift when it is available, which is exact
// for rigid lifts; the proportion estimate is kept for rational identification.
TauSet constants(const GeneratorSet& gens, const Word& base, double x0, const ClassifyOptions& opt) {
  TauOptions topt;
  topt.n_iters = opt.n_iters;
  topt.commutator_tol = opt.commutator_tol;
  const auto rows = parallel_map(gens.size(), [&](std::size_t i) {
    Word fi = Word::letter(static_cast<int>(i));
    auto est = rational_identify(relative_translation_number(gens, base, fi, x0, topt), opt.q_max);
    double refined = kNaN;
    try {
      auto lift = circle_lift(gens, base, fi, x0, opt.segments, 1e-6);
      refined = rotation_number(lift, opt.n_iters).cross_check;
      if (std::abs(refined - est.value) > 2.0 * est.error_bound + 1.0 / opt.n_iters) refined = kNaN;
    } catch (const Error&) {
    }
    return std::pair{est, refined};
  });
  TauSet out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.tau.push_back(rows[i].first);
    if (std::isnan(rows[i].second)) {
      out.a.push_back(rows[i].first.value);
      out.warnings.push_back("a_" + std::to_string(i + 1) + " uses the proportion estimate; circle lift unavailable");
    } else {
      out.a.push_back(rows[i].second);
    }
  }
  return out;
}

}  // namespace

ClassificationReport classify(const GeneratorSet& gens, const ClassifyOptions& opt) {
  if (gens.size() == 0) throw Error("classification needs at least one generator");
  ClassificationReport rep;
  rep.epsilon = gens.epsilon();
  rep.nilpotency = verify_near_identity_nilpotent(gens, gens.claimed_order(), opt.identity_tol,
                                                  opt.identity_samples);
  if (!rep.nilpotency.commutators_ok) {
    throw HypothesisFailure("nilpotency of order " + std::to_string(gens.claimed_order()) +
                            " fails: " + rep.nilpotency.failure);
  }
  if (!rep.nilpotency.epsilon_ok) {
    rep.warnings.push_back("epsilon = " + num(rep.epsilon) + " is not below " +
                           num(rep.nilpotency.epsilon_bound) +
                           "; the near-identity hypothesis is not met");
  }
  rep.abelian = verify_abelian(gens, opt.identity_tol, opt.identity_samples);
  rep.metabelian = verify_metabelian(gens, opt.identity_tol, opt.identity_samples);
  rep.common_fixed_points = common_fixed_points(gens, opt.fixed_tol, opt.grid);

  if (!rep.common_fixed_points.empty()) {
    rep.case_id = 1;
    rep.candidate_cases = {1};
    const auto& Z = rep.common_fixed_points.components;
    std::vector<std::pair<Interval, std::pair<bool, bool>>> gaps;
    double left = -1.0;
    bool left_interior = false;
    for (const Segment& s : Z) {
      if (s.lo - left >= kMinGapWidth) gaps.push_back({{left, s.lo}, {left_interior, true}});
      left = s.hi;
      left_interior = true;
    }
    if (1.0 - left >= kMinGapWidth) gaps.push_back({{left, 1.0}, {left_interior, false}});

    auto results = parallel_map(gaps.size(), [&](std::size_t g) {
      std::optional<CaseOneInterval> item;
      std::vector<std::string> notes;
      const Interval I = gaps[g].first;
      auto b = commutator_fixed_near(gens, I.lo, I.hi, 0.5 * (I.lo + I.hi), opt.commutator_tol);
      if (!b) {
        notes.push_back("no commutator-fixed point found in (" + num(I.lo) + ", " + num(I.hi) + ")");
        return std::pair{item, notes};
      }
      CaseOneInterval c;
      c.interval = I;
      c.b = *b;
      c.lo_interior = gaps[g].second.first;
      c.hi_interior = gaps[g].second.second;
      c.base = maximizing_letter(gens, c.b);
      TauSet ts = constants(gens, c.base, c.b, opt);
      c.tau = ts.tau;
      notes = ts.warnings;
      c.conjugacy = build_semi_conjugacy(gens, c.base, ts.a, c.b, opt.segments, opt.residual_samples);
      c.inf_J = end_behaviour(gens, c.base.inverse(), c.b);
      c.sup_J = end_behaviour(gens, c.base, c.b);
      item = std::move(c);
      return std::pair{item, notes};
    });
    for (auto& [item, notes] : results) {
      if (item) rep.case1.push_back(std::move(*item));
      rep.warnings.insert(rep.warnings.end(), notes.begin(), notes.end());
    }
    return rep;
  }

  const double target = opt.x0.value_or(0.0);
  auto x0 = commutator_fixed_near(gens, -1.0 + 1e-3, 1.0 - 1e-3, target, opt.commutator_tol);
  if (!x0) throw CommutatorNotFixed("no point of (-1,1) is fixed by every order-1 commutator");
  const Word base = maximizing_letter(gens, *x0);
  TauSet ts = constants(gens, base, *x0, opt);
  rep.warnings.insert(rep.warnings.end(), ts.warnings.begin(), ts.warnings.end());

  bool all_rational = true, low = false;
  for (const auto& t : ts.tau) {
    all_rational = all_rational && t.rational.has_value();
    low = low || t.low_confidence;
  }

  auto run_case_two = [&] {
    CaseTwo c;
    c.x0 = *x0;
    c.base = base;
    c.tau = ts.tau;
    c.conjugacy = build_semi_conjugacy(gens, base, ts.a, *x0, opt.segments, opt.residual_samples);
    double amax = 0.0;
    for (double v : ts.a) amax = std::max(amax, std::abs(v));
    double len = c.conjugacy.J.length();
    c.J_exceeds_a = len > amax;
    c.near_equality = len - amax < 1.0 / opt.segments;
    if (!c.J_exceeds_a) rep.warnings.push_back("|J| = " + num(len) + " does not exceed max |a_i|");
    rep.case2 = std::move(c);
  };
  auto run_case_three = [&] {
    ChainOptions copt;
    copt.tol = opt.chain_tol;
    copt.q_max = opt.q_max;
    copt.n_iters = opt.n_iters;
    copt.commutator_tol = opt.commutator_tol;
    copt.fixed_tol = opt.fixed_tol;
    copt.grid = opt.grid;
    CaseThree c;
    c.chain = find_periodic_chain(gens, *x0, copt);
    c.stabilizer = stabilizer_reduction(gens, c.chain, opt.chain_tol);
    rep.case3 = std::move(c);
  };

  if (!all_rational) {
    rep.case_id = 2;
    rep.candidate_cases = {2};
    run_case_two();
    return rep;
  }
  rep.case_id = 3;
  rep.candidate_cases = {3};
  std::string reason;
  if (!low) {
    try {
      run_case_three();
      return rep;
    } catch (const ChainInconsistent& e) {
      reason = std::string("rational constants give no periodic chain: ") + e.what();
    }
  } else {
    reason = "rational identification is low-confidence";
  }
  // The rational reading is not confirmed at this resolution: report both.
  rep.ambiguous = true;
  rep.candidate_cases = {3, 2};
  rep.warnings.push_back(reason);
  run_case_two();
  if (low) {
    try {
      run_case_three();
    } catch (const Error& e) {
      rep.warnings.push_back(std::string("case 3 reading failed: ") + e.what());
    }
  }
  if (!rep.case3) rep.case_id = 2;
  return rep;
}

}  // namespace pseudogroup
