#include "pseudogroup/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pseudogroup/errors.hpp"

namespace pseudogroup {

namespace {

constexpr int kIncreasingSamples = 1024;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

DegreeOneMap::DegreeOneMap(std::function<double(double)> base, double tol) : base_(std::move(base)) {
  u0_ = base_(0.0);
  double u1 = base_(1.0);
  if (!(std::abs(u1 - 1.0 - u0_) < tol)) {
    throw NotDegreeOne("u(1) - 1 - u(0) = " + num(u1 - 1.0 - u0_));
  }
  double prev = u0_;
  for (int i = 1; i <= kIncreasingSamples; ++i) {
    double cur = base_(static_cast<double>(i) / kIncreasingSamples);
    if (!(cur > prev)) throw NotIncreasing("degree-one map is not increasing on [0,1]");
    prev = cur;
  }
}

DegreeOneMap DegreeOneMap::from_samples(SampledMonotoneMap base, double tol) {
  Segment dom = base.domain();
  if (std::abs(dom.lo) > 1e-15 || std::abs(dom.hi - 1.0) > 1e-15) {
    throw Error("sampled degree-one map must be given on [0,1]");
  }
  return DegreeOneMap([m = std::move(base)](double x) { return m(std::clamp(x, 0.0, 1.0)); }, tol);
}

double DegreeOneMap::operator()(double x) const {
  double fl = std::floor(x);
  return base_(x - fl) + fl;
}

int DegreeOneMap::shift() const { return static_cast<int>(std::floor(u0_)); }

RotationEstimate rotation_number(const DegreeOneMap& u, int n_iters) {
  if (n_iters < 1) throw Error("rotation_number needs n_iters >= 1");
  const int s = u.shift();
  auto v = [&](double x) { return u.base(x) - s; };  // x in [0,1)
  const double v0 = v(0.0);

  RotationEstimate est;
  est.iterations = n_iters;
  est.error_bound = 1.0 / n_iters;
  if (v0 == 0.0) {
    // 0 is fixed by the normalized map.
    est.value = s;
    est.cross_check = s;
    return est;
  }

  double a = 0.0;
  long long p = 0;
  long long wraps = 0;
  for (int n = 0; n < n_iters; ++n) {
    if (a >= 0.0 && a < v0) ++p;
    double next = v(a);
    if (next >= 1.0) {
      next -= 1.0;
      ++wraps;
    }
    a = std::clamp(next, 0.0, std::nextafter(1.0, 0.0));
  }
  est.value = s + static_cast<double>(p) / n_iters;
  est.cross_check = s + (static_cast<double>(wraps) + a) / n_iters;
  if (std::abs(est.value - est.cross_check) > 2.0 / n_iters) {
    throw EstimatorMismatch("proportion estimate " + num(est.value) + " and orbit average " +
                            num(est.cross_check) + " differ by more than 2/n");
  }
  return est;
}

void require_commutator_fixed(const GeneratorSet& gens, double x0, double tol) {
  const int n = static_cast<int>(gens.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Word c = commutator(Word::letter(i), Word::letter(j));
      WordValue r = eval_word(gens, c, x0);
      if (!r.ok()) {
        throw CommutatorNotFixed("[" + gens[i].name() + "," + gens[j].name() +
                                 "] is undefined at x0 = " + num(x0));
      }
      if (!(std::abs(r.value - x0) < tol)) {
        throw CommutatorNotFixed("[" + gens[i].name() + "," + gens[j].name() + "] moves x0 = " +
                                 num(x0) + " by " + num(std::abs(r.value - x0)));
      }
    }
  }
}

namespace {

double value_at(const GeneratorSet& gens, const Word& w, double x, const char* what) {
  WordValue r = eval_word(gens, w, x);
  if (!r.ok()) throw OutOfDomain(r.failed_letter, std::string(what) + " is undefined at x0");
  return r.value;
}

RotationEstimate canonical_tau(const GeneratorSet& gens, const Word& f1, const Word& f2,
                               double x0, double target, const TauOptions& opt) {
  const Word f1inv = f1.inverse();
  const double clamp_slack = 100.0 * opt.tie_tol;
  double a = x0;
  long long p = 0;
  if (opt.trace) opt.trace->clear();
  for (int n = 0; n < opt.n_iters; ++n) {
    WordValue r = eval_word(gens, f2, a);
    if (!r.ok()) {
      throw InternalConsistency("f2 undefined at a_" + std::to_string(n) + " = " + num(a) +
                                "; the iteration left its workable interval");
    }
    int k = 0;
    double next = r.value;
    if (next < target - opt.tie_tol) {
      if (next < x0) {
        if (next < x0 - clamp_slack) {
          throw InternalConsistency("k(" + std::to_string(n) + ") would be negative");
        }
        next = x0;
      }
    } else {
      k = 1;
      WordValue back = eval_word(gens, f1inv, next);
      if (!back.ok()) {
        throw InternalConsistency("f1^-1 undefined at f2(a_" + std::to_string(n) + ")");
      }
      next = back.value;
      if (next >= target) {
        throw InternalConsistency("k(" + std::to_string(n) + ") would exceed 1");
      }
      if (next < x0) {
        if (next < x0 - clamp_slack) {
          throw InternalConsistency("a_" + std::to_string(n + 1) + " fell below x0");
        }
        next = x0;
      }
    }
    if (opt.trace) opt.trace->push_back(TauTraceRow{n, a, k, p});
    p += k;
    a = next;
  }
  RotationEstimate est;
  est.iterations = opt.n_iters;
  est.error_bound = 1.0 / opt.n_iters;
  est.value = static_cast<double>(p) / opt.n_iters;
  est.cross_check = std::numeric_limits<double>::quiet_NaN();
  return est;
}

RotationEstimate normalized_tau(const GeneratorSet& gens, const Word& f1, const Word& f2,
                                double x0, const TauOptions& opt, int depth) {
  if (depth > 4) throw InternalConsistency("case normalization did not terminate");
  const double y1 = value_at(gens, f1, x0, "f1");
  const double d1 = y1 - x0;
  if (std::abs(d1) <= kFixedPointTol) {
    throw FixedPointInput("x0 = " + num(x0) + " is a fixed point of f1");
  }
  auto prefix = [](RotationEstimate est, const std::string& step) {
    est.normalization = est.normalization.empty() ? step : step + "," + est.normalization;
    return est;
  };
  if (d1 < 0.0) {
    return prefix(normalized_tau(gens, f1.inverse(), f2.inverse(), x0, opt, depth + 1),
                  "invert-both");
  }
  const double d2 = value_at(gens, f2, x0, "f2") - x0;
  if (d2 < -opt.tie_tol) {
    RotationEstimate est = normalized_tau(gens, f1, f2.inverse(), x0, opt, depth + 1);
    est.value = -est.value;
    if (est.rational) est.rational->p = -est.rational->p;
    return prefix(est, "negate");
  }
  if (d2 > d1 + opt.tie_tol) {
    RotationEstimate inner = normalized_tau(gens, f2, f1, x0, opt, depth + 1);
    if (inner.value == 0.0) {
      throw InternalConsistency("tau(f1, f2, x0) = 0, so the reciprocal is undefined");
    }
    RotationEstimate est = inner;
    est.value = 1.0 / inner.value;
    est.error_bound = inner.error_bound / (inner.value * inner.value);
    est.rational.reset();
    return prefix(est, "reciprocal");
  }
  RotationEstimate est = canonical_tau(gens, f1, f2, x0, y1, opt);
  est.normalization = "canonical";
  return est;
}

}  // namespace

RotationEstimate relative_translation_number(const GeneratorSet& gens, const Word& f1,
                                             const Word& f2, double x0,
                                             const TauOptions& options) {
  if (options.n_iters < 1) throw Error("relative_translation_number needs n_iters >= 1");
  require_commutator_fixed(gens, x0, options.commutator_tol);
  return normalized_tau(gens, f1, f2, x0, options, 0);
}

DegreeOneMap circle_lift(const GeneratorSet& gens, const Word& f1, const Word& f2, double x0,
                         int segments, double tol) {
  if (segments < 2) throw Error("circle_lift needs at least two segments");
  const double d1 = value_at(gens, f1, x0, "f1") - x0;
  if (std::abs(d1) <= kFixedPointTol) {
    throw FixedPointInput("x0 = " + num(x0) + " is a fixed point of f1");
  }
  const Word base = d1 > 0.0 ? f1 : f1.inverse();
  Linearization lin = linearize_domain(gens, base, x0, segments, kMaxLinearizeRange);
  const SampledMonotoneMap& psi = lin.psi;

  std::vector<double> t, v, d;
  for (int i = 0; i <= segments; ++i) {
    double ti = static_cast<double>(i) / segments;
    double x = i == 0 ? x0 : i == segments ? lin.orbit_point(1) : psi.inverse(ti);
    WordValue r = eval_word_jet(gens, f2, x);
    if (!r.ok()) throw OutOfDomain(r.failed_letter, "f2 undefined on the fundamental segment");
    const Segment dom = psi.domain();
    if (!(r.value >= dom.lo && r.value <= dom.hi)) {
      throw OutOfDomain(0, "f2 moves the fundamental segment outside the linearized range");
    }
    t.push_back(ti);
    v.push_back(psi(r.value));
    d.push_back(psi.derivative(r.value) * r.derivative / psi.derivative(x));
  }
  if (!(std::abs(v.back() - 1.0 - v.front()) < tol)) {
    throw NotDegreeOne("lift of f2 is not degree one: defect " +
                       num(v.back() - 1.0 - v.front()));
  }
  v.back() = v.front() + 1.0;
  return DegreeOneMap::from_samples(SampledMonotoneMap::hermite(std::move(t), std::move(v),
                                                                std::move(d)),
                                    tol);
}

RotationEstimate rational_identify(const RotationEstimate& est, int q_max) {
  if (q_max < 1) throw Error("rational_identify needs q_max >= 1");
  RotationEstimate out = est;
  out.rational.reset();
  out.low_confidence = false;
  const double v = est.value;
  if (!std::isfinite(v)) return out;
  long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double x = v;
  for (int step = 0; step < 64; ++step) {
    double fl = std::floor(x);
    if (std::abs(fl) > 1e15) break;
    long long a = static_cast<long long>(fl);
    long long h = a * h1 + h2;
    long long k = a * k1 + k2;
    if (k > q_max) break;
    double margin = 1.0 / (2.0 * static_cast<double>(k) * q_max);
    if (std::abs(v - static_cast<double>(h) / static_cast<double>(k)) <=
        std::max(est.error_bound, margin)) {
      out.rational = Fraction{h, k};
      out.low_confidence = est.error_bound >= margin;
      return out;
    }
    double frac = x - fl;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
  }
  return out;
}

}  // namespace pseudogroup
