#include "pseudogroup/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pseudogroup/errors.hpp"

namespace pseudogroup {

namespace {

// Node positions and ψ' at the base parameters of one fundamental segment.
struct Column {
  std::vector<double> x;
  std::vector<double> d;
  std::size_t first = 0;  // index of the first base parameter present
};

struct Base {
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> d;
};

Base base_segment(double x0, double x1, double fprime, int segments) {
  const double H = x1 - x0;
  const double s = 1.0 / H;
  const double r = 1.0 / fprime;
  const double d0 = 2.0 * s / (1.0 + r);
  const double d1 = r * d0;
  Base b;
  for (int i = 0; i < segments; ++i) {
    double u = static_cast<double>(i) / segments;
    double u2 = u * u, u3 = u2 * u;
    b.x.push_back(x0 + H * u);
    b.h.push_back((u3 - 2 * u2 + u) * H * d0 + (-2 * u3 + 3 * u2) + (u3 - u2) * H * d1);
    b.d.push_back((3 * u2 - 4 * u + 1) * d0 + (6 * u - 6 * u2) * s + (3 * u2 - 2 * u) * d1);
  }
  return b;
}

// Segments shorter than this are treated as the orbit having converged to a
// fixed point; node spacing would otherwise underflow.
constexpr double kMinSegmentLength = 1e-10;

double span(const Column& c) { return c.x.empty() ? 0.0 : c.x.back() - c.x.front(); }

// Pushes a column through g (f or f^-1). ψ'(g(x)) = ψ'(x) / g'(x) in both
// directions. Nodes whose image is undefined or leaves (-1,1) are dropped;
// for increasing g the survivors are contiguous.
Column step(const GeneratorSet& gens, const Word& g, const Column& prev) {
  Column next;
  bool started = false;
  for (std::size_t i = 0; i < prev.x.size(); ++i) {
    WordValue r = eval_word_jet(gens, g, prev.x[i]);
    bool ok = r.ok() && r.value > -1.0 && r.value < 1.0 && r.derivative > 0.0;
    if (!ok) {
      if (started) break;
      continue;
    }
    if (!started) next.first = prev.first + i;
    started = true;
    next.x.push_back(r.value);
    next.d.push_back(prev.d[i] / r.derivative);
  }
  return next;
}

Linearization build(const GeneratorSet& gens, const Word& f, double x0, int segments,
                    int k_neg, int k_pos, bool strict) {
  if (segments < 1) throw Error("linearize needs at least one node per segment");
  if (!(x0 > -1.0 && x0 < 1.0)) throw OutOfDomain(0, "linearization base point outside (-1,1)");
  WordValue jet = eval_word_jet(gens, f, x0);
  if (!jet.ok()) throw OutOfDomain(jet.failed_letter, "linearized word undefined at x0");
  if (!(jet.value > x0 + kFixedPointTol)) {
    throw FixedPointInput("linearization needs f(x0) > x0; got f(x0) - x0 = " +
                          std::to_string(jet.value - x0));
  }
  if (!(jet.value < 1.0)) throw OutOfDomain(0, "f(x0) leaves (-1,1)");

  const Base base = base_segment(x0, jet.value, jet.derivative, segments);
  const std::size_t full = static_cast<std::size_t>(segments);
  const Word finv = f.inverse();

  Linearization lin;
  lin.f = f;
  lin.x0 = x0;

  // Columns j = lo .. hi, stored at cols[j - lo].
  std::deque<Column> cols;
  cols.push_back(Column{base.x, base.d, 0});
  int lo = 0, hi = 0;

  // Positive side: column j needs the orbit point f^j(x0) as its node 0.
  while (hi < k_pos) {
    Column next = step(gens, f, cols.back());
    bool has_orbit = !next.x.empty() && next.first == 0;
    if (!has_orbit) {
      if (strict) throw OutOfDomain(0, "f^" + std::to_string(hi + 1) + "(x0) leaves (-1,1)");
      break;
    }
    bool complete = next.x.size() == full;
    if (!strict && complete && span(next) < kMinSegmentLength) break;
    ++hi;
    cols.push_back(std::move(next));
    if (!complete) {
      if (strict && hi < k_pos) {
        throw OutOfDomain(0, "segment " + std::to_string(hi) + " of the linearization leaves (-1,1)");
      }
      lin.partial_hi = !strict;
      break;
    }
  }
  // Negative side: column -j is usable when its node 0, f^-j(x0), is defined.
  while (lo > -k_neg) {
    Column next = step(gens, finv, cols.front());
    bool complete = next.x.size() == full;
    if (!strict && complete && span(next) < kMinSegmentLength) break;
    if (!complete) {
      if (strict) throw OutOfDomain(0, "f^" + std::to_string(lo - 1) + "(x0) leaves (-1,1)");
      if (!next.x.empty()) {
        lin.partial_lo = true;
        cols.push_front(std::move(next));
        --lo;
      }
      break;
    }
    --lo;
    cols.push_front(std::move(next));
  }

  std::vector<double> t, v, d;
  for (int j = lo; j <= hi; ++j) {
    const Column& c = cols[static_cast<std::size_t>(j - lo)];
    std::size_t n = c.x.size();
    // In strict mode the last column only contributes the endpoint f^k(x0).
    if (strict && j == hi && hi == k_pos) n = std::min<std::size_t>(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(c.x[i]);
      v.push_back(base.h[c.first + i] + j);
      d.push_back(c.d[i]);
    }
  }
  lin.k_lo = lin.partial_lo ? lo + 1 : lo;
  lin.k_hi = hi;
  for (int j = lin.k_lo; j <= lin.k_hi; ++j) {
    lin.orbit.push_back(cols[static_cast<std::size_t>(j - lo)].x.front());
  }
  lin.psi = SampledMonotoneMap::hermite(std::move(t), std::move(v), std::move(d));

  const Segment dom = lin.psi.domain();
  const auto& nodes = lin.psi.nodes();
  for (std::size_t p = 0; p + 1 < nodes.size(); ++p) {
    double m = 0.5 * (nodes[p] + nodes[p + 1]);
    WordValue r = eval_word(gens, f, m);
    if (!r.ok() || r.value > dom.hi) continue;
    lin.residual = std::max(lin.residual, std::abs(lin.psi(r.value) - lin.psi(m) - 1.0));
  }
  return lin;
}

}  // namespace

Linearization linearize(const GeneratorSet& gens, const Word& f, double x0, int segments,
                        int range_k) {
  if (range_k < 1 || range_k > kMaxLinearizeRange) {
    throw Error("linearize range_k must lie in [1, " + std::to_string(kMaxLinearizeRange) + "]");
  }
  return build(gens, f, x0, segments, range_k, range_k, true);
}

Linearization linearize_domain(const GeneratorSet& gens, const Word& f, double x0, int segments,
                               int max_k) {
  if (max_k < 1) throw Error("linearize_domain needs max_k >= 1");
  return build(gens, f, x0, segments, max_k, max_k, false);
}

}  // namespace pseudogroup
