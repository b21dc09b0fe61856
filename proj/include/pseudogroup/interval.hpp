#pragma once

#include <algorithm>
#include <limits>

namespace pseudogroup {

/// Open interval (lo, hi) with extended-real endpoints, or the empty set.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  static Interval empty() {
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  }
  static Interval unit() { return {-1.0, 1.0}; }

  bool is_empty() const { return !(lo < hi); }
  double length() const { return is_empty() ? 0.0 : hi - lo; }
  bool contains(double x) const { return !is_empty() && lo < x && x < hi; }

  /// True when `inner` is a subset of this interval.
  bool contains(const Interval& inner) const {
    return inner.is_empty() || (!is_empty() && lo <= inner.lo && inner.hi <= hi);
  }

  Interval intersect(const Interval& other) const {
    if (is_empty() || other.is_empty()) return empty();
    Interval r{std::max(lo, other.lo), std::min(hi, other.hi)};
    return r.is_empty() ? empty() : r;
  }
};

/// Closed interval [lo, hi]; lo == hi is a single point. Used for fixed-point
/// plateaus and invariant-set members, which may degenerate to points.
struct Segment {
  double lo = 0.0;
  double hi = 0.0;

  bool is_point() const { return lo == hi; }
  bool contains(double x, double slack = 0.0) const { return lo - slack <= x && x <= hi + slack; }
  double length() const { return hi - lo; }
};

}  // namespace pseudogroup
