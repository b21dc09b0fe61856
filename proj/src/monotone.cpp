#include "pseudogroup/monotone.hpp"

#include <algorithm>
#include <cmath>

#include "pseudogroup/errors.hpp"

namespace pseudogroup {

namespace {

void check_increasing(const std::vector<double>& xs, const char* what) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i] < xs[i + 1])) {
      throw NotIncreasing(std::string("sampled map: ") + what + " not strictly increasing at node " +
                          std::to_string(i));
    }
  }
}

// Fritsch–Carlson: nonnegative slopes, and (α, β) pulled into the disc of
// radius 3 on every interval.
void limit(const std::vector<double>& t, const std::vector<double>& v, std::vector<double>& d) {
  for (double& s : d) {
    if (!(s >= 0.0) || !std::isfinite(s)) s = 0.0;
  }
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double delta = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
    double a = d[i] / delta, b = d[i + 1] / delta;
    double r = a * a + b * b;
    if (r > 9.0) {
      double tau = 3.0 / std::sqrt(r);
      d[i] = tau * a * delta;
      d[i + 1] = tau * b * delta;
    }
  }
}

}  // namespace

SampledMonotoneMap::SampledMonotoneMap(std::vector<double> t, std::vector<double> v,
                                       std::vector<double> d, Scheme scheme)
    : t_(std::move(t)), v_(std::move(v)), d_(std::move(d)), scheme_(scheme) {
  if (t_.size() < 2 || v_.size() != t_.size() || d_.size() != t_.size()) {
    throw Error("sampled map needs at least two nodes with matching values and slopes");
  }
  check_increasing(t_, "nodes");
  check_increasing(v_, "values");
  limit(t_, v_, d_);
}

SampledMonotoneMap SampledMonotoneMap::fritsch_carlson(std::vector<double> t,
                                                       std::vector<double> v) {
  const std::size_t n = t.size();
  if (n < 2 || v.size() != n) throw Error("sampled map needs at least two nodes");
  std::vector<double> d(n);
  auto secant = [&](std::size_t i) { return (v[i + 1] - v[i]) / (t[i + 1] - t[i]); };
  d[0] = secant(0);
  d[n - 1] = secant(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = 0.5 * (secant(i - 1) + secant(i));
  return SampledMonotoneMap(std::move(t), std::move(v), std::move(d), Scheme::FritschCarlson);
}

SampledMonotoneMap SampledMonotoneMap::hermite(std::vector<double> t, std::vector<double> v,
                                               std::vector<double> d) {
  return SampledMonotoneMap(std::move(t), std::move(v), std::move(d), Scheme::Hermite);
}

std::string_view SampledMonotoneMap::scheme_name() const {
  return scheme_ == Scheme::Hermite ? "cubic-hermite" : "fritsch-carlson";
}

std::size_t SampledMonotoneMap::segment(double t) const {
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(i, t_.size() - 2);
}

double SampledMonotoneMap::operator()(double t) const {
  if (empty() || !(t >= t_.front() && t <= t_.back())) {
    throw DomainError("sampled map evaluated outside its nodes");
  }
  std::size_t i = segment(t);
  double h = t_[i + 1] - t_[i];
  double s = (t - t_[i]) / h;
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * v_[i] + (s3 - 2 * s2 + s) * h * d_[i] +
         (-2 * s3 + 3 * s2) * v_[i + 1] + (s3 - s2) * h * d_[i + 1];
}

double SampledMonotoneMap::derivative(double t) const {
  if (empty() || !(t >= t_.front() && t <= t_.back())) {
    throw DomainError("sampled map differentiated outside its nodes");
  }
  std::size_t i = segment(t);
  double h = t_[i + 1] - t_[i];
  double s = (t - t_[i]) / h;
  double s2 = s * s;
  return (6 * s2 - 6 * s) * (v_[i] - v_[i + 1]) / h + (3 * s2 - 4 * s + 1) * d_[i] +
         (3 * s2 - 2 * s) * d_[i + 1];
}

double SampledMonotoneMap::inverse(double y) const {
  if (empty() || !(y >= v_.front() && y <= v_.back())) {
    throw DomainError("sampled map inverted outside its values");
  }
  auto it = std::upper_bound(v_.begin(), v_.end(), y);
  std::size_t i = it == v_.begin() ? 0 : static_cast<std::size_t>(it - v_.begin()) - 1;
  i = std::min(i, v_.size() - 2);
  double lo = t_[i], hi = t_[i + 1];
  if (y == v_[i]) return lo;
  if (y == v_[i + 1]) return hi;
  for (int it_count = 0; it_count < 200 && lo < hi; ++it_count) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((*this)(mid) < y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

SampledMonotoneMap SampledMonotoneMap::inverted() const {
  std::vector<double> d(d_.size());
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (d_[i] > 0.0) {
      d[i] = 1.0 / d_[i];
    } else {
      // Vertical tangent of the inverse; the limiter caps it at 3 secants.
      std::size_t j = i + 1 < d_.size() ? i : i - 1;
      d[i] = 3.0 * (t_[j + 1] - t_[j]) / (v_[j + 1] - v_[j]);
    }
  }
  return SampledMonotoneMap(v_, t_, std::move(d), scheme_);
}

}  // namespace pseudogroup
