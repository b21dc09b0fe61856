#pragma once

#include <string_view>
#include <vector>

#include "pseudogroup/interval.hpp"

namespace pseudogroup {

/// Strictly increasing function given by nodes (t_i, v_i) and slopes d_i,
/// interpolated by piecewise cubic Hermite polynomials. Slopes are limited
/// (Fritsch–Carlson) so the interpolant is monotone between nodes.
class SampledMonotoneMap {
 public:
  enum class Scheme { Hermite, FritschCarlson };

  SampledMonotoneMap() = default;

  /// Slopes estimated from the data. Throws NotIncreasing unless both
  /// coordinates are strictly increasing.
  static SampledMonotoneMap fritsch_carlson(std::vector<double> t, std::vector<double> v);

  /// Slopes supplied by the caller (typically exact derivatives), then limited.
  static SampledMonotoneMap hermite(std::vector<double> t, std::vector<double> v,
                                    std::vector<double> d);

  /// Throws DomainError outside [t_0, t_last].
  double operator()(double t) const;
  double derivative(double t) const;
  /// Solves map(t) = y; throws DomainError outside [v_0, v_last].
  double inverse(double y) const;
  /// The same curve with coordinates swapped.
  SampledMonotoneMap inverted() const;

  Segment domain() const { return {t_.front(), t_.back()}; }
  Segment range() const { return {v_.front(), v_.back()}; }
  bool empty() const { return t_.empty(); }
  std::size_t size() const { return t_.size(); }

  const std::vector<double>& nodes() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<double>& slopes() const { return d_; }
  Scheme scheme() const { return scheme_; }
  std::string_view scheme_name() const;

 private:
  SampledMonotoneMap(std::vector<double> t, std::vector<double> v, std::vector<double> d,
                     Scheme scheme);
  std::size_t segment(double t) const;

  std::vector<double> t_;
  std::vector<double> v_;
  std::vector<double> d_;
  Scheme scheme_ = Scheme::Hermite;
};

}  // namespace pseudogroup
