#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "brox/environment.hpp"

namespace brox {

/// Scale function s(x) = \int_0^x e^{W(y)} dy tabulated at the grid nodes.
///
/// W is piecewise linear, so each cell integrates in closed form and the
/// table is exact up to rounding. s is strictly increasing with s(0) = 0.
class ScaleMap {
 public:
  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> s() const noexcept { return s_; }
  double s_min() const noexcept { return s_.front(); }
  double s_max() const noexcept { return s_.back(); }

 private:
  friend ScaleMap build_scale(const Environment& env);
  ScaleMap(GridSpec grid, std::vector<double> s) : grid_(grid), s_(std::move(s)) {}

  GridSpec grid_;
  std::vector<double> s_;
};

ScaleMap build_scale(const Environment& env);

/// s(x) off the nodes: node value plus the closed-form partial cell integral.
double eval_scale(const ScaleMap& sm, const Environment& env, double x);

/// s^{-1}(v) for v in [s_min, s_max]; residual <= 1e-10 * max(1, |v|).
double inverse_scale(const ScaleMap& sm, const Environment& env, double v);

/// Density of the speed measure, 2 e^{-W(x)}.
double speed_density(const Environment& env, double x);

/// CSV with header `x,s,speed`, one row per grid node.
void write_scale_csv(const ScaleMap& sm, const Environment& env, std::ostream& out);

}  // namespace brox
