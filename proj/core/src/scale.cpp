#include "brox/scale.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "brox/error.hpp"

namespace brox {

namespace {

constexpr double kFlatCell = 1e-12;

// \int over the first fraction u in [0,1] of a cell of width h on which W
// rises linearly from w0 by dw.
double partial_cell(double w0, double dw, double h, double u) {
  if (std::abs(dw) < kFlatCell) return h * std::exp(w0) * u;
  return h * std::exp(w0) * std::expm1(dw * u) / dw;
}

void check_same_grid(const ScaleMap& sm, const Environment& env) {
  if (!(sm.grid() == env.grid())) {
    throw InvalidArgument("scale map and environment were built on different grids");
  }
}

}  // namespace

namespace {

struct NeumaierSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

ScaleMap build_scale(const Environment& env) {
  const GridSpec& g = env.grid();
  const auto w = env.w();
  const std::size_t z = g.zero_index();
  std::vector<double> s(g.node_count(), 0.0);
  // Compensated running sums; plain accumulation drifts by ~1e-14 over
  // thousands of cells, visible even on the flat environment.
  NeumaierSum right;
  for (std::size_t i = z + 1; i < s.size(); ++i) {
    right.add(partial_cell(w[i - 1], w[i] - w[i - 1], g.h(), 1.0));
    s[i] = right.value();
  }
  NeumaierSum left;
  for (std::size_t k = 1; k <= z; ++k) {
    const std::size_t i = z - k;
    left.add(-partial_cell(w[i], w[i + 1] - w[i], g.h(), 1.0));
    s[i] = left.value();
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1]) || !std::isfinite(s[i])) {
      throw InvalidArgument("scale map is not strictly increasing near node " + std::to_string(i) +
                            " (environment too extreme for double precision)");
    }
  }
  return ScaleMap(g, std::move(s));
}

double eval_scale(const ScaleMap& sm, const Environment& env, double x) {
  check_same_grid(sm, env);
  const GridSpec& g = sm.grid();
  if (!g.contains(x)) {
    throw DomainError("eval_scale: x = " + std::to_string(x) + " outside the grid");
  }
  if (auto i = g.node_index(x)) return sm.s()[*i];
  const std::size_t j = g.cell_of(x);
  const auto w = env.w();
  const double u = (x - g.node(j)) / g.h();
  return sm.s()[j] + partial_cell(w[j], w[j + 1] - w[j], g.h(), u);
}

double inverse_scale(const ScaleMap& sm, const Environment& env, double v) {
  check_same_grid(sm, env);
  const auto s = sm.s();
  if (!(v >= s.front() && v <= s.back())) {
    throw DomainError("inverse_scale: v = " + std::to_string(v) + " outside [" +
                      std::to_string(s.front()) + ", " + std::to_string(s.back()) + "]");
  }
  const GridSpec& g = sm.grid();
  // First node with s > v; the cell is [j, j+1].
  auto it = std::upper_bound(s.begin(), s.end(), v);
  if (it == s.end()) return g.x_max();
  const auto j = static_cast<std::size_t>(std::distance(s.begin(), it)) - 1;
  if (s[j] == v) return g.node(j);

  const auto w = env.w();
  const double w0 = w[j];
  const double dw = w[j + 1] - w[j];
  const double h = g.h();
  const double target = v - s[j];
  double u;
  if (std::abs(dw) < kFlatCell) {
    u = target / (h * std::exp(w0));
  } else {
    u = std::log1p(target * dw / (h * std::exp(w0))) / dw;
  }
  u = std::clamp(u, 0.0, 1.0);

  const double tol = 1e-10 * std::max(1.0, std::abs(v));
  auto residual = [&](double uu) { return s[j] + partial_cell(w0, dw, h, uu) - v; };
  if (std::abs(residual(u)) > tol) {
    // Closed form lost precision (extreme dw); bisect on the monotone cell.
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 80; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (residual(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    u = 0.5 * (lo + hi);
  }
  return g.node(j) + u * h;
}

double speed_density(const Environment& env, double x) { return 2.0 * std::exp(-eval_w(env, x)); }

void write_scale_csv(const ScaleMap& sm, const Environment& env, std::ostream& out) {
  check_same_grid(sm, env);
  const auto prec = out.precision(17);
  out << "x,s,speed\n";
  const auto s = sm.s();
  const auto w = env.w();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << sm.grid().node(i) << ',' << s[i] << ',' << 2.0 * std::exp(-w[i]) << '\n';
  }
  out.precision(prec);
}

}  // namespace brox
