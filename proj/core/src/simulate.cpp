#include "brox/simulate.hpp"

#include <cmath>

namespace brox {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw InvalidArgument(message);
}

struct Band {
  double level;
  double eps;

  bool contains(double x) const noexcept { return std::abs(x - level) < eps; }
  // A single step from p to q jumps over the whole band.
  bool jumped(double p, double q) const noexcept {
    return (p >= level + eps && q <= level - eps) || (p <= level - eps && q >= level + eps);
  }
};

[[noreturn]] void horizon(const SimConfig& cfg, double target) {
  throw HorizonExceeded("horizon exceeded: " + std::to_string(cfg.max_steps) +
                        " steps without reaching level " + std::to_string(target));
}

LocalTimeSample make_sample(const LegResult& leg, double weight, const SimConfig& cfg) {
  LocalTimeSample out;
  out.band_count = leg.band_count;
  out.brownian_local_time =
      static_cast<double>(leg.band_count) * cfg.dt / (2.0 * cfg.bandwidth);
  out.weight = weight;
  out.value = weight * out.brownian_local_time;
  out.is_exact_zero = !leg.touched;
  out.steps = leg.steps;
  out.dt = cfg.dt;
  out.bandwidth = cfg.bandwidth;
  return out;
}

}  // namespace

void SimConfig::validate() const {
  require(dt > 0.0 && std::isfinite(dt), "SimConfig: dt must be > 0");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), "SimConfig: bandwidth must be > 0");
  require(max_steps >= 1, "SimConfig: max_steps must be >= 1");
  require(floor_depth >= 0.0, "SimConfig: floor_depth must be >= 0");
}

double SimConfig::effective_floor_depth() const {
  if (floor_depth > 0.0) return std::max(floor_depth, bandwidth);
  return 20.0 * std::max(bandwidth, std::sqrt(dt));
}

DrivingPath simulate_until_level(double start, double target, const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  require(target != start, "simulate_until_level: target must differ from start");
  const double sd = std::sqrt(cfg.dt);
  const bool up = target > start;
  DrivingPath path;
  path.dt = cfg.dt;
  path.b.push_back(start);
  double x = start;
  for (std::uint64_t k = 0;; ++k) {
    if (k >= cfg.max_steps) horizon(cfg, target);
    x += sd * standard_normal(rng);
    path.b.push_back(x);
    if (up ? x >= target : x <= target) break;
  }
  path.stop_index = path.b.size() - 1;
  return path;
}

DrivingPath simulate_steps(double start, std::size_t n_steps, const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const double sd = std::sqrt(cfg.dt);
  DrivingPath path;
  path.dt = cfg.dt;
  path.b.reserve(n_steps + 1);
  path.b.push_back(start);
  double x = start;
  for (std::size_t k = 0; k < n_steps; ++k) {
    x += sd * standard_normal(rng);
    path.b.push_back(x);
  }
  path.stop_index = n_steps;
  return path;
}

LocalTimeSample local_time_at_level(const DrivingPath& path, double level, const SimConfig& cfg) {
  cfg.validate();
  require(path.stop_index < path.b.size(), "local_time_at_level: stop_index past end of path");
  const Band band{level, cfg.bandwidth};
  LegResult leg;
  for (std::size_t k = 0; k < path.stop_index; ++k) {
    if (band.contains(path.b[k])) {
      ++leg.band_count;
      leg.touched = true;
    } else if (band.jumped(path.b[k], path.b[k + 1])) {
      leg.touched = true;
    }
  }
  leg.steps = path.stop_index;
  leg.end = path.b[path.stop_index];
  SimConfig path_cfg = cfg;
  path_cfg.dt = path.dt;
  return make_sample(leg, 1.0, path_cfg);
}

LegResult walk_leg(double start, double target, double level, const SimConfig& cfg, Rng& rng,
                   bool stop_on_touch) {
  cfg.validate();
  require(start < target, "walk_leg: target must lie above start");
  require(level + cfg.bandwidth < target, "walk_leg: level band must lie below target");
  const Band band{level, cfg.bandwidth};
  const double floor = level - cfg.effective_floor_depth();
  const double sd = std::sqrt(cfg.dt);

  LegResult leg;
  double x = std::max(start, floor);
  if (band.contains(x)) {
    leg.band_count = 1;
    leg.touched = true;
    if (stop_on_touch) {
      leg.end = x;
      return leg;
    }
  }
  for (;;) {
    if (leg.steps >= cfg.max_steps) horizon(cfg, target);
    double next = x + sd * standard_normal(rng);
    ++leg.steps;
    const bool inside = band.contains(next);
    if (inside || band.jumped(x, next)) leg.touched = true;
    if (next >= target) {
      leg.end = next;
      return leg;
    }
    if (stop_on_touch && leg.touched) {
      leg.end = next;
      return leg;
    }
    if (inside) ++leg.band_count;
    x = next <= floor ? floor : next;
  }
}

LocalTimeSample brownian_passage_local_time(double start, double target, double level,
                                            const SimConfig& cfg, Rng& rng) {
  return make_sample(walk_leg(start, target, level, cfg, rng), 1.0, cfg);
}

LocalTimeSample brox_passage_local_time(const Environment& env, const ScaleMap& sm, double a,
                                        double b, const SimConfig& cfg, Rng& rng) {
  require(a > 0.0 && a < b, "brox_passage_local_time: need 0 < a < b");
  const double sa = eval_scale(sm, env, a);
  const double sb = eval_scale(sm, env, b);
  const LegResult leg = walk_leg(0.0, sb, sa, cfg, rng);
  return make_sample(leg, std::exp(-eval_w(env, a)), cfg);
}

LocalTimeSample brox_increment_sample(const Environment& env, const ScaleMap& sm, double a,
                                      double b, double c, const SimConfig& cfg, Rng& rng) {
  require(a > 0.0 && a < b && b < c, "brox_increment_sample: need 0 < a < b < c");
  const double sa = eval_scale(sm, env, a);
  const double sb = eval_scale(sm, env, b);
  const double sc = eval_scale(sm, env, c);
  const LegResult leg = walk_leg(sb, sc, sa, cfg, rng);
  return make_sample(leg, std::exp(-eval_w(env, a)), cfg);
}

std::pair<LocalTimeSample, LocalTimeSample> brox_increment_pair(const Environment& env,
                                                                const ScaleMap& sm, double a,
                                                                double t1, double t2, double t3,
                                                                double t4, const SimConfig& cfg,
                                                                Rng& rng) {
  require(a > 0.0 && a < t1 && t1 < t2 && t2 <= t3 && t3 < t4,
          "brox_increment_pair: need 0 < a < t1 < t2 <= t3 < t4");
  const double sa = eval_scale(sm, env, a);
  const double weight = std::exp(-eval_w(env, a));
  const LegResult first = walk_leg(eval_scale(sm, env, t1), eval_scale(sm, env, t2), sa, cfg, rng);
  double x = first.end;
  if (const double s3 = eval_scale(sm, env, t3); x < s3) x = walk_leg(x, s3, sa, cfg, rng).end;
  const double s4 = eval_scale(sm, env, t4);
  LegResult second;
  if (x < s4) {
    second = walk_leg(x, s4, sa, cfg, rng);
  } else {
    second.end = x;  // overshoot already passed s(t4): empty window
  }
  return {make_sample(first, weight, cfg), make_sample(second, weight, cfg)};
}

bool gambler_ruin_no_revisit(double s_a, double s_b, double s_c, const SimConfig& cfg, Rng& rng) {
  require(s_a < s_b && s_b < s_c, "gambler_ruin_no_revisit: need s_a < s_b < s_c");
  return !walk_leg(s_b, s_c, s_a, cfg, rng, /*stop_on_touch=*/true).touched;
}

TimeChangeRecord build_time_change(const Environment& env, const ScaleMap& sm,
                                   const DrivingPath& path) {
  require(path.stop_index < path.b.size(), "build_time_change: stop_index past end of path");
  TimeChangeRecord rec;
  rec.t.resize(path.stop_index + 1);
  rec.t[0] = 0.0;
  for (std::size_t k = 0; k < path.stop_index; ++k) {
    const double x = inverse_scale(sm, env, path.b[k]);
    rec.t[k + 1] = rec.t[k] + std::exp(-2.0 * eval_w(env, x)) * path.dt;
  }
  return rec;
}

std::vector<double> reconstruct_x_path(const Environment& env, const ScaleMap& sm,
                                       const DrivingPath& path, std::span<const double> t_grid) {
  const TimeChangeRecord rec = build_time_change(env, sm, path);
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    require(t >= 0.0, "reconstruct_x_path: t must be >= 0");
    if (t > rec.t.back()) {
      throw HorizonExceeded("reconstruct_x_path: t = " + std::to_string(t) +
                            " beyond the simulated clock " + std::to_string(rec.t.back()));
    }
    const auto it = std::upper_bound(rec.t.begin(), rec.t.end(), t);
    const auto k = static_cast<std::size_t>(std::distance(rec.t.begin(), it)) - 1;
    out.push_back(inverse_scale(sm, env, path.b[k]));
  }
  return out;
}

std::vector<double> brox_local_time_profile(const Environment& env, const ScaleMap& sm,
                                            const DrivingPath& path, std::size_t prefix_end,
                                            std::span<const double> sites, const SimConfig& cfg) {
  require(prefix_end <= path.stop_index, "brox_local_time_profile: prefix past stop_index");
  DrivingPath prefix;
  prefix.dt = path.dt;
  prefix.b.assign(path.b.begin(), path.b.begin() + static_cast<std::ptrdiff_t>(prefix_end) + 1);
  prefix.stop_index = prefix_end;
  std::vector<double> out;
  out.reserve(sites.size());
  for (double x : sites) {
    const double level = eval_scale(sm, env, x);
    out.push_back(std::exp(-eval_w(env, x)) * local_time_at_level(prefix, level, cfg).value);
  }
  return out;
}

}  // namespace brox
