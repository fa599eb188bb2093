#include "brox/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brox/analytic.hpp"
#include "brox/stats.hpp"

namespace brox {

namespace {

constexpr double kBaseDt = 1e-4;

Check relative_check(std::string name, double observed, double target, double rel_tol,
                     bool gating = true) {
  const bool ok = std::abs(observed - target) <= rel_tol * std::abs(target);
  return {std::move(name), observed, target, rel_tol, ok, gating};
}

Check absolute_check(std::string name, double observed, double target, double tol,
                     bool gating = true) {
  return {std::move(name), observed, target, tol, std::abs(observed - target) <= tol, gating};
}

// Upper bound: observed <= limit.
Check bound_check(std::string name, double observed, double limit, bool gating = true) {
  return {std::move(name), observed, 0.0, limit, observed <= limit, gating};
}

// Lower bound: observed >= minimum.
Check minimum_check(std::string name, double observed, double minimum, bool gating = true) {
  return {std::move(name), observed, minimum, 0.0, observed >= minimum, gating};
}

nlohmann::json config_json(const SimConfig& cfg) {
  return {{"dt", cfg.dt},
          {"bandwidth", cfg.bandwidth},
          {"max_steps", cfg.max_steps},
          {"seed", cfg.seed},
          {"floor_depth", cfg.effective_floor_depth()}};
}

std::vector<double> values_of(const std::vector<LocalTimeSample>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.value);
  return out;
}

double exact_zero_fraction(const std::vector<LocalTimeSample>& samples) {
  const auto zeros = std::count_if(samples.begin(), samples.end(),
                                   [](const LocalTimeSample& s) { return s.is_exact_zero; });
  return static_cast<double>(zeros) / static_cast<double>(samples.size());
}

GridSpec random_env_grid() { return GridSpec(-2.0, 8.0, 0.01); }

// n-th derivative at 0 of a function known only on t >= 0: forward
// differences at steps h, 2h, 4h, 8h combined by Richardson extrapolation
// (the forward-difference error has every power of h).
double forward_derivative(const std::function<double(double)>& f, int n, double h) {
  auto difference = [&](double step) {
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
      sum += sign * binom * f(k * step);
      binom = binom * (n - k) / (k + 1);
    }
    return sum / std::pow(step, n);
  };
  constexpr int kLevels = 4;
  std::array<double, kLevels> table{};
  for (int i = 0; i < kLevels; ++i) table[static_cast<std::size_t>(i)] = difference(h * std::ldexp(1.0, i));
  for (int order = 1; order < kLevels; ++order) {
    const double factor = std::ldexp(1.0, order);
    for (int i = 0; i + order < kLevels; ++i) {
      const auto j = static_cast<std::size_t>(i);
      table[j] = (factor * table[j] - table[j + 1]) / (factor - 1.0);
    }
  }
  return table[0];
}

template <class F>
double integrate(F f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-14);
}

struct RandomTriple {
  double a, b, c;
};

RandomTriple random_triple(Rng& rng) {
  const double a = 0.2 + 1.8 * uniform01(rng);
  const double b = a + 0.1 + 1.9 * uniform01(rng);
  const double c = b + 0.1 + 1.9 * uniform01(rng);
  return {a, b, c};
}

}  // namespace

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass || !c.gating; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json doc;
  doc["kind"] = kind;
  doc["pass"] = pass();
  doc["config"] = config_json(config);
  auto& arr = doc["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"observed", c.observed},
                   {"target", c.target},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass},
                   {"gating", c.gating}});
  }
  doc["details"] = details;
  return doc;
}

SimConfig config_for_gap(double scale_gap, const VerifyOptions& opts) {
  SimConfig cfg;
  const double g = std::min(scale_gap, 1.0);
  cfg.dt = opts.dt.value_or(kBaseDt * g * g);
  cfg.bandwidth = opts.bandwidth.value_or(std::sqrt(cfg.dt));
  cfg.floor_depth = opts.floor_depth.value_or(0.0);
  cfg.max_steps = opts.max_steps;
  cfg.seed = opts.seed;
  cfg.validate();
  return cfg;
}

VerifyReport verify_exponential(const Environment& env, const ScaleMap& sm,
                                const VerifyOptions& opts) {
  const PassageLaw law = passage_law(sm, env, opts.a, opts.b);
  const double gap = eval_scale(sm, env, opts.b) - eval_scale(sm, env, opts.a);

  VerifyReport rep;
  rep.kind = "exponential";
  rep.config = config_for_gap(gap, opts);
  const SimConfig cfg = rep.config;

  rep.samples = run_replicated(opts.reps, child_seed(opts.seed, 1), opts.workers,
                               [&](Rng& rng, std::size_t) {
                                 return brox_passage_local_time(env, sm, opts.a, opts.b, cfg, rng);
                               });
  const auto values = values_of(rep.samples);
  const SummaryReport summary = summarize(values);
  const double zero_share = summary.zero_fraction;
  const auto cdf = [&](double t) { return passage_cdf(law, t); };
  const KsResult path_ks = ks_against_cdf(values, cdf);

  const auto direct = run_replicated(opts.direct_reps, child_seed(opts.seed, 2), opts.workers,
                                     [&](Rng& rng, std::size_t) { return sample_passage(law, rng); });
  const KsResult direct_ks = ks_against_cdf(direct, cdf);

  rep.checks.push_back(relative_check("path_mean", summary.mean, 1.0 / law.lambda, 0.05));
  rep.checks.push_back(bound_check("path_zero_fraction", zero_share, 0.01));
  rep.checks.push_back({"direct_ks", direct_ks.statistic, 0.0, direct_ks.threshold, direct_ks.pass});
  rep.checks.push_back(
      {"path_ks", path_ks.statistic, 0.0, path_ks.threshold, path_ks.pass, /*gating=*/false});

  rep.details["lambda"] = law.lambda;
  rep.details["points"] = {opts.a, opts.b};
  rep.details["summary"] = report_to_json(summary, path_ks);
  rep.details["seeds"] = {{"paths", child_seed(opts.seed, 1)}, {"direct", child_seed(opts.seed, 2)}};
  rep.details["counts"] = {{"paths", opts.reps}, {"direct", opts.direct_reps}};
  return rep;
}

VerifyReport verify_increment(const Environment& env, const ScaleMap& sm,
                              const VerifyOptions& opts) {
  const IncrementLaw law = increment_law(sm, env, opts.a, opts.b, opts.c);
  const double sa = eval_scale(sm, env, opts.a);
  const double sb = eval_scale(sm, env, opts.b);
  const double sc = eval_scale(sm, env, opts.c);

  VerifyReport rep;
  rep.kind = "increment";
  rep.config = config_for_gap(std::min(sb - sa, sc - sb), opts);
  const SimConfig cfg = rep.config;

  const auto direct = run_replicated(opts.direct_reps, child_seed(opts.seed, 2), opts.workers,
                                     [&](Rng& rng, std::size_t) { return sample_increment(law, rng); });
  const SummaryReport direct_summary = summarize(direct);
  const auto n_direct = static_cast<double>(direct.size());
  const double atom_se = std::sqrt(law.alpha * (1.0 - law.alpha) / n_direct);
  std::vector<double> positive;
  std::copy_if(direct.begin(), direct.end(), std::back_inserter(positive),
               [](double x) { return x > 0.0; });
  const KsResult positive_ks =
      ks_against_cdf(positive, [&](double t) { return passage_cdf(PassageLaw{law.lambda}, t); });

  rep.samples = run_replicated(opts.reps, child_seed(opts.seed, 1), opts.workers,
                               [&](Rng& rng, std::size_t) {
                                 return brox_increment_sample(env, sm, opts.a, opts.b, opts.c, cfg,
                                                              rng);
                               });
  const auto values = values_of(rep.samples);
  const SummaryReport summary = summarize(values);
  const KsResult path_ks =
      ks_against_cdf(values, [&](double t) { return increment_cdf(law, t); }, law.alpha);

  rep.checks.push_back(absolute_check("direct_zero_fraction", direct_summary.zero_fraction,
                                      law.alpha, 3.0 * atom_se));
  rep.checks.push_back({"direct_positive_ks", positive_ks.statistic, 0.0, positive_ks.threshold,
                        positive_ks.pass});
  rep.checks.push_back(
      absolute_check("path_zero_fraction", exact_zero_fraction(rep.samples), law.alpha, 0.03));
  rep.checks.push_back(relative_check("path_mean", summary.mean, (1.0 - law.alpha) / law.lambda, 0.05));
  rep.checks.push_back(
      {"path_ks", path_ks.statistic, 0.0, path_ks.threshold, path_ks.pass, /*gating=*/false});

  rep.details["law"] = law_to_json(law);
  rep.details["points"] = {opts.a, opts.b, opts.c};
  rep.details["summary"] = report_to_json(summary, path_ks);
  rep.details["direct_summary"] = report_to_json(direct_summary, positive_ks);
  rep.details["seeds"] = {{"paths", child_seed(opts.seed, 1)}, {"direct", child_seed(opts.seed, 2)}};
  rep.details["counts"] = {{"paths", opts.reps}, {"direct", opts.direct_reps}};
  return rep;
}

VerifyReport verify_atom(const Environment& env, const ScaleMap& sm, const VerifyOptions& opts) {
  const IncrementLaw law = increment_law(sm, env, opts.a, opts.b, opts.c);
  const double sa = eval_scale(sm, env, opts.a);
  const double sb = eval_scale(sm, env, opts.b);
  const double sc = eval_scale(sm, env, opts.c);

  VerifyReport rep;
  rep.kind = "atom";
  rep.config = config_for_gap(std::min(sb - sa, sc - sb), opts);
  const SimConfig cfg = rep.config;
  const std::uint64_t stream = child_seed(opts.seed, 3);

  const auto no_revisit = run_replicated(opts.reps, stream, opts.workers, [&](Rng& rng, std::size_t) {
    return gambler_ruin_no_revisit(sa, sb, sc, cfg, rng);
  });
  rep.samples = run_replicated(opts.reps, stream, opts.workers, [&](Rng& rng, std::size_t) {
    return brox_increment_sample(env, sm, opts.a, opts.b, opts.c, cfg, rng);
  });

  std::size_t hits = 0;
  std::size_t mismatches = 0;
  for (std::size_t r = 0; r < opts.reps; ++r) {
    hits += no_revisit[r] ? 1 : 0;
    if (no_revisit[r] != rep.samples[r].is_exact_zero) ++mismatches;
  }
  const auto n = static_cast<double>(opts.reps);
  const double p = static_cast<double>(hits) / n;
  const double se = std::sqrt(law.alpha * (1.0 - law.alpha) / n);

  rep.checks.push_back(absolute_check("no_revisit_probability", p, law.alpha, 3.0 * se));
  rep.checks.push_back(absolute_check("pathwise_mismatches", static_cast<double>(mismatches), 0.0, 0.0));
  rep.checks.push_back(absolute_check("path_zero_fraction", exact_zero_fraction(rep.samples),
                                      law.alpha, 3.0 * se, /*gating=*/false));

  rep.details["law"] = law_to_json(law);
  rep.details["points"] = {opts.a, opts.b, opts.c};
  rep.details["scale_points"] = {sa, sb, sc};
  rep.details["seeds"] = {{"shared_stream", stream}};
  rep.details["counts"] = {{"trials", opts.reps}, {"no_revisit", hits}};
  return rep;
}

VerifyReport verify_moments(const VerifyOptions& opts) {
  VerifyReport rep;
  rep.kind = "moments";
  rep.config = config_for_gap(1.0, opts);

  double worst_identity = 0.0;
  double worst_fd = 0.0;
  double worst_z = 0.0;
  std::size_t direct_failures = 0;
  auto& per_env = rep.details["environments"] = nlohmann::json::array();

  Rng pick(child_seed(opts.seed, 4));
  for (std::size_t e = 0; e < opts.env_count; ++e) {
    const Environment env = generate_two_sided_bm(random_env_grid(), child_seed(opts.seed, 100 + e));
    const ScaleMap sm = build_scale(env);
    const auto [a, b, c] = random_triple(pick);
    const IncrementLaw law = increment_law(sm, env, a, b, c);

    for (int n = 1; n <= 5; ++n) {
      const double moment = increment_moment(sm, env, a, b, c, n);
      const double mixture = (1.0 - law.alpha) * std::tgamma(n + 1.0) / std::pow(law.lambda, n);
      worst_identity = std::max(worst_identity, std::abs(moment - mixture) / std::abs(mixture));
    }
    const auto mgf = [&](double t) { return increment_mgf(law, t); };
    for (int n = 1; n <= 3; ++n) {
      const double moment = increment_moment(sm, env, a, b, c, n);
      const double derivative = forward_derivative(mgf, n, 1e-3 * law.lambda);
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      worst_fd = std::max(worst_fd, std::abs(sign * derivative - moment) / moment);
    }

    const auto draws = run_replicated(opts.direct_reps, child_seed(opts.seed, 300 + e), opts.workers,
                                      [&](Rng& rng, std::size_t) { return sample_increment(law, rng); });
    const SummaryReport s = summarize(draws);
    std::array<double, 2> z{};
    for (int n = 1; n <= 2; ++n) {
      const auto k = static_cast<std::size_t>(n - 1);
      z[k] = std::abs(s.moments[k] - increment_moment(sm, env, a, b, c, n)) / s.moment_se[k];
      worst_z = std::max(worst_z, z[k]);
      if (z[k] > 3.0) ++direct_failures;
    }
    per_env.push_back({{"seed", child_seed(opts.seed, 100 + e)},
                       {"points", {a, b, c}},
                       {"law", law_to_json(law)},
                       {"z_moment1", z[0]},
                       {"z_moment2", z[1]}});
  }

  rep.checks.push_back(bound_check("moment_identity_max_rel_error", worst_identity, 1e-10));
  rep.checks.push_back(bound_check("fd_derivative_max_rel_error", worst_fd, 1e-4));
  rep.checks.push_back(
      absolute_check("direct_moments_outside_3se", static_cast<double>(direct_failures), 0.0, 0.0));
  rep.checks.push_back(bound_check("direct_moments_max_z", worst_z, 3.0, /*gating=*/false));
  rep.details["counts"] = {{"environments", opts.env_count}, {"draws_per_env", opts.direct_reps}};
  return rep;
}

VerifyReport verify_consistency(const VerifyOptions& opts) {
  VerifyReport rep;
  rep.kind = "consistency";
  rep.config = config_for_gap(1.0, opts);

  constexpr std::size_t kInputs = 1000;
  constexpr std::size_t kEnvs = 10;
  double worst_mgf = 0.0;
  double worst_laplace = 0.0;
  double worst_cdf = 0.0;
  double worst_norm = 0.0;

  Rng pick(child_seed(opts.seed, 5));
  std::vector<Environment> envs;
  std::vector<ScaleMap> maps;
  for (std::size_t e = 0; e < kEnvs; ++e) {
    envs.push_back(generate_two_sided_bm(random_env_grid(), child_seed(opts.seed, 500 + e)));
    maps.push_back(build_scale(envs.back()));
  }
  for (std::size_t i = 0; i < kInputs; ++i) {
    const Environment& env = envs[i % kEnvs];
    const ScaleMap& sm = maps[i % kEnvs];
    const auto [a, b, c] = random_triple(pick);
    const IncrementLaw law = increment_law(sm, env, a, b, c);
    const double t = law.lambda * 10.0 * uniform01(pick);

    worst_mgf = std::max(worst_mgf,
                         std::abs(increment_mgf(law, t) - mgf_paper_form(sm, env, a, b, c, t)));

    const double horizon = 50.0 / law.lambda;
    const auto continuous = [&](double x) { return increment_density(law, x).continuous_value; };
    const double transform =
        law.alpha + integrate([&](double x) { return continuous(x) * std::exp(-t * x); }, 0.0, horizon);
    worst_laplace = std::max(worst_laplace, std::abs(transform - increment_mgf(law, t)));

    const double total = law.alpha + integrate(continuous, 0.0, horizon);
    worst_norm = std::max(worst_norm, std::abs(total - 1.0));

    const double x = horizon * 0.2 * uniform01(pick);
    const double cdf = law.alpha + integrate(continuous, 0.0, x);
    worst_cdf = std::max(worst_cdf, std::abs(cdf - increment_cdf(law, x)));
  }

  rep.checks.push_back(bound_check("mgf_forms_max_abs_diff", worst_mgf, 1e-12));
  rep.checks.push_back(bound_check("laplace_of_density_max_abs_diff", worst_laplace, 1e-6));
  rep.checks.push_back(bound_check("cdf_vs_quadrature_max_abs_diff", worst_cdf, 1e-8));
  rep.checks.push_back(bound_check("normalization_max_abs_diff", worst_norm, 1e-8));
  rep.details["counts"] = {{"inputs", kInputs}, {"environments", kEnvs}};
  return rep;
}

VerifyReport verify_rayknight(const VerifyOptions& opts) {
  VerifyReport rep;
  rep.kind = "rayknight";
  rep.config = config_for_gap(1.0, opts);
  const SimConfig cfg = rep.config;

  const std::array<double, 2> targets{1.0, 0.5};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double target = targets[i];
    const auto samples = run_replicated(opts.reps, child_seed(opts.seed, 6 + i), opts.workers,
                                        [&](Rng& rng, std::size_t) {
                                          return brownian_passage_local_time(0.0, target, 0.0, cfg, rng);
                                        });
    const auto values = values_of(samples);
    const SummaryReport s = summarize(values);
    const std::string label = "mean_local_time_at_0_until_sigma_" + std::to_string(target).substr(0, 3);
    rep.checks.push_back(relative_check(label, s.mean, 2.0 * target, 0.05));
    const KsResult ks = ks_against_cdf(values, [&](double x) {
      return passage_cdf(PassageLaw{1.0 / (2.0 * target)}, x);
    });
    rep.checks.push_back({"ks_exponential_sigma_" + std::to_string(target).substr(0, 3),
                          ks.statistic, 0.0, ks.threshold, ks.pass, /*gating=*/false});
    rep.details[label] = report_to_json(s, ks);
    if (i == 0) rep.samples = samples;
  }
  return rep;
}

VerifyReport verify_independence(const Environment& env, const ScaleMap& sm,
                                 const VerifyOptions& opts) {
  const auto& w = opts.windows;
  const IncrementLaw first = increment_law(sm, env, opts.a, w[0], w[1]);
  const IncrementLaw second = increment_law(sm, env, opts.a, w[2], w[3]);
  double gap = eval_scale(sm, env, w[0]) - eval_scale(sm, env, opts.a);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i + 1] > w[i]) gap = std::min(gap, eval_scale(sm, env, w[i + 1]) - eval_scale(sm, env, w[i]));
  }

  VerifyReport rep;
  rep.kind = "independence";
  rep.config = config_for_gap(gap, opts);
  const SimConfig cfg = rep.config;

  const auto legs = run_replicated(opts.reps, child_seed(opts.seed, 8), opts.workers,
                                   [&](Rng& rng, std::size_t) {
                                     return brox_increment_pair(env, sm, opts.a, w[0], w[1], w[2],
                                                                w[3], cfg, rng);
                                   });
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> i1;
  std::vector<double> i2;
  for (const auto& [x, y] : legs) {
    pairs.emplace_back(x.value, y.value);
    i1.push_back(x.value);
    i2.push_back(y.value);
    rep.samples.push_back(x);
  }
  const IndependenceResult corr = independence_check(pairs);
  rep.checks.push_back({"correlation", corr.correlation, 0.0, corr.threshold, corr.pass.value_or(false)});

  for (double scale : {0.5, 1.0}) {
    const double t = scale / first.lambda;
    const FactorizationResult f = mgf_factorization_check(pairs, t, 1000, child_seed(opts.seed, 9));
    rep.checks.push_back({"mgf_factorization_t_" + std::to_string(scale).substr(0, 3) + "_over_lambda",
                          f.difference, 0.0, 3.0 * f.bootstrap_se, f.pass});
  }
  const SummaryReport s1 = summarize(i1);
  const SummaryReport s2 = summarize(i2);
  rep.checks.push_back(absolute_check("first_window_mean", s1.mean, (1.0 - first.alpha) / first.lambda,
                                      3.0 * s1.se_mean, /*gating=*/false));
  rep.checks.push_back(absolute_check("second_window_mean", s2.mean,
                                      (1.0 - second.alpha) / second.lambda, 3.0 * s2.se_mean,
                                      /*gating=*/false));
  rep.details["windows"] = w;
  rep.details["laws"] = {law_to_json(first), law_to_json(second)};
  rep.details["counts"] = {{"pairs", opts.reps}};
  return rep;
}

VerifyReport verify_favorite(const Environment* env, const VerifyOptions& opts) {
  VerifyReport rep;
  rep.kind = "favorite";
  rep.config = config_for_gap(1.0, opts);

  std::vector<double> a_grid(opts.grid_points);
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    a_grid[i] = opts.b * static_cast<double>(i + 1) / static_cast<double>(a_grid.size() + 1);
  }

  std::size_t total = 0;
  std::size_t agree = 0;
  auto check_env = [&](const Environment& e) {
    const ScaleMap sm = build_scale(e);
    const auto profile = expected_increment_profile(sm, e, opts.b, opts.c, a_grid);
    const double favorite = favorite_point(e, a_grid, profile);
    std::size_t argmin = 0;
    double best = eval_w(e, a_grid[0]);
    for (std::size_t i = 1; i < a_grid.size(); ++i) {
      const double w = eval_w(e, a_grid[i]);
      if (w < best) {
        best = w;
        argmin = i;
      }
    }
    ++total;
    if (favorite == a_grid[argmin]) ++agree;
  };

  if (env != nullptr) check_env(*env);
  for (std::size_t e = 0; e < opts.env_count; ++e) {
    check_env(generate_two_sided_bm(random_env_grid(), child_seed(opts.seed, 700 + e)));
  }
  rep.checks.push_back(absolute_check("argmax_profile_equals_argmin_w", static_cast<double>(agree),
                                      static_cast<double>(total), 0.0));
  rep.details["counts"] = {{"environments", total}, {"grid_points", opts.grid_points}};
  return rep;
}

VerifyReport verify_reconstruction(const Environment& env, const ScaleMap& sm,
                                   const VerifyOptions& opts) {
  VerifyReport rep;
  rep.kind = "reconstruction";
  rep.config = config_for_gap(1.0, opts);
  const SimConfig cfg = rep.config;

  // Flat environment: s is the identity and the clock is T_k = k dt.
  {
    const Environment flat = deterministic_env(GridSpec(-20.0, 20.0, 0.01), EnvKind::flat);
    const ScaleMap flat_sm = build_scale(flat);
    constexpr std::size_t kSteps = 20'000;
    Rng rng(child_seed(opts.seed, 10));
    const DrivingPath path = simulate_steps(0.0, kSteps, cfg, rng);
    std::vector<double> t_grid(kSteps);
    for (std::size_t k = 0; k < kSteps; ++k) t_grid[k] = static_cast<double>(k) * cfg.dt;
    const auto x = reconstruct_x_path(flat, flat_sm, path, t_grid);
    std::size_t off = 0;
    for (std::size_t k = 0; k < kSteps; ++k) {
      bool near = false;
      for (std::size_t j = k == 0 ? 0 : k - 1; j <= k + 1; ++j) {
        near = near || std::abs(x[k] - path.b[j]) <= 1e-12 * std::max(1.0, std::abs(path.b[j]));
      }
      if (!near) ++off;
    }
    rep.checks.push_back(absolute_check("flat_x_equals_b_within_one_step", static_cast<double>(off), 0.0, 0.0));
    rep.checks.push_back(absolute_check("x_at_time_zero", x.front(), 0.0, 0.0));
  }

  // Occupation formula: time integral of f(X) against the transferred local time.
  constexpr std::size_t kSteps = 200'000;
  constexpr std::size_t kMinSteps = 10'000;
  Rng rng(child_seed(opts.seed, 11));
  DrivingPath path = simulate_steps(0.0, kSteps, cfg, rng);
  const double lo = sm.s_min();
  const double hi = sm.s_max();
  for (std::size_t k = 0; k <= path.stop_index; ++k) {
    if (path.b[k] <= lo || path.b[k] >= hi) {
      path.stop_index = k - 1;
      break;
    }
  }
  rep.checks.push_back(minimum_check("steps_in_scale_range", static_cast<double>(path.stop_index),
                                     static_cast<double>(kMinSteps)));
  if (path.stop_index < kMinSteps) return rep;

  const TimeChangeRecord clock = build_time_change(env, sm, path);
  const double horizon = clock.t.back();
  const std::size_t m = 4 * path.stop_index;
  std::vector<double> t_grid(m);
  for (std::size_t i = 0; i < m; ++i) t_grid[i] = horizon * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  const auto x = reconstruct_x_path(env, sm, path, t_grid);
  const double center = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
  const double width = 0.5;
  const auto bump = [&](double y) { return std::exp(-0.5 * (y - center) * (y - center) / (width * width)); };

  double time_side = 0.0;
  for (double y : x) time_side += bump(y);
  time_side *= horizon / static_cast<double>(m);

  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const double bin = 4.0 * cfg.bandwidth;
  const double from = std::max(env.grid().x_min(), *xmin_it - 1.0);
  const double to = std::min(env.grid().x_max(), *xmax_it + 1.0);
  std::vector<double> sites;
  for (double y = from + 0.5 * bin; y < to; y += bin) sites.push_back(y);
  const auto density = brox_local_time_profile(env, sm, path, path.stop_index, sites, cfg);
  double space_side = 0.0;
  for (std::size_t j = 0; j < sites.size(); ++j) space_side += bump(sites[j]) * density[j] * bin;

  rep.checks.push_back(relative_check("occupation_formula", space_side, time_side, 0.10));
  rep.details["occupation"] = {{"steps", path.stop_index},
                               {"clock", horizon},
                               {"bump_center", center},
                               {"bump_width", width},
                               {"time_integral", time_side},
                               {"space_integral", space_side}};
  return rep;
}

}  // namespace brox
