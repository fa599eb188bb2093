#include "brox/analytic.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "brox/error.hpp"

namespace brox {

namespace {

void require_positive_site(double a) {
  if (!(a > 0.0)) throw InvalidArgument("site a must satisfy a > 0, got " + std::to_string(a));
}

void write_grid_rows(double t_max, int points, auto&& row) {
  if (points < 2) throw InvalidArgument("need at least 2 curve points");
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be > 0");
  for (int i = 0; i < points; ++i) {
    row(t_max * static_cast<double>(i) / static_cast<double>(points - 1));
  }
}

}  // namespace

PassageLaw passage_law(const ScaleMap& sm, const Environment& env, double a, double b) {
  require_positive_site(a);
  if (!(a < b)) throw InvalidArgument("passage_law: need a < b");
  const double sa = eval_scale(sm, env, a);
  const double sb = eval_scale(sm, env, b);
  return {std::exp(eval_w(env, a)) / (2.0 * (sb - sa))};
}

IncrementLaw increment_law(const ScaleMap& sm, const Environment& env, double a, double b,
                           double c) {
  require_positive_site(a);
  if (!(a <= b && b < c)) throw InvalidArgument("increment_law: need a <= b < c");
  const double sa = eval_scale(sm, env, a);
  const double sb = eval_scale(sm, env, b);
  const double sc = eval_scale(sm, env, c);
  return {std::exp(eval_w(env, a)) / (2.0 * (sc - sa)), (sb - sa) / (sc - sa)};
}

double passage_cdf(const PassageLaw& law, double t) {
  return t < 0.0 ? 0.0 : -std::expm1(-law.lambda * t);
}

DensityValue increment_density(const IncrementLaw& law, double t) {
  if (t < 0.0) throw InvalidArgument("increment_density: t must be >= 0");
  return {t == 0.0 ? law.alpha : 0.0,
          law.lambda * (1.0 - law.alpha) * std::exp(-law.lambda * t)};
}

double increment_cdf(const IncrementLaw& law, double t) {
  if (t < 0.0) return 0.0;
  return law.alpha - (1.0 - law.alpha) * std::expm1(-law.lambda * t);
}

double increment_mgf(const IncrementLaw& law, double t) {
  if (t < 0.0) throw InvalidArgument("increment_mgf: t must be >= 0");
  return law.alpha + (1.0 - law.alpha) * law.lambda / (law.lambda + t);
}

double mgf_paper_form(const ScaleMap& sm, const Environment& env, double a, double b, double c,
                      double t) {
  require_positive_site(a);
  if (!(a <= b && b < c)) throw InvalidArgument("mgf_paper_form: need a <= b < c");
  if (t < 0.0) throw InvalidArgument("mgf_paper_form: t must be >= 0");
  const double ew = std::exp(eval_w(env, a));
  const double sa = eval_scale(sm, env, a);
  const double sb = eval_scale(sm, env, b);
  const double sc = eval_scale(sm, env, c);
  return (ew + 2.0 * t * (sb - sa)) / (ew + 2.0 * t * (sc - sa));
}

double increment_moment(const ScaleMap& sm, const Environment& env, double a, double b, double c,
                        int n) {
  require_positive_site(a);
  if (!(a < b && b < c)) throw InvalidArgument("increment_moment: need a < b < c");
  if (n < 1) throw InvalidArgument("increment_moment: order n must be >= 1");
  const double ew = std::exp(eval_w(env, a));
  const double sa = eval_scale(sm, env, a);
  const double sb = eval_scale(sm, env, b);
  const double sc = eval_scale(sm, env, c);
  const double first = 2.0 * (sc - sb) / ew;
  const double scale = 2.0 * (sc - sa) / ew;
  return std::tgamma(n + 1.0) * first * std::pow(scale, n - 1);
}

std::vector<double> expected_increment_profile(const ScaleMap& sm, const Environment& env,
                                               double b, double c,
                                               std::span<const double> a_grid) {
  if (!(b < c)) throw InvalidArgument("expected_increment_profile: need b < c");
  const double gap = 2.0 * (eval_scale(sm, env, c) - eval_scale(sm, env, b));
  std::vector<double> out;
  out.reserve(a_grid.size());
  for (double a : a_grid) {
    if (!(a > 0.0 && a < b)) {
      throw InvalidArgument("expected_increment_profile: a = " + std::to_string(a) +
                            " not in (0, b)");
    }
    out.push_back(gap * std::exp(-eval_w(env, a)));
  }
  return out;
}

double favorite_point(const Environment& env, std::span<const double> a_grid,
                      std::span<const double> profile) {
  if (a_grid.empty()) throw InvalidArgument("favorite_point: empty a-grid");
  if (a_grid.size() != profile.size()) {
    throw InvalidArgument("favorite_point: a-grid and profile differ in length");
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (!env.grid().contains(a_grid[i])) throw DomainError("favorite_point: a outside the grid");
    const bool better = profile[i] > profile[best] ||
                        (profile[i] == profile[best] && a_grid[i] < a_grid[best]);
    if (better) best = i;
  }
  return a_grid[best];
}

double sample_passage(const PassageLaw& law, Rng& rng) {
  return -std::log1p(-uniform01(rng)) / law.lambda;
}

double sample_increment(const IncrementLaw& law, Rng& rng) {
  if (uniform01(rng) < law.alpha) return 0.0;
  return -std::log1p(-uniform01(rng)) / law.lambda;
}

nlohmann::json law_to_json(const IncrementLaw& law) {
  return {{"lambda", law.lambda}, {"alpha", law.alpha}};
}

void write_density_csv(const IncrementLaw& law, double t_max, int points, std::ostream& out) {
  const auto prec = out.precision(17);
  out << "t,atom,density\n";
  write_grid_rows(t_max, points, [&](double t) {
    const auto d = increment_density(law, t);
    out << t << ',' << d.atom_mass << ',' << d.continuous_value << '\n';
  });
  out.precision(prec);
}

void write_cdf_csv(const IncrementLaw& law, double t_max, int points, std::ostream& out) {
  const auto prec = out.precision(17);
  out << "t,cdf\n";
  write_grid_rows(t_max, points, [&](double t) { out << t << ',' << increment_cdf(law, t) << '\n'; });
  out.precision(prec);
}

}  // namespace brox
