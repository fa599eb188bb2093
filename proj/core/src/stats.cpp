#include "brox/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <nlohmann/json.hpp>

#include "brox/error.hpp"
#include "brox/rng.hpp"

namespace brox {

KsResult ks_against_cdf(std::span<const double> samples, const std::function<double(double)>& cdf,
                        double atom_at_zero) {
  if (samples.size() < 20) {
    throw InvalidArgument("ks_against_cdf: need at least 20 samples, got " +
                          std::to_string(samples.size()));
  }
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());

  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    const double v = x[i];
    std::size_t j = i;
    while (j < x.size() && x[j] == v) ++j;
    const double f = cdf(v);
    const double f_left = v == 0.0 ? f - atom_at_zero : f;
    d = std::max({d, std::abs(static_cast<double>(j) / n - f),
                  std::abs(static_cast<double>(i) / n - f_left)});
    i = j;
  }
  KsResult out;
  out.statistic = std::min(d, 1.0);
  out.n = x.size();
  out.threshold = 1.36 / std::sqrt(n);
  out.pass = out.statistic <= out.threshold;
  return out;
}

SummaryReport summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw InvalidArgument("summarize: need at least 2 samples");
  constexpr int kOrders = 2 * SummaryReport::kMaxOrder;
  SummaryReport r;
  r.n = samples.size();
  const auto n = static_cast<double>(r.n);

  std::array<double, kOrders> raw{};
  std::size_t zeros = 0;
  for (double x : samples) {
    double p = 1.0;
    for (int k = 0; k < kOrders; ++k) {
      p *= x;
      raw[static_cast<std::size_t>(k)] += p;
    }
    if (x == 0.0) ++zeros;
  }
  for (double& m : raw) m /= n;

  r.mean = raw[0];
  double ss = 0.0;
  for (double x : samples) ss += (x - r.mean) * (x - r.mean);
  r.variance = ss / (n - 1.0);
  r.se_mean = std::sqrt(r.variance / n);
  for (std::size_t k = 0; k < SummaryReport::kMaxOrder; ++k) {
    r.moments[k] = raw[k];
    const double spread = raw[2 * k + 1] - raw[k] * raw[k];
    r.moment_se[k] = std::sqrt(std::max(spread, 0.0) / n);
  }
  r.zero_fraction = static_cast<double>(zeros) / n;
  return r;
}

IndependenceResult independence_check(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 100) throw InvalidArgument("independence_check: need at least 100 pairs");
  const auto n = static_cast<double>(pairs.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  IndependenceResult out;
  out.n = pairs.size();
  out.threshold = 3.0 / std::sqrt(n);
  if (sxx == 0.0 || syy == 0.0) return out;
  out.correlation = sxy / std::sqrt(sxx * syy);
  out.pass = std::abs(out.correlation) < out.threshold;
  return out;
}

namespace {

struct Transforms {
  double joint;
  double first;
  double second;
};

Transforms transforms(std::span<const std::pair<double, double>> pairs,
                      std::span<const std::size_t> index, double t) {
  Transforms acc{0.0, 0.0, 0.0};
  for (std::size_t i : index) {
    const double e1 = std::exp(-t * pairs[i].first);
    const double e2 = std::exp(-t * pairs[i].second);
    acc.joint += e1 * e2;
    acc.first += e1;
    acc.second += e2;
  }
  const auto n = static_cast<double>(index.size());
  return {acc.joint / n, acc.first / n, acc.second / n};
}

}  // namespace

FactorizationResult mgf_factorization_check(std::span<const std::pair<double, double>> pairs,
                                            double t, int n_boot, std::uint64_t seed) {
  if (pairs.size() < 2) throw InvalidArgument("mgf_factorization_check: need at least 2 pairs");
  if (n_boot < 2) throw InvalidArgument("mgf_factorization_check: need n_boot >= 2");
  if (t < 0.0) throw InvalidArgument("mgf_factorization_check: t must be >= 0");

  std::vector<std::size_t> index(pairs.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  const Transforms full = transforms(pairs, index, t);

  FactorizationResult out;
  out.t = t;
  out.joint = full.joint;
  out.product = full.first * full.second;
  out.difference = out.joint - out.product;

  Rng rng(seed);
  boost::random::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int b = 0; b < n_boot; ++b) {
    for (auto& i : index) i = pick(rng);
    const Transforms rep = transforms(pairs, index, t);
    const double diff = rep.joint - rep.first * rep.second;
    sum += diff;
    sum_sq += diff * diff;
  }
  const double mean = sum / n_boot;
  out.bootstrap_se = std::sqrt(std::max(sum_sq / n_boot - mean * mean, 0.0) * n_boot / (n_boot - 1));
  out.pass = std::abs(out.difference) < 3.0 * out.bootstrap_se;
  return out;
}

nlohmann::json report_to_json(const SummaryReport& summary, const std::optional<KsResult>& ks) {
  nlohmann::json doc;
  doc["n"] = summary.n;
  doc["mean"] = summary.mean;
  doc["se_mean"] = summary.se_mean;
  doc["moments"] = summary.moments;
  doc["moment_se"] = summary.moment_se;
  doc["variance"] = summary.variance;
  doc["zero_fraction"] = summary.zero_fraction;
  if (ks) {
    doc["ks"] = {{"statistic", ks->statistic}, {"threshold", ks->threshold}, {"pass", ks->pass}};
  }
  return doc;
}

}  // namespace brox
