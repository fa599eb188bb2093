#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "brox/analytic.hpp"
#include "brox/error.hpp"
#include "brox/rng.hpp"
#include "brox/stats.hpp"

using namespace brox;

namespace {

std::vector<double> exp_draws(double lambda, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = sample_passage(PassageLaw{lambda}, rng);
  return out;
}

}  // namespace

TEST(Ks, SamplerAgainstItsOwnLaw) {
  const IncrementLaw law{1.0 / 6.0, 1.0 / 3.0};
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    Rng rng(child_seed(99, rep));
    std::vector<double> xs(10'000);
    for (double& x : xs) x = sample_increment(law, rng);
    const KsResult r =
        ks_against_cdf(xs, [&](double t) { return increment_cdf(law, t); }, law.alpha);
    EXPECT_NEAR(r.threshold, 1.36 / 100.0, 1e-15);
    passes += r.pass;
  }
  EXPECT_GE(passes, 38);
}

TEST(Ks, DetectsWrongRate) {
  const auto xs = exp_draws(1.0, 10'000, 3);
  const KsResult r = ks_against_cdf(xs, [](double t) { return t <= 0 ? 0.0 : -std::expm1(-2.0 * t); });
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.statistic, 0.25, 0.02);
}

TEST(Ks, NearDegenerateAtom) {
  const IncrementLaw law{1.0, 0.999};
  const std::vector<double> zeros(1000, 0.0);
  const KsResult r = ks_against_cdf(zeros, [&](double t) { return increment_cdf(law, t); }, law.alpha);
  EXPECT_NEAR(r.statistic, 0.001, 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(Ks, PermutationInvariantAndValidated) {
  auto xs = exp_draws(0.5, 500, 4);
  auto cdf = [](double t) { return t <= 0 ? 0.0 : -std::expm1(-0.5 * t); };
  const double s1 = ks_against_cdf(xs, cdf).statistic;
  std::shuffle(xs.begin(), xs.end(), std::mt19937_64(1));
  EXPECT_EQ(ks_against_cdf(xs, cdf).statistic, s1);
  xs.resize(19);
  EXPECT_THROW(ks_against_cdf(xs, cdf), InvalidArgument);
}

TEST(Summary, SmallSets) {
  const std::vector<double> a{0, 0, 4, 4};
  const SummaryReport r = summarize(a);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.mean, 2.0);
  EXPECT_EQ(r.zero_fraction, 0.5);
  EXPECT_EQ(r.moments[1], 8.0);

  const std::vector<double> c(10, 3.5);
  EXPECT_EQ(summarize(c).variance, 0.0);

  const std::vector<double> b{1, 2, 3};
  const SummaryReport rb = summarize(b);
  EXPECT_NEAR(rb.moments[2], 12.0, 12.0 * 1e-12);
  EXPECT_NEAR(rb.moments[4], 276.0 / 3.0, 92.0 * 1e-12);
  EXPECT_NEAR(rb.variance, 1.0, 1e-12);
  EXPECT_THROW(summarize(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Summary, IncrementMoments) {
  const IncrementLaw law{1.0 / 6.0, 1.0 / 3.0};
  Rng rng(child_seed(7, 0));
  std::vector<double> xs(100'000);
  for (double& x : xs) x = sample_increment(law, rng);
  const SummaryReport r = summarize(xs);
  EXPECT_NEAR(r.moments[0], 4.0, 3 * r.moment_se[0]);
  EXPECT_NEAR(r.moments[1], 48.0, 3 * r.moment_se[1]);
  EXPECT_NEAR(r.se_mean, r.moment_se[0], 1e-3 * r.se_mean);
  const auto j = report_to_json(r);
  EXPECT_TRUE(j.is_object());
}

TEST(Independence, IndependentPairsPass) {
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto x = exp_draws(1.0, 10'000, child_seed(rep, 1));
    const auto y = exp_draws(2.0, 10'000, child_seed(rep, 2));
    std::vector<std::pair<double, double>> pairs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) pairs[i] = {x[i], y[i]};
    const IndependenceResult r = independence_check(pairs);
    passes += r.pass.value();
  }
  EXPECT_GE(passes, 99);
}

TEST(Independence, DependentPairsFail) {
  const auto x = exp_draws(1.0, 10'000, 5);
  const auto y = exp_draws(1.0, 10'000, 6);
  std::vector<std::pair<double, double>> same(x.size()), overlap(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    same[i] = {x[i], x[i]};
    overlap[i] = {x[i], x[i] + y[i]};
  }
  const IndependenceResult rs = independence_check(same);
  EXPECT_NEAR(rs.correlation, 1.0, 1e-12);
  EXPECT_FALSE(rs.pass.value());

  // Equal variances: rho = sqrt(1/2).
  const IndependenceResult ro = independence_check(overlap);
  EXPECT_NEAR(ro.correlation, std::sqrt(0.5), 0.03);
  EXPECT_FALSE(ro.pass.value());
}

TEST(Independence, ConstantMarginHasNoVerdict) {
  std::vector<std::pair<double, double>> pairs(200);
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {static_cast<double>(i), 1.0};
  EXPECT_FALSE(independence_check(pairs).pass.has_value());
  pairs.resize(50);
  EXPECT_THROW(independence_check(pairs), InvalidArgument);
}

TEST(Factorization, IndependentVersusIdentical) {
  const auto x = exp_draws(1.0, 4000, 8);
  const auto y = exp_draws(1.0, 4000, 9);
  std::vector<std::pair<double, double>> indep(x.size()), same(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    indep[i] = {x[i], y[i]};
    same[i] = {x[i], x[i]};
  }
  const FactorizationResult ri = mgf_factorization_check(indep, 1.0, 500, 1);
  EXPECT_TRUE(ri.pass);
  EXPECT_GT(ri.bootstrap_se, 0.0);

  // E e^{-2X} = 1/3 against (E e^{-X})^2 = 1/4.
  const FactorizationResult rs = mgf_factorization_check(same, 1.0, 500, 1);
  EXPECT_NEAR(rs.difference, 1.0 / 12.0, 0.01);
  EXPECT_FALSE(rs.pass);
  EXPECT_EQ(mgf_factorization_check(indep, 1.0, 500, 1).difference, ri.difference);
}
