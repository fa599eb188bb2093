#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include <nlohmann/json_fwd.hpp>

namespace brox {

// Acceptance thresholds are fixed asymptotic approximations (1.36/sqrt(n) for
// KS at roughly the 5% level, 3/sqrt(n) for correlation, 3 standard errors
// for means), not exact finite-sample test levels.

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;
  bool pass = false;
};

struct SummaryReport {
  static constexpr int kMaxOrder = 5;

  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
  std::array<double, kMaxOrder> moments{};     // raw moments of order 1..5
  std::array<double, kMaxOrder> moment_se{};   // sqrt((m_2k - m_k^2) / n)
  double zero_fraction = 0.0;                  // share of samples exactly 0
};

/// Pearson correlation is only a necessary condition for independence.
struct IndependenceResult {
  double correlation = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;
  std::optional<bool> pass;  // empty when a margin has zero variance
};

struct FactorizationResult {
  double t = 0.0;
  double joint = 0.0;       // mean of e^{-t (I1 + I2)}
  double product = 0.0;     // mean of e^{-t I1} times mean of e^{-t I2}
  double difference = 0.0;  // joint - product
  double bootstrap_se = 0.0;
  bool pass = false;        // |difference| < 3 bootstrap_se
};

/// Sup distance between the empirical CDF and `cdf`, evaluated at every
/// sample point and its left limit. `cdf` is right-continuous and may jump by
/// `atom_at_zero` at 0; samples equal to 0 are compared against that jump.
/// Requires n >= 20.
KsResult ks_against_cdf(std::span<const double> samples, const std::function<double(double)>& cdf,
                        double atom_at_zero = 0.0);

/// Requires n >= 2.
SummaryReport summarize(std::span<const double> samples);

/// Requires n >= 100 pairs. pass iff |rho| < 3/sqrt(n).
IndependenceResult independence_check(std::span<const std::pair<double, double>> pairs);

/// Compares E[e^{-t(I1+I2)}] with E[e^{-t I1}] E[e^{-t I2}] and resamples the
/// pairs `n_boot` times (seeded) for the standard error of the difference.
FactorizationResult mgf_factorization_check(std::span<const std::pair<double, double>> pairs,
                                            double t, int n_boot, std::uint64_t seed);

nlohmann::json report_to_json(const SummaryReport& summary,
                              const std::optional<KsResult>& ks = std::nullopt);

}  // namespace brox
