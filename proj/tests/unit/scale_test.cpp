#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "brox/environment.hpp"
#include "brox/error.hpp"
#include "brox/scale.hpp"

using namespace brox;

namespace {

// Composite Simpson on 100 sub-intervals per cell, independent of the
// closed-form cell integral used by build_scale.
std::vector<double> simpson_scale(const Environment& env) {
  const GridSpec& g = env.grid();
  const auto w = env.w();
  constexpr int kSub = 100;
  std::vector<double> cell(g.node_count() - 1);
  for (std::size_t j = 0; j + 1 < g.node_count(); ++j) {
    const double step = g.h() / kSub;
    double acc = 0.0;
    for (int k = 0; k <= kSub; ++k) {
      const double u = static_cast<double>(k) / kSub;
      const double f = std::exp(w[j] + u * (w[j + 1] - w[j]));
      acc += f * (k == 0 || k == kSub ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    cell[j] = acc * step / 3.0;
  }
  std::vector<double> s(g.node_count(), 0.0);
  const std::size_t z = g.zero_index();
  for (std::size_t i = z + 1; i < s.size(); ++i) s[i] = s[i - 1] + cell[i - 1];
  for (std::size_t i = z; i-- > 0;) s[i] = s[i + 1] - cell[i];
  return s;
}

}  // namespace

TEST(Scale, FlatIsIdentity) {
  const Environment env = deterministic_env(GridSpec(-3.0, 3.0, 0.01), EnvKind::flat);
  const ScaleMap sm = build_scale(env);
  for (std::size_t i = 0; i < sm.s().size(); ++i) {
    EXPECT_NEAR(sm.s()[i], env.grid().node(i), 1e-13);
  }
  EXPECT_EQ(sm.s()[env.grid().zero_index()], 0.0);
  EXPECT_NEAR(eval_scale(sm, env, 0.737), 0.737, 1e-14);
}

TEST(Scale, LinearClosedForm) {
  const Environment env = deterministic_env(GridSpec(-4.0, 4.0, 0.01), EnvKind::linear, -1.0);
  const ScaleMap sm = build_scale(env);
  EXPECT_NEAR(sm.s()[*env.grid().node_index(1.0)], 0.6321206, 1e-7);
  EXPECT_NEAR(sm.s()[*env.grid().node_index(1.0)], -std::expm1(-1.0), 1e-10);
  EXPECT_NEAR(eval_scale(sm, env, 2.0), 0.8646647, 1e-7);
  EXPECT_NEAR(eval_scale(sm, env, 1.234), -std::expm1(-1.234), 1e-10);
  EXPECT_NEAR(eval_scale(sm, env, -0.5), -std::expm1(0.5), 1e-10);
}

TEST(Scale, NodeValuesMatchTable) {
  const Environment env = generate_two_sided_bm(GridSpec(-2.0, 2.0, 0.01), 5);
  const ScaleMap sm = build_scale(env);
  for (std::size_t i = 0; i < sm.s().size(); i += 7) {
    EXPECT_EQ(eval_scale(sm, env, env.grid().node(i)), sm.s()[i]);
  }
}

TEST(Scale, AgreesWithSimpsonOnRandomEnvironments) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Environment env = generate_two_sided_bm(GridSpec(-2.0, 2.0, 0.01), seed);
    const ScaleMap sm = build_scale(env);
    const auto oracle = simpson_scale(env);
    double worst = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      worst = std::max(worst, std::abs(sm.s()[i] - oracle[i]) / std::max(1.0, std::abs(oracle[i])));
    }
    EXPECT_LT(worst, 1e-8) << "seed " << seed;
  }
}

TEST(Scale, StrictlyIncreasing) {
  const Environment env = generate_two_sided_bm(GridSpec(-8.0, 8.0, 0.01), 9);
  const ScaleMap sm = build_scale(env);
  for (std::size_t i = 1; i < sm.s().size(); ++i) ASSERT_GT(sm.s()[i], sm.s()[i - 1]);
}

TEST(InverseScale, KnownValues) {
  const Environment flat = deterministic_env(GridSpec(-3.0, 3.0, 0.01), EnvKind::flat);
  EXPECT_NEAR(inverse_scale(build_scale(flat), flat, 0.7), 0.7, 1e-12);

  const Environment lin = deterministic_env(GridSpec(-4.0, 4.0, 0.01), EnvKind::linear, -1.0);
  EXPECT_NEAR(inverse_scale(build_scale(lin), lin, 0.6321206), 1.0, 1e-6);
  EXPECT_NEAR(inverse_scale(build_scale(lin), lin, -std::expm1(-1.0)), 1.0, 1e-8);
}

TEST(InverseScale, RoundTrip) {
  const Environment env = generate_two_sided_bm(GridSpec(-5.0, 5.0, 0.01), 77);
  const ScaleMap sm = build_scale(env);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = ux(rng);
    EXPECT_NEAR(inverse_scale(sm, env, eval_scale(sm, env, x)), x, 1e-8);
  }
  EXPECT_THROW(inverse_scale(sm, env, sm.s_max() + 1e-6), DomainError);
  EXPECT_THROW(inverse_scale(sm, env, sm.s_min() - 1e-6), DomainError);
  EXPECT_THROW(eval_scale(sm, env, 5.5), DomainError);
}

TEST(SpeedDensity, Values) {
  const Environment lin = deterministic_env(GridSpec(-4.0, 4.0, 0.01), EnvKind::linear, -1.0);
  EXPECT_NEAR(speed_density(lin, 1.0), 5.4365637, 1e-7);
  EXPECT_EQ(speed_density(lin, 0.0), 2.0);
  const Environment flat = deterministic_env(GridSpec(-4.0, 4.0, 0.01), EnvKind::flat);
  EXPECT_EQ(speed_density(flat, -2.3), 2.0);
}

TEST(Scale, CsvLayout) {
  const Environment env = deterministic_env(GridSpec(-1.0, 1.0, 0.5), EnvKind::flat);
  std::ostringstream os;
  write_scale_csv(build_scale(env), env, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,s,speed");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 5);
}
