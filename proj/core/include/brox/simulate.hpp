#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "brox/environment.hpp"
#include "brox/error.hpp"
#include "brox/rng.hpp"
#include "brox/scale.hpp"

namespace brox {

// Monte Carlo for the Brox diffusion in natural scale. The driving process is
// a Brownian motion B; X-side quantities are recovered through
//   X_t = s^{-1}(B_{T^{-1}(t)}),  T_t = \int_0^t e^{-2 W(s^{-1}(B_u))} du,
//   L_X(t, x) = e^{-W(x)} L_B(T^{-1}(t), s(x)),
// and tau(b) for X corresponds to sigma(s(b)) for B. No Euler scheme on the
// formal SDE is involved.

struct SimConfig {
  double dt = 1e-4;         // Brownian time step in scale coordinates
  double bandwidth = 1e-2;  // half-width eps of the local-time window
  std::uint64_t max_steps = 100'000'000;
  std::uint64_t seed = 0;
  // Depth below the observed level at which a Brownian excursion is cut and
  // restarted; 0 selects 20 * max(eps, sqrt(dt)). See walk_leg.
  double floor_depth = 0.0;

  /// Throws InvalidArgument on dt <= 0, bandwidth <= 0, max_steps == 0 or
  /// negative floor_depth.
  void validate() const;
  double effective_floor_depth() const;
};

/// Stored Brownian path b[k] = B_{k dt}; b[stop_index] is the first point at
/// or beyond the target (or the last simulated point).
struct DrivingPath {
  double dt = 0.0;
  std::vector<double> b;
  std::size_t stop_index = 0;
};

/// Cumulative clock T_k = sum_{j<k} e^{-2 W(s^{-1}(b_j))} dt; T_0 = 0.
struct TimeChangeRecord {
  std::vector<double> t;
};

/// One Monte Carlo observation of a local time or of an increment.
struct LocalTimeSample {
  double value = 0.0;                // weight * brownian_local_time
  bool is_exact_zero = false;        // the band around the level was never reached
  double brownian_local_time = 0.0;  // (dt / 2eps) * band_count
  double weight = 1.0;               // e^{-W(a)}; 1 for Brownian samples
  std::uint64_t band_count = 0;
  std::uint64_t steps = 0;
  double dt = 0.0;
  double bandwidth = 0.0;
};

/// Gaussian walk with step variance dt from `start` until the first point at
/// or beyond `target` (either direction). HorizonExceeded after max_steps.
DrivingPath simulate_until_level(double start, double target, const SimConfig& cfg, Rng& rng);

/// Exactly n_steps Gaussian steps from `start`; stop_index = n_steps.
DrivingPath simulate_steps(double start, std::size_t n_steps, const SimConfig& cfg, Rng& rng);

/// (dt / 2eps) #{k < stop_index : |b[k] - level| < eps}. is_exact_zero when
/// no point lands in the band and no step jumps across it.
LocalTimeSample local_time_at_level(const DrivingPath& path, double level, const SimConfig& cfg);

/// Result of one streamed upward leg of the driving Brownian motion.
struct LegResult {
  std::uint64_t band_count = 0;  // points in (level - eps, level + eps), stop point excluded
  bool touched = false;          // some point in the band, or a step across it
  std::uint64_t steps = 0;
  double end = 0.0;              // first point >= target (or touch point if stopped early)
};

/// Streams B from `start` up to the first point >= target, counting visits to
/// the band around `level` (level < target). The path is not stored.
///
/// Once B falls to level - floor_depth it is restarted there: a continuous
/// path below that floor returns to it before reaching any higher level, and
/// nothing below it touches the band. This keeps passage legs finite in
/// expectation. Steps spent below the floor are not simulated.
///
/// With stop_on_touch the walk ends at the first touch of the band.
LegResult walk_leg(double start, double target, double level, const SimConfig& cfg, Rng& rng,
                   bool stop_on_touch = false);

/// Brownian local time at `level` accumulated from `start` up to sigma(target).
LocalTimeSample brownian_passage_local_time(double start, double target, double level,
                                            const SimConfig& cfg, Rng& rng);

/// Sample of L_X(tau(b), a): e^{-W(a)} times the local time of B at s(a)
/// up to sigma(s(b)), B started at 0. Requires 0 < a < b.
LocalTimeSample brox_passage_local_time(const Environment& env, const ScaleMap& sm, double a,
                                        double b, const SimConfig& cfg, Rng& rng);

/// Sample of L_X(tau(c), a) - L_X(tau(b), a): a fresh leg of B from s(b) to
/// s(c), observed at s(a). Requires 0 < a < b < c.
LocalTimeSample brox_increment_sample(const Environment& env, const ScaleMap& sm, double a,
                                      double b, double c, const SimConfig& cfg, Rng& rng);

/// Increments over [tau(t1), tau(t2)] and [tau(t3), tau(t4)] taken from one
/// continuous path started at s(t1). Requires 0 < a < t1 < t2 <= t3 < t4.
std::pair<LocalTimeSample, LocalTimeSample> brox_increment_pair(const Environment& env,
                                                                const ScaleMap& sm, double a,
                                                                double t1, double t2, double t3,
                                                                double t4, const SimConfig& cfg,
                                                                Rng& rng);

/// True iff B from s_b reaches s_c before touching the band around s_a
/// (any point below s_a + eps). Consumes the rng exactly like
/// brox_increment_sample up to that decision, so on a shared stream
/// the result equals that sample's is_exact_zero.
bool gambler_ruin_no_revisit(double s_a, double s_b, double s_c, const SimConfig& cfg, Rng& rng);

/// Left-endpoint accumulation of the clock over path points 0..stop_index.
TimeChangeRecord build_time_change(const Environment& env, const ScaleMap& sm,
                                   const DrivingPath& path);

/// X_t = s^{-1}(b[k]) with T_k <= t < T_{k+1}. HorizonExceeded if some t is
/// past T at stop_index; InvalidArgument if t < 0.
std::vector<double> reconstruct_x_path(const Environment& env, const ScaleMap& sm,
                                       const DrivingPath& path, std::span<const double> t_grid);

/// Local time of X at each x in `sites`, transferred from the local time of
/// B at s(x) over the path prefix [0, prefix_end).
std::vector<double> brox_local_time_profile(const Environment& env, const ScaleMap& sm,
                                            const DrivingPath& path, std::size_t prefix_end,
                                            std::span<const double> sites, const SimConfig& cfg);

/// Runs sampler(rng, r) for r = 0..n_reps-1 with rng seeded by
/// child_seed(base_seed, r). Output is indexed by replicate and does not
/// depend on `workers` (0 = hardware concurrency). If any replicate throws,
/// ReplicateError names the smallest failing index.
template <class Sampler>
auto run_replicated(std::size_t n_reps, std::uint64_t base_seed, unsigned workers,
                    Sampler&& sampler) {
  using Result = std::invoke_result_t<Sampler&, Rng&, std::size_t>;
  if (n_reps == 0) throw InvalidArgument("run_replicated: n_reps must be >= 1");
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_reps));

  std::vector<std::optional<Result>> slots(n_reps);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};
  std::mutex failure_mutex;
  std::string failure_message;

  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n_reps) return;
      // Replicates after a known failure are skipped; earlier ones still run so
      // the reported index is the smallest failing one for any worker count.
      if (r > first_failure.load()) continue;
      try {
        Rng rng(child_seed(base_seed, r));
        slots[r].emplace(sampler(rng, r));
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (r < first_failure.load()) {
          first_failure.store(r);
          failure_message = e.what();
        }
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  if (const std::size_t failed = first_failure.load();
      failed != std::numeric_limits<std::size_t>::max()) {
    throw ReplicateError(failed, failure_message);
  }
  std::vector<Result> out;
  out.reserve(n_reps);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace brox
