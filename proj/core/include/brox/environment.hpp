#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace brox {

/// Uniform grid on [x_min, x_max] with 0 as an exact node.
///
/// Node i sits at (i - zero_index) * h, so the node at 0 is exactly 0.0 and
/// the end points are recomputed from the integer node offsets.
class GridSpec {
 public:
  /// Throws InvalidArgument unless x_min < 0 < x_max, h > 0 and both end
  /// points are integer multiples of h (relative tolerance 1e-9).
  GridSpec(double x_min, double x_max, double h);

  double x_min() const noexcept { return node(0); }
  double x_max() const noexcept { return node(node_count() - 1); }
  double h() const noexcept { return h_; }
  std::size_t node_count() const noexcept { return left_ + right_ + 1; }
  std::size_t zero_index() const noexcept { return left_; }
  double node(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(left_)) * h_;
  }
  bool contains(double x) const noexcept { return x >= x_min() && x <= x_max(); }

  /// Index j of the cell [node(j), node(j+1)] holding x, with j <= n-2.
  /// Requires contains(x).
  std::size_t cell_of(double x) const noexcept;

  /// Index of the node equal to x, if x is exactly a node.
  std::optional<std::size_t> node_index(double x) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double h_;
  std::size_t left_;   // nodes strictly left of 0
  std::size_t right_;  // nodes strictly right of 0
};

enum class EnvKind { two_sided_bm, flat, linear };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

/// A fixed realization of the potential W on a grid. Immutable.
class Environment {
 public:
  /// Validates: w.size() == node_count, w at the zero node is exactly 0,
  /// every entry finite. Throws InvalidArgument otherwise.
  Environment(GridSpec grid, std::vector<double> w, EnvKind kind,
              std::optional<std::uint64_t> seed = std::nullopt, double slope = 0.0);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> w() const noexcept { return w_; }
  EnvKind kind() const noexcept { return kind_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  /// Slope k of a linear(k) environment; 0 for the other kinds.
  double slope() const noexcept { return slope_; }

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  GridSpec grid_;
  std::vector<double> w_;
  EnvKind kind_;
  std::optional<std::uint64_t> seed_;
  double slope_;
};

/// Two-sided Brownian motion sampled exactly at the nodes. The right and left
/// halves are driven by independent sub-streams derived from `seed`.
Environment generate_two_sided_bm(const GridSpec& grid, std::uint64_t seed);

/// flat (w = 0) or linear (w = slope * x at the nodes).
Environment deterministic_env(const GridSpec& grid, EnvKind kind, double slope = 0.0);

/// Piecewise-linear interpolation of W. Exact at nodes; DomainError outside.
double eval_w(const Environment& env, double x);

nlohmann::json env_to_json(const Environment& env);
Environment env_from_json(const nlohmann::json& doc);

void save_env(const Environment& env, const std::filesystem::path& path);
/// Throws FormatError on malformed JSON, schema mismatch or invariant violation.
Environment load_env(const std::filesystem::path& path);

}  // namespace brox
