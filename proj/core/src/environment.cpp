#include "brox/environment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "brox/error.hpp"
#include "brox/rng.hpp"

namespace brox {

namespace {

// Number of whole steps of size h in |x|; throws if |x| is not a multiple.
std::size_t whole_steps(double x, double h, const char* which) {
  const double q = std::abs(x) / h;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
    throw InvalidArgument(std::string("grid: ") + which + " is not an integer multiple of h");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

GridSpec::GridSpec(double x_min, double x_max, double h) : h_(h), left_(0), right_(0) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(h)) {
    throw InvalidArgument("grid: non-finite parameter");
  }
  if (!(h > 0.0)) throw InvalidArgument("grid: h must be > 0");
  if (!(x_min < 0.0 && x_max > 0.0)) {
    throw InvalidArgument("grid: need x_min < 0 < x_max so that 0 is a node");
  }
  left_ = whole_steps(x_min, h, "x_min");
  right_ = whole_steps(x_max, h, "x_max");
}

std::size_t GridSpec::cell_of(double x) const noexcept {
  const double pos = x / h_ + static_cast<double>(left_);
  auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
  const auto last = static_cast<std::ptrdiff_t>(node_count()) - 2;
  if (j < 0) j = 0;
  if (j > last) j = last;
  // floor() may land one cell off when x is within rounding of a node.
  if (x < node(static_cast<std::size_t>(j)) && j > 0) --j;
  if (x > node(static_cast<std::size_t>(j) + 1) && j < last) ++j;
  return static_cast<std::size_t>(j);
}

std::optional<std::size_t> GridSpec::node_index(double x) const noexcept {
  const double pos = std::round(x / h_) + static_cast<double>(left_);
  if (pos < 0.0 || pos > static_cast<double>(node_count() - 1)) return std::nullopt;
  const auto i = static_cast<std::size_t>(pos);
  if (node(i) == x) return i;
  return std::nullopt;
}

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::two_sided_bm: return "two_sided_bm";
    case EnvKind::flat: return "flat";
    case EnvKind::linear: return "linear";
  }
  return "unknown";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "two_sided_bm") return EnvKind::two_sided_bm;
  if (name == "flat") return EnvKind::flat;
  if (name == "linear") return EnvKind::linear;
  throw InvalidArgument("unknown environment kind '" + name + "'");
}

Environment::Environment(GridSpec grid, std::vector<double> w, EnvKind kind,
                         std::optional<std::uint64_t> seed, double slope)
    : grid_(grid), w_(std::move(w)), kind_(kind), seed_(seed), slope_(slope) {
  if (w_.size() != grid_.node_count()) {
    throw InvalidArgument("environment: expected " + std::to_string(grid_.node_count()) +
                          " values, got " + std::to_string(w_.size()));
  }
  for (double v : w_) {
    if (!std::isfinite(v)) throw InvalidArgument("environment: non-finite W value");
  }
  if (w_[grid_.zero_index()] != 0.0) {
    throw InvalidArgument("environment: W(0) must be exactly 0");
  }
}

Environment generate_two_sided_bm(const GridSpec& grid, std::uint64_t seed) {
  std::vector<double> w(grid.node_count(), 0.0);
  const std::size_t z = grid.zero_index();
  const double sd = std::sqrt(grid.h());

  Rng right(child_seed(seed, 1));
  for (std::size_t i = z + 1; i < w.size(); ++i) {
    w[i] = w[i - 1] + sd * standard_normal(right);
  }
  Rng left(child_seed(seed, 2));
  for (std::size_t k = 1; k <= z; ++k) {
    w[z - k] = w[z - k + 1] + sd * standard_normal(left);
  }
  return Environment(grid, std::move(w), EnvKind::two_sided_bm, seed);
}

Environment deterministic_env(const GridSpec& grid, EnvKind kind, double slope) {
  std::vector<double> w(grid.node_count(), 0.0);
  switch (kind) {
    case EnvKind::flat:
      return Environment(grid, std::move(w), EnvKind::flat);
    case EnvKind::linear:
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = slope * grid.node(i);
      // slope * 0.0 is -0.0 for negative slopes; store +0.0.
      w[grid.zero_index()] = 0.0;
      return Environment(grid, std::move(w), EnvKind::linear, std::nullopt, slope);
    case EnvKind::two_sided_bm:
      break;
  }
  throw InvalidArgument("deterministic_env: kind must be flat or linear");
}

double eval_w(const Environment& env, double x) {
  const GridSpec& g = env.grid();
  if (!g.contains(x)) {
    throw DomainError("eval_w: x = " + std::to_string(x) + " outside [" +
                      std::to_string(g.x_min()) + ", " + std::to_string(g.x_max()) + "]");
  }
  const auto w = env.w();
  if (auto i = g.node_index(x)) return w[*i];
  const std::size_t j = g.cell_of(x);
  const double t = (x - g.node(j)) / g.h();
  return w[j] + t * (w[j + 1] - w[j]);
}

nlohmann::json env_to_json(const Environment& env) {
  nlohmann::json doc;
  doc["x_min"] = env.grid().x_min();
  doc["x_max"] = env.grid().x_max();
  doc["h"] = env.grid().h();
  if (env.seed()) {
    doc["seed"] = *env.seed();
  } else {
    doc["seed"] = nullptr;
  }
  doc["kind"] = to_string(env.kind());
  if (env.kind() == EnvKind::linear) doc["slope"] = env.slope();
  doc["w"] = std::vector<double>(env.w().begin(), env.w().end());
  return doc;
}

Environment env_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw FormatError("environment file: top level must be an object");
    for (const char* key : {"x_min", "x_max", "h", "seed", "kind", "w"}) {
      if (!doc.contains(key)) throw FormatError(std::string("environment file: missing '") + key + "'");
    }
    const GridSpec grid(doc.at("x_min").get<double>(), doc.at("x_max").get<double>(),
                        doc.at("h").get<double>());
    std::optional<std::uint64_t> seed;
    if (!doc.at("seed").is_null()) seed = doc.at("seed").get<std::uint64_t>();
    const EnvKind kind = env_kind_from_string(doc.at("kind").get<std::string>());
    const double slope = kind == EnvKind::linear ? doc.at("slope").get<double>() : 0.0;
    const auto& jw = doc.at("w");
    if (!jw.is_array()) throw FormatError("environment file: 'w' must be an array");
    std::vector<double> w;
    w.reserve(jw.size());
    for (const auto& v : jw) {
      if (!v.is_number()) throw FormatError("environment file: non-numeric entry in 'w'");
      w.push_back(v.get<double>());
    }
    return Environment(grid, std::move(w), kind, seed, slope);
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("environment file: ") + e.what());
  }
}

void save_env(const Environment& env, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << env_to_json(env).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Environment load_env(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return env_from_json(doc);
}

}  // namespace brox
