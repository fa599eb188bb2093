#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "brox/analytic.hpp"
#include "brox/environment.hpp"
#include "brox/error.hpp"
#include "brox/scale.hpp"
#include "brox/verify.hpp"

namespace brox::cli {

namespace {

// Bad flags, ordering violations, points too close to the grid edge.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kEdgeMarginSteps = 10.0;

const std::vector<std::string> kVerifyKinds{"exponential",  "increment", "atom",
                                            "moments",      "independence", "rayknight",
                                            "favorite",     "consistency",  "reconstruction"};

struct EnvGenArgs {
  std::string kind;
  double slope = 0.0;
  double x_min = -8.0;
  double x_max = 8.0;
  double h = 0.01;
  std::uint64_t seed = 0;
  std::string out;
};

struct LawArgs {
  std::string env;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> c;
  std::string density_csv;
  std::string cdf_csv;
  std::optional<double> t_max;
  int points = 201;
  int moments = 0;
  std::string moments_csv;
};

struct ProfileArgs {
  std::string env;
  double b = 2.0;
  double c = 4.0;
  std::size_t points = 200;
  std::string out;
};

struct ScaleArgs {
  std::string env;
  std::string out;
};

struct VerifyArgs {
  std::string kind;
  std::string env;
  double a = 1.0;
  double b = 2.0;
  double c = 4.0;
  std::vector<double> windows{2.0, 3.0, 4.0, 5.0};
  std::optional<std::size_t> reps;
  std::optional<std::size_t> direct_reps;
  std::optional<std::size_t> envs;
  std::size_t grid_points = 200;
  std::optional<double> dt;
  std::optional<double> bandwidth;
  std::optional<double> floor_depth;
  std::uint64_t max_steps = 100'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string report;
  std::string samples_csv;
  bool no_timestamp = false;
};

void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

  auto as_text = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) opt = sub.get_option_no_throw(key);
    if (opt == nullptr) throw UsageError("config file: unknown field '" + key + "'");
    if (opt->count() > 0) continue;  // the command line wins
    if (value.is_array()) {
      for (const auto& item : value) opt->add_result(as_text(item));
    } else {
      opt->add_result(as_text(value));
    }
    opt->run_callback();
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

void require_inside(const Environment& env, double x, const char* name) {
  const GridSpec& g = env.grid();
  const double margin = kEdgeMarginSteps * g.h();
  if (x < g.x_min() + margin || x > g.x_max() - margin) {
    std::ostringstream msg;
    msg << name << " = " << x << " is within " << kEdgeMarginSteps
        << " grid steps of the environment boundary [" << g.x_min() << ", " << g.x_max() << "]";
    throw UsageError(msg.str());
  }
}

void require_order(double a, double b, std::optional<double> c) {
  if (!(a > 0.0)) throw UsageError("need a > 0");
  if (!(a < b)) throw UsageError("need a < b");
  if (c && !(b < *c)) throw UsageError("need b < c");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int cmd_env_gen(const EnvGenArgs& args, std::ostream& out) {
  std::optional<GridSpec> grid;
  try {
    grid.emplace(args.x_min, args.x_max, args.h);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  Environment env = args.kind == "bm"   ? generate_two_sided_bm(*grid, args.seed)
                    : args.kind == "flat" ? deterministic_env(*grid, EnvKind::flat)
                                          : deterministic_env(*grid, EnvKind::linear, args.slope);
  save_env(env, args.out);
  out << "wrote " << args.out << " (" << to_string(env.kind()) << ", " << grid->node_count()
      << " nodes)\n";
  return kOk;
}

int cmd_scale(const ScaleArgs& args, std::ostream& out) {
  const Environment env = load_env(args.env);
  const ScaleMap sm = build_scale(env);
  if (args.out.empty()) {
    write_scale_csv(sm, env, out);
  } else {
    auto f = open_out(args.out);
    write_scale_csv(sm, env, f);
  }
  return kOk;
}

int cmd_law(const LawArgs& args, std::ostream& out) {
  require_order(args.a, args.b, args.c);
  if (args.moments > 0 && !args.c) throw UsageError("--moments needs --c");
  const Environment env = load_env(args.env);
  require_inside(env, args.a, "a");
  require_inside(env, args.b, "b");
  if (args.c) require_inside(env, *args.c, "c");
  const ScaleMap sm = build_scale(env);

  // Without c this is the passage law at (a, b): the increment law with b = a.
  const IncrementLaw law = args.c ? increment_law(sm, env, args.a, args.b, *args.c)
                                  : increment_law(sm, env, args.a, args.a, args.b);
  nlohmann::json doc = law_to_json(law);
  doc["points"] = {{"a", args.a}, {"b", args.b}};
  if (args.c) doc["points"]["c"] = *args.c;

  const double t_max = args.t_max.value_or(10.0 / law.lambda);
  if (!args.density_csv.empty()) {
    auto f = open_out(args.density_csv);
    write_density_csv(law, t_max, args.points, f);
  }
  if (!args.cdf_csv.empty()) {
    auto f = open_out(args.cdf_csv);
    write_cdf_csv(law, t_max, args.points, f);
  }
  if (args.moments > 0) {
    auto& rows = doc["moments"] = nlohmann::json::array();
    std::ofstream csv;
    if (!args.moments_csv.empty()) {
      csv = open_out(args.moments_csv);
      csv << std::setprecision(17) << "n,moment\n";
    }
    for (int n = 1; n <= args.moments; ++n) {
      const double m = increment_moment(sm, env, args.a, args.b, *args.c, n);
      rows.push_back({{"n", n}, {"moment", m}});
      if (csv.is_open()) csv << n << ',' << m << '\n';
    }
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_profile(const ProfileArgs& args, std::ostream& out) {
  if (!(args.b > 0.0 && args.b < args.c)) throw UsageError("need 0 < b < c");
  if (args.points < 1) throw UsageError("--points must be >= 1");
  const Environment env = load_env(args.env);
  require_inside(env, args.b, "b");
  require_inside(env, args.c, "c");
  const ScaleMap sm = build_scale(env);

  std::vector<double> a_grid(args.points);
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    a_grid[i] = args.b * static_cast<double>(i + 1) / static_cast<double>(a_grid.size() + 1);
  }
  const auto profile = expected_increment_profile(sm, env, args.b, args.c, a_grid);
  const double favorite = favorite_point(env, a_grid, profile);

  std::ofstream file;
  if (!args.out.empty()) file = open_out(args.out);
  std::ostream& dst = args.out.empty() ? out : file;
  const auto prec = dst.precision(17);
  dst << "a,expected_increment,w\n";
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    dst << a_grid[i] << ',' << profile[i] << ',' << eval_w(env, a_grid[i]) << '\n';
  }
  const nlohmann::json footer = {{"favorite_point", favorite},
                                 {"w_at_favorite", eval_w(env, favorite)},
                                 {"b", args.b},
                                 {"c", args.c}};
  dst << "# " << footer.dump() << '\n';
  dst.precision(prec);
  return kOk;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  const std::string& kind = args.kind;
  const bool needs_env = kind == "exponential" || kind == "increment" || kind == "atom" ||
                         kind == "independence" || kind == "reconstruction";
  if (needs_env && args.env.empty()) throw UsageError("verify " + kind + " needs --env");
  if (args.windows.size() != 4) throw UsageError("--windows takes exactly 4 values");

  VerifyOptions opts;
  opts.a = args.a;
  opts.b = args.b;
  opts.c = args.c;
  std::copy(args.windows.begin(), args.windows.end(), opts.windows.begin());
  opts.dt = args.dt;
  opts.bandwidth = args.bandwidth;
  opts.floor_depth = args.floor_depth;
  opts.max_steps = args.max_steps;
  opts.seed = args.seed;
  opts.workers = args.workers;
  opts.grid_points = args.grid_points;
  opts.reps = args.reps.value_or(kind == "atom" ? 10'000 : 2000);
  opts.direct_reps = args.direct_reps.value_or(kind == "moments" ? 100'000 : 10'000);
  opts.env_count = args.envs.value_or(kind == "favorite" ? 100 : 20);
  if (opts.reps < 100) throw UsageError("--reps must be >= 100");
  if (opts.direct_reps < 100) throw UsageError("--direct-reps must be >= 100");
  try {
    config_for_gap(1.0, opts);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  std::optional<Environment> env;
  std::optional<ScaleMap> sm;
  if (!args.env.empty()) {
    env.emplace(load_env(args.env));
    sm.emplace(build_scale(*env));
  }
  if (kind == "exponential") {
    require_order(opts.a, opts.b, std::nullopt);
  } else if (kind == "increment" || kind == "atom") {
    require_order(opts.a, opts.b, opts.c);
  } else if (kind == "independence") {
    const auto& w = opts.windows;
    if (!(opts.a > 0.0 && opts.a < w[0] && w[0] < w[1] && w[1] <= w[2] && w[2] < w[3])) {
      throw UsageError("need 0 < a < t1 < t2 <= t3 < t4 for --windows");
    }
  } else if (kind == "favorite") {
    if (!(opts.b > 0.0 && opts.b < opts.c)) throw UsageError("need 0 < b < c");
  }
  if (env) {
    if (kind == "exponential" || kind == "increment" || kind == "atom" || kind == "independence") {
      require_inside(*env, opts.a, "a");
    }
    if (kind == "exponential" || kind == "increment" || kind == "atom" || kind == "favorite") {
      require_inside(*env, opts.b, "b");
    }
    if (kind == "increment" || kind == "atom" || kind == "favorite") require_inside(*env, opts.c, "c");
    if (kind == "independence") {
      for (double t : opts.windows) require_inside(*env, t, "window point");
    }
  }

  const auto started = std::chrono::steady_clock::now();
  VerifyReport rep;
  if (kind == "exponential") {
    rep = verify_exponential(*env, *sm, opts);
  } else if (kind == "increment") {
    rep = verify_increment(*env, *sm, opts);
  } else if (kind == "atom") {
    rep = verify_atom(*env, *sm, opts);
  } else if (kind == "moments") {
    rep = verify_moments(opts);
  } else if (kind == "consistency") {
    rep = verify_consistency(opts);
  } else if (kind == "rayknight") {
    rep = verify_rayknight(opts);
  } else if (kind == "independence") {
    rep = verify_independence(*env, *sm, opts);
  } else if (kind == "favorite") {
    rep = verify_favorite(env ? &*env : nullptr, opts);
  } else {
    rep = verify_reconstruction(*env, *sm, opts);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  nlohmann::json doc = rep.to_json();
  doc["workers"] = opts.workers;
  if (!args.env.empty()) doc["env_file"] = args.env;
  if (!args.no_timestamp) {
    doc["timestamp"] = utc_timestamp();
    doc["wall_time_s"] = wall;
  }
  if (args.report.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    auto f = open_out(args.report);
    f << doc.dump(2) << '\n';
  }
  if (!args.samples_csv.empty()) {
    auto f = open_out(args.samples_csv);
    f << std::setprecision(17) << "replicate,value,is_exact_zero\n";
    for (std::size_t r = 0; r < rep.samples.size(); ++r) {
      f << r << ',' << rep.samples[r].value << ',' << (rep.samples[r].is_exact_zero ? 1 : 0) << '\n';
    }
  }
  for (const auto& c : rep.checks) {
    err << (c.pass ? "PASS " : (c.gating ? "FAIL " : "info ")) << kind << '/' << c.name
        << " observed=" << c.observed << " target=" << c.target << " tol=" << c.tolerance << '\n';
  }
  return rep.pass() ? kOk : kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local time of the Brox diffusion at first-passage times: closed-form laws and "
               "Monte Carlo verification",
               "brox"};
  app.require_subcommand(1);
  // "-h" stays free for the grid spacing flag; subcommands inherit this.
  app.set_help_flag("--help", "Print this help message and exit");
  std::string config_path;

  EnvGenArgs eg;
  auto* env_gen = app.add_subcommand("env-gen", "Write an environment file");
  env_gen->add_option("--kind", eg.kind, "bm | flat | linear")
      ->required()
      ->check(CLI::IsMember({"bm", "flat", "linear"}));
  env_gen->add_option("--slope", eg.slope, "Slope k of a linear environment");
  env_gen->add_option("--xmin", eg.x_min, "Left end of the grid (< 0)");
  env_gen->add_option("--xmax", eg.x_max, "Right end of the grid (> 0)");
  env_gen->add_option("--h", eg.h, "Grid spacing")->check(CLI::PositiveNumber);
  env_gen->add_option("--seed", eg.seed, "Seed for bm environments");
  env_gen->add_option("--out", eg.out, "Output JSON path")->required();
  env_gen->add_option("--config", config_path, "JSON file with default flag values");

  ScaleArgs sa;
  auto* scale = app.add_subcommand("scale", "Dump x, s(x) and the speed density as CSV");
  scale->add_option("--env", sa.env, "Environment file")->required();
  scale->add_option("--out", sa.out, "CSV path (default: stdout)");
  scale->add_option("--config", config_path, "JSON file with default flag values");

  LawArgs la;
  auto* law = app.add_subcommand("law", "Closed-form law of the local time at a");
  law->add_option("--env", la.env, "Environment file")->required();
  law->add_option("--a", la.a, "Observed site a > 0")->required();
  law->add_option("--b", la.b, "First passage level b > a")->required();
  law->add_option("--c", la.c, "Second passage level c > b (increment law)");
  law->add_option("--density-csv", la.density_csv, "Write t,atom,density");
  law->add_option("--cdf-csv", la.cdf_csv, "Write t,cdf");
  law->add_option("--tmax", la.t_max, "Curve range (default 10/lambda)")->check(CLI::PositiveNumber);
  law->add_option("--points", la.points, "Curve points")->check(CLI::Range(2, 10'000'000));
  law->add_option("--moments", la.moments, "Report moments of order 1..N")->check(CLI::Range(1, 170));
  law->add_option("--moments-csv", la.moments_csv, "Write n,moment");
  law->add_option("--config", config_path, "JSON file with default flag values");

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Expected increment over an a-grid in (0, b)");
  profile->add_option("--env", pa.env, "Environment file")->required();
  profile->add_option("--b", pa.b, "First passage level");
  profile->add_option("--c", pa.c, "Second passage level");
  profile->add_option("--points", pa.points, "Number of a values");
  profile->add_option("--out", pa.out, "CSV path (default: stdout)");
  profile->add_option("--config", config_path, "JSON file with default flag values");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification experiment");
  verify->add_option("kind", va.kind, "Experiment")->required()->check(CLI::IsMember(kVerifyKinds));
  verify->add_option("--env", va.env, "Environment file");
  verify->add_option("--a", va.a, "Observed site");
  verify->add_option("--b", va.b, "First passage level");
  verify->add_option("--c", va.c, "Second passage level");
  verify->add_option("--windows", va.windows, "t1 t2 t3 t4 for independence")->expected(4);
  verify->add_option("--reps", va.reps, "Simulated paths (atom: ruin trials)");
  verify->add_option("--direct-reps", va.direct_reps, "Draws from the closed-form samplers");
  verify->add_option("--envs", va.envs, "Random environments (moments, favorite)");
  verify->add_option("--grid-points", va.grid_points, "a-grid size (favorite)");
  verify->add_option("--dt", va.dt, "Brownian time step (default scales with the scale gap)");
  verify->add_option("--bandwidth", va.bandwidth, "Local-time half-width (default sqrt(dt))");
  verify->add_option("--floor-depth", va.floor_depth, "Excursion floor below the level");
  verify->add_option("--max-steps", va.max_steps, "Step budget per path");
  verify->add_option("--seed", va.seed, "Base seed");
  verify->add_option("--workers", va.workers, "Worker threads (0 = all cores)");
  verify->add_option("--report", va.report, "Report JSON path (default: stdout)");
  verify->add_option("--samples-csv", va.samples_csv, "Write replicate,value,is_exact_zero");
  verify->add_flag("--no-timestamp", va.no_timestamp, "Omit timestamp and wall time");
  verify->add_option("--config", config_path, "JSON file with default flag values");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    if (!config_path.empty()) apply_config(*chosen, config_path);
    if (chosen == env_gen) return cmd_env_gen(eg, out);
    if (chosen == scale) return cmd_scale(sa, out);
    if (chosen == law) return cmd_law(la, out);
    if (chosen == profile) return cmd_profile(pa, out);
    return cmd_verify(va, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace brox::cli
