#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "temp_dir.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result brox_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "brox");
  std::ostringstream out, err;
  const int code = brox::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(brox_cli({"env-gen", "--kind", "flat", "--out", path("flat.json")}).code, 0);
    ASSERT_EQ(brox_cli({"env-gen", "--kind", "linear", "--slope", "-1", "--out", path("lin.json")}).code, 0);
    ASSERT_EQ(brox_cli({"env-gen", "--kind", "bm", "--seed", "7", "--out", path("bm7.json")}).code, 0);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  TempDir dir_;
};

}  // namespace

TEST_F(Cli, EnvGen) {
  const auto doc = nlohmann::json::parse(slurp(path("flat.json")));
  for (const auto& v : doc.at("w")) EXPECT_EQ(v.get<double>(), 0.0);

  ASSERT_EQ(brox_cli({"env-gen", "--kind", "bm", "--seed", "7", "--out", path("again.json")}).code, 0);
  EXPECT_EQ(slurp(path("bm7.json")), slurp(path("again.json")));

  EXPECT_EQ(brox_cli({"env-gen", "--kind", "flat", "--h", "0", "--out", path("x.json")}).code, 2);
  EXPECT_EQ(brox_cli({"env-gen", "--kind", "flat", "--xmin", "-1.05", "--h", "0.1", "--out",
                      path("x.json")}).code, 2);
  EXPECT_EQ(brox_cli({"env-gen", "--kind", "wavy", "--out", path("x.json")}).code, 2);
}

TEST_F(Cli, Law) {
  Result r = brox_cli({"law", "--env", path("flat.json"), "--a", "1", "--b", "2", "--c", "4",
                       "--moments", "2", "--moments-csv", path("m.csv"), "--density-csv",
                       path("d.csv"), "--cdf-csv", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc.at("lambda").get<double>(), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(doc.at("alpha").get<double>(), 1.0 / 3.0, 1e-15);
  const auto m = read_csv(path("m.csv"));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0][0], 1.0);
  EXPECT_NEAR(m[0][1], 4.0, 1e-12);
  EXPECT_EQ(m[1][0], 2.0);
  EXPECT_NEAR(m[1][1], 48.0, 1e-11);
  EXPECT_EQ(read_csv(path("d.csv")).size(), 201u);
  EXPECT_NEAR(read_csv(path("c.csv")).back()[1], 1.0, 1e-4);

  r = brox_cli({"law", "--env", path("lin.json"), "--a", "1", "--b", "2", "--c", "4"});
  ASSERT_EQ(r.code, 0);
  doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc.at("lambda").get<double>(), 0.52619785, 1e-7);
  EXPECT_NEAR(doc.at("alpha").get<double>(), 0.66524096, 1e-7);

  r = brox_cli({"law", "--env", path("flat.json"), "--a", "1", "--b", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out).at("lambda").get<double>(), 0.5);
}

TEST_F(Cli, LawUsageErrors) {
  EXPECT_EQ(brox_cli({"law", "--env", path("flat.json"), "--a", "2", "--b", "1"}).code, 2);
  EXPECT_EQ(brox_cli({"law", "--env", path("flat.json"), "--a", "1", "--b", "4", "--c", "2"}).code, 2);
  EXPECT_EQ(brox_cli({"law", "--env", path("flat.json"), "--a", "1", "--b", "7.95"}).code, 2);
  EXPECT_EQ(brox_cli({"law", "--env", path("flat.json"), "--a", "1"}).code, 2);
  EXPECT_EQ(brox_cli({"law", "--env", path("nope.json"), "--a", "1", "--b", "2"}).code, 1);
}

TEST_F(Cli, Scale) {
  ASSERT_EQ(brox_cli({"scale", "--env", path("lin.json"), "--out", path("s.csv")}).code, 0);
  const auto rows = read_csv(path("s.csv"));
  EXPECT_EQ(rows.size(), 1601u);
  EXPECT_NEAR(rows[900][0], 1.0, 1e-12);
  EXPECT_NEAR(rows[900][1], 0.6321206, 1e-7);
}

TEST_F(Cli, Profile) {
  ASSERT_EQ(brox_cli({"profile", "--env", path("flat.json"), "--out", path("pf.csv")}).code, 0);
  for (const auto& row : read_csv(path("pf.csv"))) EXPECT_NEAR(row[1], 4.0, 1e-12);

  ASSERT_EQ(brox_cli({"profile", "--env", path("lin.json"), "--out", path("pl.csv")}).code, 0);
  const auto lin = read_csv(path("pl.csv"));
  for (std::size_t i = 1; i < lin.size(); ++i) EXPECT_GT(lin[i][1], lin[i - 1][1]);

  ASSERT_EQ(brox_cli({"profile", "--env", path("bm7.json"), "--out", path("pb.csv")}).code, 0);
  const auto bm = read_csv(path("pb.csv"));
  std::size_t argmax = 0, argmin = 0;
  for (std::size_t i = 1; i < bm.size(); ++i) {
    if (bm[i][1] > bm[argmax][1]) argmax = i;
    if (bm[i][2] < bm[argmin][2]) argmin = i;
  }
  EXPECT_EQ(argmax, argmin);
  const std::string text = slurp(path("pb.csv"));
  const auto footer = nlohmann::json::parse(text.substr(text.rfind("# ") + 2));
  EXPECT_EQ(footer.at("favorite_point").get<double>(), bm[argmin][0]);

  EXPECT_EQ(brox_cli({"profile", "--env", path("flat.json"), "--b", "2", "--c", "7.99"}).code, 2);
  EXPECT_EQ(brox_cli({"profile", "--env", path("flat.json"), "--b", "4", "--c", "2"}).code, 2);
}

TEST_F(Cli, VerifyExponentialFlat) {
  const Result r = brox_cli({"verify", "exponential", "--env", path("flat.json"), "--reps", "2000",
                             "--report", path("r.json"), "--samples-csv", path("s.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_TRUE(doc.at("pass").get<bool>());
  EXPECT_TRUE(doc.contains("timestamp"));
  EXPECT_EQ(read_csv(path("s.csv")).size(), 2000u);
}

TEST_F(Cli, VerifyFavoriteAndConsistency) {
  Result r = brox_cli({"verify", "favorite", "--env", path("bm7.json"), "--envs", "10", "--no-timestamp"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_FALSE(doc.contains("timestamp"));
  EXPECT_FALSE(doc.contains("wall_time_s"));

  r = brox_cli({"verify", "consistency", "--no-timestamp"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, ConfigFileDefersToFlags) {
  std::ofstream(path("cfg.json")) << R"({"reps": 120, "seed": 5, "env": ")" << path("flat.json")
                                   << R"(", "no-timestamp": true})";
  const Result r = brox_cli({"verify", "exponential", "--config", path("cfg.json"), "--seed", "9"});
  ASSERT_NE(r.code, 2) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("details").at("counts").at("paths").get<int>(), 120);
  EXPECT_EQ(doc.at("config").at("seed").get<std::uint64_t>(), 9u);
  EXPECT_FALSE(doc.contains("timestamp"));

  std::ofstream(path("bad.json")) << R"({"colour": 3})";
  EXPECT_EQ(brox_cli({"verify", "consistency", "--config", path("bad.json")}).code, 2);
}

TEST_F(Cli, VerifyUsageErrors) {
  EXPECT_EQ(brox_cli({"verify", "bogus"}).code, 2);
  EXPECT_EQ(brox_cli({"verify", "exponential"}).code, 2);
  EXPECT_EQ(brox_cli({"verify", "increment", "--env", path("flat.json"), "--b", "5", "--c", "4"}).code, 2);
  EXPECT_EQ(brox_cli({"verify", "independence", "--env", path("flat.json"), "--windows", "2", "4",
                      "3", "5"}).code, 2);
  EXPECT_EQ(brox_cli({"--help"}).code, 0);
  EXPECT_EQ(brox_cli({}).code, 2);
}
