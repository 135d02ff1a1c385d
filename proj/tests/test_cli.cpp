#include <gtest/gtest.h>

#include <riccati_si/cli.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace riccati_si;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("riccati_si_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& name, const json& j) {
  const auto path = dir / name;
  std::ofstream(path) << j.dump(2);
  return path;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_config() {
  return json::parse(R"({
    "name": "small",
    "problem": {"generator": "random", "n": 30, "seed": 3},
    "solver": "ilrsi",
    "shifts": {"type": "penzl", "m": 6, "m1": 12, "m2": 8},
    "tol": 1e-9,
    "max_iter": 60
  })");
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(RICCATI_SI_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesAllSections) {
  json j = small_config();
  j["truncation_tol"] = 1e-12;
  j["residual_every"] = 2;
  j["timing"] = true;
  j["seed"] = 5;
  j["output"] = {{"history", "h.csv"}, {"summary", "s.json"}, {"factors", "f"}};
  const cli::RunConfig cfg = cli::parse_config(j);
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.problem.n, 30);
  EXPECT_EQ(cfg.shifts.penzl.m, 6);
  EXPECT_EQ(cfg.residual_every, 2);
  EXPECT_TRUE(cfg.timing);
  EXPECT_EQ(cfg.history_file, "h.csv");
  EXPECT_EQ(cfg.factors_dir.value(), "f");
}

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  for (const char* path : {"/bogus", "/problem/bogus", "/shifts/bogus"}) {
    json j = small_config();
    j[json::json_pointer(path)] = 1;
    try {
      cli::parse_config(j);
      FAIL() << path;
    } catch (const cli::ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    }
  }
}

TEST(Config, NegativeTolNamesField) {
  json j = small_config();
  j["tol"] = -1;
  const auto dir = scratch_dir("neg_tol");
  std::ostringstream err;
  EXPECT_EQ(cli::cmd_run(write_config(dir, "c.json", j), dir / "out", err), cli::kConfigError);
  EXPECT_NE(err.str().find("tol"), std::string::npos);
}

TEST(Config, FileShiftsResolveRelativeToConfig) {
  const auto dir = scratch_dir("file_shifts");
  std::ofstream(dir / "shifts.json") << "[[1.0, 0.0], [3.0, 2.0], [3.0, -2.0]]";
  json j = small_config();
  j["shifts"] = {{"type", "file"}, {"path", "shifts.json"}};
  const auto cfg_path = write_config(dir, "c.json", j);
  EXPECT_EQ(cli::cmd_run(cfg_path, dir / "out"), cli::kConverged);
  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary["shifts"], json::parse("[[1.0, 0.0], [3.0, 2.0], [3.0, -2.0]]"));
}

TEST(Run, WritesHistoryAndSummary) {
  const auto dir = scratch_dir("run");
  const auto cfg = write_config(dir, "c.json", small_config());
  ASSERT_EQ(cli::cmd_run(cfg, dir / "a"), cli::kConverged);
  const std::string csv = slurp(dir / "a" / "history.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,dim,rank,rel_residual,seconds");
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 1);
  const json summary = json::parse(slurp(dir / "a" / "summary.json"));
  EXPECT_EQ(summary["status"], "converged");
  EXPECT_LE(summary["final_rel_residual"].get<double>(), 1e-9);
  EXPECT_EQ(summary["shifts"].size(), 6u);

  ASSERT_EQ(cli::cmd_run(cfg, dir / "b"), cli::kConverged);
  EXPECT_EQ(slurp(dir / "b" / "history.csv"), csv);
}

TEST(Run, ExitCodesFollowStatus) {
  const auto dir = scratch_dir("codes");
  json j = small_config();
  j["max_iter"] = 2;
  EXPECT_EQ(cli::cmd_run(write_config(dir, "short.json", j), dir / "short"), cli::kMaxIter);

  json unstable = small_config();
  // −A* + αI is singular for A = [2.5], α = 2.5.
  unstable["problem"] = {{"generator", "toeplitz"}, {"n", 1}, {"raw_sign", true}};
  unstable["shifts"] = {{"type", "list"}, {"values", json::parse("[[2.5, 0.0]]")}};
  EXPECT_EQ(cli::cmd_run(write_config(dir, "unstable.json", unstable), dir / "unstable"), cli::kBreakdown);

  EXPECT_EQ(cli::cmd_run(dir / "missing.json", dir / "missing"), cli::kConfigError);
}

TEST(Run, EverySolverKind) {
  const auto dir = scratch_dir("solvers");
  for (const char* solver : {"ilrsi", "rksm", "dense_fixed_point", "dense_exact"}) {
    json j = small_config();
    j["solver"] = solver;
    j["name"] = solver;
    EXPECT_EQ(cli::cmd_run(write_config(dir, std::string(solver) + ".json", j), dir / solver), cli::kConverged)
        << solver;
  }
  json adaptive = small_config();
  adaptive["solver"] = "rksm";
  adaptive["shifts"] = {{"type", "adaptive"}, {"mode", "stabilized"}};
  EXPECT_EQ(cli::cmd_run(write_config(dir, "adaptive.json", adaptive), dir / "adaptive"), cli::kConverged);
  const json s = json::parse(slurp(dir / "adaptive" / "summary.json"));
  EXPECT_EQ(s["shift_origin"], "adaptive_stabilized");

  json wrong = adaptive;
  wrong["solver"] = "ilrsi";
  EXPECT_EQ(cli::cmd_run(write_config(dir, "wrong.json", wrong), dir / "wrong"), cli::kConfigError);
}

TEST(Run, DenseThresholdFromEnvironment) {
  const auto dir = scratch_dir("threshold");
  json j = small_config();
  j["solver"] = "dense_exact";
  const auto cfg = write_config(dir, "c.json", j);
  ::setenv("RICCATI_SI_DENSE_THRESHOLD", "10", 1);
  const int code = cli::cmd_run(cfg, dir / "out");
  ::unsetenv("RICCATI_SI_DENSE_THRESHOLD");
  EXPECT_EQ(code, cli::kConfigError);
  EXPECT_EQ(cli::cmd_run(cfg, dir / "out"), cli::kConverged);
}

TEST(Compare, NeedsTwoConfigsOnOneProblem) {
  const auto dir = scratch_dir("compare");
  const auto a = write_config(dir, "a.json", small_config());
  EXPECT_EQ(cli::cmd_compare({a}, dir / "one"), cli::kConfigError);

  json other = small_config();
  other["problem"]["seed"] = 4;
  const auto b = write_config(dir, "b.json", other);
  EXPECT_EQ(cli::cmd_compare({a, b}, dir / "mismatch"), cli::kConfigError);
}

TEST(Compare, IdenticalConfigsTie) {
  const auto dir = scratch_dir("tie");
  const auto a = write_config(dir, "a.json", small_config());
  ASSERT_EQ(cli::cmd_compare({a, a}, dir / "out"), cli::kConverged);
  const json verdict = json::parse(slurp(dir / "out" / "compare.json"));
  EXPECT_EQ(verdict["verdict"], "tie");
  const std::string csv = slurp(dir / "out" / "compare.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dim,small,small_2");
}

TEST(Compare, MergesSeriesByDimension) {
  const auto dir = scratch_dir("merge");
  json rksm = small_config();
  rksm["solver"] = "rksm";
  rksm["name"] = "rksm";
  json ilrsi = small_config();
  ilrsi["name"] = "ilrsi";
  ilrsi["shifts"] = {{"type", "rksm_poles"}, {"mode", "plain"}, {"count", 20}};
  json dense = small_config();
  dense["name"] = "dense";
  dense["solver"] = "dense_exact";
  ASSERT_EQ(cli::cmd_compare({write_config(dir, "r.json", rksm), write_config(dir, "i.json", ilrsi),
                              write_config(dir, "d.json", dense)},
                             dir / "out"),
            cli::kConverged);
  const json verdict = json::parse(slurp(dir / "out" / "compare.json"));
  EXPECT_EQ(verdict["series"].size(), 3u);
  const std::string csv = slurp(dir / "out" / "compare.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dim,rksm,ilrsi,dense");
}

TEST(Verify, IdentitiesPassOnSeedOne) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify("identities", {1, ""}, {}, out, err), cli::kConverged) << err.str();
  const json report = json::parse(out.str());
  EXPECT_TRUE(report["pass"].get<bool>());
  EXPECT_TRUE(report["failed"].empty());
}

TEST(Verify, OracleAndBoundSuitesPass) {
  for (const char* suite : {"oracle", "bound"}) {
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_verify(suite, {1, ""}, {}, out, err), cli::kConverged) << suite << "\n" << err.str();
  }
}

TEST(Verify, CorruptedTNamesSylvesterCheck) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify("identities", {1, "corrupt_T"}, {}, out, err), cli::kVerifyFailed);
  const json report = json::parse(out.str());
  EXPECT_FALSE(report["pass"].get<bool>());
  const auto& failed = report["failed"];
  EXPECT_NE(std::find(failed.begin(), failed.end(), "check_sylvester_identity"), failed.end());
}

TEST(Verify, UnknownSuite) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify("nope", {1, ""}, {}, out, err), cli::kConfigError);
}

TEST(Binary, SubcommandsAndExitCodes) {
  const auto dir = scratch_dir("binary");
  const auto cfg = write_config(dir, "c.json", small_config());
  EXPECT_EQ(run_binary("run --config " + cfg.string() + " --out " + (dir / "out").string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "history.csv"));
  EXPECT_EQ(run_binary("compare --configs " + cfg.string() + " --out " + (dir / "cmp").string()), 1);
  EXPECT_EQ(run_binary("verify --suite nope"), 1);
  EXPECT_EQ(run_binary("verify --suite identities --inject-fault corrupt_T --report " + (dir / "r.json").string()),
            4);
  EXPECT_NE(slurp(dir / "r.json").find("check_sylvester_identity"), std::string::npos);
  EXPECT_EQ(run_binary("run"), 1);
}
