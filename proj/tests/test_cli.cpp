#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "daqc/cli.hpp"
#include "daqc/error.hpp"

using namespace daqc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("daqc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    write("noise.json", R"({"sqg_fid": 0.9999, "tqg_fid": 0.999, "analog_term_fid": 0.9995, "calibration_trials": 200})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string noise() const { return path("noise.json"); }

  fs::path dir_;
};

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream is(csv);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_F(CliTest, GhzSweepHasOneRowPerPoint) {
  const auto r = run({"sweep", "--algorithm", "star-ghz", "--paradigms", "dqc,sdaqc", "--n", "3..9", "--iterations",
                      "10", "--noise", noise()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_lines(r.out);
  EXPECT_EQ(rows.size(), 14u);
  EXPECT_NE(r.out.find("# daqc sweep"), std::string::npos);
  EXPECT_NE(r.out.find("# algorithm = star-ghz  (override)"), std::string::npos);
  EXPECT_NE(r.out.find("# seed = 2024\n"), std::string::npos);
}

TEST_F(CliTest, SameSeedGivesIdenticalOutput) {
  const std::vector<std::string> args{"sweep", "--algorithm", "star-qft", "--paradigms", "sdaqc", "--n", "3..4",
                                      "--iterations", "20", "--seed", "5", "--noise", noise()};
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const auto a = run(args), b = run(args), c = run(threaded);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  // only the provenance line for threads may differ
  EXPECT_EQ(data_lines(a.out), data_lines(c.out));
  auto other = args;
  other[9] = "6";
  EXPECT_NE(data_lines(run(other).out), data_lines(a.out));
}

TEST_F(CliTest, InfeasiblePointsAreSkippedRows) {
  const auto r = run({"durations", "--algorithm", "ata-qft", "--paradigms", "sdaqc,bdaqc", "--n", "3..8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 12u);
  int skipped = 0;
  for (const auto& row : rows) skipped += row.find("skipped(") != std::string::npos;
  // N=4 is singular for both paradigms, bDAQC at N=7 and 8 needs negative time
  EXPECT_EQ(skipped, 4);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"generate", "--algorithm", "grover", "--n", "3", "--paradigm", "dqc"}).code, 2);
  EXPECT_EQ(run({"generate", "--algorithm", "star-ghz", "--n", "3", "--paradigm", "bdaqc"}).code, 3);
  EXPECT_EQ(run({"generate", "--algorithm", "ata-qft", "--n", "4", "--paradigm", "sdaqc"}).code, 3);
  EXPECT_EQ(run({"durations", "--n", "3..60"}).code, 2);
  EXPECT_EQ(run({"sweep", "--n", "3..4", "--short-blocks", "maybe", "--noise", noise()}).code, 2);

  const auto big = run({"generate", "--algorithm", "star-ghz", "--n", "13", "--paradigm", "dqc", "-o",
                        path("big.json")});
  ASSERT_EQ(big.code, 0) << big.err;
  const auto sim = run({"simulate", "--circuit", path("big.json")});
  EXPECT_EQ(sim.code, 4);
  EXPECT_NE(sim.err.find("numerical error"), std::string::npos);
}

TEST_F(CliTest, JsonMirrorsCsv) {
  const std::vector<std::string> base{"durations", "--algorithm", "star-qft", "--n", "3..5"};
  auto with_json = base;
  with_json.push_back("--json");
  const auto csv = run(base);
  const auto js = run(with_json);
  ASSERT_EQ(js.code, 0) << js.err;
  const auto j = nlohmann::json::parse(js.out);
  EXPECT_EQ(j["command"], "durations");
  EXPECT_EQ(j["rows"].size(), data_lines(csv.out).size());
  EXPECT_EQ(j["rows"][0]["paradigm"], "dqc");
  EXPECT_EQ(j["rows"][0]["N"], 3);
  EXPECT_EQ(j["provenance"]["n_max"], "5  (override)");
}

TEST_F(CliTest, GenerateThenSimulate) {
  ASSERT_EQ(run({"generate", "--algorithm", "star-qft", "--n", "4", "--paradigm", "sdaqc", "-o", path("s.json")}).code,
            0);
  ASSERT_EQ(run({"generate", "--algorithm", "star-qft", "--n", "4", "--paradigm", "dqc", "-o", path("d.json")}).code,
            0);
  const auto r = run({"simulate", "--circuit", path("s.json"), "--reference", path("d.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["ideal_fidelity"].get<double>(), 1.0, 1e-9);
  EXPECT_GT(j["duration_s"].get<double>(), 0.0);

  const auto g = run({"generate", "--algorithm", "star-ghz", "--n", "4", "--paradigm", "sdaqc", "-o", path("g.json")});
  ASSERT_EQ(g.code, 0);
  const auto s = run({"simulate", "--circuit", path("g.json"), "--target-state", "ghz", "--noise", noise(),
                      "--iterations", "20"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto sj = nlohmann::json::parse(s.out);
  EXPECT_NEAR(sj["ideal_fidelity"].get<double>(), 1.0, 1e-9);
  EXPECT_LT(sj["mean_fidelity"].get<double>(), 1.0);
  EXPECT_EQ(sj["iterations"], 20);
}

TEST_F(CliTest, CompileFromFile) {
  const auto in = write("target.json", R"({
    "resource": {"num_qubits": 3, "generator": "star", "coefficient_mhz": 10},
    "target": {"num_qubits": 3, "generator": "star", "coefficients_mhz": [1.0, -0.5]},
    "t_f_us": 1.0
  })");
  const auto r = run({"compile", "--input", in});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["circuit"]["paradigm"], "sdaqc");
  EXPECT_EQ(j["circuit"]["metadata"]["protocol"], "star");
  EXPECT_EQ(j["negative_times"], false);

  const auto ata = write("ata.json", R"({
    "resource": {"num_qubits": 4, "generator": "ata", "coefficient_mhz": 10},
    "target": {"num_qubits": 4, "generator": "ata", "coefficient_mhz": 1},
    "t_f": 1e-6
  })");
  const auto bad = run({"compile", "--input", ata});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("singular"), std::string::npos);

  EXPECT_EQ(run({"compile", "--input", path("missing.json")}).code, 2);
  EXPECT_EQ(run({"compile", "--input", write("nt.json", R"({"resource": {}, "target": {}})")}).code, 2);
}

TEST_F(CliTest, ShortBlocksFlagControlsBdaqc) {
  const auto in = write("short.json", R"({
    "resource": {"num_qubits": 3, "generator": "star", "coefficient_mhz": 10},
    "target": {"num_qubits": 3, "generator": "star", "coefficients_mhz": [1.0, 0.98]},
    "t_f_us": 1.0
  })");
  EXPECT_EQ(run({"compile", "--input", in, "--paradigm", "bdaqc"}).code, 3);
  const auto r = run({"compile", "--input", in, "--paradigm", "bdaqc", "--short-blocks", "allow"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["circuit"]["metadata"]["short_blocks"], 1);
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  const auto cfg = write("cfg.json", R"({"algorithm": "star-ghz", "paradigms": ["sdaqc"], "n_min": 3, "n_max": 4,
                                         "gbar_mhz": 20})");
  const auto r = run({"durations", "--config", cfg, "--n", "5..6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto at = r.out.find("# gbar_mhz = 20");
  ASSERT_NE(at, std::string::npos);
  EXPECT_NE(r.out.substr(at, r.out.find('\n', at) - at).find("(override)"), std::string::npos);
  const auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rfind("star-ghz,sdaqc,5,", 0), 0u);

  EXPECT_EQ(run({"durations", "--config", write("bad.json", R"({"colour": "red"})")}).code, 2);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse(R"({"n_min": "three"})")), ConfigError);
  const auto c = experiment_config_from_json(to_json(ExperimentConfig{}));
  EXPECT_EQ(to_json(c), to_json(ExperimentConfig{}));
}

TEST_F(CliTest, FitReadsDurationsOutput) {
  ASSERT_EQ(run({"durations", "--algorithm", "star-qft", "--paradigms", "dqc,sdaqc", "--n", "4..12", "-o",
                 path("d.csv")})
                .code,
            0);
  const auto r = run({"fit", "--input", path("d.csv"), "--what", "duration", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 2u);
  for (const auto& row : j["rows"]) EXPECT_GT(row["exponent"].get<double>(), 0.5);
  EXPECT_EQ(run({"fit", "--input", path("d.csv"), "--what", "colour"}).code, 2);
}

TEST_F(CliTest, TradeoffReportsCrossovers) {
  const auto r = run({"tradeoff", "--n", "3..12", "--t1-us", "50", "--tqg-ns", "300", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 10u);
  ASSERT_EQ(j["crossovers"].size(), 1u);
  EXPECT_EQ(j["crossovers"][0]["t_tqg_ns"], 300.0);
}

TEST(ParseNList, Forms) {
  EXPECT_EQ(parse_n_list("3..5"), (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(parse_n_list("7"), (std::vector<int>{7}));
  EXPECT_EQ(parse_n_list("3,5,6"), (std::vector<int>{3, 5, 6}));
  EXPECT_THROW(parse_n_list("5..3"), ConfigError);
  EXPECT_THROW(parse_n_list("x"), ConfigError);
}
