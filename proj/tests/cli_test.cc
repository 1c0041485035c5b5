//
// Copyright 2026 The lapdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "lapdetect/lapdetect.hpp"

namespace lapdetect::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lapdetect");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Set LAPDETECT_UPDATE_GOLDEN=1 to rewrite the files after an intended
// output change.
void ExpectGolden(const std::string& name, const std::string& actual) {
  const fs::path path = fs::path(LAPDETECT_GOLDEN_DIR) / name;
  if (const char* u = std::getenv("LAPDETECT_UPDATE_GOLDEN"); u && *u == '1') {
    std::ofstream(path, std::ios::binary) << actual;
  }
  ASSERT_TRUE(fs::exists(path)) << path;
  EXPECT_EQ(Slurp(path), actual) << name;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("lapdetect_cli_" + std::to_string(::testing::UnitTest::GetInstance()
                                                   ->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()
                       ->current_test_info()
                       ->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

std::string FirstLine(const std::string& s) { return s.substr(0, s.find('\n')); }

TEST(CliTest, ThresholdAtHalfIsLocation) {
  const Result r = Invoke({"threshold", "--alpha", "0.5", "--mu0", "0", "--s", "1",
                        "--eps", "1", "--tail", "right"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "0\n");
}

TEST(CliTest, ThresholdTwoSidedAndVerbose) {
  const Result r =
      Invoke({"threshold", "--alpha", "0.1", "--tail", "two_sided", "--verbose"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "(2.302585, -2.302585)\nsize=0.1\n");
}

TEST(CliTest, IntervalExample) {
  const Result r = Invoke({"interval", "--alpha", "0.05", "--beta-bar", "0.8",
                        "--theta", "1", "--s", "1", "--eps", "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "(-3.218876, 3.218876)\n");
  const double hi = std::log(1 / (0.05 * 0.8));
  EXPECT_NEAR(hi, 3.2188758, 5e-8);
}

TEST(CliTest, KlExample) {
  const Result r = Invoke({"kl", "--mu0", "0", "--dmu", "4", "--s", "1", "--eps",
                        "1", "--theta", "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("kl=3.018316\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("bound=2.718282\n"), std::string::npos);
  EXPECT_NE(r.out.find("violated=true\n"), std::string::npos);
  EXPECT_NE(r.out.find("formula=canonical\n"), std::string::npos);
}

TEST(CliTest, KlJsonFields) {
  const Result r = Invoke({"kl", "--dmu", "2", "--eps", "0.5", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key :
       {"d_closed", "d_quadrature", "epsilon", "bound", "violated"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["d_closed"].get<double>(), j["d_quadrature"].get<double>(),
              1e-8);
}

TEST(CliTest, PaperFidelitySwitchesFormulaOnlyForNegativeBias) {
  const Result neg = Invoke({"kl", "--dmu", "-2", "--theta", "1.5",
                          "--paper-fidelity"});
  ASSERT_EQ(neg.code, kExitOk) << neg.err;
  EXPECT_NE(neg.out.find("formula=paper_variant_II\n"), std::string::npos);
  EXPECT_NE(neg.out.find("kl_canonical="), std::string::npos);

  const Result plain = Invoke({"kl", "--dmu", "-2", "--theta", "1.5"});
  EXPECT_NE(FirstLine(neg.out), FirstLine(plain.out));

  const Result pos = Invoke({"kl", "--dmu", "1", "--theta", "1.5",
                          "--paper-fidelity"});
  ASSERT_EQ(pos.code, kExitOk);
  EXPECT_NE(pos.out.find("formula=canonical (variant II needs mu1 < mu0)"),
            std::string::npos);
}

TEST(CliTest, PowerExampleAndDecision) {
  const Result r = Invoke({"power", "--alpha", "0.1", "--dmu", "1", "--z", "2",
                        "--verbose"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(FirstLine(r.out), "0.2718282");
  EXPECT_NE(r.out.find("decision=detected\n"), std::string::npos);
  EXPECT_NE(r.out.find("k=1.609438\n"), std::string::npos);
  EXPECT_NE(r.out.find("size=0.1\n"), std::string::npos);
}

TEST(CliTest, PowerExplicitThresholds) {
  const Result one = Invoke({"power", "--dmu", "1", "--k", "0"});
  ASSERT_EQ(one.code, kExitOk);
  EXPECT_EQ(one.out, "0.8160603\n");  // 1 - e^-1 / 2
  const Result two =
      Invoke({"power", "--dmu", "0", "--tail", "two_sided", "--k1", "1", "--k2",
           "-1"});
  ASSERT_EQ(two.code, kExitOk);
  EXPECT_EQ(two.out, "0.3678794\n");  // e^-1
  EXPECT_EQ(Invoke({"power", "--dmu", "1", "--k1", "1", "--k2", "-1"}).code,
            kExitDomain);
  EXPECT_EQ(Invoke({"power", "--dmu", "1", "--k1", "1"}).code, kExitUsage);
}

TEST(CliTest, RocCsvHeaderAndShape) {
  const Result r = Invoke({"roc", "--grid", "9", "--out", "-"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,k1,k2,power");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 9);
}

TEST(CliTest, KlSweepCsvHeader) {
  const Result r = Invoke({"kl-sweep", "--grid", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(FirstLine(r.out), "epsilon,theta,dmu_over_s,kl,bound,violated");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 3 * 2 * 3);
}

TEST(CliTest, SimulateJsonFields) {
  const Result r = Invoke({"simulate", "--samples", "1000", "--dmu", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"alpha_hat", "power_hat", "alpha_closed",
                          "power_closed", "half_width_alpha",
                          "half_width_power", "pass"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(CliTest, SimulateCsvAppends) {
  TempDir dir;
  const std::string path = (dir.path() / "grid.csv").string();
  for (const char* a : {"0.1", "0.2"}) {
    const Result r = Invoke({"simulate", "--samples", "2000", "--alpha", a,
                          "--format", "csv", "--out", path});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, "wrote " + path + "\n");
  }
  const std::string csv = Slurp(path);
  EXPECT_EQ(FirstLine(csv), "eps,theta,dmu,alpha,alpha_hat,power,power_hat,pass");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\n1,1,0,0.10000000000000001,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\n1,1,0,0.20000000000000001,"), std::string::npos);
}

TEST(CliTest, SimulateWithDataAndTrace) {
  TempDir dir;
  const fs::path data = dir.path() / "data.csv";
  std::ofstream(data) << "value\n0.5\n1\n0.25\n";
  const fs::path trace = dir.path() / "trace.csv";
  const Result r =
      Invoke({"simulate", "--samples", "100", "--dmu", "1", "--data",
           data.string(), "--trace", trace.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string t = Slurp(trace);
  EXPECT_EQ(FirstLine(t), "trial,release_h0,detected_h0,release_h1,detected_h1");
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 101);

  EXPECT_EQ(Invoke({"simulate", "--samples", "100", "--trace", trace.string()})
                .code,
            kExitDomain);
  EXPECT_EQ(Invoke({"simulate", "--samples", "100", "--data", data.string(),
                 "--bound", "0.5"})
                .code,
            kExitDomain);
  EXPECT_EQ(Invoke({"simulate", "--samples", "10", "--data",
                 (dir.path() / "missing.csv").string()})
                .code,
            kExitFailure);
}

TEST(CliTest, OutputDirectoryFromEnvironment) {
  TempDir dir;
  ScopedEnv env(kOutDirEnv, dir.path().string());
  const Result roc = Invoke({"roc", "--grid", "4"});
  ASSERT_EQ(roc.code, kExitOk) << roc.err;
  EXPECT_TRUE(fs::exists(dir.path() / "roc.csv"));
  EXPECT_EQ(roc.out.substr(0, 4), "auc=");
  const Result sweep = Invoke({"kl-sweep", "--grid", "2"});
  ASSERT_EQ(sweep.code, kExitOk);
  EXPECT_TRUE(fs::exists(dir.path() / "kl_sweep.csv"));
  // '-' still forces stdout.
  EXPECT_EQ(FirstLine(Invoke({"roc", "--grid", "4", "--out", "-"}).out),
            "alpha,k1,k2,power");
}

TEST(CliTest, UsageErrorsExitTwo) {
  const Result unknown = Invoke({"frobnicate"});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_NE(unknown.err.find("unknown subcommand 'frobnicate'"),
            std::string::npos);
  EXPECT_NE(unknown.err.find("threshold"), std::string::npos);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"threshold"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--alpha", "abc"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--alpha", "0.1", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"kl", "--dmu", "1", "--format", "xml"}).code, kExitUsage);
}

TEST(CliTest, DomainErrorsExitThreeWithOneLine) {
  const std::vector<std::vector<std::string>> cases = {
      {"threshold", "--alpha", "0"},
      {"threshold", "--alpha", "1.5"},
      {"threshold", "--alpha", "0.1", "--eps", "-1"},
      {"threshold", "--alpha", "0.1", "--s", "0"},
      {"threshold", "--alpha", "0.1", "--tail", "up"},
      {"power", "--dmu", "1", "--theta", "0.5"},
      {"interval", "--alpha", "0.1", "--beta-bar", "0"},
      {"roc", "--grid", "1"},
      {"kl-sweep", "--eps-min", "0"},
      {"simulate", "--samples", "0"},
      {"simulate", "--alpha", "2"},
  };
  for (const auto& c : cases) {
    const Result r = Invoke(c);
    EXPECT_EQ(r.code, kExitDomain) << c[0] << " " << c[1] << " " << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  }
}

TEST(CliTest, DispatchTableCoversEachOperationOnce) {
  const std::set<std::string> library_ops = {
      // laplace
      "pdf", "cdf", "survival", "quantile", "upper_quantile", "sample",
      "mean_abs_dev",
      // mechanism
      "sum_query", "noisy_release", "inject_attack", "hypothesis_pair",
      // detector
      "one_sided_threshold", "one_sided_size", "one_sided_power",
      "likelihood_ratio", "kappa", "two_sided_thresholds", "two_sided_power",
      "decide", "roc_curve", "bias_interval",
      // divergence
      "kl_laplace", "kl_laplace_paper_variant_II", "kl_quadrature",
      "kl_dp_check", "kl_sweep",
      // montecarlo
      "estimate_error_rates", "run_attack_experiment", "run_validation_grid"};
  std::map<std::string, int> seen;
  std::set<std::string> names;
  for (const auto& sub : dispatch_table()) {
    names.insert(std::string(sub.name));
    for (const auto op : sub.operations) ++seen[std::string(op)];
  }
  EXPECT_EQ(names, (std::set<std::string>{"threshold", "power", "roc",
                                          "interval", "kl", "kl-sweep",
                                          "simulate"}));
  for (const auto& op : library_ops) {
    EXPECT_EQ(seen[op], 1) << op;
  }
  for (const auto& [op, n] : seen) {
    EXPECT_TRUE(library_ops.contains(op)) << "unknown op " << op;
  }
}

TEST(CliTest, EverySubcommandHasHelp) {
  for (const auto& sub : dispatch_table()) {
    const Result r = Invoke({std::string(sub.name), "--help"});
    EXPECT_EQ(r.code, kExitOk) << sub.name;
    EXPECT_NE(r.out.find(std::string(sub.summary)), std::string::npos)
        << sub.name;
  }
}

// Byte-stability: fixed flags and seed give exactly the stored output.
TEST(CliGoldenTest, Threshold) {
  ExpectGolden("threshold.txt",
               Invoke({"threshold", "--alpha", "0.05", "--s", "2", "--eps", "0.5",
                    "--mu0", "1", "--tail", "left", "--verbose"})
                   .out);
}

TEST(CliGoldenTest, Power) {
  ExpectGolden("power.txt",
               Invoke({"power", "--alpha", "0.2", "--dmu", "-1.5", "--theta",
                    "1.5", "--tail", "left", "--z", "-2", "--verbose"})
                   .out);
}

TEST(CliGoldenTest, Roc) {
  ExpectGolden("roc.csv", Invoke({"roc", "--grid", "19", "--tail", "two_sided",
                               "--eps", "2", "--out", "-"})
                              .out);
}

TEST(CliGoldenTest, Kl) {
  ExpectGolden("kl.json", Invoke({"kl", "--dmu", "-2", "--theta", "1.5",
                               "--paper-fidelity", "--format", "json"})
                              .out);
}

TEST(CliGoldenTest, KlSweep) {
  ExpectGolden("kl_sweep.csv",
               Invoke({"kl-sweep", "--grid", "5", "--eps-min", "0.5", "--eps-max",
                    "2.5", "--out", "-"})
                   .out);
}

TEST(CliGoldenTest, Simulate) {
  ExpectGolden("simulate.json",
               Invoke({"simulate", "--samples", "50000", "--seed", "7", "--dmu",
                    "1", "--theta", "1.5", "--tail", "two_sided", "--workers",
                    "3"})
                   .out);
}

TEST(CliGoldenTest, SimulateWithData) {
  TempDir dir;
  const fs::path data = dir.path() / "data.csv";
  std::ofstream(data) << "value\n0.5\n1\n0.25\n0\n";
  const fs::path trace = dir.path() / "trace.csv";
  const Result r =
      Invoke({"simulate", "--samples", "12", "--seed", "11", "--dmu", "0.75",
           "--data", data.string(), "--trace", trace.string(), "--format",
           "csv", "--out", "-"});
  ExpectGolden("simulate_data.csv", r.out);
  ExpectGolden("simulate_trace.csv", Slurp(trace));
}

}  // namespace
}  // namespace lapdetect::cli
