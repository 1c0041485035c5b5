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

#ifndef LAPDETECT_TOOLS_CLI_HPP_
#define LAPDETECT_TOOLS_CLI_HPP_

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "lapdetect/lapdetect.hpp"

namespace lapdetect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

// Environment variable naming the directory for file outputs when --out is
// not given.
inline constexpr const char* kOutDirEnv = "LAPDETECT_OUT_DIR";

struct SubcommandInfo {
  std::string_view name;
  std::string_view summary;
  // Library operations this subcommand is responsible for exposing.
  std::vector<std::string_view> operations;
};

inline const std::vector<SubcommandInfo>& dispatch_table() {
  static const std::vector<SubcommandInfo> table = {
      {"threshold",
       "critical-region threshold(s) for a given size",
       {"one_sided_threshold", "two_sided_thresholds", "one_sided_size",
        "quantile", "upper_quantile", "survival", "cdf"}},
      {"power",
       "power of a test against an attack, optional residual decision",
       {"one_sided_power", "two_sided_power", "hypothesis_pair",
        "likelihood_ratio", "kappa", "decide", "pdf"}},
      {"roc", "ROC curve as CSV", {"roc_curve"}},
      {"interval", "detectable-bias interval", {"bias_interval"}},
      {"kl",
       "KL divergence and KL-DP check for one hypothesis pair",
       {"kl_laplace", "kl_laplace_paper_variant_II", "kl_dp_check",
        "kl_quadrature", "mean_abs_dev"}},
      {"kl-sweep", "KL-DP sweep over epsilon as CSV", {"kl_sweep"}},
      {"simulate",
       "Monte Carlo validation of size and power",
       {"estimate_error_rates", "run_attack_experiment",
        "run_validation_grid", "sum_query", "noisy_release", "inject_attack",
        "sample"}},
  };
  return table;
}

namespace internal {

struct MechanismFlags {
  double mu0 = 0.0;
  double s = 1.0;
  double eps = 1.0;
  double theta = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--mu0", mu0, "null noise location")->capture_default_str();
    app->add_option("--s", s, "query sensitivity")->capture_default_str();
    app->add_option("--eps", eps, "privacy parameter epsilon")
        ->capture_default_str();
    app->add_option("--theta", theta, "scale inflation under H1 (>= 1)")
        ->capture_default_str();
  }

  MechanismConfig config() const {
    return MechanismConfig({.mu0 = mu0, .s = s, .eps = eps, .theta = theta});
  }
};

// Resolves where a file artifact goes: --out if given, else
// $LAPDETECT_OUT_DIR/<default_name>, else stdout (empty path).
inline std::string resolve_out(const std::string& flag,
                               const std::string& default_name) {
  if (!flag.empty()) return flag == "-" ? std::string() : flag;
  if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir) {
    return (std::filesystem::path(dir) / default_name).string();
  }
  return {};
}

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback, bool append)
      : path_(path) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    existed_ = std::filesystem::exists(path) &&
               std::filesystem::file_size(path) > 0;
    file_ = std::make_unique<std::ofstream>(
        path, append ? std::ios::app : std::ios::trunc);
    if (!*file_) throw std::runtime_error("cannot open " + path);
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }
  bool is_file() const { return !path_.empty(); }
  // True if an append target already had content (skip CSV header).
  bool had_content() const { return existed_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
  bool existed_ = false;
};

inline std::string pair_text(double a, double b) {
  return "(" + summary_number(a) + ", " + summary_number(b) + ")";
}

inline std::string dist_text(const LaplaceDist& d) {
  return "Lap(" + summary_number(d.mu()) + ", " + summary_number(d.b()) + ")";
}

}  // namespace internal

// Parses argv and runs one subcommand. Normal output goes to `out`,
// diagnostics to `err`. Exit codes: 0 success, 2 usage error, 3 domain or
// configuration error, 1 I/O failure.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  using internal::MechanismFlags;

  CLI::App app{"Detect adversarial bias on Laplace-mechanism releases", "lapdetect"};
  app.require_subcommand(1);
  const auto& table = dispatch_table();
  const auto summary = [&](std::string_view name) {
    for (const auto& s : table) {
      if (s.name == name) return std::string(s.summary);
    }
    return std::string();
  };

  // threshold
  MechanismFlags th_mech;
  double th_alpha = 0.05;
  std::string th_tail = "right";
  bool th_verbose = false;
  CLI::App* threshold = app.add_subcommand("threshold", summary("threshold"));
  th_mech.attach(threshold);
  threshold->add_option("--alpha", th_alpha, "test size")->required();
  threshold->add_option("--tail", th_tail, "right, left or two_sided")
      ->capture_default_str();
  threshold->add_flag("--verbose", th_verbose, "also print the recomputed size");

  // power
  MechanismFlags pw_mech;
  double pw_alpha = 0.05;
  double pw_dmu = 0.0;
  std::string pw_tail = "right";
  std::optional<double> pw_k;
  std::optional<double> pw_k1;
  std::optional<double> pw_k2;
  std::optional<double> pw_z;
  bool pw_verbose = false;
  CLI::App* power = app.add_subcommand("power", summary("power"));
  pw_mech.attach(power);
  power->add_option("--alpha", pw_alpha, "test size")->capture_default_str();
  power->add_option("--dmu", pw_dmu, "attack bias x_a = mu1 - mu0")->required();
  power->add_option("--tail", pw_tail, "right, left or two_sided")
      ->capture_default_str();
  CLI::Option* k_opt =
      power->add_option("--k", pw_k, "explicit one-sided threshold");
  CLI::Option* k1_opt =
      power->add_option("--k1", pw_k1, "explicit upper two-sided threshold");
  CLI::Option* k2_opt =
      power->add_option("--k2", pw_k2, "explicit lower two-sided threshold");
  k1_opt->needs(k2_opt);
  k2_opt->needs(k1_opt);
  k_opt->excludes(k1_opt);
  power->add_option("--z", pw_z, "residual to classify (release - q(x))");
  power->add_flag("--verbose", pw_verbose, "print hypotheses, size and kappa");

  // roc
  MechanismFlags roc_mech;
  roc_mech.theta = 1.5;
  double roc_dmu = 1.0;
  std::string roc_tail = "right";
  std::size_t roc_grid = kDefaultRocGrid;
  std::string roc_out;
  CLI::App* roc = app.add_subcommand("roc", summary("roc"));
  roc_mech.attach(roc);
  roc->add_option("--dmu", roc_dmu, "attack bias")->capture_default_str();
  roc->add_option("--tail", roc_tail, "right, left or two_sided")
      ->capture_default_str();
  roc->add_option("--grid", roc_grid, "number of alpha points")
      ->capture_default_str();
  roc->add_option("--out", roc_out, "output CSV path ('-' for stdout)");

  // interval
  MechanismFlags iv_mech;
  double iv_alpha = 0.05;
  double iv_beta = 0.8;
  CLI::App* interval = app.add_subcommand("interval", summary("interval"));
  iv_mech.attach(interval);
  interval->add_option("--alpha", iv_alpha, "test size")->required();
  interval->add_option("--beta-bar", iv_beta, "power")->required();

  // kl
  MechanismFlags kl_mech;
  double kl_dmu = 0.0;
  bool kl_fidelity = false;
  std::string kl_format = "text";
  CLI::App* kl = app.add_subcommand("kl", summary("kl"));
  kl_mech.attach(kl);
  kl->add_option("--dmu", kl_dmu, "attack bias mu1 - mu0")->required();
  kl->add_flag("--paper-fidelity", kl_fidelity,
               "use the literal mu1 < mu0 variant formula when it applies");
  kl->add_option("--format", kl_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // kl-sweep
  double ks_s = 1.0;
  double ks_eps_min = 0.05;
  double ks_eps_max = 3.0;
  std::size_t ks_grid = 60;
  std::vector<double> ks_thetas{1.0, 1.5};
  std::vector<double> ks_ratios{0.5, 1.0, 4.0};
  std::string ks_out;
  CLI::App* kl_sweep_cmd = app.add_subcommand("kl-sweep", summary("kl-sweep"));
  kl_sweep_cmd->add_option("--s", ks_s, "query sensitivity")
      ->capture_default_str();
  kl_sweep_cmd->add_option("--eps-min", ks_eps_min)->capture_default_str();
  kl_sweep_cmd->add_option("--eps-max", ks_eps_max)->capture_default_str();
  kl_sweep_cmd->add_option("--grid", ks_grid, "number of epsilon points")
      ->capture_default_str();
  kl_sweep_cmd->add_option("--theta", ks_thetas, "comma-separated thetas")
      ->delimiter(',')
      ->capture_default_str();
  kl_sweep_cmd
      ->add_option("--dmu-over-s", ks_ratios, "comma-separated dmu/s levels")
      ->delimiter(',')
      ->capture_default_str();
  kl_sweep_cmd->add_option("--out", ks_out, "output CSV path ('-' for stdout)");

  // simulate
  MechanismFlags sim_mech;
  double sim_alpha = 0.05;
  double sim_dmu = 0.0;
  std::string sim_tail = "right";
  std::uint64_t sim_samples = 1'000'000;
  std::uint64_t sim_seed = 1;
  unsigned sim_workers = 1;
  std::string sim_data;
  std::optional<double> sim_bound;
  std::string sim_trace;
  std::string sim_format = "json";
  bool sim_sweep = false;
  std::string sim_out;
  CLI::App* simulate = app.add_subcommand("simulate", summary("simulate"));
  sim_mech.attach(simulate);
  simulate->add_option("--alpha", sim_alpha, "test size")->capture_default_str();
  simulate->add_option("--dmu", sim_dmu, "attack bias x_a")
      ->capture_default_str();
  simulate->add_option("--tail", sim_tail, "right, left or two_sided")
      ->capture_default_str();
  simulate->add_option("--samples", sim_samples, "trials per hypothesis")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "base seed")->capture_default_str();
  simulate->add_option("--workers", sim_workers, "worker threads")
      ->capture_default_str();
  simulate->add_option("--data", sim_data,
                       "dataset (CSV with header 'value' or one per line)");
  simulate->add_option("--bound", sim_bound,
                       "record bound C (defaults to --s)");
  simulate->add_option("--trace", sim_trace, "per-trial CSV (needs --data)");
  simulate->add_option("--format", sim_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  simulate->add_flag("--sweep", sim_sweep,
                     "run the default validation grid (CSV)");
  simulate->add_option("--out", sim_out, "output path ('-' for stdout)");

  if (argc > 1 && argv[1][0] != '-') {
    const std::string_view word = argv[1];
    bool known = false;
    for (const auto& s : table) known = known || s.name == word;
    if (!known) {
      err << app.help();
      err << "error: unknown subcommand '" << word << "'\n";
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    if (app.get_subcommands().empty()) err << app.help();
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (threshold->parsed()) {
      const MechanismConfig cfg = th_mech.config();
      const TailDirection dir = parse_tail(th_tail);
      if (dir == TailDirection::kTwoSided) {
        const TwoSidedThresholds t = two_sided_thresholds(th_alpha, cfg);
        out << internal::pair_text(t.k1, t.k2) << '\n';
        if (th_verbose) {
          out << "size=" << summary_number(two_sided_size(t.k1, t.k2, cfg))
              << '\n';
        }
      } else {
        const double k = one_sided_threshold(th_alpha, cfg, dir);
        out << summary_number(k) << '\n';
        if (th_verbose) {
          out << "size=" << summary_number(one_sided_size(k, cfg, dir))
              << '\n';
        }
      }
      return kExitOk;
    }

    if (power->parsed()) {
      const MechanismConfig cfg = pw_mech.config();
      const AttackSpec attack(pw_dmu);
      const TailDirection dir = parse_tail(pw_tail);
      if (dir == TailDirection::kTwoSided && pw_k) {
        throw std::invalid_argument("--k is one-sided; use --k1/--k2");
      }
      if (dir != TailDirection::kTwoSided && pw_k1) {
        throw std::invalid_argument("--k1/--k2 need --tail two_sided");
      }

      double k1 = 0.0;
      double k2 = 0.0;
      double size = 0.0;
      double beta_bar = 0.0;
      if (dir == TailDirection::kTwoSided) {
        if (pw_k1) {
          k1 = *pw_k1;
          k2 = *pw_k2;
        } else {
          const TwoSidedThresholds t = two_sided_thresholds(pw_alpha, cfg);
          k1 = t.k1;
          k2 = t.k2;
        }
        size = two_sided_size(k1, k2, cfg);
        beta_bar = two_sided_power(k1, k2, cfg, attack);
      } else {
        k1 = pw_k ? *pw_k : one_sided_threshold(pw_alpha, cfg, dir);
        size = one_sided_size(k1, cfg, dir);
        beta_bar = one_sided_power(k1, cfg, attack, dir);
      }
      out << summary_number(beta_bar) << '\n';

      const HypothesisPair hyp = hypothesis_pair(cfg, attack);
      if (pw_verbose) {
        out << "h0=" << internal::dist_text(hyp.h0) << '\n'
            << "h1=" << internal::dist_text(hyp.h1) << '\n';
        if (dir == TailDirection::kTwoSided) {
          out << "thresholds=" << internal::pair_text(k1, k2) << '\n';
        } else {
          out << "k=" << summary_number(k1) << '\n';
        }
        out << "size=" << summary_number(size) << '\n';
        if (dir != TailDirection::kTwoSided) {
          const DetectionTest test = DetectionTest::with_threshold(k1, cfg, dir);
          out << "kappa=" << summary_number(kappa(test, attack)) << '\n';
        }
      }
      if (pw_z) {
        const double z = *pw_z;
        std::optional<DetectionTest> test;
        if (dir == TailDirection::kTwoSided) {
          // Explicit k1/k2 may be asymmetric; classify directly.
          const bool hit = z > k1 || z < k2;
          out << "decision="
              << to_string(hit ? Decision::kDetected : Decision::kNotDetected)
              << '\n';
        } else {
          test = DetectionTest::with_threshold(k1, cfg, dir);
          out << "decision=" << to_string(decide(z, *test)) << '\n';
        }
        out << "lr=" << summary_number(likelihood_ratio(z, cfg, attack)) << '\n'
            << "p0=" << summary_number(pdf(hyp.h0, z)) << '\n'
            << "p1=" << summary_number(pdf(hyp.h1, z)) << '\n';
      }
      return kExitOk;
    }

    if (roc->parsed()) {
      const MechanismConfig cfg = roc_mech.config();
      const RocCurve curve =
          roc_curve(cfg, AttackSpec(roc_dmu), parse_tail(roc_tail), roc_grid);
      internal::OutputSink sink(internal::resolve_out(roc_out, "roc.csv"), out,
                                false);
      write_roc_csv(sink.stream(), curve);
      if (sink.is_file()) {
        out << "auc=" << summary_number(curve.auc) << '\n'
            << "wrote " << sink.path() << '\n';
      }
      return kExitOk;
    }

    if (interval->parsed()) {
      const BiasInterval iv = bias_interval(iv_alpha, iv_beta, iv_mech.config());
      out << internal::pair_text(iv.lo, iv.hi) << '\n';
      return kExitOk;
    }

    if (kl->parsed()) {
      const MechanismConfig cfg = kl_mech.config();
      const HypothesisPair hyp = hypothesis_pair(cfg, AttackSpec(kl_dmu));
      KlReport report = kl_dp_check(hyp.h0, hyp.h1, cfg.eps());
      const double canonical = report.d_closed;
      std::string formula = "canonical";
      if (kl_fidelity) {
        if (hyp.h1.mu() < hyp.h0.mu()) {
          report.d_closed = kl_laplace_paper_variant_II(hyp.h0, hyp.h1);
          report.violated = report.d_closed > report.bound;
          formula = "paper_variant_II";
        } else {
          formula = "canonical (variant II needs mu1 < mu0)";
        }
      }
      if (kl_format == "json") {
        nlohmann::ordered_json j = to_json(report);
        j["formula"] = formula;
        if (kl_fidelity) j["d_canonical"] = canonical;
        out << j.dump(2) << '\n';
      } else {
        out << "kl=" << summary_number(report.d_closed) << '\n';
        if (kl_fidelity) out << "kl_canonical=" << summary_number(canonical) << '\n';
        out << "kl_quadrature=" << summary_number(report.d_quadrature) << '\n'
            << "bound=" << summary_number(report.bound) << '\n'
            << "violated=" << bool_name(report.violated) << '\n'
            << "formula=" << formula << '\n';
      }
      return kExitOk;
    }

    if (kl_sweep_cmd->parsed()) {
      if (ks_grid < 1) throw std::domain_error("--grid must be >= 1");
      if (!(ks_eps_min > 0.0) || !(ks_eps_max >= ks_eps_min)) {
        throw std::domain_error("need 0 < --eps-min <= --eps-max");
      }
      std::vector<double> epsilons;
      for (std::size_t i = 0; i < ks_grid; ++i) {
        epsilons.push_back(
            ks_grid == 1 ? ks_eps_min
                         : ks_eps_min + (ks_eps_max - ks_eps_min) *
                                            static_cast<double>(i) /
                                            static_cast<double>(ks_grid - 1));
      }
      const auto rows = kl_sweep(epsilons, ks_thetas, ks_ratios, ks_s);
      internal::OutputSink sink(internal::resolve_out(ks_out, "kl_sweep.csv"),
                                out, false);
      write_kl_sweep_csv(sink.stream(), rows);
      if (sink.is_file()) out << "wrote " << sink.path() << '\n';
      return kExitOk;
    }

    if (simulate->parsed()) {
      const TailDirection dir = parse_tail(sim_tail);
      if (sim_samples < 1) throw std::domain_error("--samples must be >= 1");

      if (sim_sweep) {
        GridSpec spec;
        spec.s = sim_mech.s;
        spec.mu0 = sim_mech.mu0;
        spec.direction = dir;
        spec.n_trials = sim_samples;
        spec.seed = sim_seed;
        spec.workers = sim_workers;
        const auto rows = run_validation_grid(spec);
        internal::OutputSink sink(internal::resolve_out(sim_out, "grid.csv"),
                                  out, true);
        write_grid_csv(sink.stream(), rows, !sink.had_content());
        if (sink.is_file()) out << "wrote " << sink.path() << '\n';
        return kExitOk;
      }

      const SimConfig sim{sim_mech.config(), AttackSpec(sim_dmu), sim_alpha,
                          dir, sim_samples, sim_seed};
      // Validate alpha up front so a bad value fails before any sampling.
      (void)DetectionTest::for_alpha(sim_alpha, sim.cfg, dir);

      SimReport report{};
      if (!sim_data.empty()) {
        const Dataset data =
            read_dataset_file(sim_data, sim_bound.value_or(sim_mech.s));
        const AttackExperiment exp = run_attack_experiment(
            data, sim, {.workers = sim_workers, .trace = !sim_trace.empty()});
        report = exp.report;
        if (!sim_trace.empty()) {
          internal::OutputSink trace(sim_trace, out, false);
          trace.stream() << "trial,release_h0,detected_h0,release_h1,detected_h1\n";
          for (const TrialRecord& t : exp.trace) {
            trace.stream() << t.trial << ',' << csv_number(t.release_h0) << ','
                           << bool_name(t.detected_h0) << ','
                           << csv_number(t.release_h1) << ','
                           << bool_name(t.detected_h1) << '\n';
          }
        }
      } else {
        if (!sim_trace.empty()) {
          throw std::invalid_argument("--trace needs --data");
        }
        report = estimate_error_rates(sim, sim_workers);
      }

      if (sim_format == "json") {
        internal::OutputSink sink(internal::resolve_out(sim_out, "simulate.json"),
                                  out, false);
        sink.stream() << to_json(report).dump(2) << '\n';
        if (sink.is_file()) out << "wrote " << sink.path() << '\n';
      } else {
        internal::OutputSink sink(internal::resolve_out(sim_out, "grid.csv"),
                                  out, true);
        write_grid_csv(sink.stream(),
                       {{sim_mech.eps, sim_mech.theta, sim_dmu, sim_alpha, report}},
                       !sink.had_content());
        if (sink.is_file()) out << "wrote " << sink.path() << '\n';
      }
      return kExitOk;
    }
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const QuadratureError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace lapdetect::cli

#endif  // LAPDETECT_TOOLS_CLI_HPP_
