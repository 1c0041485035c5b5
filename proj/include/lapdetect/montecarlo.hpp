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

#ifndef LAPDETECT_MONTECARLO_HPP_
#define LAPDETECT_MONTECARLO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "lapdetect/detector.hpp"
#include "lapdetect/laplace.hpp"
#include "lapdetect/mechanism.hpp"
#include "lapdetect/rng.hpp"

namespace lapdetect {

struct SimConfig {
  MechanismConfig cfg;
  AttackSpec attack;
  double alpha;
  TailDirection direction;
  std::uint64_t n_trials;
  std::uint64_t seed;
};

struct SimReport {
  double alpha_hat;
  double power_hat;
  double alpha_closed;
  double power_closed;
  double half_width_alpha;
  double half_width_power;
  bool pass;
};

// Per-trial record of the full release pipeline.
struct TrialRecord {
  std::uint64_t trial;
  double release_h0;
  bool detected_h0;
  double release_h1;
  bool detected_h1;
};

struct AttackExperiment {
  SimReport report;
  std::vector<TrialRecord> trace;  // empty unless requested
};

struct RunOptions {
  unsigned workers = 1;
  bool trace = false;
};

// 3-sigma binomial half-width.
inline double binomial_half_width(double p_hat, std::uint64_t n) {
  return 3.0 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

namespace internal {

inline void validate(const SimConfig& sim) {
  if (sim.n_trials < 1) throw std::domain_error("n_trials must be >= 1");
}

struct Counts {
  std::uint64_t detected_h0 = 0;
  std::uint64_t detected_h1 = 0;
};

// Runs trial(rng, index) for every index with its own RngStream(seed, index).
// Trials are split into contiguous blocks, one per worker; counts are summed,
// so the totals do not depend on the worker count.
template <typename Trial>
Counts run_trials(std::uint64_t n, std::uint64_t seed, unsigned workers,
                  const Trial& trial) {
  workers = std::max(1u, workers);
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<Counts> partial(workers);
  const auto block = [&](unsigned w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    Counts c;
    for (std::uint64_t i = begin; i < end; ++i) {
      RngStream rng(seed, i);
      const auto [h0, h1] = trial(rng, i);
      c.detected_h0 += h0;
      c.detected_h1 += h1;
    }
    partial[w] = c;
  };
  if (workers == 1) {
    block(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(block, w);
  }
  Counts total;
  for (const Counts& c : partial) {
    total.detected_h0 += c.detected_h0;
    total.detected_h1 += c.detected_h1;
  }
  return total;
}

inline SimReport make_report(const SimConfig& sim, const DetectionTest& test,
                             const Counts& counts) {
  const double n = static_cast<double>(sim.n_trials);
  SimReport r{};
  r.alpha_hat = static_cast<double>(counts.detected_h0) / n;
  r.power_hat = static_cast<double>(counts.detected_h1) / n;
  r.alpha_closed = test_size(test);
  r.power_closed = test_power(test, sim.attack);
  r.half_width_alpha = binomial_half_width(r.alpha_hat, sim.n_trials);
  r.half_width_power = binomial_half_width(r.power_hat, sim.n_trials);
  r.pass = std::abs(r.alpha_hat - r.alpha_closed) <= r.half_width_alpha &&
           std::abs(r.power_hat - r.power_closed) <= r.half_width_power;
  return r;
}

}  // namespace internal

// Empirical size and power of the test, each from n_trials residuals: H0
// residuals ~ Lap(mu0, s/eps); H1 residuals are Lap(mu0, theta s/eps) draws
// with the attack injected.
inline SimReport estimate_error_rates(const SimConfig& sim,
                                      unsigned workers = 1) {
  internal::validate(sim);
  const DetectionTest test =
      DetectionTest::for_alpha(sim.alpha, sim.cfg, sim.direction);
  const LaplaceDist h0 = sim.cfg.null_noise();
  const LaplaceDist alt_noise(sim.cfg.mu0(), sim.cfg.alt_scale());
  const auto trial = [&](RngStream& rng, std::uint64_t) {
    const double z0 = draw(h0, rng);
    const double z1 = inject_attack(draw(alt_noise, rng), sim.attack);
    return std::pair<bool, bool>(decide(z0, test) == Decision::kDetected,
                                 decide(z1, test) == Decision::kDetected);
  };
  return internal::make_report(
      sim, test, internal::run_trials(sim.n_trials, sim.seed, workers, trial));
}

// End-to-end scenario on a concrete dataset: the server releases
// sum_query + noise, the adversary (under H1) adds x_a to the release, and
// the defender tests the residual release - sum_query.
inline AttackExperiment run_attack_experiment(const Dataset& data,
                                              const SimConfig& sim,
                                              const RunOptions& opts = {}) {
  internal::validate(sim);
  if (data.sensitivity() != sim.cfg.s()) {
    throw std::invalid_argument(
        "dataset bound " + std::to_string(data.bound()) +
        " does not match sensitivity s = " + std::to_string(sim.cfg.s()));
  }
  const DetectionTest test =
      DetectionTest::for_alpha(sim.alpha, sim.cfg, sim.direction);
  const double q = sum_query(data);
  const LaplaceDist alt_noise(sim.cfg.mu0(), sim.cfg.alt_scale());

  AttackExperiment out{};
  if (opts.trace) out.trace.resize(sim.n_trials);
  const auto trial = [&](RngStream& rng, std::uint64_t i) {
    const double release0 = noisy_release(q, sim.cfg, rng);
    const double release1 =
        inject_attack(q + draw(alt_noise, rng), sim.attack);
    const bool d0 = decide(release0 - q, test) == Decision::kDetected;
    const bool d1 = decide(release1 - q, test) == Decision::kDetected;
    if (opts.trace) out.trace[i] = {i, release0, d0, release1, d1};
    return std::pair<bool, bool>(d0, d1);
  };
  out.report = internal::make_report(
      sim, test,
      internal::run_trials(sim.n_trials, sim.seed, opts.workers, trial));
  return out;
}

// ---------------------------------------------------------------------------
// Validation grid
// ---------------------------------------------------------------------------

struct GridSpec {
  std::vector<double> epsilons{0.015, 0.5, 1.0, 2.0};
  std::vector<double> thetas{1.0, 1.5};
  std::vector<double> dmu_over_s{0.5, 1.0, 4.0};
  std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double s = 1.0;
  double mu0 = 0.0;
  TailDirection direction = TailDirection::kRight;
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct GridRow {
  double eps;
  double theta;
  double dmu;
  double alpha;
  SimReport report;
};

// Cell c of the grid uses seed spec.seed + c.
inline std::vector<GridRow> run_validation_grid(const GridSpec& spec) {
  std::vector<GridRow> rows;
  std::uint64_t cell = 0;
  for (const double eps : spec.epsilons) {
    for (const double theta : spec.thetas) {
      for (const double ratio : spec.dmu_over_s) {
        for (const double alpha : spec.alphas) {
          const SimConfig sim{
              MechanismConfig(
                  {.mu0 = spec.mu0, .s = spec.s, .eps = eps, .theta = theta}),
              AttackSpec(ratio * spec.s),
              alpha,
              spec.direction,
              spec.n_trials,
              spec.seed + cell++};
          rows.push_back({eps, theta, ratio * spec.s, alpha,
                          estimate_error_rates(sim, spec.workers)});
        }
      }
    }
  }
  return rows;
}

}  // namespace lapdetect

#endif  // LAPDETECT_MONTECARLO_HPP_
