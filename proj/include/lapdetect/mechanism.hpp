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

#ifndef LAPDETECT_MECHANISM_HPP_
#define LAPDETECT_MECHANISM_HPP_

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lapdetect/laplace.hpp"
#include "lapdetect/rng.hpp"

namespace lapdetect {

struct MechanismParams {
  double mu0 = 0.0;    // null noise location
  double s = 1.0;      // query sensitivity
  double eps = 1.0;    // privacy parameter
  double theta = 1.0;  // scale inflation under the alternative
};

// Laplace mechanism parameters shared by both hypotheses. The null noise is
// Lap(mu0, s/eps); the alternative noise has scale theta * s/eps.
class MechanismConfig {
 public:
  explicit MechanismConfig(const MechanismParams& p)
      : mu0_(p.mu0), s_(p.s), eps_(p.eps), theta_(p.theta) {
    if (!std::isfinite(p.mu0)) throw std::domain_error("mu0 must be finite");
    if (!(p.s > 0.0) || !std::isfinite(p.s)) {
      throw std::domain_error("sensitivity s must be finite and positive");
    }
    if (!(p.eps > 0.0) || !std::isfinite(p.eps)) {
      throw std::domain_error("epsilon must be finite and positive");
    }
    if (!(p.theta >= 1.0) || !std::isfinite(p.theta)) {
      throw std::domain_error("theta must be finite and >= 1");
    }
  }

  double mu0() const { return mu0_; }
  double s() const { return s_; }
  double eps() const { return eps_; }
  double theta() const { return theta_; }

  double null_scale() const { return s_ / eps_; }
  double alt_scale() const { return theta_ * null_scale(); }

  LaplaceDist null_noise() const { return {mu0_, null_scale()}; }

 private:
  double mu0_;
  double s_;
  double eps_;
  double theta_;
};

// One adversarial record injected into the released value. Its value is the
// location shift dmu = mu1 - mu0 seen by the defender.
class AttackSpec {
 public:
  explicit AttackSpec(double x_a) : x_a_(x_a) {
    if (!std::isfinite(x_a)) throw std::domain_error("x_a must be finite");
  }

  double x_a() const { return x_a_; }
  double dmu() const { return x_a_; }
  // +1, -1, or 0 for the degenerate no-attack case.
  int sign() const { return (x_a_ > 0.0) - (x_a_ < 0.0); }

 private:
  double x_a_;
};

// Records bounded in [0, bound]. For the sum query the sensitivity is the
// bound: neighbors differ in one record.
class Dataset {
 public:
  Dataset(std::vector<double> records, double bound)
      : records_(std::move(records)), bound_(bound) {
    if (!(bound >= 0.0) || !std::isfinite(bound)) {
      throw std::domain_error("dataset bound must be finite and >= 0");
    }
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const double v = records_[i];
      if (!(v >= 0.0 && v <= bound_)) {
        throw std::domain_error("record " + std::to_string(i) + " = " +
                                std::to_string(v) + " outside [0, " +
                                std::to_string(bound_) + "]");
      }
    }
  }

  const std::vector<double>& records() const { return records_; }
  double bound() const { return bound_; }
  double sensitivity() const { return bound_; }

 private:
  std::vector<double> records_;
  double bound_;
};

namespace internal {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace internal

// Reads a one-column CSV with header `value`, or newline-delimited numbers.
// Blank lines are skipped.
inline Dataset read_dataset(std::istream& in, double bound) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view field = internal::trim(line);
    if (field.empty()) continue;
    if (first && field == "value") {
      first = false;
      continue;
    }
    first = false;
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw std::invalid_argument("dataset line " + std::to_string(line_no) +
                                  ": not a number: " + std::string(field));
    }
    values.push_back(v);
  }
  return Dataset(std::move(values), bound);
}

inline Dataset read_dataset_file(const std::string& path, double bound) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  return read_dataset(in, bound);
}

// Sum of records (Neumaier-compensated).
inline double sum_query(const Dataset& data) {
  double sum = 0.0;
  double carry = 0.0;
  for (const double v : data.records()) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

// q + Z with Z ~ Lap(mu0, s/eps).
inline double noisy_release(double q_value, const MechanismConfig& cfg,
                            RngStream& rng) {
  return q_value + draw(cfg.null_noise(), rng);
}

inline double inject_attack(double release, const AttackSpec& attack) {
  return release + attack.x_a();
}

struct HypothesisPair {
  LaplaceDist h0;
  LaplaceDist h1;
};

// H0: Lap(mu0, s/eps). H1: Lap(mu0 + x_a, theta * s/eps).
inline HypothesisPair hypothesis_pair(const MechanismConfig& cfg,
                                      const AttackSpec& attack) {
  return {cfg.null_noise(),
          LaplaceDist(cfg.mu0() + attack.x_a(), cfg.alt_scale())};
}

}  // namespace lapdetect

#endif  // LAPDETECT_MECHANISM_HPP_
