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

#ifndef LAPDETECT_DETECTOR_HPP_
#define LAPDETECT_DETECTOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lapdetect/laplace.hpp"
#include "lapdetect/mechanism.hpp"

namespace lapdetect {

// Which residual values count as evidence of an attack.
//   kRight:    z > k          (positive bias)
//   kLeft:     z < k          (negative bias)
//   kTwoSided: z > k1 or z < k2
enum class TailDirection { kRight, kLeft, kTwoSided };

inline std::string_view to_string(TailDirection dir) {
  switch (dir) {
    case TailDirection::kRight:
      return "right";
    case TailDirection::kLeft:
      return "left";
    case TailDirection::kTwoSided:
      return "two_sided";
  }
  return "?";
}

inline TailDirection parse_tail(std::string_view name) {
  if (name == "right") return TailDirection::kRight;
  if (name == "left") return TailDirection::kLeft;
  if (name == "two_sided" || name == "two-sided" || name == "two") {
    return TailDirection::kTwoSided;
  }
  throw std::invalid_argument("unknown tail '" + std::string(name) +
                              "' (expected right, left or two_sided)");
}

enum class Decision { kNotDetected, kDetected };

inline std::string_view to_string(Decision d) {
  return d == Decision::kDetected ? "detected" : "not_detected";
}

namespace internal {

inline void require_one_sided(TailDirection dir, const char* op) {
  if (dir == TailDirection::kTwoSided) {
    throw std::invalid_argument(std::string(op) +
                                " needs a one-sided tail (right or left)");
  }
}

}  // namespace internal

// ---------------------------------------------------------------------------
// One-sided test
// ---------------------------------------------------------------------------

// Threshold of the best critical region of size alpha. For the right tail
// this is the upper alpha-quantile of H0:
//   k = mu0 - (s/eps) ln(2 alpha)        alpha <= 1/2  (k >= mu0)
//   k = mu0 + (s/eps) ln(2 (1 - alpha))  alpha >  1/2  (k <  mu0)
// and the left tail mirrors it. Both branches meet at k = mu0 for alpha = 1/2.
inline double one_sided_threshold(double alpha, const MechanismConfig& cfg,
                                  TailDirection dir) {
  internal::require_one_sided(dir, "one_sided_threshold");
  internal::check_open_probability(alpha, "alpha");
  const LaplaceDist h0 = cfg.null_noise();
  return dir == TailDirection::kRight ? upper_quantile(h0, alpha)
                                      : quantile(h0, alpha);
}

// False-alarm probability of the one-sided test with threshold k.
inline double one_sided_size(double k, const MechanismConfig& cfg,
                             TailDirection dir) {
  internal::require_one_sided(dir, "one_sided_size");
  const LaplaceDist h0 = cfg.null_noise();
  return dir == TailDirection::kRight ? survival(h0, k) : cdf(h0, k);
}

// Detection probability (power) of the one-sided test: H1 mass of the
// critical region.
inline double one_sided_power(double k, const MechanismConfig& cfg,
                              const AttackSpec& attack, TailDirection dir) {
  internal::require_one_sided(dir, "one_sided_power");
  const LaplaceDist h1 = hypothesis_pair(cfg, attack).h1;
  return dir == TailDirection::kRight ? survival(h1, k) : cdf(h1, k);
}

// Likelihood ratio p1(z) / p0(z)
//   = (1/theta) exp{ (eps/s) (|z - mu0| - |z - mu1| / theta) }.
inline double likelihood_ratio(double z, const MechanismConfig& cfg,
                               const AttackSpec& attack) {
  const double mu0 = cfg.mu0();
  const double mu1 = mu0 + attack.x_a();
  const double theta = cfg.theta();
  double gap = std::abs(z - mu0) - std::abs(z - mu1) / theta;
  if (theta == 1.0) {
    // Reverse triangle inequality; rounding in the two distances can
    // otherwise overshoot |dmu| by an ulp.
    const double shift = std::abs(attack.x_a());
    gap = std::clamp(gap, -shift, shift);
  }
  return std::exp(cfg.eps() * (gap / cfg.s())) / theta;
}

// ---------------------------------------------------------------------------
// Two-sided test
// ---------------------------------------------------------------------------

struct TwoSidedThresholds {
  double k1;  // upper threshold, >= mu0
  double k2;  // lower threshold, <= mu0
};

// Symmetric thresholds with H0 mass alpha/2 in each tail:
//   k1 = mu0 - (s/eps) ln(alpha),  k2 = mu0 + (s/eps) ln(alpha).
inline TwoSidedThresholds two_sided_thresholds(double alpha,
                                               const MechanismConfig& cfg) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::domain_error("two-sided alpha must lie in (0, 1], got " +
                            std::to_string(alpha));
  }
  const double half_width = -cfg.null_scale() * std::log(alpha);
  return {cfg.mu0() + half_width, cfg.mu0() - half_width};
}

inline double two_sided_size(double k1, double k2, const MechanismConfig& cfg) {
  const LaplaceDist h0 = cfg.null_noise();
  return cdf(h0, k2) + survival(h0, k1);
}

// H1 mass outside (k2, k1). Reduces to
//   1/2 exp{(k2 - mu1)/b1} + 1/2 exp{-(k1 - mu1)/b1}
// when k2 <= mu1 <= k1, and stays a probability otherwise.
inline double two_sided_power(double k1, double k2, const MechanismConfig& cfg,
                              const AttackSpec& attack) {
  if (!(k2 <= k1)) {
    throw std::domain_error("two-sided thresholds need k2 <= k1");
  }
  const LaplaceDist h1 = hypothesis_pair(cfg, attack).h1;
  return cdf(h1, k2) + survival(h1, k1);
}

// ---------------------------------------------------------------------------
// Test objects
// ---------------------------------------------------------------------------

class DetectionTest {
 public:
  static DetectionTest one_sided(double alpha, const MechanismConfig& cfg,
                                 TailDirection dir) {
    const double k = one_sided_threshold(alpha, cfg, dir);
    return DetectionTest(dir, k, std::numeric_limits<double>::quiet_NaN(),
                         alpha, cfg);
  }

  static DetectionTest two_sided(double alpha, const MechanismConfig& cfg) {
    const TwoSidedThresholds t = two_sided_thresholds(alpha, cfg);
    return DetectionTest(TailDirection::kTwoSided, t.k1, t.k2, alpha, cfg);
  }

  static DetectionTest for_alpha(double alpha, const MechanismConfig& cfg,
                                 TailDirection dir) {
    return dir == TailDirection::kTwoSided ? two_sided(alpha, cfg)
                                           : one_sided(alpha, cfg, dir);
  }

  // One-sided test with an explicit threshold; alpha is derived from k.
  static DetectionTest with_threshold(double k, const MechanismConfig& cfg,
                                      TailDirection dir) {
    internal::require_one_sided(dir, "with_threshold");
    if (!std::isfinite(k)) throw std::domain_error("threshold must be finite");
    return DetectionTest(dir, k, std::numeric_limits<double>::quiet_NaN(),
                         one_sided_size(k, cfg, dir), cfg);
  }

  TailDirection direction() const { return direction_; }
  bool is_two_sided() const { return direction_ == TailDirection::kTwoSided; }
  // One-sided threshold (same as k1()).
  double k() const { return k1_; }
  double k1() const { return k1_; }
  // NaN for one-sided tests.
  double k2() const { return k2_; }
  double alpha() const { return alpha_; }
  const MechanismConfig& config() const { return cfg_; }

 private:
  DetectionTest(TailDirection dir, double k1, double k2, double alpha,
                const MechanismConfig& cfg)
      : direction_(dir), k1_(k1), k2_(k2), alpha_(alpha), cfg_(cfg) {}

  TailDirection direction_;
  double k1_;
  double k2_;
  double alpha_;
  MechanismConfig cfg_;
};

// Size recomputed from the thresholds.
inline double test_size(const DetectionTest& test) {
  return test.is_two_sided()
             ? two_sided_size(test.k1(), test.k2(), test.config())
             : one_sided_size(test.k(), test.config(), test.direction());
}

inline double test_power(const DetectionTest& test, const AttackSpec& attack) {
  return test.is_two_sided()
             ? two_sided_power(test.k1(), test.k2(), test.config(), attack)
             : one_sided_power(test.k(), test.config(), attack,
                               test.direction());
}

// Likelihood-ratio cutoff equivalent to the one-sided threshold k:
//   dmu > 0:  (1/theta) exp{ (eps/(theta s)) (k(1+theta) - theta mu0 - mu1) }
//   dmu < 0:  (1/theta) exp{-(eps/(theta s)) (k(1+theta) - theta mu0 - mu1) }
// It equals likelihood_ratio(k) when k lies between mu0 and mu1. With no
// attack the test's tail picks the branch.
inline double kappa(const DetectionTest& test, const AttackSpec& attack) {
  internal::require_one_sided(test.direction(), "kappa");
  const MechanismConfig& cfg = test.config();
  const double theta = cfg.theta();
  const double mu0 = cfg.mu0();
  const double mu1 = mu0 + attack.x_a();
  const int sign = attack.sign() != 0
                       ? attack.sign()
                       : (test.direction() == TailDirection::kRight ? 1 : -1);
  const double exponent = cfg.eps() / (theta * cfg.s()) *
                          (test.k() * (1.0 + theta) - theta * mu0 - mu1);
  return std::exp(sign * exponent) / theta;
}

// Strict inequalities: a residual sitting exactly on a threshold is not a
// detection.
inline Decision decide(double residual_z, const DetectionTest& test) {
  bool detected = false;
  switch (test.direction()) {
    case TailDirection::kRight:
      detected = residual_z > test.k();
      break;
    case TailDirection::kLeft:
      detected = residual_z < test.k();
      break;
    case TailDirection::kTwoSided:
      detected = residual_z > test.k1() || residual_z < test.k2();
      break;
  }
  return detected ? Decision::kDetected : Decision::kNotDetected;
}

// ---------------------------------------------------------------------------
// ROC curves
// ---------------------------------------------------------------------------

struct RocPoint {
  double alpha;
  double k1;  // one-sided threshold lives here
  double k2;  // NaN for one-sided curves
  double power;
};

struct RocCurve {
  TailDirection direction;
  std::vector<RocPoint> points;
  double auc;
};

inline constexpr std::size_t kDefaultRocGrid = 999;

// Power against size on alpha = i / (grid + 1), i = 1..grid. AUC is the
// trapezoid rule over the grid plus the limit points (0,0) and (1,1).
inline RocCurve roc_curve(const MechanismConfig& cfg, const AttackSpec& attack,
                          TailDirection dir,
                          std::size_t grid = kDefaultRocGrid) {
  if (grid < 2) throw std::domain_error("ROC grid needs at least 2 points");
  RocCurve curve{dir, {}, 0.0};
  curve.points.reserve(grid);
  const double denom = static_cast<double>(grid + 1);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double alpha = static_cast<double>(i) / denom;
    const DetectionTest test = DetectionTest::for_alpha(alpha, cfg, dir);
    curve.points.push_back(
        {alpha, test.k1(), test.k2(), test_power(test, attack)});
  }

  double prev_alpha = 0.0;
  double prev_power = 0.0;
  for (const RocPoint& p : curve.points) {
    curve.auc += 0.5 * (p.alpha - prev_alpha) * (p.power + prev_power);
    prev_alpha = p.alpha;
    prev_power = p.power;
  }
  curve.auc += 0.5 * (1.0 - prev_alpha) * (1.0 + prev_power);
  return curve;
}

// ---------------------------------------------------------------------------
// Detectable-bias interval
// ---------------------------------------------------------------------------

struct BiasInterval {
  double lo;
  double hi;
};

// (s/eps) ln(alpha * beta_bar^theta) < dmu < (s/eps) ln(1 / (alpha *
// beta_bar^theta)). The interval is symmetric: lo = -hi.
inline BiasInterval bias_interval(double alpha, double beta_bar,
                                  const MechanismConfig& cfg) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::domain_error(
        "alpha must lie in (0, 1]; ln(alpha) diverges at 0, got " +
        std::to_string(alpha));
  }
  if (!(beta_bar > 0.0 && beta_bar <= 1.0)) {
    throw std::domain_error(
        "beta_bar must lie in (0, 1]; ln(beta_bar) diverges at 0, got " +
        std::to_string(beta_bar));
  }
  const double product = alpha * std::pow(beta_bar, cfg.theta());
  const double hi = cfg.null_scale() * std::log(1.0 / product);
  return {-hi, hi};
}

}  // namespace lapdetect

#endif  // LAPDETECT_DETECTOR_HPP_
