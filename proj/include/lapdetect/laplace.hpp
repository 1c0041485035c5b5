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

#ifndef LAPDETECT_LAPLACE_HPP_
#define LAPDETECT_LAPLACE_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lapdetect/rng.hpp"

namespace lapdetect {

// Laplace (double exponential) distribution with location mu and scale b:
//   pdf(z) = exp(-|z - mu| / b) / (2b).
class LaplaceDist {
 public:
  LaplaceDist(double mu, double b) : mu_(mu), b_(b) {
    if (!std::isfinite(mu)) {
      throw std::domain_error("Laplace location must be finite");
    }
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw std::domain_error("Laplace scale must be finite and positive, got " +
                              std::to_string(b));
    }
  }

  double mu() const { return mu_; }
  double b() const { return b_; }

  friend bool operator==(const LaplaceDist&, const LaplaceDist&) = default;

 private:
  double mu_;
  double b_;
};

inline double pdf(const LaplaceDist& d, double z) {
  return std::exp(-std::abs(z - d.mu()) / d.b()) / (2.0 * d.b());
}

inline double cdf(const LaplaceDist& d, double z) {
  const double t = (z - d.mu()) / d.b();
  return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
}

// Upper tail P(Z > z). The right branch is evaluated directly so that small
// tail probabilities keep full relative precision.
inline double survival(const LaplaceDist& d, double z) {
  const double t = (z - d.mu()) / d.b();
  return t >= 0.0 ? 0.5 * std::exp(-t) : 1.0 - 0.5 * std::exp(t);
}

namespace internal {

inline void check_open_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in (0, 1), got " +
                            std::to_string(p));
  }
}

}  // namespace internal

// Inverse of cdf on (0, 1).
inline double quantile(const LaplaceDist& d, double p) {
  internal::check_open_probability(p, "quantile probability");
  return p < 0.5 ? d.mu() + d.b() * std::log(2.0 * p)
                 : d.mu() - d.b() * std::log(2.0 * (1.0 - p));
}

// Inverse of survival on (0, 1): the z with P(Z > z) = q.
inline double upper_quantile(const LaplaceDist& d, double q) {
  internal::check_open_probability(q, "upper-tail probability");
  return q <= 0.5 ? d.mu() - d.b() * std::log(2.0 * q)
                  : d.mu() + d.b() * std::log(2.0 * (1.0 - q));
}

// One inverse-transform draw.
inline double draw(const LaplaceDist& d, RngStream& rng) {
  return quantile(d, rng.uniform_open());
}

inline std::vector<double> sample(const LaplaceDist& d, RngStream& rng,
                                  std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(d, rng));
  return out;
}

// E|Z - c| for Z ~ d. Equals b exactly at c = mu.
inline double mean_abs_dev(const LaplaceDist& d, double c) {
  const double gap = std::abs(c - d.mu());
  return gap + d.b() * std::exp(-gap / d.b());
}

}  // namespace lapdetect

#endif  // LAPDETECT_LAPLACE_HPP_
