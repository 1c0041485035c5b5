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

#ifndef LAPDETECT_DIVERGENCE_HPP_
#define LAPDETECT_DIVERGENCE_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lapdetect/laplace.hpp"
#include "lapdetect/quadrature.hpp"

namespace lapdetect {

// D(p0 || p1) in nats:
//   ln(b1/b0) - 1 + E_p0|Z - mu1| / b1
//   = ln(b1/b0) - 1 + (b0/b1) exp(-|mu0 - mu1|/b0) + |mu0 - mu1|/b1.
// Depends on the locations only through |mu0 - mu1|.
inline double kl_laplace(const LaplaceDist& p0, const LaplaceDist& p1) {
  return std::log(p1.b() / p0.b()) - 1.0 + mean_abs_dev(p0, p1.mu()) / p1.b();
}

// The mu1 < mu0 expression as printed in the source derivation:
//   ln(b1/b0) - 1 + (b0/b1) exp((mu1 - mu0)/b0) + b0/b1.
// It does not tend to 0 as mu1 -> mu0 and disagrees with kl_quadrature; kept
// for reproduction only.
inline double kl_laplace_paper_variant_II(const LaplaceDist& p0,
                                          const LaplaceDist& p1) {
  if (!(p1.mu() < p0.mu())) {
    throw std::domain_error("variant II applies only when mu1 < mu0");
  }
  const double ratio = p0.b() / p1.b();
  return std::log(p1.b() / p0.b()) - 1.0 +
         ratio * std::exp((p1.mu() - p0.mu()) / p0.b()) + ratio;
}

inline constexpr double kDefaultKlTolerance = 1e-10;

// Adaptive Simpson value of the integral of p0 ln(p0/p1) over
// [min(mu) - 40 max(b), max(mu) + 40 max(b)], split at both locations.
inline double kl_quadrature(const LaplaceDist& p0, const LaplaceDist& p1,
                            double tol = kDefaultKlTolerance) {
  if (!(tol > 0.0)) throw std::domain_error("tolerance must be > 0");
  const double log_scale_ratio = std::log(p1.b() / p0.b());
  // Log-ratio written out so the integrand stays finite in the far tails.
  const auto integrand = [&](double z) {
    const double log_ratio = log_scale_ratio -
                             std::abs(z - p0.mu()) / p0.b() +
                             std::abs(z - p1.mu()) / p1.b();
    return pdf(p0, z) * log_ratio;
  };
  const double reach = 40.0 * std::max(p0.b(), p1.b());
  const double lo = std::min(p0.mu(), p1.mu()) - reach;
  const double hi = std::max(p0.mu(), p1.mu()) + reach;
  return integrate(integrand, {lo, p0.mu(), p1.mu(), hi}, tol).value;
}

// KL-DP admissibility: D(p0 || p1) against the bound exp(epsilon).
struct KlReport {
  double d_closed;
  double d_quadrature;
  double epsilon;
  double bound;
  bool violated;
};

inline KlReport kl_dp_check(const LaplaceDist& p0, const LaplaceDist& p1,
                            double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::domain_error("epsilon must be finite and positive");
  }
  const double d = kl_laplace(p0, p1);
  const double bound = std::exp(epsilon);
  return {d, kl_quadrature(p0, p1), epsilon, bound, d > bound};
}

// One row of a KL-DP sweep: the hypothesis pair Lap(0, s/eps) vs
// Lap(dmu, theta s/eps) at a given eps.
struct KlSweepRow {
  double epsilon;
  double theta;
  double dmu_over_s;
  double kl;
  double bound;
  bool violated;
};

// Closed form only; the quadrature oracle is left to kl_dp_check.
inline std::vector<KlSweepRow> kl_sweep(const std::vector<double>& epsilons,
                                        const std::vector<double>& thetas,
                                        const std::vector<double>& dmu_over_s,
                                        double s = 1.0) {
  if (!(s > 0.0)) throw std::domain_error("sensitivity must be > 0");
  std::vector<KlSweepRow> rows;
  rows.reserve(epsilons.size() * thetas.size() * dmu_over_s.size());
  for (const double theta : thetas) {
    if (!(theta >= 1.0)) throw std::domain_error("theta must be >= 1");
    for (const double ratio : dmu_over_s) {
      for (const double eps : epsilons) {
        if (!(eps > 0.0)) throw std::domain_error("epsilon must be > 0");
        const LaplaceDist p0(0.0, s / eps);
        const LaplaceDist p1(ratio * s, theta * (s / eps));
        const double d = kl_laplace(p0, p1);
        const double bound = std::exp(eps);
        rows.push_back({eps, theta, ratio, d, bound, d > bound});
      }
    }
  }
  return rows;
}

}  // namespace lapdetect

#endif  // LAPDETECT_DIVERGENCE_HPP_
