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

#ifndef LAPDETECT_QUADRATURE_HPP_
#define LAPDETECT_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lapdetect {

// Thrown when adaptive refinement hits its depth budget before the requested
// tolerance is met.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double requested, double achieved)
      : std::runtime_error("quadrature did not converge: requested " +
                           std::to_string(requested) + ", achieved bound " +
                           std::to_string(achieved)),
        requested_(requested),
        achieved_(achieved) {}

  double requested() const { return requested_; }
  double achieved() const { return achieved_; }

 private:
  double requested_;
  double achieved_;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  long evaluations = 0;
};

namespace internal {

template <typename F>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const F& f, int max_depth) : f_(f), max_depth_(max_depth) {}

  double segment(double a, double b, double tol) {
    const double fa = eval(a);
    const double fb = eval(b);
    const double m = 0.5 * (a + b);
    const double fm = eval(m);
    return refine(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0);
  }

  double unresolved() const { return unresolved_; }
  double resolved() const { return resolved_; }
  long evaluations() const { return evaluations_; }

 private:
  double eval(double x) {
    ++evaluations_;
    return f_(x);
  }

  static double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double refine(double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
      resolved_ += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth_ || !(m > a && m < b)) {
      unresolved_ += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  const F& f_;
  int max_depth_;
  double unresolved_ = 0.0;
  double resolved_ = 0.0;
  long evaluations_ = 0;
};

}  // namespace internal

// Adaptive Simpson integration of f over [breakpoints.front(),
// breakpoints.back()]. Every interior breakpoint starts a new panel, so kinks
// of the integrand should be listed there. Each panel is pre-split into
// `initial_panels` pieces before refinement; `tol` is an absolute error target
// shared across pieces in proportion to their length.
//
// Throws QuadratureError if refinement exhausts `max_depth` with an error
// estimate above `tol`.
template <typename F>
QuadratureResult integrate(const F& f, std::vector<double> breakpoints,
                           double tol, int max_depth = 40,
                           int initial_panels = 16) {
  if (!(tol > 0.0)) throw std::domain_error("quadrature tolerance must be > 0");
  if (breakpoints.size() < 2) {
    throw std::invalid_argument("quadrature needs at least two breakpoints");
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());

  const double span = breakpoints.back() - breakpoints.front();
  internal::AdaptiveSimpson<F> rule(f, max_depth);
  QuadratureResult result;
  if (span == 0.0) return result;

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    const double width = (b - a) / initial_panels;
    for (int j = 0; j < initial_panels; ++j) {
      const double lo = a + j * width;
      const double hi = j + 1 == initial_panels ? b : a + (j + 1) * width;
      result.value += rule.segment(lo, hi, tol * (hi - lo) / span);
    }
  }
  result.error_bound = rule.resolved() + rule.unresolved();
  result.evaluations = rule.evaluations();
  if (rule.unresolved() > 0.0 && result.error_bound > tol) {
    throw QuadratureError(tol, result.error_bound);
  }
  return result;
}

}  // namespace lapdetect

#endif  // LAPDETECT_QUADRATURE_HPP_
