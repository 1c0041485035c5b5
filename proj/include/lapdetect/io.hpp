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

#ifndef LAPDETECT_IO_HPP_
#define LAPDETECT_IO_HPP_

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lapdetect/detector.hpp"
#include "lapdetect/divergence.hpp"
#include "lapdetect/montecarlo.hpp"

namespace lapdetect {

inline constexpr int kCsvDigits = 17;
inline constexpr int kSummaryDigits = 7;

// %.<digits>g rendering; negative zero prints as 0 and NaN as an empty
// string.
inline std::string format_number(double v, int digits) {
  if (std::isnan(v)) return {};
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string csv_number(double v) { return format_number(v, kCsvDigits); }

inline std::string summary_number(double v) {
  return format_number(v, kSummaryDigits);
}

inline const char* bool_name(bool b) { return b ? "true" : "false"; }

inline constexpr const char* kRocHeader = "alpha,k1,k2,power";
inline constexpr const char* kKlSweepHeader =
    "epsilon,theta,dmu_over_s,kl,bound,violated";
inline constexpr const char* kGridHeader =
    "eps,theta,dmu,alpha,alpha_hat,power,power_hat,pass";

inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << kRocHeader << '\n';
  for (const RocPoint& p : curve.points) {
    out << csv_number(p.alpha) << ',' << csv_number(p.k1) << ','
        << csv_number(p.k2) << ',' << csv_number(p.power) << '\n';
  }
}

inline void write_kl_sweep_csv(std::ostream& out,
                               const std::vector<KlSweepRow>& rows) {
  out << kKlSweepHeader << '\n';
  for (const KlSweepRow& r : rows) {
    out << csv_number(r.epsilon) << ',' << csv_number(r.theta) << ','
        << csv_number(r.dmu_over_s) << ',' << csv_number(r.kl) << ','
        << csv_number(r.bound) << ',' << bool_name(r.violated) << '\n';
  }
}

inline void write_grid_row(std::ostream& out, const GridRow& row) {
  out << csv_number(row.eps) << ',' << csv_number(row.theta) << ','
      << csv_number(row.dmu) << ',' << csv_number(row.alpha) << ','
      << csv_number(row.report.alpha_hat) << ','
      << csv_number(row.report.power_closed) << ','
      << csv_number(row.report.power_hat) << ','
      << bool_name(row.report.pass) << '\n';
}

// Rows only; callers decide whether a header is needed (append mode).
inline void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows,
                           bool header) {
  if (header) out << kGridHeader << '\n';
  for (const GridRow& row : rows) write_grid_row(out, row);
}

inline nlohmann::ordered_json to_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["alpha_hat"] = r.alpha_hat;
  j["power_hat"] = r.power_hat;
  j["alpha_closed"] = r.alpha_closed;
  j["power_closed"] = r.power_closed;
  j["half_width_alpha"] = r.half_width_alpha;
  j["half_width_power"] = r.half_width_power;
  j["pass"] = r.pass;
  return j;
}

inline nlohmann::ordered_json to_json(const KlReport& r) {
  nlohmann::ordered_json j;
  j["d_closed"] = r.d_closed;
  j["d_quadrature"] = r.d_quadrature;
  j["epsilon"] = r.epsilon;
  j["bound"] = r.bound;
  j["violated"] = r.violated;
  return j;
}

}  // namespace lapdetect

#endif  // LAPDETECT_IO_HPP_
