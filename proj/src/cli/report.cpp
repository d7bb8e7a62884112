// Copyright 2026 The PolyLane Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polylane/cli/report.hpp"

#include <cstdio>
#include <string>

namespace polylane::cli {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_metrics(const evaluation::MetricReport& r) {
  std::string s;
  s += "Acc: " + fixed(100.0 * r.acc, 2) + "%\n";
  s += "FP: " + fixed(r.fp, 4) + "\n";
  s += "FN: " + fixed(r.fn, 4) + "\n";
  s += "LPD: " + fixed(r.lpd, 3) + " px\n";
  s += "images: " + std::to_string(r.n_images) + " (" + std::to_string(r.n_lpd_images) + " with LPD)\n";
  return s;
}

std::string format_discrepancies(const evaluation::MetricAccumulator& metrics) {
  std::string s = "greedy vs exhaustive matching: " + std::to_string(metrics.oracle_checked()) +
                  " images checked, max acc gap " + fixed(metrics.max_matching_gap(), 4) + ", " +
                  std::to_string(metrics.discrepancies().size()) + " below optimum\n";
  for (const auto& d : metrics.discrepancies()) {
    s += "  " + d.image + ": greedy " + fixed(d.greedy_acc, 4) + ", optimal " + fixed(d.optimal_acc, 4) + "\n";
  }
  return s;
}

std::string format_upper_bound_table(std::span<const evaluation::UpperBoundResult> rows) {
  std::string s = "degree  Acc(%)   FP      FN      LPD(px)  fallback\n";
  for (const auto& row : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-7d %-8.2f %-7.4f %-7.4f %-8.3f %d\n", row.degree, 100.0 * row.report.acc,
                  row.report.fp, row.report.fn, row.report.lpd, row.fallback_fits);
    s += buf;
  }
  return s;
}

nlohmann::ordered_json report_json(const evaluation::MetricReport& r) {
  nlohmann::ordered_json j;
  j["acc"] = r.acc;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["lpd"] = r.lpd;
  j["n_images"] = r.n_images;
  j["n_lpd_images"] = r.n_lpd_images;
  return j;
}

nlohmann::ordered_json metrics_json(const evaluation::MetricAccumulator& metrics) {
  auto j = report_json(metrics.report());
  nlohmann::ordered_json matching;
  matching["oracle_checked"] = metrics.oracle_checked();
  matching["max_gap"] = metrics.max_matching_gap();
  matching["discrepancies"] = nlohmann::ordered_json::array();
  for (const auto& d : metrics.discrepancies()) {
    matching["discrepancies"].push_back(
        nlohmann::ordered_json{{"image", d.image}, {"greedy_acc", d.greedy_acc}, {"optimal_acc", d.optimal_acc}});
  }
  j["matching"] = std::move(matching);
  return j;
}

nlohmann::ordered_json upper_bound_json(std::span<const evaluation::UpperBoundResult> rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["degree"] = row.degree;
    j["report"] = report_json(row.report);
    j["fallback_fits"] = row.fallback_fits;
    j["oracle_checked"] = row.oracle_checked;
    j["max_matching_gap"] = row.max_matching_gap;
    j["discrepancies"] = nlohmann::ordered_json::array();
    for (const auto& d : row.discrepancies) {
      j["discrepancies"].push_back(
          nlohmann::ordered_json{{"image", d.image}, {"greedy_acc", d.greedy_acc}, {"optimal_acc", d.optimal_acc}});
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace polylane::cli
