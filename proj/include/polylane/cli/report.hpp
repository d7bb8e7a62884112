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

#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "polylane/evaluation/metrics.hpp"
#include "polylane/evaluation/upper_bound.hpp"

namespace polylane::cli {

/// Four metrics plus image counts, one "name: value" line each.
std::string format_metrics(const evaluation::MetricReport& report);

/// Greedy-vs-exhaustive matching summary and one line per discrepancy.
std::string format_discrepancies(const evaluation::MetricAccumulator& metrics);

/// One row per degree: degree, Acc (%), FP, FN, LPD, fallback fits.
std::string format_upper_bound_table(std::span<const evaluation::UpperBoundResult> rows);

nlohmann::ordered_json report_json(const evaluation::MetricReport& report);
nlohmann::ordered_json metrics_json(const evaluation::MetricAccumulator& metrics);
nlohmann::ordered_json upper_bound_json(std::span<const evaluation::UpperBoundResult> rows);

}  // namespace polylane::cli
