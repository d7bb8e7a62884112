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

#include <cstdint>
#include <random>
#include <string_view>

namespace polylane::dataset {

/// Seeded random stream. Independent streams for distinct purposes are
/// derived with fork(label), so adding draws to one purpose never shifts
/// another.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// A child stream determined only by this stream's seed and the label.
  RandomSource fork(std::string_view label) const;
  RandomSource fork(std::uint64_t index) const;

  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  int uniform_int(int lo, int hi);  // inclusive
  bool bernoulli(double p);

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t x);

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace polylane::dataset
