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

#include "polylane/dataset/random.hpp"

namespace polylane::dataset {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

// splitmix64 finalizer
std::uint64_t RandomSource::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource RandomSource::fork(std::string_view label) const {
  return RandomSource(mix(seed_) ^ fnv1a(label));
}

RandomSource RandomSource::fork(std::uint64_t index) const {
  return RandomSource(mix(mix(seed_) + index));
}

double RandomSource::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RandomSource::normal(double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

int RandomSource::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

bool RandomSource::bernoulli(double p) { return uniform(0.0, 1.0) < p; }

}  // namespace polylane::dataset
