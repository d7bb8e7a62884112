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

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "polylane/model/lane_model.hpp"

namespace polylane::model {

/// Checkpoint container, version 1 (all integers little-endian):
///
///   bytes 0-7   magic "PLNCKPT\0"
///   u32         format version (1)
///   u64         header length L
///   L bytes     compact JSON header: {"format", "version", "layout",
///               "backbone", "param_count"}
///   u64         parameter count N
///   N x f64     parameters, IEEE-754 binary64
///
/// The writer is deterministic: equal configs and parameters give equal bytes.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace polylane::model
