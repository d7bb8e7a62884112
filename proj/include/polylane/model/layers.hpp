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

// Layer kernels of the reference backbone. Forward functions allocate their
// output; backward functions accumulate (+=) into parameter gradients and
// overwrite input gradients.

#include <span>
#include <vector>

#include "polylane/model/tensor.hpp"

namespace polylane::model {

struct Conv2dShape {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 2;
  int padding = 1;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  }
  /// Weights [out][in][ky][kx] followed by one bias per output channel.
  std::size_t param_count() const { return weight_count() + static_cast<std::size_t>(out_channels); }
  int output_extent(int input_extent) const { return (input_extent + 2 * padding - kernel) / stride + 1; }
};

Tensor conv2d_forward(const Tensor& in, std::span<const double> params, const Conv2dShape& shape);

/// grad_in may be null when the input gradient is not needed.
void conv2d_backward(const Tensor& in, std::span<const double> params, const Conv2dShape& shape,
                     const Tensor& grad_out, Tensor* grad_in, std::span<double> grad_params);

/// x * sigmoid(x)
Tensor silu_forward(const Tensor& in);
Tensor silu_backward(const Tensor& in, const Tensor& grad_out);

/// Non-overlapping factor x factor mean pooling; trailing rows/columns that
/// do not fill a window are ignored.
Tensor avg_pool_forward(const Tensor& in, int factor);
Tensor avg_pool_backward(const Tensor& grad_out, int factor, int in_height, int in_width);

std::vector<double> global_avg_pool_forward(const Tensor& in);
Tensor global_avg_pool_backward(std::span<const double> grad_out, int channels, int height, int width);

/// Two extra channels holding the column and row position in [-1, 1].
Tensor append_coord_channels(const Tensor& in);

/// y = W x + b with W stored row-major [out][in], followed by b.
std::vector<double> linear_forward(std::span<const double> in, std::span<const double> params, int out_dim);

/// grad_in may be empty when the input gradient is not needed.
void linear_backward(std::span<const double> in, std::span<const double> params, int out_dim,
                     std::span<const double> grad_out, std::span<double> grad_in, std::span<double> grad_params);

}  // namespace polylane::model
