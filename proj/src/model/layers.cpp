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

#include "polylane/model/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polylane::model {

namespace {

// Output columns ox whose input column ox * stride + offset lies in [0, width).
struct ColumnRange {
  int lo;
  int hi;  // exclusive
};

ColumnRange valid_columns(int offset, int stride, int width, int out_width) {
  int lo = 0;
  while (lo < out_width && lo * stride + offset < 0) ++lo;
  int hi = out_width;
  while (hi > lo && (hi - 1) * stride + offset >= width) --hi;
  return {lo, hi};
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Tensor conv2d_forward(const Tensor& in, std::span<const double> params, const Conv2dShape& shape) {
  if (in.channels != shape.in_channels) throw std::invalid_argument("conv2d: channel mismatch");
  if (params.size() != shape.param_count()) throw std::invalid_argument("conv2d: parameter count mismatch");
  const int k = shape.kernel;
  const int s = shape.stride;
  const int out_h = shape.output_extent(in.height);
  const int out_w = shape.output_extent(in.width);
  Tensor out(shape.out_channels, out_h, out_w);
  const double* bias = params.data() + shape.weight_count();

  for (int oc = 0; oc < shape.out_channels; ++oc) {
    auto out_plane = out.plane(oc);
    std::fill(out_plane.begin(), out_plane.end(), bias[oc]);
    for (int ic = 0; ic < shape.in_channels; ++ic) {
      const double* w = params.data() + (static_cast<std::size_t>(oc) * shape.in_channels + ic) * k * k;
      const auto in_plane = in.plane(ic);
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = w[ky * k + kx];
          const int x_off = kx - shape.padding;
          const auto cols = valid_columns(x_off, s, in.width, out_w);
          for (int oy = 0; oy < out_h; ++oy) {
            const int iy = oy * s + ky - shape.padding;
            if (iy < 0 || iy >= in.height) continue;
            const double* in_row = in_plane.data() + static_cast<std::size_t>(iy) * in.width;
            double* out_row = out_plane.data() + static_cast<std::size_t>(oy) * out_w;
            for (int ox = cols.lo; ox < cols.hi; ++ox) out_row[ox] += wv * in_row[ox * s + x_off];
          }
        }
      }
    }
  }
  return out;
}

void conv2d_backward(const Tensor& in, std::span<const double> params, const Conv2dShape& shape,
                     const Tensor& grad_out, Tensor* grad_in, std::span<double> grad_params) {
  if (grad_params.size() != shape.param_count()) throw std::invalid_argument("conv2d: gradient size mismatch");
  const int k = shape.kernel;
  const int s = shape.stride;
  const int out_h = grad_out.height;
  const int out_w = grad_out.width;
  if (grad_in) *grad_in = Tensor(in.channels, in.height, in.width);
  double* grad_bias = grad_params.data() + shape.weight_count();

  for (int oc = 0; oc < shape.out_channels; ++oc) {
    const auto g_plane = grad_out.plane(oc);
    double bias_sum = 0.0;
    for (double g : g_plane) bias_sum += g;
    grad_bias[oc] += bias_sum;
    for (int ic = 0; ic < shape.in_channels; ++ic) {
      const std::size_t w_base = (static_cast<std::size_t>(oc) * shape.in_channels + ic) * k * k;
      const auto in_plane = in.plane(ic);
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = params[w_base + ky * k + kx];
          const int x_off = kx - shape.padding;
          const auto cols = valid_columns(x_off, s, in.width, out_w);
          double acc = 0.0;
          for (int oy = 0; oy < out_h; ++oy) {
            const int iy = oy * s + ky - shape.padding;
            if (iy < 0 || iy >= in.height) continue;
            const double* in_row = in_plane.data() + static_cast<std::size_t>(iy) * in.width;
            const double* g_row = g_plane.data() + static_cast<std::size_t>(oy) * out_w;
            for (int ox = cols.lo; ox < cols.hi; ++ox) acc += g_row[ox] * in_row[ox * s + x_off];
            if (grad_in) {
              double* gi_row = grad_in->plane(ic).data() + static_cast<std::size_t>(iy) * in.width;
              for (int ox = cols.lo; ox < cols.hi; ++ox) gi_row[ox * s + x_off] += wv * g_row[ox];
            }
          }
          grad_params[w_base + ky * k + kx] += acc;
        }
      }
    }
  }
}

Tensor silu_forward(const Tensor& in) {
  Tensor out(in.channels, in.height, in.width);
  for (std::size_t i = 0; i < in.data.size(); ++i) out.data[i] = in.data[i] * sigmoid(in.data[i]);
  return out;
}

Tensor silu_backward(const Tensor& in, const Tensor& grad_out) {
  Tensor out(in.channels, in.height, in.width);
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    const double sg = sigmoid(in.data[i]);
    out.data[i] = grad_out.data[i] * sg * (1.0 + in.data[i] * (1.0 - sg));
  }
  return out;
}

Tensor avg_pool_forward(const Tensor& in, int factor) {
  if (factor <= 1) return in;
  Tensor out(in.channels, in.height / factor, in.width / factor);
  const double scale = 1.0 / (factor * factor);
  for (int c = 0; c < in.channels; ++c) {
    for (int oy = 0; oy < out.height; ++oy) {
      double* out_row = &out.at(c, oy, 0);
      for (int dy = 0; dy < factor; ++dy) {
        const double* in_row = &in.at(c, oy * factor + dy, 0);
        for (int ox = 0; ox < out.width; ++ox) {
          double sum = 0.0;
          for (int dx = 0; dx < factor; ++dx) sum += in_row[ox * factor + dx];
          out_row[ox] += sum;
        }
      }
      for (int ox = 0; ox < out.width; ++ox) out_row[ox] *= scale;
    }
  }
  return out;
}

Tensor avg_pool_backward(const Tensor& grad_out, int factor, int in_height, int in_width) {
  if (factor <= 1) return grad_out;
  Tensor grad_in(grad_out.channels, in_height, in_width);
  const double scale = 1.0 / (factor * factor);
  for (int c = 0; c < grad_out.channels; ++c) {
    for (int oy = 0; oy < grad_out.height; ++oy) {
      for (int ox = 0; ox < grad_out.width; ++ox) {
        const double g = grad_out.at(c, oy, ox) * scale;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) grad_in.at(c, oy * factor + dy, ox * factor + dx) = g;
        }
      }
    }
  }
  return grad_in;
}

std::vector<double> global_avg_pool_forward(const Tensor& in) {
  std::vector<double> out(static_cast<std::size_t>(in.channels), 0.0);
  const double scale = 1.0 / static_cast<double>(in.plane_size());
  for (int c = 0; c < in.channels; ++c) {
    double sum = 0.0;
    for (double v : in.plane(c)) sum += v;
    out[static_cast<std::size_t>(c)] = sum * scale;
  }
  return out;
}

Tensor global_avg_pool_backward(std::span<const double> grad_out, int channels, int height, int width) {
  Tensor grad_in(channels, height, width);
  const double scale = 1.0 / (static_cast<double>(height) * width);
  for (int c = 0; c < channels; ++c) {
    auto plane = grad_in.plane(c);
    std::fill(plane.begin(), plane.end(), grad_out[static_cast<std::size_t>(c)] * scale);
  }
  return grad_in;
}

Tensor append_coord_channels(const Tensor& in) {
  Tensor out(in.channels + 2, in.height, in.width);
  std::copy(in.data.begin(), in.data.end(), out.data.begin());
  for (int y = 0; y < in.height; ++y) {
    const double ry = in.height > 1 ? 2.0 * y / (in.height - 1) - 1.0 : 0.0;
    for (int x = 0; x < in.width; ++x) {
      out.at(in.channels, y, x) = in.width > 1 ? 2.0 * x / (in.width - 1) - 1.0 : 0.0;
      out.at(in.channels + 1, y, x) = ry;
    }
  }
  return out;
}

std::vector<double> linear_forward(std::span<const double> in, std::span<const double> params, int out_dim) {
  const std::size_t in_dim = in.size();
  if (params.size() != (in_dim + 1) * static_cast<std::size_t>(out_dim)) {
    throw std::invalid_argument("linear: parameter count mismatch");
  }
  const double* bias = params.data() + in_dim * out_dim;
  std::vector<double> out(static_cast<std::size_t>(out_dim));
  for (int o = 0; o < out_dim; ++o) {
    const double* row = params.data() + static_cast<std::size_t>(o) * in_dim;
    double acc = bias[o];
    for (std::size_t i = 0; i < in_dim; ++i) acc += row[i] * in[i];
    out[static_cast<std::size_t>(o)] = acc;
  }
  return out;
}

void linear_backward(std::span<const double> in, std::span<const double> params, int out_dim,
                     std::span<const double> grad_out, std::span<double> grad_in, std::span<double> grad_params) {
  const std::size_t in_dim = in.size();
  if (!grad_in.empty()) std::fill(grad_in.begin(), grad_in.end(), 0.0);
  double* grad_bias = grad_params.data() + in_dim * out_dim;
  for (int o = 0; o < out_dim; ++o) {
    const double g = grad_out[static_cast<std::size_t>(o)];
    if (g == 0.0) continue;
    const double* row = params.data() + static_cast<std::size_t>(o) * in_dim;
    double* grad_row = grad_params.data() + static_cast<std::size_t>(o) * in_dim;
    for (std::size_t i = 0; i < in_dim; ++i) {
      grad_row[i] += g * in[i];
      if (!grad_in.empty()) grad_in[i] += g * row[i];
    }
    grad_bias[o] += g;
  }
}

}  // namespace polylane::model
