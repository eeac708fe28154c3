// Copyright 2026 The ttfscat Authors
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

#ifndef TTFSCAT_NETWORK_H_
#define TTFSCAT_NETWORK_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttfscat/ttfs_kernel.h"

namespace ttfscat {

// Channel-major image shape. Dense inputs use channels = features.
struct Shape {
  int channels = 1;
  int height = 1;
  int width = 1;

  int size() const { return channels * height * width; }
  bool operator==(const Shape&) const = default;
};

enum class LayerKind : std::uint8_t { kDense = 0, kConv2d = 1 };

struct Conv2dGeometry {
  int in_channels = 0;
  int in_height = 0;
  int in_width = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  int out_height() const { return (in_height + 2 * padding - kernel) / stride + 1; }
  int out_width() const { return (in_width + 2 * padding - kernel) / stride + 1; }
  int input_size() const { return in_channels * in_height * in_width; }
  int output_size() const { return out_channels * out_height() * out_width(); }
  int weight_count() const {
    return out_channels * in_channels * kernel * kernel;
  }
  bool operator==(const Conv2dGeometry&) const = default;
};

struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;
  bool has_statistics = false;
};

// Dense weights are [out][in]; conv weights are [oc][ic][ky][kx]. Conv bias
// and batch norm are per output channel.
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  int in_features = 0;
  int out_features = 0;
  Conv2dGeometry conv;
  std::vector<double> weights;
  std::vector<double> bias;
  std::optional<BatchNormParams> bn;
  // nullopt marks the output layer.
  std::optional<ActivationKind> activation;

  bool is_output() const { return !activation.has_value(); }
  // Entries of bias / batch norm.
  int channels() const;
  // Output positions sharing one channel (1 for dense).
  int spatial() const;
};

struct Network {
  Shape input_shape;
  std::vector<LayerSpec> layers;
  KernelParams kernel;

  // Throws ContractViolation if the layer chain is inconsistent.
  void Validate() const;
  int num_classes() const { return layers.back().out_features; }
};

// Hidden layer description used to build networks from configuration.
struct LayerDesc {
  LayerKind kind = LayerKind::kDense;
  int units = 0;  // dense units or conv output channels
  int kernel = 3;
  int stride = 1;
  int padding = 1;

  bool operator==(const LayerDesc&) const = default;
};

// "conv:8:3:1:1" (channels, kernel, stride, padding) or "dense:64",
// comma separated.
std::vector<LayerDesc> ParseLayerDescs(std::string_view text);
std::string FormatLayerDescs(const std::vector<LayerDesc>& descs);

// Hidden layers per `hidden`, then a dense output layer with `num_classes`
// units. He-uniform weights, zero biases, identity batch norm when requested.
Network BuildNetwork(const Shape& input, const std::vector<LayerDesc>& hidden,
                     int num_classes, bool batchnorm, const KernelParams& k,
                     std::uint64_t seed);

}  // namespace ttfscat

#endif  // TTFSCAT_NETWORK_H_
