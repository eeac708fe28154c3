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


// A converted network: log-quantized weights, real biases and the shared
// TTFS kernel. Hidden layers fire; the last layer only integrates.

#ifndef TTFSCAT_SNN_MODEL_H_
#define TTFSCAT_SNN_MODEL_H_

#include <vector>

#include "ttfscat/log_arith.h"
#include "ttfscat/network.h"
#include "ttfscat/ttfs_kernel.h"

namespace ttfscat {

struct SnnLayer {
  LayerKind kind = LayerKind::kDense;
  int in_features = 0;
  int out_features = 0;
  Conv2dGeometry conv;
  QuantizedTensor weights;   // same layout as LayerSpec::weights
  std::vector<double> bias;  // per output channel

  int channels() const {
    return kind == LayerKind::kDense ? out_features : conv.out_channels;
  }
  int spatial() const {
    return kind == LayerKind::kDense ? 1 : conv.out_height() * conv.out_width();
  }
};

struct SnnModel {
  Shape input_shape;
  KernelParams kernel;
  int bw = 5;
  int z_w = 1;
  bool zero_flush = false;
  std::vector<SnnLayer> layers;
  // Output weights and bias were divided by this before quantization.
  double output_scale = 1.0;

  // Throws ContractViolation on inconsistent sizes or codes.
  void Validate() const;
  int num_classes() const { return layers.back().out_features; }
  // Input encoding plus one window per hidden layer.
  int fire_windows() const { return int(layers.size()); }
  int latency() const { return fire_windows() * kernel.T; }
  // Scheme shared by all layers except for the per-layer fsr.
  LogQuantScheme BaseScheme() const { return {bw, z_w, 0, zero_flush}; }
};

}  // namespace ttfscat

#endif  // TTFSCAT_SNN_MODEL_H_
