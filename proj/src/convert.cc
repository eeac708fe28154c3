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


#include "ttfscat/convert.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttfscat/cat_train.h"
#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

constexpr int kCalibrationBatch = 256;

SnnLayer QuantizeLayer(const LayerSpec& layer, const ConvertOptions& opts) {
  SnnLayer out;
  out.kind = layer.kind;
  out.in_features = layer.in_features;
  out.out_features = layer.out_features;
  out.conv = layer.conv;
  out.weights =
      QuantizeWeights(layer.weights, opts.bw, opts.z_w, opts.zero_flush);
  out.bias = layer.bias;
  return out;
}

LayerSpec ToLayerSpec(const SnnLayer& layer, bool output) {
  LayerSpec spec;
  spec.kind = layer.kind;
  spec.in_features = layer.in_features;
  spec.out_features = layer.out_features;
  spec.conv = layer.conv;
  spec.weights = Dequantize(layer.weights);
  spec.bias = layer.bias;
  if (!output) spec.activation = ActivationKind::kTTFS;
  return spec;
}

}  // namespace

Network FuseBatchNorm(const Network& net) {
  Network out = net;
  for (size_t l = 0; l < out.layers.size(); ++l) {
    LayerSpec& layer = out.layers[l];
    if (!layer.bn) continue;
    const BatchNormParams& bn = *layer.bn;
    TTFSCAT_REQUIRE(bn.has_statistics, "fuse: layer " + std::to_string(l) +
                                           " has no batch norm statistics");
    const int channels = layer.channels();
    const size_t per_channel = layer.weights.size() / channels;
    for (int c = 0; c < channels; ++c) {
      const double scale = bn.gamma[c] / std::sqrt(bn.running_var[c] + bn.epsilon);
      for (size_t i = 0; i < per_channel; ++i) {
        layer.weights[c * per_channel + i] *= scale;
      }
      layer.bias[c] = (layer.bias[c] - bn.running_mean[c]) * scale + bn.beta[c];
    }
    layer.bn.reset();
  }
  return out;
}

SnnModel Convert(const Network& net, const Dataset& calibration,
                 const ConvertOptions& opts) {
  net.Validate();
  TTFSCAT_REQUIRE(net.kernel.IsLogCompatible(),
                  "convert: kernel needs base 2 and tau a power of two");
  TTFSCAT_REQUIRE(calibration.size() > 0, "convert: empty calibration set");
  TTFSCAT_REQUIRE(calibration.shape.size() == net.input_shape.size(),
                  "convert: calibration shape does not match the network");
  const Network fused = FuseBatchNorm(net);

  SnnModel model;
  model.input_shape = net.input_shape;
  model.kernel = net.kernel;
  model.bw = opts.bw;
  model.z_w = opts.z_w;
  model.zero_flush = opts.zero_flush;
  model.BaseScheme().Validate();
  for (const LayerSpec& layer : fused.layers) {
    model.layers.push_back(QuantizeLayer(layer, opts));
  }

  // Quantized hidden layers, real-valued output layer.
  Network probe = ToNetwork(model);
  probe.layers.back().weights = fused.layers.back().weights;
  const Dataset calib =
      opts.calibration_size ? calibration.Head(opts.calibration_size)
                            : calibration;
  const ActivationPlan plan{ActivationKind::kTTFS, true};
  double max_z = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (size_t start = 0; start < calib.size(); start += kCalibrationBatch) {
    const int n = int(std::min<size_t>(kCalibrationBatch, calib.size() - start));
    const auto x = ScaledInputs(calib, start, n, net.kernel.theta0);
    const ForwardResult r = Forward(probe, x, n, {plan});
    for (double z : r.logits) {
      max_z = std::max(max_z, z);
      max_abs = std::max(max_abs, std::fabs(z));
    }
  }
  double lambda = 1.0;
  if (max_z > 0) {
    lambda = max_z;
  } else if (max_abs > 0) {
    lambda = max_abs;
  }

  LayerSpec scaled = fused.layers.back();
  for (double& w : scaled.weights) w /= lambda;
  for (double& b : scaled.bias) b /= lambda;
  model.layers.back() = QuantizeLayer(scaled, opts);
  model.output_scale = lambda;
  model.Validate();
  return model;
}

Network ToNetwork(const SnnModel& model) {
  Network net;
  net.input_shape = model.input_shape;
  net.kernel = model.kernel;
  for (size_t l = 0; l < model.layers.size(); ++l) {
    net.layers.push_back(
        ToLayerSpec(model.layers[l], l + 1 == model.layers.size()));
  }
  return net;
}

}  // namespace ttfscat
