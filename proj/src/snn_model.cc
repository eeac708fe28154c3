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


#include "ttfscat/snn_model.h"

#include <cmath>
#include <string>

#include "ttfscat/errors.h"

namespace ttfscat {

void SnnModel::Validate() const {
  kernel.Validate();
  BaseScheme().Validate();
  TTFSCAT_REQUIRE(!layers.empty(), "snn model has no layers");
  TTFSCAT_REQUIRE(output_scale > 0 && std::isfinite(output_scale),
                  "snn model: output scale must be positive");
  int expected_in = input_shape.size();
  for (size_t l = 0; l < layers.size(); ++l) {
    const SnnLayer& layer = layers[l];
    const std::string where = "snn layer " + std::to_string(l) + ": ";
    TTFSCAT_REQUIRE(layer.in_features == expected_in,
                    where + "fan-in does not match previous layer");
    size_t weights = size_t(layer.in_features) * layer.out_features;
    if (layer.kind == LayerKind::kConv2d) {
      TTFSCAT_REQUIRE(layer.conv.input_size() == layer.in_features &&
                          layer.conv.output_size() == layer.out_features,
                      where + "conv geometry disagrees with layer sizes");
      weights = layer.conv.weight_count();
    }
    TTFSCAT_REQUIRE(layer.weights.codes.size() == weights,
                    where + "weight count mismatch");
    TTFSCAT_REQUIRE(layer.bias.size() == size_t(layer.channels()),
                    where + "bias size mismatch");
    const LogQuantScheme& s = layer.weights.scheme;
    TTFSCAT_REQUIRE(s.bw == bw && s.z_w == z_w && s.zero_flush == zero_flush,
                    where + "scheme differs from the model");
    for (const QuantizedWeight& q : layer.weights.codes) {
      TTFSCAT_REQUIRE(q.sign >= -1 && q.sign <= 1, where + "bad weight sign");
      TTFSCAT_REQUIRE(q.is_zero() || (q.grid_index >= s.MinIndex() &&
                                      q.grid_index <= s.MaxIndex()),
                      where + "weight code outside the clip range");
    }
    for (double b : layer.bias) {
      TTFSCAT_REQUIRE(std::isfinite(b), where + "non-finite bias");
    }
    expected_in = layer.out_features;
  }
}

}  // namespace ttfscat
