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


// ANN to SNN conversion: batch norm fusion, per-layer log quantization and
// output-layer normalization.

#ifndef TTFSCAT_CONVERT_H_
#define TTFSCAT_CONVERT_H_

#include <cstddef>

#include "ttfscat/dataset.h"
#include "ttfscat/network.h"
#include "ttfscat/snn_model.h"

namespace ttfscat {

// Folds inference-mode batch norm into weights and biases. Throws
// ContractViolation when a batch norm layer has no running statistics.
Network FuseBatchNorm(const Network& net);

struct ConvertOptions {
  int bw = 5;
  int z_w = 1;
  bool zero_flush = false;
  // Calibration samples taken from the front of the set; 0 means all.
  size_t calibration_size = 0;
};

// Fuses batch norm, quantizes hidden layers, then divides the output layer by
// the largest output pre-activation seen on the calibration samples (run with
// TTFS hidden activations and encoded input) and quantizes it.
SnnModel Convert(const Network& net, const Dataset& calibration,
                 const ConvertOptions& opts);

// Dequantized network with TTFS hidden activations. Its logits are the output
// membrane voltages of the SNN.
Network ToNetwork(const SnnModel& model);

}  // namespace ttfscat

#endif  // TTFSCAT_CONVERT_H_
