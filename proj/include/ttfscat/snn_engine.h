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


// Event-driven execution of a converted model.
//
// Window 0 encodes the input image. Hidden layer l integrates the spikes of
// window l and fires in window l + 1, whose reference time is (l + 1) * T.
// The output layer integrates only and its membrane voltages are read out.
//
// Two numeric paths exist. kFixedPoint accumulates shift/LUT products in
// Q31.32 as the hardware does; kReference uses doubles and the exact kernel.

#ifndef TTFSCAT_SNN_ENGINE_H_
#define TTFSCAT_SNN_ENGINE_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ttfscat/dataset.h"
#include "ttfscat/log_arith.h"
#include "ttfscat/snn_model.h"
#include "ttfscat/ttfs_kernel.h"

namespace ttfscat {

struct SpikeEvent {
  int neuron_id = 0;
  int timestep = 0;  // global simulation time

  bool operator==(const SpikeEvent&) const = default;
};

struct LayerPhaseWindow {
  int layer_index = 0;
  int t_ref = 0;

  static LayerPhaseWindow For(int layer_index, const KernelParams& k) {
    return {layer_index, layer_index * k.T};
  }
};

enum class Precision { kFixedPoint, kReference };

struct VmemState {
  Precision precision = Precision::kFixedPoint;
  std::vector<std::int64_t> raw;  // Q31.32, fixed-point path only
  std::vector<double> values;     // always filled
  int saturation_count = 0;
};

// Replay of one fire phase.
struct EncoderLog {
  std::int64_t emitted = 0;
  // Thresholds presented before the loop ended.
  int threshold_steps = 0;
};

// One spike per pixel that reaches a threshold, at timestep = spike time.
// Sorted by (timestep, neuron_id).
std::vector<SpikeEvent> EncodeInput(std::span<const double> image,
                                    const KernelParams& k);

// Accumulates w * kernel(t - t_ref_in) for every input spike, then adds the
// bias. Throws ContractViolation on unsorted input, a repeated neuron or a
// spike outside the input window.
VmemState IntegrateLayer(std::span<const SpikeEvent> spikes_in,
                         const SnnLayer& layer, const KernelParams& k,
                         const ShiftLut& lut, const LayerPhaseWindow& input,
                         Precision precision = Precision::kFixedPoint);

// Spike encoder: zero negative voltages, then for dt = 0..T fire every
// neuron at or above the threshold in id order and reset it.
std::vector<SpikeEvent> EncodeSpikes(const VmemState& vmem,
                                     const KernelParams& k,
                                     const LayerPhaseWindow& window,
                                     EncoderLog* log = nullptr);

struct RunResult {
  int predicted = -1;
  // spikes[w] holds the spikes fired in window w; w = 0 is the input.
  std::vector<std::vector<SpikeEvent>> spikes;
  std::vector<EncoderLog> encoder;  // one per window
  VmemState output;
  int latency = 0;  // timesteps
  int saturation_count = 0;
};

// Pre-expanded synapse tables for repeated inference. Immutable after
// construction, so one engine can serve concurrent Run calls.
class SnnEngine {
 public:
  SnnEngine(const SnnModel& model, Precision precision);

  const SnnModel& model() const { return model_; }
  Precision precision() const { return precision_; }
  const ShiftLut& lut() const { return lut_; }

  // `image` is scaled to [0, theta0].
  RunResult Run(std::span<const double> image) const;

  // Synapses driven by input neuron i of layer l.
  int FanOut(int layer, int neuron) const;

 private:
  struct Synapse {
    std::int32_t target;
    std::int32_t sign;
    std::int64_t exponent;  // weight exponent in 1/frac_grid units
    double weight;          // dequantized
  };
  struct Prepared {
    std::vector<std::size_t> offsets;  // CSR over input neurons
    std::vector<Synapse> synapses;
    std::vector<std::int64_t> bias_raw;
    std::vector<double> bias;  // per output neuron
  };

  VmemState Integrate(int layer, std::span<const SpikeEvent> spikes,
                      const LayerPhaseWindow& input) const;

  SnnModel model_;
  Precision precision_;
  ShiftLut lut_;
  std::vector<double> kernel_;  // kernel(dt) for dt = 0..T
  std::vector<Prepared> layers_;
};

RunResult RunNetwork(const SnnModel& model, std::span<const double> image,
                     Precision precision = Precision::kFixedPoint);

struct BatchResult {
  std::vector<RunResult> runs;
  double accuracy = 0;  // percent
};

// Runs every sample of `data` (features scaled by theta0). The parallel
// version splits samples across OpenMP threads; results match the serial one.
BatchResult RunBatch(const SnnEngine& engine, const Dataset& data);
BatchResult RunBatchSerial(const SnnEngine& engine, const Dataset& data);

// "layer,neuron_id,timestep" rows; layer is the window index.
void WriteSpikeTrace(std::ostream& os, const RunResult& run);

}  // namespace ttfscat

#endif  // TTFSCAT_SNN_ENGINE_H_
