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


// Cycle, traffic and energy accounting over engine traces.
//
// The model follows the processor organization: an input generator that
// merge-sorts spikes (one per cycle), a PE array that broadcasts each spike to
// up to num_pes synapses per cycle with idle PEs gated, a priority-encoder
// spike encoder and whole-layer weight buffering.

#ifndef TTFSCAT_ARCH_MODEL_H_
#define TTFSCAT_ARCH_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ttfscat/snn_engine.h"
#include "ttfscat/snn_model.h"

namespace ttfscat {

// Per-event energies in pJ. The defaults are placeholders, not measurements.
struct EnergyTable {
  double sop_pj = 0.05;
  double sram_read_pj = 0.8;
  double sram_write_pj = 1.0;
  double encoder_step_pj = 0.3;

  std::vector<std::string> Problems() const;
};

struct ArchConfig {
  int num_pes = 128;
  std::int64_t input_buffer_bytes = 48 * 1024;
  std::int64_t output_buffer_bytes = 48 * 1024;
  std::int64_t weight_buffer_bytes = 4 * 90 * 1024;
  double dram_pj_per_bit = 4.0;
  EnergyTable energy;
  double frequency_hz = 250e6;
  // Images sharing one weight fill.
  int batch_size = 1;
  // Spike record widths on the DRAM interface; 0 derives them from the model.
  int spike_id_bits = 0;
  int spike_time_bits = 0;

  std::vector<std::string> Problems() const;
  // Throws ConfigError listing Problems().
  void Validate() const;
};

struct IntegrationCost {
  std::int64_t cycles = 0;
  std::int64_t sops = 0;
  std::int64_t gated_pe_slots = 0;  // PE slots idle during a pass
  std::int64_t sorter_cycles = 0;   // overlapped with integration
  std::int64_t weight_reads = 0;
  std::int64_t input_reads = 0;
};

// fan_out[i] is the number of synapses leaving input neuron i.
IntegrationCost CostIntegration(std::span<const SpikeEvent> spikes,
                                std::span<const int> fan_out,
                                const ArchConfig& cfg);
// Every input neuron has the same fan-out.
IntegrationCost CostIntegration(std::span<const SpikeEvent> spikes,
                                int fan_out, const ArchConfig& cfg);

struct EncodingCost {
  std::int64_t cycles = 0;
  std::int64_t emitted = 0;
  std::int64_t threshold_steps = 0;
};

EncodingCost CostEncoding(const EncoderLog& log);

struct MemoryCost {
  std::int64_t weight_bits = 0;  // DRAM weight traffic
  std::int64_t spike_bits = 0;   // DRAM spike record traffic
  std::int64_t dram_bits = 0;
  std::int64_t spike_record_bits = 0;
};

// Bits one spike record occupies on the DRAM interface.
int SpikeRecordBits(const SnnModel& model, const ArchConfig& cfg);

// spikes[w] is the total spike count of window w over all images.
// max_spikes[w] is the largest per-image count, used for buffer overflow.
MemoryCost CostMemory(const SnnModel& model,
                      std::span<const std::int64_t> spikes,
                      std::span<const std::int64_t> max_spikes,
                      std::int64_t images, const ArchConfig& cfg);

struct RunReport {
  std::int64_t images = 0;
  double accuracy = 0;  // percent
  bool has_ann_accuracy = false;
  double ann_accuracy = 0;
  double conversion_loss = 0;  // SNN - ANN, negative is a loss
  int latency = 0;             // timesteps per image
  std::vector<std::int64_t> spikes_per_layer;  // per window, summed
  std::int64_t total_sops = 0;
  std::int64_t saturation_count = 0;

  bool has_arch = false;
  std::int64_t cycles = 0;
  std::int64_t integration_cycles = 0;
  std::int64_t encoding_cycles = 0;
  std::int64_t gated_pe_slots = 0;
  std::int64_t sram_reads = 0;
  std::int64_t sram_writes = 0;
  std::int64_t dram_bits = 0;
  double sop_uj = 0;
  double sram_uj = 0;
  double encoder_uj = 0;
  double dram_uj = 0;
  double energy_uj = 0;  // sop_uj + sram_uj + encoder_uj + dram_uj
  double energy_per_image_uj = 0;
  double fps = 0;
};

// Builds the report for a batch of runs. Without `arch`, only the
// functional fields are filled.
RunReport BuildReport(const SnnEngine& engine, const BatchResult& batch,
                      const ArchConfig* arch);

// Aligned human-readable table.
void WriteReportTable(std::ostream& os, const RunReport& r);
// One "key=value" per line.
void WriteReportKeyValues(std::ostream& os, const RunReport& r);

}  // namespace ttfscat

#endif  // TTFSCAT_ARCH_MODEL_H_
