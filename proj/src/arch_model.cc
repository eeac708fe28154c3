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


#include "ttfscat/arch_model.h"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <ostream>

#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

int CeilLog2(std::int64_t n) {
  if (n <= 2) return 1;
  return int(std::bit_width(std::uint64_t(n - 1)));
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::vector<std::string> EnergyTable::Problems() const {
  std::vector<std::string> p;
  auto check = [&](double v, const char* key) {
    if (!(v >= 0)) p.push_back(std::string("arch.energy.") + key + ": must be >= 0");
  };
  check(sop_pj, "sop_pj");
  check(sram_read_pj, "sram_read_pj");
  check(sram_write_pj, "sram_write_pj");
  check(encoder_step_pj, "encoder_step_pj");
  return p;
}

std::vector<std::string> ArchConfig::Problems() const {
  std::vector<std::string> p;
  if (num_pes < 1) p.push_back("arch.num_pes: must be >= 1");
  if (input_buffer_bytes < 1) p.push_back("arch.input_buffer_bytes: must be >= 1");
  if (output_buffer_bytes < 1) {
    p.push_back("arch.output_buffer_bytes: must be >= 1");
  }
  if (weight_buffer_bytes < 1) {
    p.push_back("arch.weight_buffer_bytes: must be >= 1");
  }
  if (!(dram_pj_per_bit > 0)) p.push_back("arch.dram_pj_per_bit: must be > 0");
  if (!(frequency_hz > 0)) p.push_back("arch.frequency_hz: must be > 0");
  if (batch_size < 1) p.push_back("arch.batch_size: must be >= 1");
  if (spike_id_bits < 0) p.push_back("arch.spike_id_bits: must be >= 0");
  if (spike_time_bits < 0) p.push_back("arch.spike_time_bits: must be >= 0");
  auto e = energy.Problems();
  p.insert(p.end(), e.begin(), e.end());
  return p;
}

void ArchConfig::Validate() const {
  auto p = Problems();
  if (!p.empty()) throw ConfigError(std::move(p));
}

IntegrationCost CostIntegration(std::span<const SpikeEvent> spikes,
                                std::span<const int> fan_out,
                                const ArchConfig& cfg) {
  IntegrationCost c;
  for (const SpikeEvent& s : spikes) {
    TTFSCAT_REQUIRE(s.neuron_id >= 0 && size_t(s.neuron_id) < fan_out.size(),
                    "spike from a neuron outside the layer");
    const std::int64_t fo = fan_out[s.neuron_id];
    const std::int64_t passes =
        std::max<std::int64_t>(1, (fo + cfg.num_pes - 1) / cfg.num_pes);
    c.cycles += passes;
    c.sops += fo;
    c.gated_pe_slots += passes * cfg.num_pes - fo;
    c.weight_reads += fo;
  }
  c.sorter_cycles = std::int64_t(spikes.size());
  c.input_reads = std::int64_t(spikes.size());
  return c;
}

IntegrationCost CostIntegration(std::span<const SpikeEvent> spikes,
                                int fan_out, const ArchConfig& cfg) {
  int max_id = -1;
  for (const SpikeEvent& s : spikes) max_id = std::max(max_id, s.neuron_id);
  const std::vector<int> fo(size_t(max_id + 1), fan_out);
  return CostIntegration(spikes, fo, cfg);
}

EncodingCost CostEncoding(const EncoderLog& log) {
  return {log.emitted + log.threshold_steps, log.emitted, log.threshold_steps};
}

int SpikeRecordBits(const SnnModel& model, const ArchConfig& cfg) {
  std::int64_t widest = model.input_shape.size();
  for (const SnnLayer& l : model.layers) {
    widest = std::max<std::int64_t>(widest, l.out_features);
  }
  const int id_bits = cfg.spike_id_bits ? cfg.spike_id_bits : CeilLog2(widest);
  const int time_bits = cfg.spike_time_bits
                            ? cfg.spike_time_bits
                            : CeilLog2(std::int64_t(model.fire_windows()) *
                                       model.kernel.T);
  return id_bits + time_bits;
}

MemoryCost CostMemory(const SnnModel& model,
                      std::span<const std::int64_t> spikes,
                      std::span<const std::int64_t> max_spikes,
                      std::int64_t images, const ArchConfig& cfg) {
  TTFSCAT_REQUIRE(spikes.size() == size_t(model.fire_windows()) &&
                      max_spikes.size() == spikes.size(),
                  "memory cost: one spike count per fire window");
  MemoryCost m;
  const std::int64_t fills = (images + cfg.batch_size - 1) / cfg.batch_size;
  for (const SnnLayer& l : model.layers) {
    const std::int64_t bits = std::int64_t(l.weights.codes.size()) * model.bw;
    const bool fits = (bits + 7) / 8 <= cfg.weight_buffer_bytes;
    m.weight_bits += bits * (fits ? fills : images);
  }
  m.spike_record_bits = SpikeRecordBits(model, cfg);
  // Input spikes always come from DRAM; hidden spikes only when the output
  // buffer overflows, then they are written out and read back.
  m.spike_bits += spikes[0] * m.spike_record_bits;
  for (size_t w = 1; w < spikes.size(); ++w) {
    const std::int64_t bytes = (max_spikes[w] * m.spike_record_bits + 7) / 8;
    if (bytes > cfg.output_buffer_bytes) {
      m.spike_bits += 2 * spikes[w] * m.spike_record_bits;
    }
  }
  m.dram_bits = m.weight_bits + m.spike_bits;
  return m;
}

RunReport BuildReport(const SnnEngine& engine, const BatchResult& batch,
                      const ArchConfig* arch) {
  const SnnModel& model = engine.model();
  const int windows = model.fire_windows();
  RunReport r;
  r.images = std::int64_t(batch.runs.size());
  r.accuracy = batch.accuracy;
  r.latency = model.latency();
  r.spikes_per_layer.assign(windows, 0);
  std::vector<std::int64_t> max_spikes(windows, 0);

  std::vector<std::vector<int>> fan_out(windows);
  for (int w = 0; w < windows; ++w) {
    fan_out[w].resize(model.layers[w].in_features);
    for (int i = 0; i < model.layers[w].in_features; ++i) {
      fan_out[w][i] = engine.FanOut(w, i);
    }
  }

  ArchConfig cfg = arch ? *arch : ArchConfig{};
  cfg.Validate();
  std::int64_t encoder_cycles = 0;
  for (const RunResult& run : batch.runs) {
    r.saturation_count += run.saturation_count;
    for (int w = 0; w < windows; ++w) {
      const std::int64_t n = std::int64_t(run.spikes[w].size());
      r.spikes_per_layer[w] += n;
      max_spikes[w] = std::max(max_spikes[w], n);
      const IntegrationCost ic = CostIntegration(run.spikes[w], fan_out[w], cfg);
      const EncodingCost ec = CostEncoding(run.encoder[w]);
      r.total_sops += ic.sops;
      r.integration_cycles += ic.cycles;
      r.encoding_cycles += ec.cycles;
      r.gated_pe_slots += ic.gated_pe_slots;
      r.sram_reads += ic.weight_reads + ic.input_reads;
      r.sram_writes += ec.emitted;
      encoder_cycles += ec.cycles;
    }
  }
  if (!arch) return r;

  r.has_arch = true;
  r.cycles = r.integration_cycles + r.encoding_cycles;
  const MemoryCost mem =
      CostMemory(model, r.spikes_per_layer, max_spikes, r.images, cfg);
  r.dram_bits = mem.dram_bits;
  const EnergyTable& e = cfg.energy;
  r.sop_uj = double(r.total_sops) * e.sop_pj * 1e-6;
  r.sram_uj = (double(r.sram_reads) * e.sram_read_pj +
               double(r.sram_writes) * e.sram_write_pj) *
              1e-6;
  r.encoder_uj = double(encoder_cycles) * e.encoder_step_pj * 1e-6;
  r.dram_uj = double(r.dram_bits) * cfg.dram_pj_per_bit * 1e-6;
  r.energy_uj = r.sop_uj + r.sram_uj + r.encoder_uj + r.dram_uj;
  if (r.images > 0) r.energy_per_image_uj = r.energy_uj / double(r.images);
  if (r.cycles > 0) {
    r.fps = cfg.frequency_hz / (double(r.cycles) / double(r.images));
  }
  return r;
}

namespace {

std::vector<std::pair<std::string, std::string>> ReportFields(
    const RunReport& r) {
  std::vector<std::pair<std::string, std::string>> f;
  f.emplace_back("images", std::to_string(r.images));
  f.emplace_back("accuracy", Fmt(r.accuracy));
  if (r.has_ann_accuracy) {
    f.emplace_back("ann_accuracy", Fmt(r.ann_accuracy));
    f.emplace_back("conversion_loss", Fmt(r.conversion_loss));
  }
  f.emplace_back("latency_timesteps", std::to_string(r.latency));
  std::int64_t total = 0;
  for (size_t w = 0; w < r.spikes_per_layer.size(); ++w) {
    f.emplace_back("spikes_layer" + std::to_string(w),
                   std::to_string(r.spikes_per_layer[w]));
    total += r.spikes_per_layer[w];
  }
  f.emplace_back("spikes_total", std::to_string(total));
  f.emplace_back("sops", std::to_string(r.total_sops));
  f.emplace_back("saturations", std::to_string(r.saturation_count));
  if (r.has_arch) {
    f.emplace_back("cycles", std::to_string(r.cycles));
    f.emplace_back("integration_cycles", std::to_string(r.integration_cycles));
    f.emplace_back("encoding_cycles", std::to_string(r.encoding_cycles));
    f.emplace_back("gated_pe_slots", std::to_string(r.gated_pe_slots));
    f.emplace_back("sram_reads", std::to_string(r.sram_reads));
    f.emplace_back("sram_writes", std::to_string(r.sram_writes));
    f.emplace_back("dram_bits", std::to_string(r.dram_bits));
    f.emplace_back("energy_sop_uj", Fmt(r.sop_uj));
    f.emplace_back("energy_sram_uj", Fmt(r.sram_uj));
    f.emplace_back("energy_encoder_uj", Fmt(r.encoder_uj));
    f.emplace_back("energy_dram_uj", Fmt(r.dram_uj));
    f.emplace_back("energy_uj", Fmt(r.energy_uj));
    f.emplace_back("energy_per_image_uj", Fmt(r.energy_per_image_uj));
    f.emplace_back("fps", Fmt(r.fps));
  }
  return f;
}

}  // namespace

void WriteReportTable(std::ostream& os, const RunReport& r) {
  const auto fields = ReportFields(r);
  size_t width = 0;
  for (const auto& [k, v] : fields) width = std::max(width, k.size());
  for (const auto& [k, v] : fields) {
    os << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
}

void WriteReportKeyValues(std::ostream& os, const RunReport& r) {
  for (const auto& [k, v] : ReportFields(r)) os << k << '=' << v << '\n';
}

}  // namespace ttfscat
