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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ttfscat/convert.h"
#include "ttfscat/dataset.h"
#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

std::vector<SpikeEvent> Spikes(int n) {
  std::vector<SpikeEvent> s;
  for (int i = 0; i < n; ++i) s.push_back({i, i / 3});
  return s;
}

TEST(CostIntegration, OnePassPerSpike) {
  const ArchConfig cfg;
  const auto c = CostIntegration(Spikes(10), 128, cfg);
  EXPECT_EQ(c.cycles, 10);
  EXPECT_EQ(c.sops, 1280);
  EXPECT_EQ(c.gated_pe_slots, 0);
  EXPECT_EQ(c.sorter_cycles, 10);
}

TEST(CostIntegration, WideFanOutNeedsTwoPasses) {
  const ArchConfig cfg;
  const auto c = CostIntegration(Spikes(1), 200, cfg);
  EXPECT_EQ(c.cycles, 2);
  EXPECT_EQ(c.sops, 200);
  EXPECT_EQ(c.gated_pe_slots, 256 - 200);
}

TEST(CostIntegration, Empty) {
  const auto c = CostIntegration({}, 64, ArchConfig{});
  EXPECT_EQ(c.cycles, 0);
  EXPECT_EQ(c.sops, 0);
}

TEST(CostIntegration, PerNeuronFanOut) {
  const std::vector<int> fan = {10, 300, 0};
  const auto c = CostIntegration(Spikes(3), fan, ArchConfig{});
  EXPECT_EQ(c.sops, 310);
  EXPECT_EQ(c.cycles, 1 + 3 + 1);
}

TEST(CostEncoding, EmittedPlusSteps) {
  EXPECT_EQ(CostEncoding({5, 3}).cycles, 8);
  EXPECT_EQ(CostEncoding({7, 1}).cycles, 8);
  EXPECT_EQ(CostEncoding({0, 0}).cycles, 0);
}

SnnModel OneLayer(int in, int out) {
  SnnModel m;
  m.input_shape = {in, 1, 1};
  SnnLayer l;
  l.in_features = in;
  l.out_features = out;
  std::vector<double> w(size_t(in) * out, 0.5);
  l.weights = QuantizeWeights(w, 5, 1);
  l.bias.assign(out, 0.0);
  m.layers.push_back(l);
  m.Validate();
  return m;
}

TEST(CostMemory, WeightsFilledOncePerBatch) {
  const SnnModel m = OneLayer(1000, 1);
  ArchConfig cfg;
  cfg.batch_size = 10;
  const std::vector<std::int64_t> none = {0};
  const auto c = CostMemory(m, none, none, 10, cfg);
  EXPECT_EQ(c.weight_bits, 5000);
  EXPECT_EQ(c.spike_bits, 0);
  EXPECT_EQ(c.dram_bits, 5000);
  cfg.weight_buffer_bytes = 100;
  EXPECT_EQ(CostMemory(m, none, none, 10, cfg).dram_bits, 50000);
}

TEST(CostMemory, HiddenSpikesOnlyOnOverflow) {
  SnnModel m = OneLayer(4, 4);
  m.layers.push_back(m.layers[0]);
  ArchConfig cfg;
  cfg.spike_id_bits = 6;
  cfg.spike_time_bits = 10;
  EXPECT_EQ(SpikeRecordBits(m, cfg), 16);
  const std::vector<std::int64_t> spikes = {3, 4}, peak = {3, 4};
  EXPECT_EQ(CostMemory(m, spikes, peak, 1, cfg).spike_bits, 3 * 16);
  cfg.output_buffer_bytes = 4;
  EXPECT_EQ(CostMemory(m, spikes, peak, 1, cfg).spike_bits, 3 * 16 + 2 * 4 * 16);
}

Dataset Images(int inputs, std::vector<double> levels) {
  Dataset d;
  d.shape = {inputs, 1, 1};
  d.num_classes = 2;
  for (double v : levels) {
    for (int i = 0; i < inputs; ++i) d.features.push_back(v);
    d.labels.push_back(0);
  }
  return d;
}

TEST(BuildReport, DramEnergyAtFourPicojoulesPerBit) {
  // 2000 x 100 five-bit weights are 1e6 bits for one image.
  const SnnEngine engine(OneLayer(2000, 100), Precision::kFixedPoint);
  const Dataset zero = Images(2000, {0.0});
  const ArchConfig cfg;
  const RunReport r = BuildReport(engine, RunBatch(engine, zero), &cfg);
  EXPECT_EQ(r.dram_bits, 1000000);
  EXPECT_DOUBLE_EQ(r.dram_uj, 4.0);
  EXPECT_EQ(r.total_sops, 0);
}

class ReportOnNet : public ::testing::Test {
 protected:
  void SetUp() override {
    Network net = BuildNetwork({12, 1, 1}, {{LayerKind::kDense, 20}}, 2, false,
                               KernelParams{}, 3);
    BlobOptions bo;
    bo.num_classes = 2;
    bo.features = 12;
    model_ = Convert(net, MakeBlobs(bo), {});
  }
  SnnModel model_;
};

TEST_F(ReportOnNet, ClosureAndDeterminism) {
  const SnnEngine engine(model_, Precision::kFixedPoint);
  BlobOptions bo;
  bo.num_classes = 2;
  bo.features = 12;
  bo.samples_per_class = 10;
  const Dataset d = MakeBlobs(bo);
  const ArchConfig cfg;
  const RunReport a = BuildReport(engine, RunBatch(engine, d), &cfg);
  const RunReport b = BuildReport(engine, RunBatchSerial(engine, d), &cfg);
  EXPECT_EQ(a.energy_uj, a.sop_uj + a.sram_uj + a.encoder_uj + a.dram_uj);
  EXPECT_EQ(a.cycles, a.integration_cycles + a.encoding_cycles);
  std::ostringstream sa, sb;
  WriteReportKeyValues(sa, a);
  WriteReportKeyValues(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str().find("energy_uj="), std::string::npos);
  EXPECT_GT(a.fps, 0.0);
}

TEST_F(ReportOnNet, MoreSpikesCostMore) {
  const SnnEngine engine(model_, Precision::kFixedPoint);
  const ArchConfig cfg;
  // Uniform images brighten from silent to saturated.
  RunReport prev;
  std::int64_t prev_spikes = -1;
  for (int step = 0; step <= 10; ++step) {
    const RunReport r =
        BuildReport(engine, RunBatch(engine, Images(12, {step / 10.0})), &cfg);
    std::int64_t spikes = 0;
    for (auto n : r.spikes_per_layer) spikes += n;
    if (spikes > prev_spikes && prev_spikes >= 0) {
      EXPECT_GE(r.total_sops, prev.total_sops);
      EXPECT_GE(r.cycles, prev.cycles);
      EXPECT_GE(r.energy_uj, prev.energy_uj);
    }
    if (spikes >= prev_spikes) {
      prev = r;
      prev_spikes = spikes;
    }
  }
  EXPECT_GT(prev_spikes, 0);
}

TEST(ArchConfig, RejectsBadValues) {
  ArchConfig cfg;
  cfg.num_pes = 0;
  cfg.dram_pj_per_bit = -1;
  EXPECT_EQ(cfg.Problems().size(), 2u);
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

}  // namespace
}  // namespace ttfscat
