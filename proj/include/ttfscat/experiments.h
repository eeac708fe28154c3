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


// End-to-end runs: train, convert, simulate, and the grids built from them.

#ifndef TTFSCAT_EXPERIMENTS_H_
#define TTFSCAT_EXPERIMENTS_H_

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "ttfscat/cat_train.h"
#include "ttfscat/config.h"
#include "ttfscat/snn_model.h"

namespace ttfscat {

struct PipelineResult {
  Network ann;
  std::vector<EpochRecord> trace;
  double ann_accuracy = 0;  // percent, test set, final activation plan
  SnnModel snn;
  double snn_accuracy = 0;  // percent, fixed-point engine
  double conversion_loss = 0;
};

// Builds the network from cfg, trains it with cfg.method, converts and runs
// the SNN over `test`.
PipelineResult RunPipeline(const ExperimentConfig& cfg, const Dataset& train,
                           const Dataset& test);

// Converts an already trained network and scores both sides.
PipelineResult ConvertAndScore(const Network& ann, const ExperimentConfig& cfg,
                               const Dataset& train, const Dataset& test);

// Fixed-point SNN accuracy in percent.
double SnnAccuracy(const SnnModel& model, const Dataset& data);

struct AblationCell {
  int T = 0;
  int tau = 0;
  CatMethod method = CatMethod::kFull;
  double ann_accuracy = 0;
  double snn_accuracy = 0;
  double conversion_loss = 0;
};

inline const std::vector<std::pair<int, int>> kAblationSettings = {
    {48, 8}, {24, 4}, {12, 2}};

// Every method at every (T, tau), same seed and data.
std::vector<AblationCell> RunAblation(
    const ExperimentConfig& cfg, const Dataset& train, const Dataset& test,
    const std::vector<std::pair<int, int>>& settings = kAblationSettings);

// "T,tau,method,ann_acc,snn_acc,conversion_loss" rows.
void WriteAblationCsv(std::ostream& os, const std::vector<AblationCell>& cells);

struct BitWidthPoint {
  int bw = 0;
  double snn_accuracy = 0;
};

// Re-converts one trained network at each bit width.
std::vector<BitWidthPoint> SweepBitWidth(const Network& ann,
                                         const ExperimentConfig& cfg,
                                         const Dataset& train,
                                         const Dataset& test,
                                         const std::vector<int>& widths);

void WriteBitWidthCsv(std::ostream& os, const std::vector<BitWidthPoint>& pts);

struct StabilityRun {
  int ttfs_from = 0;
  bool diverged = false;
  int diverged_epoch = -1;
  double clip_peak = 0;        // best test accuracy of the clip stage
  double final_accuracy = 0;   // test accuracy after the last epoch
  double ttfs_low = 0;         // worst test accuracy once TTFS is on
  std::vector<EpochRecord> trace;

  double Drop() const { return clip_peak - final_accuracy; }
  double WorstDrop() const { return clip_peak - ttfs_low; }
};

// Trains with TTFS switched on at `ttfs_from`, ignoring the learning-rate
// condition, and records what happens.
StabilityRun RunStability(const ExperimentConfig& cfg, const Dataset& train,
                          const Dataset& test, int ttfs_from);

}  // namespace ttfscat

#endif  // TTFSCAT_EXPERIMENTS_H_
