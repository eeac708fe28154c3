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


#include "ttfscat/experiments.h"

#include <algorithm>
#include <ostream>

#include "ttfscat/convert.h"
#include "ttfscat/snn_engine.h"

namespace ttfscat {
namespace {

Network Build(const ExperimentConfig& cfg, const Dataset& train) {
  return BuildNetwork(train.shape, ParseLayerDescs(cfg.layers),
                      train.num_classes, cfg.batchnorm, cfg.kernel, cfg.seed);
}

}  // namespace

double SnnAccuracy(const SnnModel& model, const Dataset& data) {
  const SnnEngine engine(model, Precision::kFixedPoint);
  return RunBatch(engine, data).accuracy;
}

PipelineResult ConvertAndScore(const Network& ann, const ExperimentConfig& cfg,
                               const Dataset& train, const Dataset& test) {
  PipelineResult r;
  r.ann = ann;
  r.ann_accuracy = Evaluate(ann, test, FinalPlan(cfg.schedule, cfg.method));
  r.snn = Convert(ann, train, cfg.quant);
  r.snn_accuracy = SnnAccuracy(r.snn, test);
  r.conversion_loss = r.snn_accuracy - r.ann_accuracy;
  return r;
}

PipelineResult RunPipeline(const ExperimentConfig& cfg, const Dataset& train,
                           const Dataset& test) {
  cfg.Validate();
  TrainResult t = Train(Build(cfg, train), train, &test, cfg.schedule, cfg.method);
  PipelineResult r = ConvertAndScore(t.network, cfg, train, test);
  r.trace = std::move(t.trace);
  return r;
}

std::vector<AblationCell> RunAblation(
    const ExperimentConfig& cfg, const Dataset& train, const Dataset& test,
    const std::vector<std::pair<int, int>>& settings) {
  std::vector<AblationCell> cells;
  for (const auto& [T, tau] : settings) {
    for (CatMethod m :
         {CatMethod::kClip, CatMethod::kClipInput, CatMethod::kFull}) {
      ExperimentConfig c = cfg;
      c.kernel.T = T;
      c.kernel.tau = tau;
      c.method = m;
      const PipelineResult r = RunPipeline(c, train, test);
      cells.push_back({T, tau, m, r.ann_accuracy, r.snn_accuracy,
                       r.conversion_loss});
    }
  }
  return cells;
}

void WriteAblationCsv(std::ostream& os, const std::vector<AblationCell>& cells) {
  os << "T,tau,method,ann_acc,snn_acc,conversion_loss\n";
  for (const AblationCell& c : cells) {
    os << c.T << ',' << c.tau << ',' << CatMethodLabel(c.method) << ','
       << c.ann_accuracy << ',' << c.snn_accuracy << ',' << c.conversion_loss
       << '\n';
  }
}

std::vector<BitWidthPoint> SweepBitWidth(const Network& ann,
                                         const ExperimentConfig& cfg,
                                         const Dataset& train,
                                         const Dataset& test,
                                         const std::vector<int>& widths) {
  std::vector<BitWidthPoint> pts;
  for (int bw : widths) {
    ConvertOptions q = cfg.quant;
    q.bw = bw;
    pts.push_back({bw, SnnAccuracy(Convert(ann, train, q), test)});
  }
  return pts;
}

void WriteBitWidthCsv(std::ostream& os, const std::vector<BitWidthPoint>& pts) {
  os << "bw,snn_acc\n";
  for (const BitWidthPoint& p : pts) os << p.bw << ',' << p.snn_accuracy << '\n';
}

StabilityRun RunStability(const ExperimentConfig& cfg, const Dataset& train,
                          const Dataset& test, int ttfs_from) {
  ExperimentConfig c = cfg;
  c.method = CatMethod::kFull;
  c.schedule.ttfs_from = ttfs_from;
  c.schedule.enforce_lr_condition = false;
  StabilityRun run;
  run.ttfs_from = ttfs_from;
  try {
    TrainResult t =
        Train(Build(c, train), train, &test, c.schedule, c.method);
    run.trace = std::move(t.trace);
  } catch (const DivergenceError& e) {
    run.diverged = true;
    run.diverged_epoch = e.epoch();
    return run;
  }
  run.ttfs_low = 100;
  for (const EpochRecord& r : run.trace) {
    if (r.activation == ActivationKind::kClip) {
      run.clip_peak = std::max(run.clip_peak, r.test_accuracy);
    } else if (r.activation == ActivationKind::kTTFS) {
      run.ttfs_low = std::min(run.ttfs_low, r.test_accuracy);
    }
  }
  run.final_accuracy = run.trace.back().test_accuracy;
  return run;
}

}  // namespace ttfscat
