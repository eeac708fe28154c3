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


// ttfscat: train, convert and simulate TTFS spiking networks.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttfscat/arch_model.h"
#include "ttfscat/config.h"
#include "ttfscat/convert.h"
#include "ttfscat/errors.h"
#include "ttfscat/experiments.h"
#include "ttfscat/model_io.h"
#include "ttfscat/snn_engine.h"

namespace fs = std::filesystem;
using namespace ttfscat;

namespace {

constexpr char kConfigDirEnv[] = "TTFSCAT_CONFIG_DIR";
constexpr char kDefaultConfigName[] = "ttfscat.conf";

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig ResolveConfig(const GlobalOptions& g) {
  const char* dir = std::getenv(kConfigDirEnv);
  ExperimentConfig cfg;
  if (!g.config.empty()) {
    fs::path p = g.config;
    if (!fs::exists(p) && dir && p.is_relative()) p = fs::path(dir) / p;
    cfg = LoadConfig(p.string());
  } else if (dir && fs::exists(fs::path(dir) / kDefaultConfigName)) {
    cfg = LoadConfig((fs::path(dir) / kDefaultConfigName).string());
  }
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.schedule.seed = *g.seed;
  }
  cfg.Validate();
  return cfg;
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
}

void PrintTrace(const std::vector<EpochRecord>& trace) {
  std::printf("%5s %10s %5s %6s %9s %9s %9s\n", "epoch", "lr", "act", "input",
              "loss", "train", "test");
  for (const EpochRecord& r : trace) {
    std::printf("%5d %10.3g %5s %6s %9.4f %9.2f %9.2f\n", r.epoch, r.lr,
                std::string(ActivationName(r.activation)).c_str(),
                r.input_encoded ? "ttfs" : "raw", r.loss, r.train_accuracy,
                r.test_accuracy);
  }
}

int CmdTrain(const GlobalOptions& g, const std::string& out,
             const std::string& trace_csv) {
  const ExperimentConfig cfg = ResolveConfig(g);
  Dataset train, test;
  LoadExperimentData(cfg, &train, &test);
  const Network net =
      BuildNetwork(train.shape, ParseLayerDescs(cfg.layers), train.num_classes,
                   cfg.batchnorm, cfg.kernel, cfg.seed);
  TrainResult t = Train(net, train, &test, cfg.schedule, cfg.method);
  PrintTrace(t.trace);

  ModelFile file;
  file.stage = ModelStage::kAnn;
  file.ann = t.network;
  file.provenance.seed = cfg.seed;
  file.provenance.schedule = ScheduleSummary(cfg);
  file.provenance.dataset_hash = DatasetHash(train);
  file.provenance.method = cfg.method;
  file.provenance.has_ann_accuracy = true;
  file.provenance.ann_accuracy =
      Evaluate(t.network, test, FinalPlan(cfg.schedule, cfg.method));
  SaveModel(file, out);

  std::ofstream csv(trace_csv);
  if (!csv) throw FormatError("cannot write '" + trace_csv + "'");
  WriteTraceCsv(csv, t.trace);
  std::printf("ann_accuracy=%.4f\nmodel=%s\ntrace=%s\n",
              file.provenance.ann_accuracy, out.c_str(), trace_csv.c_str());
  return 0;
}

int CmdConvert(const GlobalOptions& g, const std::string& in,
               const std::string& out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  ModelFile file = LoadModel(in);
  if (file.stage != ModelStage::kAnn) {
    throw FormatError("'" + in + "' is already converted");
  }
  Dataset train, test;
  LoadExperimentData(cfg, &train, &test);
  file.snn = Convert(file.ann, train, cfg.quant);
  file.stage = ModelStage::kSnn;
  file.ann = Network{};
  SaveModel(file, out);
  std::printf("output_scale=%.17g\nbw=%d\nz_w=%d\nmodel=%s\n",
              file.snn.output_scale, file.snn.bw, file.snn.z_w, out.c_str());
  return 0;
}

struct InferOptions {
  std::string model;
  std::string data;
  bool arch = false;
  std::string trace;
  int trace_image = 0;
  bool reference = false;
  std::string report;
};

int CmdInfer(const GlobalOptions& g, const InferOptions& o) {
  const ExperimentConfig cfg = ResolveConfig(g);
  const std::string& in = o.model;
  const ModelFile file = LoadModel(in);
  if (file.stage != ModelStage::kSnn) {
    throw FormatError("'" + in + "' is not converted; run convert first");
  }
  Dataset data;
  if (!o.data.empty()) {
    data = LoadDataset(o.data);
  } else {
    Dataset train;
    LoadExperimentData(cfg, &train, &data);
  }
  if (data.shape.size() != file.snn.input_shape.size()) {
    throw FormatError("dataset samples have " +
                      std::to_string(data.shape.size()) +
                      " features, the model expects " +
                      std::to_string(file.snn.input_shape.size()));
  }
  const SnnEngine engine(file.snn, o.reference ? Precision::kReference
                                               : Precision::kFixedPoint);
  const BatchResult batch = RunBatch(engine, data);
  RunReport report = BuildReport(engine, batch, o.arch ? &cfg.arch : nullptr);
  if (file.provenance.has_ann_accuracy) {
    report.has_ann_accuracy = true;
    report.ann_accuracy = file.provenance.ann_accuracy;
    report.conversion_loss = report.accuracy - report.ann_accuracy;
  }
  WriteReportTable(std::cout, report);
  if (!o.report.empty()) {
    std::ostringstream kv;
    WriteReportKeyValues(kv, report);
    WriteFile(o.report, kv.str());
  }
  if (!o.trace.empty()) {
    if (o.trace_image < 0 || size_t(o.trace_image) >= batch.runs.size()) {
      throw ContractViolation("--trace-image out of range");
    }
    std::ostringstream csv;
    WriteSpikeTrace(csv, batch.runs[o.trace_image]);
    WriteFile(o.trace, csv.str());
  }
  return 0;
}

int CmdAblate(const GlobalOptions& g, const std::string& out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  Dataset train, test;
  LoadExperimentData(cfg, &train, &test);
  const auto cells = RunAblation(cfg, train, test);
  std::printf("%4s %4s  %-9s %9s %9s %9s\n", "T", "tau", "method", "ann",
              "snn", "loss");
  for (const AblationCell& c : cells) {
    std::printf("%4d %4d  %-9s %9.2f %9.2f %+9.2f\n", c.T, c.tau,
                std::string(CatMethodLabel(c.method)).c_str(), c.ann_accuracy,
                c.snn_accuracy, c.conversion_loss);
  }
  if (!out.empty()) {
    std::ofstream csv(out);
    if (!csv) throw FormatError("cannot write '" + out + "'");
    WriteAblationCsv(csv, cells);
  }
  return 0;
}

int CmdSweepBw(const GlobalOptions& g, const std::vector<int>& widths,
               const std::string& model, const std::string& out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  Dataset train, test;
  LoadExperimentData(cfg, &train, &test);
  Network ann;
  if (!model.empty()) {
    const ModelFile file = LoadModel(model);
    if (file.stage != ModelStage::kAnn) {
      throw FormatError("sweep-bw needs an unconverted model");
    }
    ann = file.ann;
  } else {
    ann = Train(BuildNetwork(train.shape, ParseLayerDescs(cfg.layers),
                             train.num_classes, cfg.batchnorm, cfg.kernel,
                             cfg.seed),
                train, &test, cfg.schedule, cfg.method)
              .network;
  }
  const double ann_acc = Evaluate(ann, test, FinalPlan(cfg.schedule, cfg.method));
  const auto pts = SweepBitWidth(ann, cfg, train, test, widths);
  std::printf("ann_accuracy=%.4f\n%4s %9s\n", ann_acc, "bw", "snn");
  for (const BitWidthPoint& p : pts) {
    std::printf("%4d %9.2f\n", p.bw, p.snn_accuracy);
  }
  if (!out.empty()) {
    std::ofstream csv(out);
    if (!csv) throw FormatError("cannot write '" + out + "'");
    WriteBitWidthCsv(csv, pts);
  }
  return 0;
}

void PrintModel(const ModelFile& f) {
  const bool snn = f.stage == ModelStage::kSnn;
  const KernelParams& k = snn ? f.snn.kernel : f.ann.kernel;
  const Shape& in = snn ? f.snn.input_shape : f.ann.input_shape;
  std::printf("stage=%s\nT=%d\ntau=%d\ntheta0=%g\ninput=%dx%dx%d\n",
              snn ? "snn" : "ann", k.T, k.tau, k.theta0, in.channels,
              in.height, in.width);
  const size_t layers = snn ? f.snn.layers.size() : f.ann.layers.size();
  for (size_t l = 0; l < layers; ++l) {
    const LayerKind kind = snn ? f.snn.layers[l].kind : f.ann.layers[l].kind;
    const int out = snn ? f.snn.layers[l].out_features
                        : f.ann.layers[l].out_features;
    std::printf("layer%zu=%s:%d", l, kind == LayerKind::kDense ? "dense" : "conv",
                out);
    if (snn) std::printf(" fsr=%d", f.snn.layers[l].weights.scheme.fsr);
    std::printf("\n");
  }
  if (snn) {
    std::printf("bw=%d\nz_w=%d\noutput_scale=%.17g\nlatency=%d\n", f.snn.bw,
                f.snn.z_w, f.snn.output_scale, f.snn.latency());
  }
  const Provenance& p = f.provenance;
  std::printf("seed=%llu\ndataset_hash=%016llx\nmethod=%s\n",
              (unsigned long long)p.seed, (unsigned long long)p.dataset_hash,
              std::string(CatMethodLabel(p.method)).c_str());
  if (p.has_ann_accuracy) std::printf("ann_accuracy=%.4f\n", p.ann_accuracy);
  std::printf("schedule=%s\n", p.schedule.c_str());
}

int CmdReport(const GlobalOptions& g, const std::string& model) {
  if (!model.empty()) {
    PrintModel(LoadModel(model));
    return 0;
  }
  std::cout << FormatConfig(ResolveConfig(g));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversion aware training and TTFS spiking network simulation"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config,
                 std::string("Config file (default $") + kConfigDirEnv + "/" +
                     kDefaultConfigName + ")");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");

  auto* train = app.add_subcommand("train", "Train an ANN with CAT");
  std::string train_out = "ann.ttfs", train_csv = "train_trace.csv";
  train->add_option("-o,--out", train_out, "Model file")->capture_default_str();
  train->add_option("--epochs-csv", train_csv, "Per-epoch trace")
      ->capture_default_str();

  auto* convert = app.add_subcommand("convert", "Convert an ANN model to an SNN");
  std::string conv_in, conv_out = "snn.ttfs";
  convert->add_option("model", conv_in, "ANN model file")->required();
  convert->add_option("-o,--out", conv_out, "SNN model file")
      ->capture_default_str();

  auto* infer = app.add_subcommand("infer", "Run an SNN over a dataset");
  InferOptions io;
  infer->add_option("model", io.model, "SNN model file")->required();
  infer->add_option("--data", io.data, "Dataset (default: config test set)");
  infer->add_flag("--arch", io.arch, "Add cycle, traffic and energy estimates");
  infer->add_option("--trace", io.trace, "Write one image's spikes as CSV");
  infer->add_option("--trace-image", io.trace_image, "Image index for --trace")
      ->capture_default_str();
  infer->add_flag("--reference", io.reference, "Use the double-precision path");
  infer->add_option("--report", io.report, "Write key=value metrics here");

  auto* ablate = app.add_subcommand("ablate", "Method x (T, tau) grid");
  std::string ablate_out;
  ablate->add_option("-o,--out", ablate_out, "CSV output");

  auto* sweep = app.add_subcommand("sweep-bw", "Weight bit-width sweep");
  std::vector<int> widths = {8, 7, 6, 5, 4, 3};
  std::string sweep_model, sweep_out;
  sweep->add_option("--widths", widths, "Bit widths")->delimiter(',');
  sweep->add_option("--model", sweep_model, "Trained ANN (default: train now)");
  sweep->add_option("-o,--out", sweep_out, "CSV output");

  auto* report = app.add_subcommand("report", "Describe a model or the config");
  std::string report_model;
  report->add_option("model", report_model, "Model file");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  try {
    if (*train) return CmdTrain(g, train_out, train_csv);
    if (*convert) return CmdConvert(g, conv_in, conv_out);
    if (*infer) return CmdInfer(g, io);
    if (*ablate) return CmdAblate(g, ablate_out);
    if (*sweep) return CmdSweepBw(g, widths, sweep_model, sweep_out);
    if (*report) return CmdReport(g, report_model);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
