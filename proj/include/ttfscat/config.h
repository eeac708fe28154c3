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


// Experiment configuration files.
//
// Plain "key = value" lines; '#' starts a comment. Keys are dotted
// ("kernel.T", "train.lr0", "arch.energy.sop_pj"). Unknown keys and bad
// values are collected and reported together. Defaults are the T = 24,
// tau = 4, theta0 = 1, 5-bit, a_w = 2^-1/2 hardware point.

#ifndef TTFSCAT_CONFIG_H_
#define TTFSCAT_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ttfscat/arch_model.h"
#include "ttfscat/cat_train.h"
#include "ttfscat/convert.h"
#include "ttfscat/dataset.h"
#include "ttfscat/ttfs_kernel.h"

namespace ttfscat {

struct DataConfig {
  // "blobs" generates a synthetic set; "file" reads train / test.
  std::string source = "blobs";
  std::string train;
  std::string test;
  BlobOptions blobs;
  int test_every = 4;  // blobs: every n-th sample is held out
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  KernelParams kernel;
  ConvertOptions quant;
  TrainSchedule schedule;
  CatMethod method = CatMethod::kFull;
  std::string layers = "dense:32";
  bool batchnorm = false;
  DataConfig data;
  ArchConfig arch;

  std::vector<std::string> Problems() const;
  // Throws ConfigError listing Problems().
  void Validate() const;
};

// Applies the text on top of `base`. Throws ConfigError naming every
// unknown key, malformed line and bad value; the result is validated.
ExperimentConfig ParseConfig(std::string_view text,
                             const ExperimentConfig& base = {});
// Relative data paths set by the file are taken from the file's directory.
ExperimentConfig LoadConfig(const std::string& path,
                            const ExperimentConfig& base = {});

// Every key with its current value, one per line. ParseConfig reads it back.
std::string FormatConfig(const ExperimentConfig& cfg);

// Short key=value summary stored with trained models.
std::string ScheduleSummary(const ExperimentConfig& cfg);

// Train and test sets named by cfg.data.
void LoadExperimentData(const ExperimentConfig& cfg, Dataset* train,
                        Dataset* test);

}  // namespace ttfscat

#endif  // TTFSCAT_CONFIG_H_
