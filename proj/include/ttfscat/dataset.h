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

// Labeled sample sets. Features are kept normalized to [0, 1]; consumers scale
// them to [0, theta0].
//
// Binary layout (.tds, little-endian):
//   char[8]  "TTFSDATA"
//   u32      version (1), count, channels, height, width, num_classes, 0
//   u8       features[count * channels * height * width]   (0..255 -> 0..1)
//   u8       labels[count]
//
// CSV layout: one sample per line, "label,f0,f1,...", features in [0, 1].

#ifndef TTFSCAT_DATASET_H_
#define TTFSCAT_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ttfscat/network.h"

namespace ttfscat {

struct Dataset {
  Shape shape;
  int num_classes = 0;
  std::vector<double> features;  // [count][shape.size()], in [0, 1]
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  std::span<const double> sample(size_t i) const {
    return {features.data() + i * shape.size(), size_t(shape.size())};
  }
  // Throws ContractViolation on inconsistent sizes or out-of-range values.
  void Validate() const;
  // First `count` samples (or all if count == 0 or larger than size()).
  Dataset Head(size_t count) const;
};

Dataset LoadDataset(const std::string& path);  // .csv or binary
Dataset LoadBinaryDataset(const std::string& path);
Dataset LoadCsvDataset(const std::string& path);
void SaveBinaryDataset(const Dataset& data, const std::string& path);

struct BlobOptions {
  int num_classes = 4;
  int features = 16;
  int samples_per_class = 200;
  double spread = 0.12;
  std::uint64_t seed = 7;
};

// Gaussian clusters with centers drawn in [0.2, 0.8]^features, clipped to
// [0, 1].
Dataset MakeBlobs(const BlobOptions& opts);

// Two-class XOR layout in 2-D: class 0 around (0.2, 0.2) and (0.8, 0.8),
// class 1 around (0.2, 0.8) and (0.8, 0.2).
Dataset MakeXorBlobs(int samples_per_cluster, double spread,
                     std::uint64_t seed);

// Deterministic split: every `test_every`-th sample of each class goes to the
// test set.
void SplitDataset(const Dataset& all, int test_every, Dataset* train,
                  Dataset* test);

// FNV-1a over shape, labels and 8-bit features.
std::uint64_t DatasetHash(const Dataset& data);

}  // namespace ttfscat

#endif  // TTFSCAT_DATASET_H_
