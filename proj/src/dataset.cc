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

#include "ttfscat/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "byte_io.h"
#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

constexpr char kMagic[8] = {'T', 'T', 'F', 'S', 'D', 'A', 'T', 'A'};
constexpr std::uint32_t kVersion = 1;
constexpr size_t kHeaderSize = 8 + 7 * 4;

std::uint8_t ToByte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255));
}

}  // namespace

void Dataset::Validate() const {
  TTFSCAT_REQUIRE(shape.size() > 0, "dataset: empty sample shape");
  TTFSCAT_REQUIRE(features.size() == labels.size() * shape.size(),
                  "dataset: feature count does not match labels");
  TTFSCAT_REQUIRE(num_classes >= 1, "dataset: no classes");
  for (int y : labels) {
    TTFSCAT_REQUIRE(y >= 0 && y < num_classes, "dataset: label out of range");
  }
  for (double v : features) {
    TTFSCAT_REQUIRE(v >= 0.0 && v <= 1.0, "dataset: feature outside [0, 1]");
  }
}

Dataset Dataset::Head(size_t count) const {
  if (count == 0 || count >= size()) return *this;
  Dataset out;
  out.shape = shape;
  out.num_classes = num_classes;
  out.labels.assign(labels.begin(), labels.begin() + count);
  out.features.assign(features.begin(),
                      features.begin() + count * shape.size());
  return out;
}

Dataset LoadDataset(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return LoadCsvDataset(path);
  }
  return LoadBinaryDataset(path);
}

Dataset LoadBinaryDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("'" + path + "' is not a ttfscat dataset");
  }
  ByteReader r(std::span<const std::uint8_t>(bytes).subspan(8));
  const std::uint32_t version = r.U32();
  if (version != kVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version));
  }
  const std::uint32_t count = r.U32();
  Dataset d;
  d.shape.channels = int(r.U32());
  d.shape.height = int(r.U32());
  d.shape.width = int(r.U32());
  d.num_classes = int(r.U32());
  r.U32();  // reserved
  const size_t n_feat = size_t(count) * d.shape.size();
  if (bytes.size() != kHeaderSize + n_feat + count) {
    throw FormatError("dataset '" + path + "' has the wrong length");
  }
  d.features.resize(n_feat);
  for (size_t i = 0; i < n_feat; ++i) d.features[i] = r.U8() / 255.0;
  d.labels.resize(count);
  for (auto& y : d.labels) y = r.U8();
  d.Validate();
  return d;
}

void SaveBinaryDataset(const Dataset& data, const std::string& path) {
  data.Validate();
  TTFSCAT_REQUIRE(data.num_classes <= 256, "binary datasets hold <= 256 classes");
  ByteWriter w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kVersion);
  w.U32(std::uint32_t(data.size()));
  w.U32(data.shape.channels);
  w.U32(data.shape.height);
  w.U32(data.shape.width);
  w.U32(data.num_classes);
  w.U32(0);
  for (double v : data.features) w.U8(ToByte(v));
  for (int y : data.labels) w.U8(std::uint8_t(y));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset '" + path + "'");
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            std::streamsize(w.bytes().size()));
}

Dataset LoadCsvDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset '" + path + "'");
  Dataset d;
  std::string line;
  int width = -1;
  int max_label = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0;
      const char* b = cell.data();
      while (b < cell.data() + cell.size() && *b == ' ') ++b;
      auto [p, ec] = std::from_chars(b, cell.data() + cell.size(), v);
      if (ec != std::errc()) {
        throw FormatError(path + ":" + std::to_string(line_no) +
                          ": not a number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() < 2) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": need a label and at least one feature");
    }
    if (width < 0) width = int(row.size()) - 1;
    if (int(row.size()) - 1 != width) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": inconsistent feature count");
    }
    const int label = int(row[0]);
    if (label < 0 || double(label) != row[0]) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": bad label");
    }
    max_label = std::max(max_label, label);
    d.labels.push_back(label);
    d.features.insert(d.features.end(), row.begin() + 1, row.end());
  }
  if (width < 0) throw FormatError("dataset '" + path + "' is empty");
  d.shape = {width, 1, 1};
  d.num_classes = max_label + 1;
  try {
    d.Validate();
  } catch (const ContractViolation& e) {
    throw FormatError(path + ": " + e.what());
  }
  return d;
}

Dataset MakeBlobs(const BlobOptions& opts) {
  TTFSCAT_REQUIRE(opts.num_classes >= 2 && opts.features >= 1 &&
                      opts.samples_per_class >= 1 && opts.spread >= 0,
                  "blobs: bad options");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> center(0.2, 0.8);
  std::normal_distribution<double> noise(0.0, opts.spread);
  std::vector<std::vector<double>> centers(opts.num_classes);
  for (auto& c : centers) {
    c.resize(opts.features);
    for (double& v : c) v = center(rng);
  }
  Dataset d;
  d.shape = {opts.features, 1, 1};
  d.num_classes = opts.num_classes;
  // Interleave classes so any prefix is balanced.
  for (int i = 0; i < opts.samples_per_class; ++i) {
    for (int c = 0; c < opts.num_classes; ++c) {
      for (double mu : centers[c]) {
        d.features.push_back(std::clamp(mu + noise(rng), 0.0, 1.0));
      }
      d.labels.push_back(c);
    }
  }
  return d;
}

Dataset MakeXorBlobs(int samples_per_cluster, double spread,
                     std::uint64_t seed) {
  TTFSCAT_REQUIRE(samples_per_cluster >= 1, "xor blobs: need samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  constexpr double kCenters[4][2] = {
      {0.2, 0.2}, {0.2, 0.8}, {0.8, 0.8}, {0.8, 0.2}};
  Dataset d;
  d.shape = {2, 1, 1};
  d.num_classes = 2;
  for (int i = 0; i < samples_per_cluster; ++i) {
    for (int c = 0; c < 4; ++c) {
      for (double mu : kCenters[c]) {
        d.features.push_back(std::clamp(mu + noise(rng), 0.0, 1.0));
      }
      d.labels.push_back(c % 2);
    }
  }
  return d;
}

void SplitDataset(const Dataset& all, int test_every, Dataset* train,
                  Dataset* test) {
  TTFSCAT_REQUIRE(test_every >= 2, "split: test_every must be >= 2");
  *train = Dataset{all.shape, all.num_classes, {}, {}};
  *test = Dataset{all.shape, all.num_classes, {}, {}};
  std::vector<int> seen(all.num_classes, 0);
  for (size_t i = 0; i < all.size(); ++i) {
    const int nth = seen[all.labels[i]]++;
    Dataset* dst = (nth % test_every == test_every - 1) ? test : train;
    auto s = all.sample(i);
    dst->features.insert(dst->features.end(), s.begin(), s.end());
    dst->labels.push_back(all.labels[i]);
  }
}

std::uint64_t DatasetHash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  auto mix32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) mix(std::uint8_t(v >> (8 * i)));
  };
  mix32(data.shape.channels);
  mix32(data.shape.height);
  mix32(data.shape.width);
  mix32(data.num_classes);
  for (int y : data.labels) mix32(std::uint32_t(y));
  for (double v : data.features) mix(ToByte(v));
  return h;
}

}  // namespace ttfscat
