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


// Model container.
//
//   char[8]  "TTFSCAT\0"
//   u16      format version
//   u8       stage (0 = ANN, 1 = SNN)
//   u32      payload size
//   u32      CRC-32 of the payload
//   u8       payload[]
//
// All integers are little-endian and reals are IEEE-754 binary64. The payload
// holds the kernel, the input shape, the provenance block and either the
// real-valued layers (ANN) or the quantization scheme, shift LUT and coded
// layers (SNN). Weight codes are one byte: 0 is zero, bit 7 the sign and the
// low bits fsr - grid_index + 1.

#ifndef TTFSCAT_MODEL_IO_H_
#define TTFSCAT_MODEL_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ttfscat/cat_train.h"
#include "ttfscat/network.h"
#include "ttfscat/snn_model.h"

namespace ttfscat {

enum class ModelStage : std::uint8_t { kAnn = 0, kSnn = 1 };

struct Provenance {
  std::uint64_t seed = 0;
  std::string schedule;  // key=value summary of the training run
  std::uint64_t dataset_hash = 0;
  CatMethod method = CatMethod::kFull;
  bool has_ann_accuracy = false;
  double ann_accuracy = 0;  // percent, test set

  bool operator==(const Provenance&) const = default;
};

struct ModelFile {
  ModelStage stage = ModelStage::kAnn;
  Provenance provenance;
  Network ann;   // stage kAnn
  SnnModel snn;  // stage kSnn
};

std::vector<std::uint8_t> SerializeModel(const ModelFile& file);
// Throws FormatError on a bad header, checksum or payload.
ModelFile ParseModel(std::span<const std::uint8_t> bytes);

void SaveModel(const ModelFile& file, const std::string& path);
ModelFile LoadModel(const std::string& path);

std::uint32_t Crc32(std::span<const std::uint8_t> bytes);

}  // namespace ttfscat

#endif  // TTFSCAT_MODEL_IO_H_
