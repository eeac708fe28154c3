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


#include "ttfscat/model_io.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <string_view>

#include "ttfscat/convert.h"
#include "ttfscat/dataset.h"
#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

ModelFile AnnFile() {
  ModelFile f;
  f.stage = ModelStage::kAnn;
  f.ann = BuildNetwork({1, 6, 6}, ParseLayerDescs("conv:4:3:1:1,dense:8"), 3,
                       true, KernelParams{12, 2}, 4);
  f.ann.layers[0].bn->running_var = {0.5, 1.5, 2.0, 0.25};
  f.provenance.seed = 4;
  f.provenance.schedule = "total_epochs=50 ttfs_from=43";
  f.provenance.dataset_hash = 0x0123456789abcdefULL;
  f.provenance.method = CatMethod::kClipInput;
  return f;
}

ModelFile SnnFile() {
  Dataset cal;
  cal.shape = {1, 6, 6};
  cal.num_classes = 3;
  cal.features.assign(36 * 3, 0.5);
  cal.labels = {0, 1, 2};
  ModelFile f = AnnFile();
  f.stage = ModelStage::kSnn;
  f.snn = Convert(f.ann, cal, {});
  f.provenance.has_ann_accuracy = true;
  f.provenance.ann_accuracy = 91.25;
  return f;
}

TEST(Crc32, CheckValue) {
  const std::string_view s = "123456789";
  EXPECT_EQ(Crc32({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}),
            0xCBF43926u);
}

TEST(ModelIo, AnnRoundTripIsByteIdentical) {
  const auto bytes = SerializeModel(AnnFile());
  const ModelFile back = ParseModel(bytes);
  EXPECT_EQ(back.stage, ModelStage::kAnn);
  EXPECT_EQ(back.provenance, AnnFile().provenance);
  EXPECT_EQ(back.ann.kernel, (KernelParams{12, 2}));
  EXPECT_EQ(back.ann.layers[0].weights, AnnFile().ann.layers[0].weights);
  EXPECT_EQ(back.ann.layers[0].bn->running_var,
            AnnFile().ann.layers[0].bn->running_var);
  EXPECT_EQ(SerializeModel(back), bytes);
}

TEST(ModelIo, SnnRoundTripIsByteIdentical) {
  const ModelFile f = SnnFile();
  const auto bytes = SerializeModel(f);
  const ModelFile back = ParseModel(bytes);
  EXPECT_EQ(back.stage, ModelStage::kSnn);
  ASSERT_EQ(back.snn.layers.size(), f.snn.layers.size());
  for (size_t l = 0; l < f.snn.layers.size(); ++l) {
    EXPECT_EQ(back.snn.layers[l].weights.codes, f.snn.layers[l].weights.codes);
    EXPECT_EQ(back.snn.layers[l].weights.scheme, f.snn.layers[l].weights.scheme);
    EXPECT_EQ(back.snn.layers[l].bias, f.snn.layers[l].bias);
  }
  EXPECT_EQ(back.snn.output_scale, f.snn.output_scale);
  EXPECT_EQ(SerializeModel(back), bytes);
}

TEST(ModelIo, FileRoundTrip) {
  const auto path =
      std::filesystem::temp_directory_path() / "ttfscat_model_io_test.ttfs";
  SaveModel(SnnFile(), path.string());
  EXPECT_EQ(SerializeModel(LoadModel(path.string())), SerializeModel(SnnFile()));
  std::filesystem::remove(path);
  EXPECT_THROW(LoadModel(path.string()), Error);
}

std::string ParseError(std::vector<std::uint8_t> bytes) {
  try {
    ParseModel(bytes);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(ModelIo, DetectsCorruption) {
  const auto good = SerializeModel(SnnFile());
  auto flipped = good;
  flipped[good.size() / 2] ^= 0x10;
  EXPECT_NE(ParseError(flipped).find("checksum"), std::string::npos);

  auto magic = good;
  magic[0] = 'X';
  EXPECT_NE(ParseError(magic), "");

  auto version = good;
  version[8] = 99;
  EXPECT_NE(ParseError(version), "");

  EXPECT_NE(ParseError({good.begin(), good.end() - 5}), "");
  EXPECT_NE(ParseError({good.begin(), good.begin() + 10}), "");
}

}  // namespace
}  // namespace ttfscat
