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


// Drives the ttfscat binary end to end in a scratch directory.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string output;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "ttfscat_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "quick.conf") << "model.layers = dense:16\n"
                                          "data.blobs.classes = 3\n"
                                          "data.blobs.features = 10\n"
                                          "data.blobs.per_class = 60\n"
                                          "train.total_epochs = 12\n"
                                          "train.relu_until = 2\n"
                                          "train.ttfs_from = 10\n"
                                          "train.lr_decay_epochs = 6,8,10\n";
    std::ofstream(dir_ / "broken.conf") << "kernel.T = 24\n"
                                           "kernel.tua = 4\n"
                                           "train.ttfs_from = 99\n";
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static Outcome Run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" TTFSCAT_CLI "' " +
                            args + " 2>&1";
    Outcome o;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return o;
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe)) o.output += buf.data();
    const int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
  }

  static fs::path dir_;
};

fs::path Cli::dir_;

TEST_F(Cli, TrainConvertInferReport) {
  Outcome o = Run("--config quick.conf train -o ann.ttfs --epochs-csv trace.csv");
  ASSERT_EQ(o.status, 0) << o.output;
  EXPECT_TRUE(fs::exists(dir_ / "ann.ttfs"));
  std::ifstream csv(dir_ / "trace.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "epoch,lr,activation,input_encoded,loss,train_acc,test_acc");

  o = Run("--config quick.conf convert ann.ttfs -o snn.ttfs");
  ASSERT_EQ(o.status, 0) << o.output;

  o = Run("--config quick.conf infer snn.ttfs --arch --trace spikes.csv "
          "--report metrics.txt");
  ASSERT_EQ(o.status, 0) << o.output;
  EXPECT_NE(o.output.find("energy_uj"), std::string::npos) << o.output;
  EXPECT_NE(o.output.find("latency"), std::string::npos) << o.output;
  std::ifstream metrics(dir_ / "metrics.txt");
  std::string line;
  std::getline(metrics, line);
  EXPECT_EQ(line.rfind("images=", 0), 0u) << line;
  std::ifstream spikes(dir_ / "spikes.csv");
  std::getline(spikes, header);
  EXPECT_EQ(header, "layer,neuron_id,timestep");

  o = Run("--config quick.conf report snn.ttfs");
  EXPECT_EQ(o.status, 0) << o.output;

  o = Run("--config quick.conf convert snn.ttfs -o again.ttfs");
  EXPECT_EQ(o.status, 1) << o.output;
}

TEST_F(Cli, ConfigErrorsListEveryProblem) {
  const Outcome o = Run("--config broken.conf report");
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.output.find("kernel.tua"), std::string::npos) << o.output;
  EXPECT_NE(o.output.find("train.ttfs_from"), std::string::npos) << o.output;
}

TEST_F(Cli, MissingModelFails) {
  const Outcome o = Run("--config quick.conf infer nowhere.ttfs");
  EXPECT_EQ(o.status, 1) << o.output;
}

}  // namespace
