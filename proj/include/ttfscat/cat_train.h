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

// Conversion aware training.
//
// Hidden layers run ReLU for the first epochs, then clip(x, theta0, 0), then
// the TTFS activation once the learning rate has decayed. Depending on the
// method the network input also passes through the TTFS activation from the
// first epoch, which simulates presenting the image as spikes:
//
//   kClip       ReLU -> clip                        (no input encoding)
//   kClipInput  ReLU -> clip, input encoded
//   kFull       ReLU -> clip -> TTFS, input encoded
//
// Epochs are numbered from 0.

#ifndef TTFSCAT_CAT_TRAIN_H_
#define TTFSCAT_CAT_TRAIN_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttfscat/dataset.h"
#include "ttfscat/errors.h"
#include "ttfscat/kernels.h"
#include "ttfscat/network.h"

namespace ttfscat {

enum class CatMethod : std::uint8_t { kClip = 0, kClipInput = 1, kFull = 2 };

// "I", "I+II", "I+II+III".
std::string_view CatMethodLabel(CatMethod m);
// "clip", "clip_input", "full".
std::string_view CatMethodName(CatMethod m);
std::optional<CatMethod> ParseCatMethod(std::string_view name);

struct TrainSchedule {
  int total_epochs = 50;
  int relu_until = 5;   // first clip epoch
  int ttfs_from = 43;   // first TTFS epoch; == total_epochs means none
  double lr0 = 0.1;
  std::vector<int> lr_decay_epochs = {20, 30, 40};  // lr /= 10 from each
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int batch_size = 32;
  std::uint64_t seed = 1;
  // Require lr <= lr0 / 1000 at ttfs_from. Switched off only to reproduce the
  // early-switch instability.
  bool enforce_lr_condition = true;

  double LearningRate(int epoch) const;
  // One message per violated invariant; empty when valid.
  std::vector<std::string> Problems() const;
  // Throws ConfigError listing Problems().
  void Validate() const;
};

struct ActivationPlan {
  ActivationKind hidden = ActivationKind::kReLU;
  bool encode_input = false;

  bool operator==(const ActivationPlan&) const = default;
};

ActivationPlan PlanForEpoch(const TrainSchedule& s, CatMethod m, int epoch);
// Plan of the last training epoch; the trained ANN is evaluated with it.
ActivationPlan FinalPlan(const TrainSchedule& s, CatMethod m);

enum class PassMode { kTrain, kInference };

struct ForwardOptions {
  ActivationPlan plan;
  PassMode mode = PassMode::kInference;
  kernels::ActivationMode activation_mode = kernels::ActivationMode::kExact;
};

struct LayerCache {
  std::vector<double> input;  // layer input activations
  std::vector<double> z;      // W x + b
  std::vector<double> xhat;   // batch-normalized z (train mode only)
  std::vector<double> y;      // pre-activation after batch norm
  std::vector<double> mean;
  std::vector<double> inv_std;
};

struct ForwardResult {
  int batch = 0;
  std::vector<double> logits;  // [batch][classes]
  std::vector<LayerCache> layers;
};

// Thrown when a loss or activation stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, ActivationKind activation,
                  const std::string& what);

  int epoch() const { return epoch_; }
  ActivationKind activation() const { return activation_; }

 private:
  int epoch_;
  ActivationKind activation_;
};

// `inputs` is [batch][input size], already scaled to [0, theta0]. Train mode
// uses batch statistics and updates nothing; see Train for running stats.
ForwardResult Forward(const Network& net, std::span<const double> inputs,
                      int batch, const ForwardOptions& opts);
ForwardResult Forward(const Network& net, std::span<const double> inputs,
                      int batch, const TrainSchedule& s, CatMethod m,
                      int epoch);

// Mean softmax cross-entropy. Writes d(loss)/d(logits) when asked.
double SoftmaxCrossEntropy(std::span<const double> logits, int batch,
                           int classes, std::span<const int> labels,
                           std::vector<double>* dlogits);

struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<double> gamma;
  std::vector<double> beta;
};

// Backpropagates dlogits through a cached forward pass. Uses the surrogate
// derivatives: ReLU step, clip window, TTFS straight-through window.
std::vector<LayerGrads> Backward(const Network& net, const ForwardResult& fwd,
                                 std::span<const double> dlogits,
                                 const ForwardOptions& opts);

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  ActivationKind activation = ActivationKind::kReLU;
  bool input_encoded = false;
  double loss = 0;
  double train_accuracy = 0;  // percent, over the epoch's minibatches
  double test_accuracy = 0;   // percent
};

struct TrainResult {
  Network network;
  std::vector<EpochRecord> trace;
};

// Minibatch SGD with momentum and weight decay. Deterministic for a given
// schedule.seed. `test` may be null. Throws DivergenceError.
TrainResult Train(Network net, const Dataset& train, const Dataset* test,
                  const TrainSchedule& s, CatMethod m);

// Percent of samples whose argmax logit equals the label (inference mode).
double Evaluate(const Network& net, const Dataset& data,
                const ActivationPlan& plan);

// Feature vector scaled from [0, 1] to [0, theta0].
std::vector<double> ScaledInputs(const Dataset& data, size_t begin,
                                 size_t count, double theta0);

// "epoch,lr,activation,input_encoded,loss,train_acc,test_acc" rows.
void WriteTraceCsv(std::ostream& os, const std::vector<EpochRecord>& trace);

}  // namespace ttfscat

#endif  // TTFSCAT_CAT_TRAIN_H_
