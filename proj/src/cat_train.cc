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

#include "ttfscat/cat_train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace ttfscat {
namespace {

using kernels::ActivationMode;
using kernels::BatchNormDims;
using kernels::DenseDims;

constexpr double kBnMomentum = 0.1;
constexpr int kEvalBatch = 256;

BatchNormDims BnDims(const LayerSpec& layer, int batch) {
  return {batch, layer.channels(), layer.spatial()};
}

int ArgMax(std::span<const double> v) {
  return int(std::max_element(v.begin(), v.end()) - v.begin());
}

void SgdStep(std::vector<double>& param, const std::vector<double>& grad,
             std::vector<double>& velocity, double lr, double momentum,
             double weight_decay) {
  for (size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] + grad[i] + weight_decay * param[i];
    param[i] -= lr * velocity[i];
  }
}

bool AllFinite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

std::string_view CatMethodLabel(CatMethod m) {
  switch (m) {
    case CatMethod::kClip:
      return "I";
    case CatMethod::kClipInput:
      return "I+II";
    case CatMethod::kFull:
      return "I+II+III";
  }
  return "?";
}

std::string_view CatMethodName(CatMethod m) {
  switch (m) {
    case CatMethod::kClip:
      return "clip";
    case CatMethod::kClipInput:
      return "clip_input";
    case CatMethod::kFull:
      return "full";
  }
  return "?";
}

std::optional<CatMethod> ParseCatMethod(std::string_view name) {
  for (CatMethod m :
       {CatMethod::kClip, CatMethod::kClipInput, CatMethod::kFull}) {
    if (name == CatMethodName(m) || name == CatMethodLabel(m)) return m;
  }
  return std::nullopt;
}

double TrainSchedule::LearningRate(int epoch) const {
  double lr = lr0;
  for (int d : lr_decay_epochs) {
    if (epoch >= d) lr /= 10.0;
  }
  return lr;
}

std::vector<std::string> TrainSchedule::Problems() const {
  std::vector<std::string> p;
  if (total_epochs < 1) p.push_back("train.total_epochs: must be >= 1");
  if (relu_until < 1) p.push_back("train.relu_until: must be > 0");
  if (relu_until >= ttfs_from) {
    p.push_back("train.relu_until: must be < train.ttfs_from");
  }
  if (ttfs_from > total_epochs) {
    p.push_back("train.ttfs_from: must be <= train.total_epochs");
  }
  if (!(lr0 > 0) || !std::isfinite(lr0)) p.push_back("train.lr0: must be > 0");
  if (!(momentum >= 0 && momentum < 1)) {
    p.push_back("train.momentum: must be in [0, 1)");
  }
  if (!(weight_decay >= 0)) p.push_back("train.weight_decay: must be >= 0");
  if (batch_size < 1) p.push_back("train.batch_size: must be >= 1");
  if (!std::is_sorted(lr_decay_epochs.begin(), lr_decay_epochs.end()) ||
      (!lr_decay_epochs.empty() && lr_decay_epochs.front() < 1)) {
    p.push_back("train.lr_decay_epochs: must be ascending and positive");
  }
  if (enforce_lr_condition && ttfs_from < total_epochs &&
      LearningRate(ttfs_from) > lr0 / 1000.0 * (1 + 1e-9)) {
    p.push_back(
        "train.ttfs_from: learning rate must have decayed to <= lr0/1000 "
        "before the TTFS stage");
  }
  return p;
}

void TrainSchedule::Validate() const {
  auto p = Problems();
  if (!p.empty()) throw ConfigError(std::move(p));
}

ActivationPlan PlanForEpoch(const TrainSchedule& s, CatMethod m, int epoch) {
  ActivationPlan plan;
  plan.encode_input = m != CatMethod::kClip;
  if (epoch < s.relu_until) {
    plan.hidden = ActivationKind::kReLU;
  } else if (m == CatMethod::kFull && epoch >= s.ttfs_from) {
    plan.hidden = ActivationKind::kTTFS;
  } else {
    plan.hidden = ActivationKind::kClip;
  }
  return plan;
}

ActivationPlan FinalPlan(const TrainSchedule& s, CatMethod m) {
  return PlanForEpoch(s, m, s.total_epochs - 1);
}

DivergenceError::DivergenceError(int epoch, ActivationKind activation,
                                 const std::string& what)
    : Error("training diverged at epoch " + std::to_string(epoch) + " (" +
            std::string(ActivationName(activation)) + " stage): " + what),
      epoch_(epoch),
      activation_(activation) {}

ForwardResult Forward(const Network& net, std::span<const double> inputs,
                      int batch, const ForwardOptions& opts) {
  TTFSCAT_REQUIRE(batch >= 1 &&
                      inputs.size() == size_t(batch) * net.input_shape.size(),
                  "forward: input size does not match batch x input shape");
  const TtfsCoder coder(net.kernel);
  ForwardResult r;
  r.batch = batch;
  r.layers.resize(net.layers.size());

  std::vector<double> a(inputs.begin(), inputs.end());
  if (opts.plan.encode_input) {
    kernels::Activation(ActivationKind::kTTFS, coder, ActivationMode::kExact,
                        a, a);
  }
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const LayerSpec& layer = net.layers[l];
    LayerCache& c = r.layers[l];
    c.input = std::move(a);
    c.z.resize(size_t(batch) * layer.out_features);
    if (layer.kind == LayerKind::kDense) {
      kernels::DenseForward({batch, layer.in_features, layer.out_features},
                            c.input, layer.weights, layer.bias, c.z);
    } else {
      kernels::Conv2dForward(batch, layer.conv, c.input, layer.weights,
                             layer.bias, c.z);
    }
    if (layer.bn) {
      const BatchNormDims d = BnDims(layer, batch);
      c.y.resize(c.z.size());
      if (opts.mode == PassMode::kTrain) {
        c.xhat.resize(c.z.size());
        c.mean.resize(d.channels);
        c.inv_std.resize(d.channels);
        kernels::BatchNormForwardTrain(d, c.z, layer.bn->gamma, layer.bn->beta,
                                       layer.bn->epsilon, c.xhat, c.y, c.mean,
                                       c.inv_std);
      } else {
        TTFSCAT_REQUIRE(layer.bn->has_statistics,
                        "forward: batch norm has no running statistics");
        kernels::BatchNormInference(d, c.z, *layer.bn, c.y);
      }
    } else {
      c.y = c.z;
    }
    if (!layer.is_output()) {
      a.resize(c.y.size());
      kernels::Activation(opts.plan.hidden, coder, opts.activation_mode, c.y,
                          a);
    } else {
      r.logits = c.y;
    }
  }
  if (!AllFinite(r.logits)) {
    throw DivergenceError(-1, opts.plan.hidden, "non-finite logits");
  }
  return r;
}

ForwardResult Forward(const Network& net, std::span<const double> inputs,
                      int batch, const TrainSchedule& s, CatMethod m,
                      int epoch) {
  return Forward(net, inputs, batch, {PlanForEpoch(s, m, epoch)});
}

double SoftmaxCrossEntropy(std::span<const double> logits, int batch,
                           int classes, std::span<const int> labels,
                           std::vector<double>* dlogits) {
  TTFSCAT_REQUIRE(logits.size() == size_t(batch) * classes &&
                      labels.size() == size_t(batch),
                  "cross entropy: size mismatch");
  if (dlogits) dlogits->assign(logits.size(), 0.0);
  double loss = 0.0;
  for (int b = 0; b < batch; ++b) {
    const double* z = logits.data() + size_t(b) * classes;
    const double zmax = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (int k = 0; k < classes; ++k) sum += std::exp(z[k] - zmax);
    const double log_sum = std::log(sum) + zmax;
    loss += log_sum - z[labels[b]];
    if (dlogits) {
      double* g = dlogits->data() + size_t(b) * classes;
      for (int k = 0; k < classes; ++k) {
        g[k] = (std::exp(z[k] - log_sum) - (k == labels[b] ? 1.0 : 0.0)) /
               batch;
      }
    }
  }
  return loss / batch;
}

std::vector<LayerGrads> Backward(const Network& net, const ForwardResult& fwd,
                                 std::span<const double> dlogits,
                                 const ForwardOptions& opts) {
  const int batch = fwd.batch;
  TTFSCAT_REQUIRE(dlogits.size() == fwd.logits.size(),
                  "backward: dlogits size mismatch");
  const TtfsCoder coder(net.kernel);
  std::vector<LayerGrads> grads(net.layers.size());
  std::vector<double> upstream(dlogits.begin(), dlogits.end());
  std::vector<double> dy;
  for (size_t li = net.layers.size(); li-- > 0;) {
    const LayerSpec& layer = net.layers[li];
    const LayerCache& c = fwd.layers[li];
    LayerGrads& g = grads[li];

    if (!layer.is_output()) {
      dy.resize(upstream.size());
      kernels::ActivationBackward(opts.plan.hidden, coder, c.y, upstream, dy);
    } else {
      dy = upstream;
    }

    std::vector<double> dz;
    if (layer.bn) {
      TTFSCAT_REQUIRE(opts.mode == PassMode::kTrain && !c.xhat.empty(),
                      "backward through batch norm needs a train-mode pass");
      const BatchNormDims d = BnDims(layer, batch);
      dz.resize(dy.size());
      g.gamma.resize(d.channels);
      g.beta.resize(d.channels);
      kernels::BatchNormBackward(d, dy, c.xhat, layer.bn->gamma, c.inv_std, dz,
                                 g.gamma, g.beta);
    } else {
      dz = std::move(dy);
    }

    g.weights.resize(layer.weights.size());
    g.bias.resize(layer.bias.size());
    const bool need_data = li > 0;
    std::vector<double> din(need_data ? size_t(batch) * layer.in_features : 0);
    if (layer.kind == LayerKind::kDense) {
      const DenseDims d{batch, layer.in_features, layer.out_features};
      kernels::DenseBackwardParams(d, c.input, dz, g.weights, g.bias);
      if (need_data) kernels::DenseBackwardData(d, dz, layer.weights, din);
    } else {
      kernels::Conv2dBackwardParams(batch, layer.conv, c.input, dz, g.weights,
                                    g.bias);
      if (need_data) {
        kernels::Conv2dBackwardData(batch, layer.conv, dz, layer.weights, din);
      }
    }
    upstream = std::move(din);
  }
  return grads;
}

std::vector<double> ScaledInputs(const Dataset& data, size_t begin,
                                 size_t count, double theta0) {
  const size_t width = data.shape.size();
  std::vector<double> out(data.features.begin() + begin * width,
                          data.features.begin() + (begin + count) * width);
  if (theta0 != 1.0) {
    for (double& v : out) v *= theta0;
  }
  return out;
}

double Evaluate(const Network& net, const Dataset& data,
                const ActivationPlan& plan) {
  TTFSCAT_REQUIRE(data.shape.size() == net.input_shape.size(),
                  "evaluate: dataset shape does not match the network");
  if (data.size() == 0) return 0.0;
  const int classes = net.num_classes();
  size_t correct = 0;
  for (size_t start = 0; start < data.size(); start += kEvalBatch) {
    const int n = int(std::min<size_t>(kEvalBatch, data.size() - start));
    const auto x = ScaledInputs(data, start, n, net.kernel.theta0);
    const ForwardResult r = Forward(net, x, n, {plan});
    for (int b = 0; b < n; ++b) {
      std::span<const double> z(r.logits.data() + size_t(b) * classes,
                                classes);
      if (ArgMax(z) == data.labels[start + b]) ++correct;
    }
  }
  return 100.0 * double(correct) / double(data.size());
}

TrainResult Train(Network net, const Dataset& train, const Dataset* test,
                  const TrainSchedule& s, CatMethod m) {
  s.Validate();
  net.Validate();
  train.Validate();
  TTFSCAT_REQUIRE(train.size() > 0, "train: empty dataset");
  TTFSCAT_REQUIRE(train.shape.size() == net.input_shape.size(),
                  "train: dataset shape does not match the network");
  TTFSCAT_REQUIRE(train.num_classes <= net.num_classes(),
                  "train: more labels than output units");

  const size_t L = net.layers.size();
  std::vector<LayerGrads> velocity(L);
  for (size_t l = 0; l < L; ++l) {
    velocity[l].weights.assign(net.layers[l].weights.size(), 0.0);
    velocity[l].bias.assign(net.layers[l].bias.size(), 0.0);
    if (net.layers[l].bn) {
      velocity[l].gamma.assign(net.layers[l].bn->gamma.size(), 0.0);
      velocity[l].beta.assign(net.layers[l].bn->beta.size(), 0.0);
    }
  }

  std::mt19937_64 rng(s.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t width = train.shape.size();
  const int classes = net.num_classes();
  const double theta0 = net.kernel.theta0;

  TrainResult result;
  for (int epoch = 0; epoch < s.total_epochs; ++epoch) {
    const ActivationPlan plan = PlanForEpoch(s, m, epoch);
    const ForwardOptions opts{plan, PassMode::kTrain};
    const double lr = s.LearningRate(epoch);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    size_t correct = 0;
    std::vector<double> x;
    std::vector<int> y;
    std::vector<double> dlogits;
    for (size_t start = 0; start < order.size(); start += s.batch_size) {
      const int n = int(std::min<size_t>(s.batch_size, order.size() - start));
      x.resize(size_t(n) * width);
      y.resize(n);
      for (int b = 0; b < n; ++b) {
        const auto src = train.sample(order[start + b]);
        for (size_t i = 0; i < width; ++i) x[b * width + i] = src[i] * theta0;
        y[b] = train.labels[order[start + b]];
      }

      ForwardResult fwd;
      try {
        fwd = Forward(net, x, n, opts);
      } catch (const DivergenceError& e) {
        throw DivergenceError(epoch, plan.hidden, "non-finite logits");
      }
      const double loss = SoftmaxCrossEntropy(fwd.logits, n, classes, y,
                                              &dlogits);
      if (!std::isfinite(loss)) {
        throw DivergenceError(epoch, plan.hidden, "non-finite loss");
      }
      loss_sum += loss * n;
      for (int b = 0; b < n; ++b) {
        std::span<const double> z(fwd.logits.data() + size_t(b) * classes,
                                  classes);
        if (ArgMax(z) == y[b]) ++correct;
      }

      const auto grads = Backward(net, fwd, dlogits, opts);
      for (size_t l = 0; l < L; ++l) {
        LayerSpec& layer = net.layers[l];
        SgdStep(layer.weights, grads[l].weights, velocity[l].weights, lr,
                s.momentum, s.weight_decay);
        SgdStep(layer.bias, grads[l].bias, velocity[l].bias, lr, s.momentum,
                s.weight_decay);
        if (layer.bn) {
          BatchNormParams& bn = *layer.bn;
          SgdStep(bn.gamma, grads[l].gamma, velocity[l].gamma, lr, s.momentum,
                  s.weight_decay);
          SgdStep(bn.beta, grads[l].beta, velocity[l].beta, lr, s.momentum,
                  s.weight_decay);
          const double count = double(n) * layer.spatial();
          const LayerCache& c = fwd.layers[l];
          for (int ch = 0; ch < layer.channels(); ++ch) {
            const double var_b =
                1.0 / (c.inv_std[ch] * c.inv_std[ch]) - bn.epsilon;
            const double var_u = count > 1 ? var_b * count / (count - 1) : var_b;
            bn.running_mean[ch] = (1 - kBnMomentum) * bn.running_mean[ch] +
                                  kBnMomentum * c.mean[ch];
            bn.running_var[ch] =
                (1 - kBnMomentum) * bn.running_var[ch] + kBnMomentum * var_u;
          }
          bn.has_statistics = true;
        }
      }
    }
    for (const LayerSpec& layer : net.layers) {
      if (!AllFinite(layer.weights) || !AllFinite(layer.bias)) {
        throw DivergenceError(epoch, plan.hidden, "non-finite weights");
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.activation = plan.hidden;
    rec.input_encoded = plan.encode_input;
    rec.loss = loss_sum / double(train.size());
    rec.train_accuracy = 100.0 * double(correct) / double(train.size());
    if (test) {
      try {
        rec.test_accuracy = Evaluate(net, *test, plan);
      } catch (const DivergenceError&) {
        throw DivergenceError(epoch, plan.hidden, "non-finite logits");
      }
    }
    result.trace.push_back(rec);
  }

  const ActivationPlan final_plan = FinalPlan(s, m);
  for (LayerSpec& layer : net.layers) {
    if (!layer.is_output()) layer.activation = final_plan.hidden;
  }
  result.network = std::move(net);
  return result;
}

void WriteTraceCsv(std::ostream& os, const std::vector<EpochRecord>& trace) {
  os << "epoch,lr,activation,input_encoded,loss,train_acc,test_acc\n";
  const auto old = os.precision(10);
  for (const EpochRecord& r : trace) {
    os << r.epoch << ',' << r.lr << ',' << ActivationName(r.activation) << ','
       << (r.input_encoded ? 1 : 0) << ',' << r.loss << ',' << r.train_accuracy
       << ',' << r.test_accuracy << '\n';
  }
  os.precision(old);
}

}  // namespace ttfscat
