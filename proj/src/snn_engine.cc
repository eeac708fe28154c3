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


#include "ttfscat/snn_engine.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ttfscat/cat_train.h"
#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

// Calls fn(target, weight_index) for every synapse leaving input neuron i.
template <typename Fn>
void ForEachSynapse(const SnnLayer& layer, int i, Fn&& fn) {
  if (layer.kind == LayerKind::kDense) {
    for (int j = 0; j < layer.out_features; ++j) {
      fn(j, size_t(j) * layer.in_features + i);
    }
    return;
  }
  const Conv2dGeometry& g = layer.conv;
  const int plane = g.in_height * g.in_width;
  const int c = i / plane;
  const int y = (i % plane) / g.in_width;
  const int x = i % g.in_width;
  const int oh = g.out_height();
  const int ow = g.out_width();
  for (int oc = 0; oc < g.out_channels; ++oc) {
    for (int ky = 0; ky < g.kernel; ++ky) {
      const int ny = y + g.padding - ky;
      if (ny < 0 || ny % g.stride) continue;
      const int oy = ny / g.stride;
      if (oy >= oh) continue;
      for (int kx = 0; kx < g.kernel; ++kx) {
        const int nx = x + g.padding - kx;
        if (nx < 0 || nx % g.stride) continue;
        const int ox = nx / g.stride;
        if (ox >= ow) continue;
        fn((oc * oh + oy) * ow + ox,
           ((size_t(oc) * g.in_channels + c) * g.kernel + ky) * g.kernel + kx);
      }
    }
  }
}

void CheckSpikes(std::span<const SpikeEvent> spikes, int fan_in,
                 const KernelParams& k, const LayerPhaseWindow& input) {
  std::vector<char> seen(fan_in, 0);
  int last = input.t_ref;
  for (const SpikeEvent& s : spikes) {
    TTFSCAT_REQUIRE(s.neuron_id >= 0 && s.neuron_id < fan_in,
                    "spike from a neuron outside the layer");
    TTFSCAT_REQUIRE(s.timestep >= last, "input spikes are not time-sorted");
    TTFSCAT_REQUIRE(s.timestep - input.t_ref <= k.T,
                    "spike outside the input fire window");
    TTFSCAT_REQUIRE(!seen[s.neuron_id],
                    "neuron " + std::to_string(s.neuron_id) +
                        " spiked twice in one window");
    seen[s.neuron_id] = 1;
    last = s.timestep;
  }
}

void Finish(VmemState& v) {
  if (v.precision == Precision::kFixedPoint) {
    v.values.resize(v.raw.size());
    for (size_t j = 0; j < v.raw.size(); ++j) v.values[j] = FixedToDouble(v.raw[j]);
  }
}

int ArgMax(const std::vector<double>& v) {
  return int(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::vector<SpikeEvent> EncodeInput(std::span<const double> image,
                                    const KernelParams& k) {
  const TtfsCoder coder(k);
  std::vector<std::vector<int>> buckets(k.T + 1);
  for (size_t i = 0; i < image.size(); ++i) {
    if (auto dt = coder.SpikeTime(image[i])) buckets[*dt].push_back(int(i));
  }
  std::vector<SpikeEvent> out;
  for (int dt = 0; dt <= k.T; ++dt) {
    for (int id : buckets[dt]) out.push_back({id, dt});
  }
  return out;
}

VmemState IntegrateLayer(std::span<const SpikeEvent> spikes_in,
                         const SnnLayer& layer, const KernelParams& k,
                         const ShiftLut& lut, const LayerPhaseWindow& input,
                         Precision precision) {
  CheckSpikes(spikes_in, layer.in_features, k, input);
  const LogQuantScheme& scheme = layer.weights.scheme;
  VmemState v;
  v.precision = precision;
  const int spatial = layer.spatial();
  if (precision == Precision::kFixedPoint) {
    v.raw.assign(layer.out_features, 0);
    for (const SpikeEvent& s : spikes_in) {
      const int dt = s.timestep - input.t_ref;
      ForEachSynapse(layer, s.neuron_id, [&](int j, size_t wi) {
        const FixedProduct p =
            LogMultiply(layer.weights.codes[wi], dt, k, scheme, lut);
        bool sat = p.saturated;
        v.raw[j] = SaturatingAdd(v.raw[j], p.raw, &sat);
        v.saturation_count += sat;
      });
    }
    for (int j = 0; j < layer.out_features; ++j) {
      bool sat = false;
      const std::int64_t b = DoubleToFixed(layer.bias[j / spatial], &sat);
      v.raw[j] = SaturatingAdd(v.raw[j], b, &sat);
      v.saturation_count += sat;
    }
    Finish(v);
  } else {
    v.values.assign(layer.out_features, 0.0);
    for (const SpikeEvent& s : spikes_in) {
      const double kv = KernelValue(k, s.timestep - input.t_ref);
      ForEachSynapse(layer, s.neuron_id, [&](int j, size_t wi) {
        v.values[j] += Dequantize(layer.weights.codes[wi], scheme) * kv;
      });
    }
    for (int j = 0; j < layer.out_features; ++j) {
      v.values[j] += layer.bias[j / spatial];
    }
  }
  return v;
}

std::vector<SpikeEvent> EncodeSpikes(const VmemState& vmem,
                                     const KernelParams& k,
                                     const LayerPhaseWindow& window,
                                     EncoderLog* log) {
  const TtfsCoder coder(k);
  const auto thr = coder.thresholds();
  const bool fixed = vmem.precision == Precision::kFixedPoint;
  const size_t n = fixed ? vmem.raw.size() : vmem.values.size();

  // Work on a scaled integer copy in the fixed path so the comparison is the
  // one the hardware makes.
  std::vector<std::int64_t> raw;
  std::vector<std::int64_t> thr_raw;
  std::vector<double> val;
  size_t live = 0;
  if (fixed) {
    raw.resize(n);
    for (size_t i = 0; i < n; ++i) {
      raw[i] = std::max<std::int64_t>(vmem.raw[i], 0);
      live += raw[i] != 0;
    }
    thr_raw.resize(thr.size());
    for (size_t d = 0; d < thr.size(); ++d) {
      thr_raw[d] = std::int64_t(std::ceil(std::ldexp(thr[d], kAccFracBits)));
    }
  } else {
    val.resize(n);
    for (size_t i = 0; i < n; ++i) {
      val[i] = std::max(vmem.values[i], 0.0);
      live += val[i] != 0;
    }
  }

  std::vector<SpikeEvent> out;
  int steps = 0;
  for (int dt = 0; dt <= k.T && live > 0; ++dt) {
    ++steps;
    for (size_t i = 0; i < n; ++i) {
      const bool fire = fixed ? (raw[i] != 0 && raw[i] >= thr_raw[dt])
                              : (val[i] != 0 && val[i] >= thr[dt]);
      if (!fire) continue;
      out.push_back({int(i), window.t_ref + dt});
      if (fixed) {
        raw[i] = 0;
      } else {
        val[i] = 0;
      }
      --live;
    }
  }
  if (log) {
    log->emitted = std::int64_t(out.size());
    log->threshold_steps = steps;
  }
  return out;
}

SnnEngine::SnnEngine(const SnnModel& model, Precision precision)
    : model_(model), precision_(precision) {
  model_.Validate();
  const KernelParams& k = model_.kernel;
  if (precision_ == Precision::kFixedPoint) {
    lut_ = BuildLut(k, model_.BaseScheme());
  }
  for (int dt = 0; dt <= k.T; ++dt) kernel_.push_back(KernelValue(k, dt));
  for (const SnnLayer& layer : model_.layers) {
    Prepared p;
    p.offsets.reserve(layer.in_features + 1);
    p.offsets.push_back(0);
    for (int i = 0; i < layer.in_features; ++i) {
      ForEachSynapse(layer, i, [&](int j, size_t wi) {
        const QuantizedWeight q = layer.weights.codes[wi];
        if (q.is_zero()) return;
        Synapse s{j, q.sign, 0, Dequantize(q, layer.weights.scheme)};
        if (precision_ == Precision::kFixedPoint) {
          s.exponent = WeightExponentNumerator(q.grid_index,
                                               layer.weights.scheme,
                                               lut_.frac_grid);
        }
        p.synapses.push_back(s);
      });
      p.offsets.push_back(p.synapses.size());
    }
    const int spatial = layer.spatial();
    for (int j = 0; j < layer.out_features; ++j) {
      const double b = layer.bias[j / spatial];
      p.bias.push_back(b);
      bool sat = false;
      p.bias_raw.push_back(DoubleToFixed(b, &sat));
      TTFSCAT_REQUIRE(!sat || precision_ == Precision::kReference,
                      "bias outside the accumulator range");
    }
    layers_.push_back(std::move(p));
  }
}

int SnnEngine::FanOut(int layer, int neuron) const {
  int n = 0;
  ForEachSynapse(model_.layers[layer], neuron, [&](int, size_t) { ++n; });
  return n;
}

VmemState SnnEngine::Integrate(int l, std::span<const SpikeEvent> spikes,
                               const LayerPhaseWindow& input) const {
  const SnnLayer& layer = model_.layers[l];
  const Prepared& p = layers_[l];
  const KernelParams& k = model_.kernel;
  CheckSpikes(spikes, layer.in_features, k, input);
  VmemState v;
  v.precision = precision_;
  if (precision_ == Precision::kFixedPoint) {
    v.raw.assign(layer.out_features, 0);
    const int g = lut_.frac_grid;
    for (const SpikeEvent& s : spikes) {
      const std::int64_t spike_exp =
          SpikeExponentNumerator(s.timestep - input.t_ref, k, g);
      for (size_t e = p.offsets[s.neuron_id]; e < p.offsets[s.neuron_id + 1];
           ++e) {
        const Synapse& syn = p.synapses[e];
        const FixedProduct prod =
            ShiftProduct(syn.sign, syn.exponent + spike_exp, lut_);
        bool sat = prod.saturated;
        v.raw[syn.target] = SaturatingAdd(v.raw[syn.target], prod.raw, &sat);
        v.saturation_count += sat;
      }
    }
    for (int j = 0; j < layer.out_features; ++j) {
      bool sat = false;
      v.raw[j] = SaturatingAdd(v.raw[j], p.bias_raw[j], &sat);
      v.saturation_count += sat;
    }
    Finish(v);
  } else {
    v.values.assign(layer.out_features, 0.0);
    for (const SpikeEvent& s : spikes) {
      const double kv = kernel_[s.timestep - input.t_ref];
      for (size_t e = p.offsets[s.neuron_id]; e < p.offsets[s.neuron_id + 1];
           ++e) {
        v.values[p.synapses[e].target] += p.synapses[e].weight * kv;
      }
    }
    for (int j = 0; j < layer.out_features; ++j) v.values[j] += p.bias[j];
  }
  return v;
}

RunResult SnnEngine::Run(std::span<const double> image) const {
  const KernelParams& k = model_.kernel;
  TTFSCAT_REQUIRE(image.size() == size_t(model_.input_shape.size()),
                  "image size does not match the model input");
  RunResult r;
  const int windows = model_.fire_windows();
  r.spikes.resize(windows);
  r.encoder.resize(windows);

  {
    VmemState in;
    in.precision = Precision::kReference;
    in.values.assign(image.begin(), image.end());
    r.spikes[0] = EncodeSpikes(in, k, LayerPhaseWindow::For(0, k),
                               &r.encoder[0]);
  }
  for (int l = 0; l < int(model_.layers.size()); ++l) {
    VmemState v = Integrate(l, r.spikes[l], LayerPhaseWindow::For(l, k));
    r.saturation_count += v.saturation_count;
    if (l + 1 < windows) {
      r.spikes[l + 1] =
          EncodeSpikes(v, k, LayerPhaseWindow::For(l + 1, k), &r.encoder[l + 1]);
    } else {
      r.output = std::move(v);
    }
  }
  r.predicted = ArgMax(r.output.values);
  r.latency = windows * k.T;
  return r;
}

RunResult RunNetwork(const SnnModel& model, std::span<const double> image,
                     Precision precision) {
  return SnnEngine(model, precision).Run(image);
}

namespace {

void CheckBatch(const SnnEngine& engine, const Dataset& data) {
  TTFSCAT_REQUIRE(data.shape.size() == engine.model().input_shape.size(),
                  "dataset shape does not match the model input");
}

double Accuracy(const std::vector<RunResult>& runs, const Dataset& data) {
  if (runs.empty()) return 0.0;
  size_t correct = 0;
  for (size_t i = 0; i < runs.size(); ++i) {
    correct += runs[i].predicted == data.labels[i];
  }
  return 100.0 * double(correct) / double(runs.size());
}

}  // namespace

BatchResult RunBatch(const SnnEngine& engine, const Dataset& data) {
  CheckBatch(engine, data);
  BatchResult b;
  b.runs.resize(data.size());
  const double theta0 = engine.model().kernel.theta0;
  const long n = long(data.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    const auto x = ScaledInputs(data, size_t(i), 1, theta0);
    b.runs[i] = engine.Run(x);
  }
  b.accuracy = Accuracy(b.runs, data);
  return b;
}

BatchResult RunBatchSerial(const SnnEngine& engine, const Dataset& data) {
  CheckBatch(engine, data);
  BatchResult b;
  b.runs.reserve(data.size());
  const double theta0 = engine.model().kernel.theta0;
  for (size_t i = 0; i < data.size(); ++i) {
    b.runs.push_back(engine.Run(ScaledInputs(data, i, 1, theta0)));
  }
  b.accuracy = Accuracy(b.runs, data);
  return b;
}

void WriteSpikeTrace(std::ostream& os, const RunResult& run) {
  os << "layer,neuron_id,timestep\n";
  for (size_t w = 0; w < run.spikes.size(); ++w) {
    for (const SpikeEvent& s : run.spikes[w]) {
      os << w << ',' << s.neuron_id << ',' << s.timestep << '\n';
    }
  }
}

}  // namespace ttfscat
