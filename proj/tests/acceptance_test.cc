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


// Acceptance run. Prints one PASS/FAIL line per criterion.
//
//   acceptance_test [--only N]... [--known-failure N]...
//
// Exits non-zero when a criterion fails that was not named with
// --known-failure. Known failures still print FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ttfscat/arch_model.h"
#include "ttfscat/cat_train.h"
#include "ttfscat/config.h"
#include "ttfscat/convert.h"
#include "ttfscat/dataset.h"
#include "ttfscat/experiments.h"
#include "ttfscat/log_arith.h"
#include "ttfscat/snn_engine.h"
#include "ttfscat/ttfs_kernel.h"

namespace ttfscat {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Brute-force window scan.
std::optional<int> ScanSpikeTime(const KernelParams& k, double u) {
  for (int dt = 0; dt <= k.T; ++dt) {
    if (u >= k.theta0 * std::exp2(-double(dt) / k.tau)) return dt;
  }
  return std::nullopt;
}

Outcome CodingExactness() {
  const KernelParams k;
  SnnLayer layer;
  layer.in_features = 1;
  layer.out_features = 1;
  layer.weights = QuantizeWeights(std::vector<double>{1.0}, 5, 1);
  layer.bias = {0.0};
  const ShiftLut lut = BuildLut(k, layer.weights.scheme);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  int mismatches = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u(rng);
    const std::vector<double> pixel = {x};
    const auto spikes = EncodeInput(pixel, k);
    const VmemState v =
        IntegrateLayer(spikes, layer, k, lut, {0, 0}, Precision::kReference);
    if (v.values[0] != TtfsActivation(k, x)) ++mismatches;
  }
  return {mismatches == 0, Fmt("%d of 100000 differ", mismatches)};
}

Outcome SpikeTimeOracle() {
  int mismatches = 0;
  std::mt19937_64 rng(2);
  for (auto [T, tau] : kAblationSettings) {
    const KernelParams k{T, tau};
    std::uniform_real_distribution<double> u(-0.1, 1.3);
    for (int i = 0; i < 100000; ++i) {
      const double v = u(rng);
      if (SpikeTime(k, v) != ScanSpikeTime(k, v)) ++mismatches;
    }
  }
  return {mismatches == 0, Fmt("%d of 300000 differ", mismatches)};
}

Outcome LogPeExactness() {
  const KernelParams k;
  LogQuantScheme scheme;
  const ShiftLut lut = BuildLut(k, scheme);
  double worst = 0;
  int saturated = 0;
  for (int idx = scheme.MinIndex(); idx <= scheme.MaxIndex(); ++idx) {
    for (int sign : {1, -1}) {
      for (int dt = 0; dt <= 24; ++dt) {
        const double exact = sign * std::exp2(idx / 2.0 - dt / 4.0);
        const FixedProduct p = LogMultiply(
            {static_cast<std::int8_t>(sign), idx}, dt, k, scheme, lut);
        saturated += p.saturated;
        worst = std::max(worst, std::abs(p.ToDouble() - exact) / std::abs(exact));
      }
    }
  }
  return {worst <= 0x1p-14 && saturated == 0,
          Fmt("worst relative error %.3g (bound %.3g), 15 grid values x 2 signs "
              "x 25 dt",
              worst, 0x1p-14)};
}

struct Digits {
  Dataset train, test;
  ExperimentConfig cfg;
};

Digits& DigitsTask() {
  static Digits d = [] {
    Digits d;
    d.train = LoadDataset(TTFSCAT_DATA_DIR "/digits_train.tds");
    d.test = LoadDataset(TTFSCAT_DATA_DIR "/digits_test.tds");
    d.cfg.layers = "dense:64";
    return d;
  }();
  return d;
}

ExperimentConfig Seeded(ExperimentConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.schedule.seed = seed;
  return cfg;
}

// Full CAT at T = 24, tau = 4, seed 1.
const PipelineResult& BaseRun() {
  static PipelineResult r =
      RunPipeline(Seeded(DigitsTask().cfg, 1), DigitsTask().train,
                  DigitsTask().test);
  return r;
}

Outcome AnnSnnEquivalence() {
  const SnnModel& model = BaseRun().snn;
  const Dataset inputs = DigitsTask().train.Head(1000);
  const Network ann = ToNetwork(model);
  const auto logits =
      Forward(ann, ScaledInputs(inputs, 0, inputs.size(), model.kernel.theta0),
              int(inputs.size()), ForwardOptions{{ActivationKind::kTTFS, true}})
          .logits;
  const SnnEngine engine(model, Precision::kFixedPoint);
  const BatchResult batch = RunBatch(engine, inputs);
  const int classes = model.num_classes();
  double worst = 0;
  int over = 0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    for (int c = 0; c < classes; ++c) {
      const double d =
          std::abs(batch.runs[i].output.values[c] - logits[i * classes + c]);
      worst = std::max(worst, d);
      if (d > 0x1p-12) ++over;
    }
  }
  return {over == 0 && inputs.size() == 1000,
          Fmt("%zu inputs, worst |diff| %.3g, %d elements over 2^-12",
              inputs.size(), worst, over)};
}

Outcome ConversionLossTable() {
  const PipelineResult& base = BaseRun();
  const bool within = base.ann_accuracy >= 90.0 &&
                      std::abs(base.conversion_loss) <= 1.0;
  std::string detail = Fmt("T=24 I+II+III: ANN %.2f SNN %.2f loss %+.2f;",
                           base.ann_accuracy, base.snn_accuracy,
                           base.conversion_loss);
  int ordered = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto cells =
        RunAblation(Seeded(DigitsTask().cfg, seed), DigitsTask().train,
                    DigitsTask().test, {{12, 2}});
    std::map<CatMethod, double> loss;
    for (const auto& c : cells) loss[c.method] = std::abs(c.conversion_loss);
    const bool ok = loss[CatMethod::kClip] >= loss[CatMethod::kClipInput] &&
                    loss[CatMethod::kClipInput] >= loss[CatMethod::kFull];
    ordered += ok;
    detail += Fmt(" seed %d |loss| I %.2f I+II %.2f I+II+III %.2f%s;", int(seed),
                  loss[CatMethod::kClip], loss[CatMethod::kClipInput],
                  loss[CatMethod::kFull], ok ? "" : " (order broken)");
  }
  detail += Fmt(" T=12 ordering on %d of 3 seeds", ordered);
  return {within && ordered == 3, detail};
}

Outcome Stability() {
  const int late = DigitsTask().cfg.schedule.ttfs_from;
  const int early = 10;
  int early_ok = 0, late_ok = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ExperimentConfig cfg = Seeded(DigitsTask().cfg, seed);
    const StabilityRun e =
        RunStability(cfg, DigitsTask().train, DigitsTask().test, early);
    const StabilityRun l =
        RunStability(cfg, DigitsTask().train, DigitsTask().test, late);
    const bool eo = e.diverged || e.WorstDrop() >= 20.0;
    const bool lo = !l.diverged && l.Drop() <= 2.0;
    early_ok += eo;
    late_ok += lo;
    const std::string es =
        e.diverged ? "diverged"
                   : Fmt("worst drop %.2f", e.WorstDrop());
    detail += Fmt(" seed %d: switch@%d (lr %g) %s, switch@%d (lr %g) drop %.2f;",
                  int(seed), early, cfg.schedule.LearningRate(early),
                  es.c_str(), late, cfg.schedule.LearningRate(late), l.Drop());
  }
  detail += Fmt(" early switch fails on %d of 3, late switch holds on %d of 3",
                early_ok, late_ok);
  return {early_ok == 3 && late_ok == 3, detail.substr(1)};
}

SnnModel IdentityChain(int layers, const KernelParams& k) {
  SnnModel m;
  m.kernel = k;
  m.input_shape = {2, 1, 1};
  for (int l = 0; l < layers; ++l) {
    SnnLayer layer;
    layer.in_features = 2;
    layer.out_features = 2;
    layer.weights = QuantizeWeights(std::vector<double>{1, 0, 0, 1}, 5, 1);
    layer.bias = {0.0, 0.0};
    m.layers.push_back(layer);
  }
  m.Validate();
  return m;
}

Outcome LatencyLaw() {
  bool ok = true;
  int vgg = 0;
  for (auto [T, tau] : kAblationSettings) {
    for (int layers : {1, 2, 5, 17}) {
      const SnnModel m = IdentityChain(layers, {T, tau});
      const RunResult r = RunNetwork(m, std::vector<double>{1.0, 0.6});
      const int windows = int(r.spikes.size());
      ok &= windows == layers && r.latency == windows * T;
      for (int w = 0; w < windows; ++w) {
        for (const SpikeEvent& s : r.spikes[w]) {
          ok &= s.timestep >= w * T && s.timestep <= w * T + T;
        }
      }
      if (layers == 17 && T == 24) vgg = r.latency;
    }
  }
  return {ok && vgg == 408,
          Fmt("latency = windows x T on 12 chains; 17 windows at T=24 -> %d",
              vgg)};
}

Outcome BitWidthTrend() {
  const auto pts = SweepBitWidth(BaseRun().ann, Seeded(DigitsTask().cfg, 1),
                                 DigitsTask().train, DigitsTask().test,
                                 {8, 5, 3});
  const double a8 = pts[0].snn_accuracy, a5 = pts[1].snn_accuracy,
               a3 = pts[2].snn_accuracy;
  return {std::abs(a5 - a8) <= 1.0 && a3 < a5,
          Fmt("bw=8 %.2f, bw=5 %.2f, bw=3 %.2f", a8, a5, a3)};
}

Outcome Accounting() {
  const SnnModel& model = BaseRun().snn;
  const SnnEngine engine(model, Precision::kFixedPoint);
  const ArchConfig cfg;
  const BatchResult batch = RunBatch(engine, DigitsTask().test.Head(100));
  const RunReport base = BuildReport(engine, batch, &cfg);
  bool ok = base.energy_uj ==
                base.sop_uj + base.sram_uj + base.encoder_uj + base.dram_uj &&
            base.dram_uj == double(base.dram_bits) * 4.0 * 1e-6;
  std::string detail = Fmt("closure and DRAM term %s;", ok ? "exact" : "off");

  auto total = [](const RunReport& r) {
    std::int64_t n = 0;
    for (auto s : r.spikes_per_layer) n += s;
    return n;
  };

  // Inject spikes from silent neurons, a growing share per level.
  RunReport prev;
  bool monotone = true;
  for (int level = 0; level < 10; ++level) {
    BatchResult b = batch;
    for (RunResult& run : b.runs) {
      for (size_t w = 0; w < run.spikes.size(); ++w) {
        const int T = model.kernel.T;
        std::vector<bool> fired(model.layers[w].in_features, false);
        for (const SpikeEvent& s : run.spikes[w]) fired[s.neuron_id] = true;
        std::vector<int> silent;
        for (size_t i = 0; i < fired.size(); ++i) {
          if (!fired[i]) silent.push_back(int(i));
        }
        const size_t add = silent.size() * level / 9;
        for (size_t i = 0; i < add; ++i) {
          run.spikes[w].push_back({silent[i], int(w) * T + T});
        }
        std::stable_sort(run.spikes[w].begin(), run.spikes[w].end(),
                         [](const SpikeEvent& a, const SpikeEvent& c) {
                           return std::pair(a.timestep, a.neuron_id) <
                                  std::pair(c.timestep, c.neuron_id);
                         });
        run.encoder[w].emitted += std::int64_t(add);
      }
    }
    const RunReport r = BuildReport(engine, b, &cfg);
    if (level > 0) {
      monotone &= total(r) > total(prev) && r.energy_uj >= prev.energy_uj &&
                  r.cycles >= prev.cycles && r.total_sops >= prev.total_sops &&
                  r.dram_bits >= prev.dram_bits;
    }
    ok &= r.energy_uj == r.sop_uj + r.sram_uj + r.encoder_uj + r.dram_uj;
    if (level == 9) {
      detail += Fmt(" spikes %lld -> %lld, energy %.4f -> %.4f uJ over 10 levels",
                    (long long)total(base), (long long)total(r), base.energy_uj,
                    r.energy_uj);
    }
    prev = r;
  }
  detail += monotone ? ", monotone" : ", NOT monotone";
  return {ok && monotone, detail};
}

Outcome GradientChecks() {
  const KernelParams k;
  const double edges[] = {0.0, k.theta0, DynamicThreshold(k, k.T)};
  const ForwardOptions base{{}, PassMode::kTrain, kernels::ActivationMode::kRelaxed};
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  int checked = 0, resampled = 0;
  for (ActivationKind kind : {ActivationKind::kClip, ActivationKind::kTTFS}) {
    ForwardOptions opts = base;
    opts.plan.hidden = kind;
    for (int point = 0; point < 100; ++point) {
      const Network net = BuildNetwork({6, 1, 1}, {{LayerKind::kDense, 8}}, 3,
                                       false, k, 1000 + point);
      std::vector<double> x(6);
      const std::vector<int> label = {point % 3};
      ForwardResult fwd;
      while (true) {
        for (double& v : x) v = u(rng);
        fwd = Forward(net, x, 1, opts);
        bool clear = true;
        for (double y : fwd.layers[0].y) {
          for (double e : edges) clear &= std::abs(y - e) > 1e-3;
        }
        if (clear) break;
        ++resampled;
      }
      std::vector<double> dl;
      SoftmaxCrossEntropy(fwd.logits, 1, 3, label, &dl);
      const auto grads = Backward(net, fwd, dl, opts);
      auto loss = [&](const Network& n) {
        return SoftmaxCrossEntropy(Forward(n, x, 1, opts).logits, 1, 3, label,
                                   nullptr);
      };
      Network probe = net;
      for (size_t l = 0; l < net.layers.size(); ++l) {
        for (size_t i = 0; i < net.layers[l].weights.size(); ++i) {
          double& w = probe.layers[l].weights[i];
          const double keep = w;
          const double h = 1e-6;
          w = keep + h;
          const double up = loss(probe);
          w = keep - h;
          const double down = loss(probe);
          w = keep;
          const double numeric = (up - down) / (2 * h);
          const double analytic = grads[l].weights[i];
          const double scale = std::max(std::abs(numeric), std::abs(analytic));
          const double err =
              scale < 1e-7 ? std::abs(numeric - analytic) / 1e-7
                           : std::abs(numeric - analytic) / scale;
          worst = std::max(worst, err);
          ++checked;
        }
      }
    }
  }
  return {worst <= 1e-4,
          Fmt("clip and TTFS, 100 points each, %d weight gradients, worst "
              "relative error %.2g (%d samples redrawn near boundaries)",
              checked, worst, resampled)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace ttfscat

int main(int argc, char** argv) {
  using namespace ttfscat;
  std::set<int> only, known;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const int n = std::atoi(argv[i + 1]);
    if (flag == "--only") {
      only.insert(n);
    } else if (flag == "--known-failure") {
      known.insert(n);
    } else {
      std::fprintf(stderr, "unknown flag %s\n", argv[i]);
      return 2;
    }
  }
  const std::vector<Criterion> criteria = {
      {1, "coding exactness", CodingExactness},
      {2, "spike-time oracle", SpikeTimeOracle},
      {3, "log-PE exactness", LogPeExactness},
      {4, "ANN-SNN equivalence", AnnSnnEquivalence},
      {5, "scaled conversion-loss table", ConversionLossTable},
      {6, "TTFS switch stability", Stability},
      {7, "latency law", LatencyLaw},
      {8, "bit-width trend", BitWidthTrend},
      {9, "energy accounting", Accounting},
      {10, "gradient checks", GradientChecks},
  };
  int unexpected = 0, failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool expected = !o.pass && known.count(c.id);
    std::printf("criterion %2d %s  %s (%.2f s): %s%s\n", c.id,
                o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str(),
                expected ? " [known failure]" : "");
    std::fflush(stdout);
    failed += !o.pass;
    unexpected += !o.pass && !expected;
  }
  std::printf("%d failed, %d unexpected\n", failed, unexpected);
  return unexpected == 0 ? 0 : 1;
}
