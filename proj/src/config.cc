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


#include "ttfscat/config.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::optional<T> ParseNumber(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> ParseBool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

// Shortest text that reads back to the same double.
std::string Real(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

struct Key {
  std::string name;
  // Returns an error description, empty on success.
  std::function<std::string(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T, typename Ref>
Key NumberKey(std::string name, Ref ref) {
  return {name,
          [ref](ExperimentConfig& c, std::string_view v) -> std::string {
            auto n = ParseNumber<T>(v);
            if (!n) return "not a number";
            ref(c) = *n;
            return {};
          },
          [ref](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return Real(ref(c));
            } else {
              return std::to_string(ref(c));
            }
          }};
}

template <typename Ref>
Key BoolKey(std::string name, Ref ref) {
  return {name,
          [ref](ExperimentConfig& c, std::string_view v) -> std::string {
            auto b = ParseBool(v);
            if (!b) return "not a boolean";
            ref(c) = *b;
            return {};
          },
          [ref](const ExperimentConfig& c) -> std::string {
            return ref(c) ? "true" : "false";
          }};
}

template <typename Ref>
Key StringKey(std::string name, Ref ref) {
  return {name,
          [ref](ExperimentConfig& c, std::string_view v) -> std::string {
            ref(c) = std::string(v);
            return {};
          },
          [ref](const ExperimentConfig& c) {
            return ref(c);
          }};
}

#define TTFSCAT_REF(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back(NumberKey<std::uint64_t>("seed", TTFSCAT_REF(seed)));
    k.push_back(NumberKey<int>("kernel.T", TTFSCAT_REF(kernel.T)));
    k.push_back(NumberKey<int>("kernel.tau", TTFSCAT_REF(kernel.tau)));
    k.push_back(NumberKey<double>("kernel.theta0", TTFSCAT_REF(kernel.theta0)));
    k.push_back(NumberKey<int>("quant.bw", TTFSCAT_REF(quant.bw)));
    k.push_back(NumberKey<int>("quant.z_w", TTFSCAT_REF(quant.z_w)));
    k.push_back(BoolKey("quant.zero_flush", TTFSCAT_REF(quant.zero_flush)));
    k.push_back(NumberKey<size_t>("quant.calibration_size",
                                  TTFSCAT_REF(quant.calibration_size)));
    k.push_back(
        NumberKey<int>("train.total_epochs", TTFSCAT_REF(schedule.total_epochs)));
    k.push_back(
        NumberKey<int>("train.relu_until", TTFSCAT_REF(schedule.relu_until)));
    k.push_back(
        NumberKey<int>("train.ttfs_from", TTFSCAT_REF(schedule.ttfs_from)));
    k.push_back(NumberKey<double>("train.lr0", TTFSCAT_REF(schedule.lr0)));
    k.push_back(
        {"train.lr_decay_epochs",
         [](ExperimentConfig& c, std::string_view v) -> std::string {
           std::vector<int> out;
           while (!v.empty()) {
             const auto comma = v.find(',');
             auto n = ParseNumber<int>(Trim(v.substr(0, comma)));
             if (!n) return "not a comma separated list of epochs";
             out.push_back(*n);
             if (comma == std::string_view::npos) break;
             v.remove_prefix(comma + 1);
           }
           c.schedule.lr_decay_epochs = out;
           return {};
         },
         [](const ExperimentConfig& c) {
           std::string s;
           for (int e : c.schedule.lr_decay_epochs) {
             if (!s.empty()) s += ',';
             s += std::to_string(e);
           }
           return s;
         }});
    k.push_back(
        NumberKey<double>("train.momentum", TTFSCAT_REF(schedule.momentum)));
    k.push_back(NumberKey<double>("train.weight_decay",
                                  TTFSCAT_REF(schedule.weight_decay)));
    k.push_back(
        NumberKey<int>("train.batch_size", TTFSCAT_REF(schedule.batch_size)));
    k.push_back(BoolKey("train.enforce_lr_condition",
                        TTFSCAT_REF(schedule.enforce_lr_condition)));
    k.push_back({"train.method",
                 [](ExperimentConfig& c, std::string_view v) -> std::string {
                   auto m = ParseCatMethod(v);
                   if (!m) return "want clip, clip_input or full";
                   c.method = *m;
                   return {};
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(CatMethodName(c.method));
                 }});
    k.push_back(StringKey("model.layers", TTFSCAT_REF(layers)));
    k.push_back(BoolKey("model.batchnorm", TTFSCAT_REF(batchnorm)));
    k.push_back(StringKey("data.source", TTFSCAT_REF(data.source)));
    k.push_back(StringKey("data.train", TTFSCAT_REF(data.train)));
    k.push_back(StringKey("data.test", TTFSCAT_REF(data.test)));
    k.push_back(NumberKey<int>("data.test_every", TTFSCAT_REF(data.test_every)));
    k.push_back(
        NumberKey<int>("data.blobs.classes", TTFSCAT_REF(data.blobs.num_classes)));
    k.push_back(
        NumberKey<int>("data.blobs.features", TTFSCAT_REF(data.blobs.features)));
    k.push_back(NumberKey<int>("data.blobs.per_class",
                               TTFSCAT_REF(data.blobs.samples_per_class)));
    k.push_back(
        NumberKey<double>("data.blobs.spread", TTFSCAT_REF(data.blobs.spread)));
    k.push_back(
        NumberKey<std::uint64_t>("data.blobs.seed", TTFSCAT_REF(data.blobs.seed)));
    k.push_back(NumberKey<int>("arch.num_pes", TTFSCAT_REF(arch.num_pes)));
    k.push_back(NumberKey<std::int64_t>("arch.input_buffer_bytes",
                                        TTFSCAT_REF(arch.input_buffer_bytes)));
    k.push_back(NumberKey<std::int64_t>("arch.output_buffer_bytes",
                                        TTFSCAT_REF(arch.output_buffer_bytes)));
    k.push_back(NumberKey<std::int64_t>("arch.weight_buffer_bytes",
                                        TTFSCAT_REF(arch.weight_buffer_bytes)));
    k.push_back(NumberKey<double>("arch.dram_pj_per_bit",
                                  TTFSCAT_REF(arch.dram_pj_per_bit)));
    k.push_back(
        NumberKey<double>("arch.frequency_hz", TTFSCAT_REF(arch.frequency_hz)));
    k.push_back(NumberKey<int>("arch.batch_size", TTFSCAT_REF(arch.batch_size)));
    k.push_back(
        NumberKey<int>("arch.spike_id_bits", TTFSCAT_REF(arch.spike_id_bits)));
    k.push_back(
        NumberKey<int>("arch.spike_time_bits", TTFSCAT_REF(arch.spike_time_bits)));
    k.push_back(
        NumberKey<double>("arch.energy.sop_pj", TTFSCAT_REF(arch.energy.sop_pj)));
    k.push_back(NumberKey<double>("arch.energy.sram_read_pj",
                                  TTFSCAT_REF(arch.energy.sram_read_pj)));
    k.push_back(NumberKey<double>("arch.energy.sram_write_pj",
                                  TTFSCAT_REF(arch.energy.sram_write_pj)));
    k.push_back(NumberKey<double>("arch.energy.encoder_step_pj",
                                  TTFSCAT_REF(arch.energy.encoder_step_pj)));
    return k;
  }();
  return keys;
}

#undef TTFSCAT_REF

}  // namespace

std::vector<std::string> ExperimentConfig::Problems() const {
  std::vector<std::string> p;
  if (kernel.T < 1) p.push_back("kernel.T: must be >= 1");
  if (kernel.tau < 1) {
    p.push_back("kernel.tau: must be >= 1");
  } else if (!kernel.IsLogCompatible()) {
    p.push_back("kernel.tau: must be a power of two");
  }
  if (!(kernel.theta0 > 0)) p.push_back("kernel.theta0: must be > 0");
  if (quant.bw < 2 || quant.bw > 8) p.push_back("quant.bw: must be in [2, 8]");
  if (quant.z_w < -3 || quant.z_w > 6) {
    p.push_back("quant.z_w: must be in [-3, 6]");
  }
  auto s = schedule.Problems();
  p.insert(p.end(), s.begin(), s.end());
  try {
    if (ParseLayerDescs(layers).empty()) {
      p.push_back("model.layers: need at least one hidden layer");
    }
  } catch (const ContractViolation& e) {
    p.push_back(std::string("model.layers: ") + e.what());
  }
  if (data.source == "file") {
    if (data.train.empty()) p.push_back("data.train: required when data.source=file");
    if (data.test.empty()) p.push_back("data.test: required when data.source=file");
  } else if (data.source == "blobs") {
    if (data.test_every < 2) p.push_back("data.test_every: must be >= 2");
    if (data.blobs.num_classes < 2) p.push_back("data.blobs.classes: must be >= 2");
    if (data.blobs.features < 1) p.push_back("data.blobs.features: must be >= 1");
    if (data.blobs.samples_per_class < 1) {
      p.push_back("data.blobs.per_class: must be >= 1");
    }
    if (!(data.blobs.spread >= 0)) p.push_back("data.blobs.spread: must be >= 0");
  } else {
    p.push_back("data.source: want blobs or file");
  }
  auto a = arch.Problems();
  p.insert(p.end(), a.begin(), a.end());
  return p;
}

void ExperimentConfig::Validate() const {
  auto p = Problems();
  if (!p.empty()) throw ConfigError(std::move(p));
}

ExperimentConfig ParseConfig(std::string_view text,
                             const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  std::vector<std::string> problems;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": expected key = value");
      continue;
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    const Key* match = nullptr;
    for (const Key& k : Keys()) {
      if (k.name == key) match = &k;
    }
    if (!match) {
      problems.push_back(key + ": unknown key");
      continue;
    }
    if (std::string err = match->set(cfg, value); !err.empty()) {
      problems.push_back(key + ": " + err + " ('" + std::string(value) + "')");
    }
  }
  cfg.schedule.seed = cfg.seed;
  if (problems.empty()) {
    problems = cfg.Problems();
  } else {
    auto more = cfg.Problems();
    problems.insert(problems.end(), more.begin(), more.end());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path,
                            const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = ParseConfig(ss.str(), base);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  auto rebase = [&](std::string& p, const std::string& before) {
    if (p.empty() || p == before || std::filesystem::path(p).is_absolute()) {
      return;
    }
    p = (dir / p).lexically_normal().string();
  };
  rebase(cfg.data.train, base.data.train);
  rebase(cfg.data.test, base.data.test);
  return cfg;
}

std::string FormatConfig(const ExperimentConfig& cfg) {
  std::string out;
  for (const Key& k : Keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::string ScheduleSummary(const ExperimentConfig& cfg) {
  const TrainSchedule& s = cfg.schedule;
  std::ostringstream os;
  os << "method=" << CatMethodName(cfg.method) << " layers=" << cfg.layers
     << " batchnorm=" << (cfg.batchnorm ? 1 : 0) << " T=" << cfg.kernel.T
     << " tau=" << cfg.kernel.tau << " theta0=" << cfg.kernel.theta0
     << " epochs=" << s.total_epochs << " relu_until=" << s.relu_until
     << " ttfs_from=" << s.ttfs_from << " lr0=" << s.lr0
     << " momentum=" << s.momentum << " weight_decay=" << s.weight_decay
     << " batch=" << s.batch_size << " seed=" << s.seed;
  return os.str();
}

void LoadExperimentData(const ExperimentConfig& cfg, Dataset* train,
                        Dataset* test) {
  if (cfg.data.source == "file") {
    *train = LoadDataset(cfg.data.train);
    *test = LoadDataset(cfg.data.test);
    if (!(train->shape == test->shape) ||
        train->num_classes != test->num_classes) {
      throw FormatError("train and test datasets disagree on shape or classes");
    }
    return;
  }
  SplitDataset(MakeBlobs(cfg.data.blobs), cfg.data.test_every, train, test);
}

}  // namespace ttfscat
