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

#include "ttfscat/network.h"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "ttfscat/errors.h"

namespace ttfscat {

int LayerSpec::channels() const {
  return kind == LayerKind::kDense ? out_features : conv.out_channels;
}

int LayerSpec::spatial() const {
  return kind == LayerKind::kDense ? 1 : conv.out_height() * conv.out_width();
}

void Network::Validate() const {
  kernel.Validate();
  TTFSCAT_REQUIRE(!layers.empty(), "network has no layers");
  int expected_in = input_shape.size();
  for (size_t l = 0; l < layers.size(); ++l) {
    const LayerSpec& layer = layers[l];
    const std::string where = "layer " + std::to_string(l) + ": ";
    TTFSCAT_REQUIRE(layer.in_features == expected_in,
                    where + "fan-in does not match previous layer");
    if (layer.kind == LayerKind::kConv2d) {
      const Conv2dGeometry& g = layer.conv;
      TTFSCAT_REQUIRE(g.kernel >= 1 && g.stride >= 1 && g.padding >= 0 &&
                          g.out_height() >= 1 && g.out_width() >= 1,
                      where + "bad conv geometry");
      TTFSCAT_REQUIRE(g.input_size() == layer.in_features &&
                          g.output_size() == layer.out_features,
                      where + "conv geometry disagrees with layer sizes");
      TTFSCAT_REQUIRE(layer.weights.size() == size_t(g.weight_count()),
                      where + "weight count mismatch");
    } else {
      TTFSCAT_REQUIRE(
          layer.weights.size() == size_t(layer.in_features) * layer.out_features,
          where + "weight count mismatch");
    }
    TTFSCAT_REQUIRE(layer.bias.size() == size_t(layer.channels()),
                    where + "bias size mismatch");
    for (double w : layer.weights) {
      TTFSCAT_REQUIRE(std::isfinite(w), where + "non-finite weight");
    }
    if (layer.bn) {
      const size_t c = layer.channels();
      TTFSCAT_REQUIRE(layer.bn->gamma.size() == c && layer.bn->beta.size() == c &&
                          layer.bn->running_mean.size() == c &&
                          layer.bn->running_var.size() == c,
                      where + "batch norm size mismatch");
    }
    const bool last = l + 1 == layers.size();
    TTFSCAT_REQUIRE(layer.is_output() == last,
                    where + "exactly the last layer must have no activation");
    expected_in = layer.out_features;
  }
}

std::vector<LayerDesc> ParseLayerDescs(std::string_view text) {
  std::vector<LayerDesc> out;
  auto parse_int = [](std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 0) {
      throw ContractViolation("bad integer in layer list: '" +
                              std::string(s) + "'");
    }
    return v;
  };
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    std::vector<std::string_view> fields;
    size_t f = 0;
    while (true) {
      size_t c = item.find(':', f);
      fields.push_back(item.substr(f, c == std::string_view::npos
                                          ? std::string_view::npos
                                          : c - f));
      if (c == std::string_view::npos) break;
      f = c + 1;
    }
    LayerDesc d;
    if (fields[0] == "dense" && fields.size() == 2) {
      d.kind = LayerKind::kDense;
      d.units = parse_int(fields[1]);
    } else if (fields[0] == "conv" && fields.size() == 5) {
      d.kind = LayerKind::kConv2d;
      d.units = parse_int(fields[1]);
      d.kernel = parse_int(fields[2]);
      d.stride = parse_int(fields[3]);
      d.padding = parse_int(fields[4]);
    } else {
      throw ContractViolation("bad layer description '" + std::string(item) +
                              "' (want dense:N or conv:C:K:S:P)");
    }
    TTFSCAT_REQUIRE(d.units >= 1, "layer needs at least one unit");
    out.push_back(d);
    start = end + 1;
  }
  return out;
}

std::string FormatLayerDescs(const std::vector<LayerDesc>& descs) {
  std::ostringstream os;
  for (size_t i = 0; i < descs.size(); ++i) {
    if (i) os << ',';
    const LayerDesc& d = descs[i];
    if (d.kind == LayerKind::kDense) {
      os << "dense:" << d.units;
    } else {
      os << "conv:" << d.units << ':' << d.kernel << ':' << d.stride << ':'
         << d.padding;
    }
  }
  return os.str();
}

Network BuildNetwork(const Shape& input, const std::vector<LayerDesc>& hidden,
                     int num_classes, bool batchnorm, const KernelParams& k,
                     std::uint64_t seed) {
  TTFSCAT_REQUIRE(num_classes >= 1, "need at least one class");
  std::mt19937_64 rng(seed);
  Network net;
  net.input_shape = input;
  net.kernel = k;

  Shape cur = input;
  bool spatial = true;
  auto init = [&](LayerSpec& layer, int fan_in) {
    const double bound = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : layer.weights) w = dist(rng);
    layer.bias.assign(layer.channels(), 0.0);
  };
  auto add_bn = [&](LayerSpec& layer) {
    if (!batchnorm) return;
    BatchNormParams bn;
    const int c = layer.channels();
    bn.gamma.assign(c, 1.0);
    bn.beta.assign(c, 0.0);
    bn.running_mean.assign(c, 0.0);
    bn.running_var.assign(c, 1.0);
    bn.has_statistics = true;
    layer.bn = std::move(bn);
  };

  for (const LayerDesc& d : hidden) {
    LayerSpec layer;
    layer.activation = ActivationKind::kReLU;
    layer.in_features = cur.size();
    if (d.kind == LayerKind::kConv2d) {
      TTFSCAT_REQUIRE(spatial, "conv layer cannot follow a dense layer");
      layer.kind = LayerKind::kConv2d;
      layer.conv = {cur.channels, cur.height, cur.width, d.units,
                    d.kernel,     d.stride,   d.padding};
      TTFSCAT_REQUIRE(layer.conv.out_height() >= 1 && layer.conv.out_width() >= 1,
                      "conv layer shrinks the feature map to nothing");
      layer.out_features = layer.conv.output_size();
      layer.weights.resize(layer.conv.weight_count());
      init(layer, cur.channels * d.kernel * d.kernel);
      cur = {d.units, layer.conv.out_height(), layer.conv.out_width()};
    } else {
      layer.kind = LayerKind::kDense;
      layer.out_features = d.units;
      layer.weights.resize(size_t(layer.in_features) * d.units);
      init(layer, layer.in_features);
      cur = {d.units, 1, 1};
      spatial = false;
    }
    add_bn(layer);
    net.layers.push_back(std::move(layer));
  }

  LayerSpec out;
  out.kind = LayerKind::kDense;
  out.in_features = cur.size();
  out.out_features = num_classes;
  out.weights.resize(size_t(out.in_features) * num_classes);
  init(out, out.in_features);
  net.layers.push_back(std::move(out));
  net.Validate();
  return net;
}

}  // namespace ttfscat
