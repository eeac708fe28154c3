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

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "byte_io.h"
#include "ttfscat/errors.h"
#include "ttfscat/log_arith.h"

namespace ttfscat {
namespace {

constexpr char kMagic[8] = {'T', 'T', 'F', 'S', 'C', 'A', 'T', '\0'};
constexpr std::uint16_t kVersion = 1;
constexpr size_t kHeaderSize = 8 + 2 + 1 + 4 + 4;
constexpr std::uint8_t kNoActivation = 0xff;

void PutReals(ByteWriter& w, const std::vector<double>& v) {
  w.U32(std::uint32_t(v.size()));
  for (double x : v) w.F64(x);
}

std::vector<double> GetReals(ByteReader& r) {
  const std::uint32_t n = r.U32();
  if (size_t(n) * 8 > r.remaining()) throw FormatError("truncated payload");
  std::vector<double> v(n);
  for (double& x : v) x = r.F64();
  return v;
}

void PutConv(ByteWriter& w, const Conv2dGeometry& g) {
  for (int v : {g.in_channels, g.in_height, g.in_width, g.out_channels,
                g.kernel, g.stride, g.padding}) {
    w.I32(v);
  }
}

Conv2dGeometry GetConv(ByteReader& r) {
  Conv2dGeometry g;
  for (int* v : {&g.in_channels, &g.in_height, &g.in_width, &g.out_channels,
                 &g.kernel, &g.stride, &g.padding}) {
    *v = r.I32();
  }
  return g;
}

LayerKind GetKind(ByteReader& r) {
  const std::uint8_t k = r.U8();
  if (k > 1) throw FormatError("unknown layer kind");
  return LayerKind(k);
}

std::uint8_t EncodeCode(QuantizedWeight q, const LogQuantScheme& s) {
  if (q.is_zero()) return 0;
  const int mag = s.fsr - q.grid_index + 1;
  return std::uint8_t((q.sign < 0 ? 0x80 : 0) | mag);
}

QuantizedWeight DecodeCode(std::uint8_t c, const LogQuantScheme& s) {
  if (c == 0) return {0, s.MinIndex()};
  const int mag = c & 0x7f;
  if (mag < 1 || mag > s.NumLevels()) {
    throw FormatError("weight code outside the quantization range");
  }
  return {std::int8_t((c & 0x80) ? -1 : 1), s.fsr - mag + 1};
}

void PutKernel(ByteWriter& w, const KernelParams& k) {
  w.I32(k.T);
  w.I32(k.tau);
  w.F64(k.theta0);
  w.U8(std::uint8_t(k.base));
}

KernelParams GetKernel(ByteReader& r) {
  KernelParams k;
  k.T = r.I32();
  k.tau = r.I32();
  k.theta0 = r.F64();
  const std::uint8_t base = r.U8();
  if (base > 1) throw FormatError("unknown kernel base");
  k.base = KernelBase(base);
  return k;
}

void PutProvenance(ByteWriter& w, const Provenance& p) {
  w.U64(p.seed);
  w.Str(p.schedule);
  w.U64(p.dataset_hash);
  w.U8(std::uint8_t(p.method));
  w.U8(p.has_ann_accuracy);
  w.F64(p.ann_accuracy);
}

Provenance GetProvenance(ByteReader& r) {
  Provenance p;
  p.seed = r.U64();
  p.schedule = r.Str();
  p.dataset_hash = r.U64();
  const std::uint8_t m = r.U8();
  if (m > 2) throw FormatError("unknown training method");
  p.method = CatMethod(m);
  p.has_ann_accuracy = r.U8() != 0;
  p.ann_accuracy = r.F64();
  return p;
}

void PutAnnLayers(ByteWriter& w, const Network& net) {
  w.U32(std::uint32_t(net.layers.size()));
  for (const LayerSpec& l : net.layers) {
    w.U8(std::uint8_t(l.kind));
    w.I32(l.in_features);
    w.I32(l.out_features);
    PutConv(w, l.conv);
    w.U8(l.activation ? std::uint8_t(*l.activation) : kNoActivation);
    PutReals(w, l.weights);
    PutReals(w, l.bias);
    w.U8(l.bn.has_value());
    if (l.bn) {
      w.F64(l.bn->epsilon);
      w.U8(l.bn->has_statistics);
      PutReals(w, l.bn->gamma);
      PutReals(w, l.bn->beta);
      PutReals(w, l.bn->running_mean);
      PutReals(w, l.bn->running_var);
    }
  }
}

void GetAnnLayers(ByteReader& r, Network& net) {
  const std::uint32_t n = r.U32();
  if (n > r.remaining()) throw FormatError("truncated payload");
  for (std::uint32_t i = 0; i < n; ++i) {
    LayerSpec l;
    l.kind = GetKind(r);
    l.in_features = r.I32();
    l.out_features = r.I32();
    l.conv = GetConv(r);
    const std::uint8_t act = r.U8();
    if (act != kNoActivation) {
      if (act > 2) throw FormatError("unknown activation");
      l.activation = ActivationKind(act);
    }
    l.weights = GetReals(r);
    l.bias = GetReals(r);
    if (r.U8()) {
      BatchNormParams bn;
      bn.epsilon = r.F64();
      bn.has_statistics = r.U8() != 0;
      bn.gamma = GetReals(r);
      bn.beta = GetReals(r);
      bn.running_mean = GetReals(r);
      bn.running_var = GetReals(r);
      l.bn = std::move(bn);
    }
    net.layers.push_back(std::move(l));
  }
}

void PutSnn(ByteWriter& w, const SnnModel& m, const ShiftLut& lut) {
  w.U8(std::uint8_t(m.bw));
  w.I32(m.z_w);
  w.U8(m.zero_flush);
  w.I32(lut.frac_grid);
  w.U32(std::uint32_t(lut.entries.size()));
  for (std::uint16_t e : lut.entries) w.U16(e);
  w.F64(m.output_scale);
  w.U32(std::uint32_t(m.layers.size()));
  for (const SnnLayer& l : m.layers) {
    w.U8(std::uint8_t(l.kind));
    w.I32(l.in_features);
    w.I32(l.out_features);
    PutConv(w, l.conv);
    w.I32(l.weights.scheme.fsr);
    w.U32(std::uint32_t(l.weights.codes.size()));
    for (QuantizedWeight q : l.weights.codes) {
      w.U8(EncodeCode(q, l.weights.scheme));
    }
    PutReals(w, l.bias);
  }
}

void GetSnn(ByteReader& r, SnnModel& m) {
  m.bw = r.U8();
  m.z_w = r.I32();
  m.zero_flush = r.U8() != 0;
  try {
    m.BaseScheme().Validate();
  } catch (const ContractViolation& e) {
    throw FormatError(std::string("bad quantization scheme: ") + e.what());
  }
  ShiftLut lut;
  lut.frac_grid = r.I32();
  const std::uint32_t n = r.U32();
  if (size_t(n) * 2 > r.remaining()) throw FormatError("truncated payload");
  lut.entries.resize(n);
  for (auto& e : lut.entries) e = r.U16();
  if (m.kernel.IsLogCompatible() && !(lut == BuildLut(m.kernel, m.BaseScheme()))) {
    throw FormatError("stored shift LUT does not match the kernel and scheme");
  }
  m.output_scale = r.F64();
  const std::uint32_t layers = r.U32();
  if (layers > r.remaining()) throw FormatError("truncated payload");
  for (std::uint32_t i = 0; i < layers; ++i) {
    SnnLayer l;
    l.kind = GetKind(r);
    l.in_features = r.I32();
    l.out_features = r.I32();
    l.conv = GetConv(r);
    l.weights.scheme = m.BaseScheme();
    l.weights.scheme.fsr = r.I32();
    const std::uint32_t codes = r.U32();
    if (codes > r.remaining()) throw FormatError("truncated payload");
    l.weights.codes.resize(codes);
    for (auto& q : l.weights.codes) q = DecodeCode(r.U8(), l.weights.scheme);
    l.bias = GetReals(r);
    m.layers.push_back(std::move(l));
  }
}

}  // namespace

std::uint32_t Crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  size_t done = 0;
  while (done < bytes.size()) {
    const uInt chunk = uInt(std::min<size_t>(bytes.size() - done, 1u << 30));
    crc = crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return std::uint32_t(crc);
}

std::vector<std::uint8_t> SerializeModel(const ModelFile& file) {
  ByteWriter p;
  const bool snn = file.stage == ModelStage::kSnn;
  if (snn) {
    file.snn.Validate();
  } else {
    file.ann.Validate();
  }
  const KernelParams& k = snn ? file.snn.kernel : file.ann.kernel;
  const Shape& in = snn ? file.snn.input_shape : file.ann.input_shape;
  PutKernel(p, k);
  p.I32(in.channels);
  p.I32(in.height);
  p.I32(in.width);
  PutProvenance(p, file.provenance);
  if (snn) {
    PutSnn(p, file.snn, BuildLut(k, file.snn.BaseScheme()));
  } else {
    PutAnnLayers(p, file.ann);
  }

  ByteWriter out;
  out.Bytes(kMagic, sizeof(kMagic));
  out.U16(kVersion);
  out.U8(std::uint8_t(file.stage));
  out.U32(std::uint32_t(p.bytes().size()));
  out.U32(Crc32(p.bytes()));
  out.Bytes(p.bytes().data(), p.bytes().size());
  return std::move(out.bytes());
}

ModelFile ParseModel(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a ttfscat model file");
  }
  ByteReader h(bytes.subspan(8, kHeaderSize - 8));
  const std::uint16_t version = h.U16();
  if (version != kVersion) {
    throw FormatError("unsupported model version " + std::to_string(version));
  }
  const std::uint8_t stage = h.U8();
  if (stage > 1) throw FormatError("unknown model stage");
  const std::uint32_t size = h.U32();
  const std::uint32_t crc = h.U32();
  if (bytes.size() - kHeaderSize != size) {
    throw FormatError("model payload size mismatch");
  }
  const auto payload = bytes.subspan(kHeaderSize);
  if (Crc32(payload) != crc) throw FormatError("model checksum mismatch");

  ModelFile file;
  file.stage = ModelStage(stage);
  ByteReader r(payload);
  const KernelParams k = GetKernel(r);
  Shape in;
  in.channels = r.I32();
  in.height = r.I32();
  in.width = r.I32();
  file.provenance = GetProvenance(r);
  try {
    if (file.stage == ModelStage::kSnn) {
      file.snn.kernel = k;
      file.snn.input_shape = in;
      GetSnn(r, file.snn);
      file.snn.Validate();
    } else {
      file.ann.kernel = k;
      file.ann.input_shape = in;
      GetAnnLayers(r, file.ann);
      file.ann.Validate();
    }
  } catch (const ContractViolation& e) {
    throw FormatError(std::string("inconsistent model: ") + e.what());
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in model payload");
  return file;
}

void SaveModel(const ModelFile& file, const std::string& path) {
  const auto bytes = SerializeModel(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw FormatError("write failed for '" + path + "'");
}

ModelFile LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return ParseModel(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace ttfscat
