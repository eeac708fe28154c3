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

#include "ttfscat/log_arith.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

constexpr std::int64_t kAccMax = std::numeric_limits<std::int64_t>::max();
constexpr std::int64_t kAccMin = std::numeric_limits<std::int64_t>::min();
// Largest left shift of a 16-bit LUT entry that stays clear of the sign bit.
constexpr int kMaxLeftShift = 62 - 16;

// Absorbs log2 noise on exact grid points, e.g. log2(2^-0.5) * 2.
constexpr double kGridSlack = 1e-9;

}  // namespace

void LogQuantScheme::Validate() const {
  TTFSCAT_REQUIRE(bw >= 2 && bw <= 8, "quant: bw must be in [2, 8]");
  TTFSCAT_REQUIRE(z_w >= -3 && z_w <= 6, "quant: z_w must be in [-3, 6]");
}

double LogQuantScheme::ExponentUnit() const { return std::ldexp(1.0, -z_w); }

double LogQuantScheme::LogBase() const { return std::exp2(-ExponentUnit()); }

double LogQuantScheme::MinMagnitude() const {
  return std::exp2(MinIndex() * ExponentUnit());
}

QuantizedWeight QuantizeWeight(double w, const LogQuantScheme& scheme) {
  TTFSCAT_REQUIRE(std::isfinite(w), "quantize: weight is not finite");
  if (w == 0.0) return {0, scheme.MinIndex()};
  const double mag = std::fabs(w);
  if (scheme.zero_flush && mag < 0.5 * scheme.MinMagnitude()) {
    return {0, scheme.MinIndex()};
  }
  // std::round rounds half away from zero.
  const double code = std::round(std::log2(mag) / scheme.ExponentUnit());
  const double clipped = std::clamp(code, double(scheme.MinIndex()),
                                    double(scheme.MaxIndex()));
  return {static_cast<std::int8_t>(w < 0 ? -1 : 1),
          static_cast<int>(clipped)};
}

QuantizedTensor QuantizeWeights(std::span<const double> weights, int bw,
                                int z_w, bool zero_flush) {
  TTFSCAT_REQUIRE(!weights.empty(), "quantize: empty weight tensor");
  double max_abs = 0.0;
  for (double w : weights) {
    TTFSCAT_REQUIRE(std::isfinite(w), "quantize: weight is not finite");
    max_abs = std::max(max_abs, std::fabs(w));
  }
  TTFSCAT_REQUIRE(max_abs > 0.0,
                  "quantize: all-zero tensor has no full-scale range");

  QuantizedTensor out;
  out.scheme.bw = bw;
  out.scheme.z_w = z_w;
  out.scheme.zero_flush = zero_flush;
  out.scheme.Validate();
  out.scheme.fsr = static_cast<int>(
      std::ceil(std::log2(max_abs) / out.scheme.ExponentUnit() - kGridSlack));
  out.codes.reserve(weights.size());
  for (double w : weights) out.codes.push_back(QuantizeWeight(w, out.scheme));
  return out;
}

double Dequantize(QuantizedWeight q, const LogQuantScheme& scheme) {
  if (q.is_zero()) return 0.0;
  return q.sign * std::exp2(q.grid_index * scheme.ExponentUnit());
}

std::vector<double> Dequantize(const QuantizedTensor& t) {
  std::vector<double> out;
  out.reserve(t.codes.size());
  for (const auto& q : t.codes) out.push_back(Dequantize(q, t.scheme));
  return out;
}

double ShiftLut::Entry(int f) const {
  return std::ldexp(static_cast<double>(entries.at(f)), -kLutFracBits);
}

ShiftLut BuildLut(const KernelParams& k, const LogQuantScheme& scheme) {
  k.Validate();
  scheme.Validate();
  TTFSCAT_REQUIRE(k.IsLogCompatible(),
                  "shift LUT needs a base-2 kernel with tau a power of two");
  ShiftLut lut;
  lut.frac_grid = std::max(k.tau, 1 << std::max(scheme.z_w, 0));
  lut.entries.reserve(lut.frac_grid);
  for (int f = 0; f < lut.frac_grid; ++f) {
    const double v = std::exp2(static_cast<double>(f) / lut.frac_grid);
    lut.entries.push_back(
        static_cast<std::uint16_t>(std::lround(std::ldexp(v, kLutFracBits))));
  }
  return lut;
}

ExponentSplit DecomposeExponent(std::int64_t numerator, int frac_grid) {
  TTFSCAT_REQUIRE(frac_grid >= 1, "frac_grid must be positive");
  std::int64_t q = numerator / frac_grid;
  std::int64_t r = numerator % frac_grid;
  if (r < 0) {
    r += frac_grid;
    --q;
  }
  return {q, static_cast<int>(r)};
}

ExponentSplit DecomposeExponent(double p_hat, int frac_grid) {
  TTFSCAT_REQUIRE(std::isfinite(p_hat), "exponent is not finite");
  const double scaled = p_hat * frac_grid;
  const double n = std::round(scaled);
  TTFSCAT_REQUIRE(std::fabs(scaled - n) <= kGridSlack,
                  "exponent is off the LUT grid");
  return DecomposeExponent(static_cast<std::int64_t>(n), frac_grid);
}

std::int64_t WeightExponentNumerator(int grid_index,
                                     const LogQuantScheme& scheme,
                                     int frac_grid) {
  if (scheme.z_w >= 0) {
    const int steps = 1 << scheme.z_w;
    TTFSCAT_REQUIRE(frac_grid % steps == 0,
                    "LUT grid does not cover the weight grid");
    return static_cast<std::int64_t>(grid_index) * (frac_grid / steps);
  }
  return static_cast<std::int64_t>(grid_index) * frac_grid *
         (std::int64_t{1} << -scheme.z_w);
}

std::int64_t SpikeExponentNumerator(int dt, const KernelParams& k,
                                    int frac_grid) {
  TTFSCAT_REQUIRE(frac_grid % k.tau == 0,
                  "LUT grid does not cover the spike-time grid");
  return -static_cast<std::int64_t>(dt) * (frac_grid / k.tau);
}

double FixedProduct::ToDouble() const { return FixedToDouble(raw); }

FixedProduct ShiftProduct(int sign, std::int64_t exponent_numerator,
                          const ShiftLut& lut) {
  if (sign == 0) return {};
  const ExponentSplit split =
      DecomposeExponent(exponent_numerator, lut.frac_grid);
  const std::int64_t entry = lut.entries[split.frac_index];
  const std::int64_t shift = split.int_part + (kAccFracBits - kLutFracBits);
  FixedProduct p;
  if (shift > kMaxLeftShift) {
    p.saturated = true;
    p.raw = sign > 0 ? kAccMax : kAccMin;
    return p;
  }
  std::int64_t mag;
  if (shift >= 0) {
    mag = entry << shift;
  } else if (shift > -62) {
    const int rs = static_cast<int>(-shift);
    mag = (entry + (std::int64_t{1} << (rs - 1))) >> rs;
  } else {
    mag = 0;
  }
  p.raw = sign > 0 ? mag : -mag;
  return p;
}

FixedProduct LogMultiply(QuantizedWeight w, int spike_dt,
                         const KernelParams& k, const LogQuantScheme& scheme,
                         const ShiftLut& lut) {
  TTFSCAT_REQUIRE(k.IsLogCompatible(),
                  "log multiply needs a base-2 kernel with tau a power of two");
  TTFSCAT_REQUIRE(spike_dt >= 0 && spike_dt <= k.T,
                  "spike time outside the fire window");
  if (w.is_zero()) return {};
  TTFSCAT_REQUIRE(
      w.grid_index >= scheme.MinIndex() && w.grid_index <= scheme.MaxIndex(),
      "weight code outside the scheme's clip range");
  const std::int64_t n =
      WeightExponentNumerator(w.grid_index, scheme, lut.frac_grid) +
      SpikeExponentNumerator(spike_dt, k, lut.frac_grid);
  return ShiftProduct(w.sign, n, lut);
}

double FixedToDouble(std::int64_t raw) {
  return std::ldexp(static_cast<double>(raw), -kAccFracBits);
}

std::int64_t DoubleToFixed(double v, bool* saturated) {
  const double scaled = std::ldexp(v, kAccFracBits);
  constexpr double kLimit = 9.2e18;
  if (!std::isfinite(scaled) || std::fabs(scaled) >= kLimit) {
    if (saturated) *saturated = true;
    return (std::isnan(scaled) || scaled < 0) ? kAccMin : kAccMax;
  }
  return std::llround(scaled);
}

std::int64_t SaturatingAdd(std::int64_t a, std::int64_t b, bool* saturated) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    if (saturated) *saturated = true;
    return b > 0 ? kAccMax : kAccMin;
  }
  return out;
}

}  // namespace ttfscat
