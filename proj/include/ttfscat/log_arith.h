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

// Logarithmic weight quantization and the multiplier-free synaptic product.
//
// Weights live on the grid sign * 2^(grid_index * 2^-z_w). A spike at dt
// carries 2^(-dt/tau). When tau is a power of two both exponents are
// multiples of 1/frac_grid, so a product is 2^(n / frac_grid) for an integer
// n and evaluates as LUT[n mod frac_grid] shifted by floor(n / frac_grid).

#ifndef TTFSCAT_LOG_ARITH_H_
#define TTFSCAT_LOG_ARITH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ttfscat/ttfs_kernel.h"

namespace ttfscat {

// LUT entries are unsigned Q1.15.
inline constexpr int kLutFracBits = 15;
// Membrane accumulators are signed 64-bit Q31.32, saturating.
inline constexpr int kAccFracBits = 32;

struct LogQuantScheme {
  int bw = 5;      // total bits including sign
  int z_w = 1;     // log2(a_w) = -2^-z_w; z_w = 1 gives a_w = 2^(-1/2)
  int fsr = 0;     // top grid index of the layer
  // Flush weights below half the smallest magnitude to zero instead of
  // clamping them up to it.
  bool zero_flush = false;

  void Validate() const;

  // Octaves per grid step, 2^-z_w.
  double ExponentUnit() const;
  // a_w.
  double LogBase() const;
  // Number of non-zero magnitudes: 2^(bw-1) - 1.
  int NumLevels() const { return (1 << (bw - 1)) - 1; }
  int MinIndex() const { return fsr - NumLevels() + 1; }
  int MaxIndex() const { return fsr; }
  double MinMagnitude() const;

  bool operator==(const LogQuantScheme&) const = default;
};

struct QuantizedWeight {
  std::int8_t sign = 0;  // 0 only for the exact-zero code
  int grid_index = 0;

  bool is_zero() const { return sign == 0; }
  bool operator==(const QuantizedWeight&) const = default;
};

struct QuantizedTensor {
  LogQuantScheme scheme;
  std::vector<QuantizedWeight> codes;
};

// Per-tensor quantization. fsr = ceil(log2(max|w|) / unit), each weight maps
// to round(log2|w| / unit) clipped to [MinIndex, fsr], exact zeros to the zero
// code. Throws ContractViolation on an empty or all-zero tensor.
QuantizedTensor QuantizeWeights(std::span<const double> weights, int bw,
                                int z_w, bool zero_flush = false);

// Quantizes against an already fixed scheme (fsr given).
QuantizedWeight QuantizeWeight(double w, const LogQuantScheme& scheme);

double Dequantize(QuantizedWeight q, const LogQuantScheme& scheme);
std::vector<double> Dequantize(const QuantizedTensor& t);

struct ShiftLut {
  int frac_grid = 1;
  std::vector<std::uint16_t> entries;  // Q1.15 of 2^(f / frac_grid)

  double Entry(int f) const;
  bool operator==(const ShiftLut&) const = default;
};

// Throws ContractViolation if tau is not a power of two or the scheme is bad.
ShiftLut BuildLut(const KernelParams& k, const LogQuantScheme& scheme);

struct ExponentSplit {
  std::int64_t int_part = 0;
  int frac_index = 0;

  bool operator==(const ExponentSplit&) const = default;
};

// Floor split of numerator / frac_grid, so frac_index is in [0, frac_grid).
ExponentSplit DecomposeExponent(std::int64_t numerator, int frac_grid);
// Same for a real exponent; throws ContractViolation if p_hat is off-grid.
ExponentSplit DecomposeExponent(double p_hat, int frac_grid);

// Weight exponent in 1/frac_grid units.
std::int64_t WeightExponentNumerator(int grid_index,
                                     const LogQuantScheme& scheme,
                                     int frac_grid);
// Spike exponent -dt/tau in 1/frac_grid units.
std::int64_t SpikeExponentNumerator(int dt, const KernelParams& k,
                                    int frac_grid);

struct FixedProduct {
  std::int64_t raw = 0;  // Q31.32
  bool saturated = false;

  double ToDouble() const;
};

// sign * LUT[frac] << int_part, in accumulator format. The hot path.
FixedProduct ShiftProduct(int sign, std::int64_t exponent_numerator,
                          const ShiftLut& lut);

// w * 2^(-spike_dt/tau) without a multiplier.
FixedProduct LogMultiply(QuantizedWeight w, int spike_dt,
                         const KernelParams& k, const LogQuantScheme& scheme,
                         const ShiftLut& lut);

double FixedToDouble(std::int64_t raw);
// Round to nearest; flags values outside the accumulator range.
std::int64_t DoubleToFixed(double v, bool* saturated);
std::int64_t SaturatingAdd(std::int64_t a, std::int64_t b, bool* saturated);

}  // namespace ttfscat

#endif  // TTFSCAT_LOG_ARITH_H_
