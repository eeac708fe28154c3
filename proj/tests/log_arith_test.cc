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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ttfscat/errors.h"

namespace ttfscat {
namespace {

// Nearest grid magnitude in log distance among the scheme's codes, ties to
// the larger magnitude. Independent of QuantizeWeight.
double ScanQuantize(double w, const LogQuantScheme& s) {
  double best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int e = s.MinIndex(); e <= s.MaxIndex(); ++e) {
    const double v = std::exp2(e * s.ExponentUnit());
    const double d = std::fabs(std::log2(std::fabs(w)) - std::log2(v));
    if (d < best_d - 1e-12 || (std::fabs(d - best_d) <= 1e-12 && v > best)) {
      best = v;
      best_d = d;
    }
  }
  return std::copysign(best, w);
}

TEST(QuantizeWeights, Example) {
  const std::vector<double> w = {0.5, -0.7, 0.001};
  const QuantizedTensor q = QuantizeWeights(w, 5, 1);
  EXPECT_EQ(q.scheme.fsr, -1);
  EXPECT_EQ(q.scheme.MinIndex(), -15);
  const auto v = Dequantize(q);
  EXPECT_EQ(v[0], 0.5);
  EXPECT_DOUBLE_EQ(v[1], -std::sqrt(0.5));
  EXPECT_NEAR(v[2], std::exp2(-7.5), 1e-12);
  EXPECT_NEAR(v[2], 0.0055243, 1e-7);
}

TEST(QuantizeWeights, ExactGridPoints) {
  EXPECT_EQ(QuantizeWeights(std::vector<double>{1.0}, 5, 1).scheme.fsr, 0);
  EXPECT_EQ(Dequantize(QuantizeWeights(std::vector<double>{1.0}, 5, 1))[0], 1.0);
  const auto q = QuantizeWeights(std::vector<double>{0.0, 0.25}, 5, 1);
  EXPECT_TRUE(q.codes[0].is_zero());
  EXPECT_EQ(Dequantize(q)[0], 0.0);
  EXPECT_EQ(Dequantize(q)[1], 0.25);
}

TEST(QuantizeWeights, Errors) {
  EXPECT_THROW(QuantizeWeights(std::vector<double>{}, 5, 1), ContractViolation);
  EXPECT_THROW(QuantizeWeights(std::vector<double>{0.0, 0.0}, 5, 1),
               ContractViolation);
  EXPECT_THROW(QuantizeWeights(std::vector<double>{1.0}, 1, 1),
               ContractViolation);
}

TEST(QuantizeWeights, MatchesScanOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int bw : {3, 5, 8}) {
    for (int z_w : {0, 1, 2}) {
      std::vector<double> w(500);
      for (double& x : w) x = u(rng);
      const QuantizedTensor q = QuantizeWeights(w, bw, z_w);
      const auto v = Dequantize(q);
      EXPECT_EQ(q.scheme.NumLevels(), (1 << (bw - 1)) - 1);
      for (size_t i = 0; i < w.size(); ++i) {
        ASSERT_DOUBLE_EQ(v[i], ScanQuantize(w[i], q.scheme))
            << "w=" << w[i] << " bw=" << bw << " z_w=" << z_w;
      }
    }
  }
}

TEST(QuantizeWeights, ProjectionAndMonotone) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.001, 1.0);
  std::vector<double> w(300);
  for (double& x : w) x = u(rng);
  std::sort(w.begin(), w.end());
  const QuantizedTensor q = QuantizeWeights(w, 5, 1);
  const auto v = Dequantize(q);
  for (size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(Dequantize(QuantizeWeight(v[i], q.scheme), q.scheme), v[i]);
    if (i) EXPECT_LE(v[i - 1], v[i]);
  }
}

TEST(QuantizeWeights, ZeroFlush) {
  const std::vector<double> w = {0.5, 0.001};
  EXPECT_FALSE(QuantizeWeights(w, 5, 1, false).codes[1].is_zero());
  EXPECT_TRUE(QuantizeWeights(w, 5, 1, true).codes[1].is_zero());
  const auto q = QuantizeWeights(w, 5, 1, true);
  // Just above half the smallest magnitude survives.
  EXPECT_FALSE(QuantizeWeight(q.scheme.MinMagnitude() * 0.51, q.scheme).is_zero());
  EXPECT_TRUE(QuantizeWeight(q.scheme.MinMagnitude() * 0.49, q.scheme).is_zero());
}

TEST(DecomposeExponent, Examples) {
  EXPECT_EQ(DecomposeExponent(-1.25, 4), (ExponentSplit{-2, 3}));
  EXPECT_EQ(DecomposeExponent(0.0, 4), (ExponentSplit{0, 0}));
  EXPECT_EQ(DecomposeExponent(2.5, 4), (ExponentSplit{2, 2}));
  EXPECT_EQ(DecomposeExponent(std::int64_t{-5}, 4), (ExponentSplit{-2, 3}));
  EXPECT_THROW(DecomposeExponent(0.3, 4), ContractViolation);
}

TEST(BuildLut, Examples) {
  const ShiftLut a = BuildLut(KernelParams{24, 4, 1.0}, LogQuantScheme{5, 1});
  ASSERT_EQ(a.frac_grid, 4);
  ASSERT_EQ(a.entries.size(), 4u);
  const double want[] = {1.0, 1.18921, 1.41421, 1.68179};
  for (int f = 0; f < 4; ++f) EXPECT_NEAR(a.Entry(f), want[f], 1e-5);
  EXPECT_EQ(a.entries[0], 1u << 15);

  const ShiftLut b = BuildLut(KernelParams{24, 1, 1.0}, LogQuantScheme{5, 0});
  EXPECT_EQ(b.frac_grid, 1);
  EXPECT_EQ(b.Entry(0), 1.0);

  const ShiftLut c = BuildLut(KernelParams{12, 2, 1.0}, LogQuantScheme{5, 1});
  ASSERT_EQ(c.frac_grid, 2);
  EXPECT_NEAR(c.Entry(1), 1.41421, 1e-5);

  EXPECT_THROW(BuildLut(KernelParams{24, 3, 1.0}, LogQuantScheme{}),
               ContractViolation);
}

TEST(BuildLut, EntriesAccurateAndIncreasing) {
  for (int tau : {1, 2, 4, 8, 16}) {
    for (int z_w : {0, 1, 2, 3}) {
      const ShiftLut lut = BuildLut(KernelParams{24, tau, 1.0}, LogQuantScheme{5, z_w});
      for (int f = 0; f < lut.frac_grid; ++f) {
        EXPECT_LE(std::fabs(lut.Entry(f) - std::exp2(double(f) / lut.frac_grid)),
                  std::exp2(-15));
        if (f) EXPECT_GT(lut.entries[f], lut.entries[f - 1]);
      }
    }
  }
}

TEST(LogMultiply, Examples) {
  const KernelParams k;
  LogQuantScheme s{5, 1, 0};
  const ShiftLut lut = BuildLut(k, s);
  const FixedProduct p = LogMultiply({-1, -1}, 3, k, s, lut);
  const double exact = -std::exp2(-1.25);
  EXPECT_NEAR(p.ToDouble(), -0.42044820, 1e-6);
  EXPECT_LE(std::fabs(p.ToDouble() - exact), std::exp2(-14) * std::fabs(exact));
  EXPECT_EQ(LogMultiply({1, 0}, 0, k, s, lut).ToDouble(), 1.0);
  EXPECT_EQ(LogMultiply({0, s.MinIndex()}, 7, k, s, lut).raw, 0);
  EXPECT_THROW(LogMultiply({1, 0}, 25, k, s, lut), ContractViolation);
}

TEST(LogMultiply, ExhaustiveRelativeError) {
  const KernelParams k;
  for (int fsr : {-4, 0, 3}) {
    LogQuantScheme s{5, 1, fsr};
    const ShiftLut lut = BuildLut(k, s);
    for (int e = s.MinIndex(); e <= s.MaxIndex(); ++e) {
      for (int sign : {-1, 1}) {
        for (int dt = 0; dt <= k.T; ++dt) {
          const double exact = sign * std::exp2(e / 2.0 - dt / 4.0);
          const FixedProduct p =
              LogMultiply({std::int8_t(sign), e}, dt, k, s, lut);
          ASSERT_FALSE(p.saturated);
          ASSERT_LE(std::fabs(p.ToDouble() - exact),
                    std::exp2(-14) * std::fabs(exact))
              << "e=" << e << " dt=" << dt;
        }
      }
    }
  }
}

TEST(ShiftProduct, SaturatesInsteadOfWrapping) {
  const ShiftLut lut = BuildLut(KernelParams{}, LogQuantScheme{});
  const FixedProduct big = ShiftProduct(1, 4 * 40, lut);
  EXPECT_TRUE(big.saturated);
  EXPECT_GT(big.raw, 0);
  const FixedProduct neg = ShiftProduct(-1, 4 * 40, lut);
  EXPECT_TRUE(neg.saturated);
  EXPECT_LT(neg.raw, 0);
  EXPECT_EQ(ShiftProduct(1, -4 * 80, lut).raw, 0);
}

TEST(FixedPoint, SaturatingAdd) {
  bool sat = false;
  const std::int64_t max = std::numeric_limits<std::int64_t>::max();
  EXPECT_EQ(SaturatingAdd(max, 1, &sat), max);
  EXPECT_TRUE(sat);
  sat = false;
  EXPECT_EQ(SaturatingAdd(5, -7, &sat), -2);
  EXPECT_FALSE(sat);
  EXPECT_EQ(FixedToDouble(DoubleToFixed(0.35, &sat)), std::ldexp(std::round(std::ldexp(0.35, 32)), -32));
  DoubleToFixed(1e12, &sat);
  EXPECT_TRUE(sat);
}

}  // namespace
}  // namespace ttfscat
