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

#include "ttfscat/ttfs_kernel.h"

#include <algorithm>
#include <cmath>

#include "ttfscat/errors.h"

namespace ttfscat {

void KernelParams::Validate() const {
  TTFSCAT_REQUIRE(T >= 1, "kernel: T must be >= 1");
  TTFSCAT_REQUIRE(tau >= 1, "kernel: tau must be >= 1");
  TTFSCAT_REQUIRE(std::isfinite(theta0) && theta0 > 0,
                  "kernel: theta0 must be positive");
}

bool KernelParams::IsLogCompatible() const {
  return base == KernelBase::kTwo && tau >= 1 && (tau & (tau - 1)) == 0;
}

void RefKernelParams::Validate() const {
  params.Validate();
  TTFSCAT_REQUIRE(params.base == KernelBase::kE,
                  "reference kernel requires base E");
  TTFSCAT_REQUIRE(std::isfinite(tau_real) && tau_real > 0,
                  "reference kernel: tau_real must be positive");
}

std::string_view ActivationName(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kReLU:
      return "relu";
    case ActivationKind::kClip:
      return "clip";
    case ActivationKind::kTTFS:
      return "ttfs";
  }
  return "?";
}

std::optional<ActivationKind> ParseActivation(std::string_view name) {
  if (name == "relu") return ActivationKind::kReLU;
  if (name == "clip") return ActivationKind::kClip;
  if (name == "ttfs") return ActivationKind::kTTFS;
  return std::nullopt;
}

double KernelValue(const KernelParams& k, int dt) {
  const double t = static_cast<double>(dt) / k.tau;
  return k.base == KernelBase::kTwo ? std::exp2(-t) : std::exp(-t);
}

double KernelValue(const RefKernelParams& k, int dt) {
  return std::exp(-(static_cast<double>(dt) - k.t_d) / k.tau_real);
}

double DynamicThreshold(const KernelParams& k, int dt) {
  TTFSCAT_REQUIRE(dt >= 0 && dt <= k.T,
                  "dynamic threshold queried outside the fire window");
  return k.theta0 * KernelValue(k, dt);
}

namespace {

// Closed-form guess ceil(tau * log2(theta0 / u)), then nudged against the
// exact threshold comparisons so rounding in log2 can never change the answer.
template <typename ThresholdFn>
std::optional<int> SpikeTimeImpl(const KernelParams& k, double u,
                                 ThresholdFn threshold) {
  if (!(u > 0)) return std::nullopt;
  if (u >= threshold(0)) return 0;
  if (u < threshold(k.T)) return std::nullopt;
  const double guess = std::ceil(k.tau * std::log2(k.theta0 / u));
  int dt = static_cast<int>(std::clamp(guess, 1.0, static_cast<double>(k.T)));
  while (dt > 1 && u >= threshold(dt - 1)) --dt;
  while (dt < k.T && u < threshold(dt)) ++dt;
  return dt;
}

}  // namespace

std::optional<int> SpikeTime(const KernelParams& k, double u) {
  return SpikeTimeImpl(k, u, [&](int dt) { return DynamicThreshold(k, dt); });
}

double TtfsActivation(const KernelParams& k, double x) {
  const auto dt = SpikeTime(k, x);
  return dt ? DynamicThreshold(k, *dt) : 0.0;
}

double TtfsActivationGrad(const KernelParams& k, double x) {
  return (x >= DynamicThreshold(k, k.T) && x < k.theta0) ? 1.0 : 0.0;
}

double TtfsRelaxed(const KernelParams& k, double x) {
  if (x < DynamicThreshold(k, k.T)) return 0.0;
  return x < k.theta0 ? x : k.theta0;
}

double ClipActivation(double theta0, double x) {
  if (x >= theta0) return theta0;
  return x > 0 ? x : 0.0;
}

double ClipActivationGrad(double theta0, double x) {
  return (x > 0 && x < theta0) ? 1.0 : 0.0;
}

double ApplyActivation(ActivationKind kind, const KernelParams& k, double x) {
  switch (kind) {
    case ActivationKind::kReLU:
      return x > 0 ? x : 0.0;
    case ActivationKind::kClip:
      return ClipActivation(k.theta0, x);
    case ActivationKind::kTTFS:
      return TtfsActivation(k, x);
  }
  return x;
}

double ActivationGrad(ActivationKind kind, const KernelParams& k, double x) {
  switch (kind) {
    case ActivationKind::kReLU:
      return x > 0 ? 1.0 : 0.0;
    case ActivationKind::kClip:
      return ClipActivationGrad(k.theta0, x);
    case ActivationKind::kTTFS:
      return TtfsActivationGrad(k, x);
  }
  return 0.0;
}

TtfsCoder::TtfsCoder(const KernelParams& k) : params_(k) {
  k.Validate();
  thresholds_.reserve(k.T + 1);
  for (int dt = 0; dt <= k.T; ++dt) {
    thresholds_.push_back(DynamicThreshold(k, dt));
  }
}

std::optional<int> TtfsCoder::SpikeTime(double u) const {
  return SpikeTimeImpl(params_, u, [&](int dt) { return thresholds_[dt]; });
}

double TtfsCoder::Activation(double x) const {
  const auto dt = SpikeTime(x);
  return dt ? thresholds_[*dt] : 0.0;
}

}  // namespace ttfscat
