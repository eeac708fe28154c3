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

// Time-to-first-spike coding math: kernels, dynamic thresholds, spike times
// and the activation functions used during conversion aware training.
//
// A value u is carried by a single spike emitted at the first step dt of a
// window [0, T] where u >= theta0 * kernel(dt). With the base-2 kernel
// kernel(dt) = 2^(-dt/tau) the decoded value is always one of
// {0} U {theta0 * 2^(-j/tau) : j = 0..T}.
//
// Everything here is a pure function of its arguments.

#ifndef TTFSCAT_TTFS_KERNEL_H_
#define TTFSCAT_TTFS_KERNEL_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ttfscat {

enum class KernelBase { kTwo, kE };

struct KernelParams {
  int T = 24;            // timesteps per layer window
  int tau = 4;           // time constant, in timesteps
  double theta0 = 1.0;   // base threshold
  KernelBase base = KernelBase::kTwo;

  // Throws ContractViolation unless T >= 1, tau >= 1, theta0 > 0.
  void Validate() const;
  // True when log2(tau) is an integer, which the shift/LUT product needs.
  bool IsLogCompatible() const;

  bool operator==(const KernelParams&) const = default;
};

// Exponential reference kernel exp(-(dt - t_d) / tau_real) with a delay and a
// real time constant. Only used for parity checks against the base-2 kernel.
struct RefKernelParams {
  KernelParams params{.base = KernelBase::kE};
  int t_d = 0;
  double tau_real = 4.0;

  void Validate() const;
};

enum class ActivationKind { kReLU, kClip, kTTFS };

std::string_view ActivationName(ActivationKind kind);
std::optional<ActivationKind> ParseActivation(std::string_view name);

// kernel(dt) for base 2: 2^(-dt/tau). For base E: exp(-dt/tau).
double KernelValue(const KernelParams& k, int dt);
double KernelValue(const RefKernelParams& k, int dt);

// theta0 * kernel(dt). dt must lie in [0, T].
double DynamicThreshold(const KernelParams& k, int dt);

// Smallest dt in [0, T] with u >= DynamicThreshold(k, dt), or nullopt.
std::optional<int> SpikeTime(const KernelParams& k, double u);

// Encode-then-decode of x: 0 when x never crosses the threshold, otherwise
// the threshold value at its spike time.
double TtfsActivation(const KernelParams& k, double x);

// Straight-through derivative: 1 on [theta0 * kernel(T), theta0), else 0.
double TtfsActivationGrad(const KernelParams& k, double x);

// The piecewise-linear function whose derivative is TtfsActivationGrad:
// 0 below the cutoff, identity in range, theta0 above.
double TtfsRelaxed(const KernelParams& k, double x);

// clip(x, theta0, 0) and its derivative (1 inside (0, theta0)).
double ClipActivation(double theta0, double x);
double ClipActivationGrad(double theta0, double x);

double ApplyActivation(ActivationKind kind, const KernelParams& k, double x);
double ActivationGrad(ActivationKind kind, const KernelParams& k, double x);

// Table-driven coder for hot loops. Holds the T+1 thresholds computed through
// DynamicThreshold, so its results are bit-identical to the free functions.
class TtfsCoder {
 public:
  explicit TtfsCoder(const KernelParams& k);

  const KernelParams& params() const { return params_; }
  // thresholds()[dt] == DynamicThreshold(params(), dt).
  std::span<const double> thresholds() const { return thresholds_; }
  double cutoff() const { return thresholds_.back(); }

  std::optional<int> SpikeTime(double u) const;
  double Activation(double x) const;

 private:
  KernelParams params_;
  std::vector<double> thresholds_;
};

}  // namespace ttfscat

#endif  // TTFSCAT_TTFS_KERNEL_H_
