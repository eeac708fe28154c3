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

// Element-wise activation helpers shared by the parallel and reference
// kernels.

#ifndef TTFSCAT_SRC_ACTIVATION_INLINE_H_
#define TTFSCAT_SRC_ACTIVATION_INLINE_H_

#include "ttfscat/kernels.h"
#include "ttfscat/ttfs_kernel.h"

namespace ttfscat::kernels::internal {

inline double ActivateOne(ActivationKind kind, const TtfsCoder& coder,
                          ActivationMode mode, double x) {
  const double theta0 = coder.params().theta0;
  switch (kind) {
    case ActivationKind::kReLU:
      return x > 0 ? x : 0.0;
    case ActivationKind::kClip:
      return ClipActivation(theta0, x);
    case ActivationKind::kTTFS:
      if (mode == ActivationMode::kRelaxed) {
        if (x < coder.cutoff()) return 0.0;
        return x < theta0 ? x : theta0;
      }
      return coder.Activation(x);
  }
  return x;
}

inline double GradOne(ActivationKind kind, const TtfsCoder& coder, double x) {
  const double theta0 = coder.params().theta0;
  switch (kind) {
    case ActivationKind::kReLU:
      return x > 0 ? 1.0 : 0.0;
    case ActivationKind::kClip:
      return ClipActivationGrad(theta0, x);
    case ActivationKind::kTTFS:
      return (x >= coder.cutoff() && x < theta0) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace ttfscat::kernels::internal

#endif  // TTFSCAT_SRC_ACTIVATION_INLINE_H_
