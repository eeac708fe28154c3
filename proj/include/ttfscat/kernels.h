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

// Data-parallel training kernels. The functions in ttfscat::kernels run under
// OpenMP; ttfscat::kernels::reference holds serial twins with the same
// per-element summation order, so both produce bit-identical output. Work is
// split over output elements only, never over a reduction.
//
// Layouts: activations [batch][features] (conv: [batch][c][h][w]), dense
// weights [out][in], conv weights [oc][ic][ky][kx].

#ifndef TTFSCAT_KERNELS_H_
#define TTFSCAT_KERNELS_H_

#include <span>

#include "ttfscat/network.h"
#include "ttfscat/ttfs_kernel.h"

namespace ttfscat::kernels {

struct DenseDims {
  int batch = 1;
  int in = 0;
  int out = 0;
};

// Batch-norm tensors are viewed as [batch][channels][spatial].
struct BatchNormDims {
  int batch = 1;
  int channels = 0;
  int spatial = 1;
};

// kRelaxed swaps TTFS for its piecewise-linear relaxation (TtfsRelaxed).
// Only gradient checks use it.
enum class ActivationMode { kExact, kRelaxed };

#define TTFSCAT_KERNEL_DECLS                                                   \
  void DenseForward(DenseDims d, std::span<const double> in,                   \
                    std::span<const double> w, std::span<const double> bias,   \
                    std::span<double> out);                                    \
  void DenseBackwardData(DenseDims d, std::span<const double> dout,            \
                         std::span<const double> w, std::span<double> din);    \
  /* Overwrites dw and db. */                                                  \
  void DenseBackwardParams(DenseDims d, std::span<const double> in,            \
                           std::span<const double> dout, std::span<double> dw, \
                           std::span<double> db);                              \
  void Conv2dForward(int batch, const Conv2dGeometry& g,                       \
                     std::span<const double> in, std::span<const double> w,    \
                     std::span<const double> bias, std::span<double> out);     \
  void Conv2dBackwardData(int batch, const Conv2dGeometry& g,                  \
                          std::span<const double> dout,                        \
                          std::span<const double> w, std::span<double> din);   \
  void Conv2dBackwardParams(int batch, const Conv2dGeometry& g,                \
                            std::span<const double> in,                        \
                            std::span<const double> dout,                      \
                            std::span<double> dw, std::span<double> db);       \
  void Activation(ActivationKind kind, const TtfsCoder& coder,                 \
                  ActivationMode mode, std::span<const double> in,             \
                  std::span<double> out);                                      \
  /* din = dout * f'(pre). */                                                  \
  void ActivationBackward(ActivationKind kind, const TtfsCoder& coder,         \
                          std::span<const double> pre,                         \
                          std::span<const double> dout,                        \
                          std::span<double> din);                              \
  /* Training-mode batch norm. Writes xhat, y, per-channel mean and inverse */ \
  /* standard deviation (biased batch variance). */                            \
  void BatchNormForwardTrain(BatchNormDims d, std::span<const double> in,      \
                             std::span<const double> gamma,                    \
                             std::span<const double> beta, double epsilon,     \
                             std::span<double> xhat, std::span<double> y,      \
                             std::span<double> mean,                           \
                             std::span<double> inv_std);                       \
  void BatchNormInference(BatchNormDims d, std::span<const double> in,         \
                          const BatchNormParams& bn, std::span<double> y);     \
  void BatchNormBackward(BatchNormDims d, std::span<const double> dy,          \
                         std::span<const double> xhat,                         \
                         std::span<const double> gamma,                        \
                         std::span<const double> inv_std,                      \
                         std::span<double> dx, std::span<double> dgamma,       \
                         std::span<double> dbeta);

TTFSCAT_KERNEL_DECLS

// Threads OpenMP will use for the parallel kernels (1 without OpenMP).
int MaxThreads();

namespace reference {
TTFSCAT_KERNEL_DECLS
}  // namespace reference

#undef TTFSCAT_KERNEL_DECLS

}  // namespace ttfscat::kernels

#endif  // TTFSCAT_KERNELS_H_
