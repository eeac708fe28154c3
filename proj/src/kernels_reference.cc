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

// Plain serial loops. Kept as the ground truth for the OpenMP kernels.

#include <algorithm>
#include <cmath>

#include "activation_inline.h"
#include "ttfscat/kernels.h"

namespace ttfscat::kernels::reference {

void DenseForward(DenseDims d, std::span<const double> in,
                  std::span<const double> w, std::span<const double> bias,
                  std::span<double> out) {
  for (int b = 0; b < d.batch; ++b) {
    for (int o = 0; o < d.out; ++o) {
      double acc = bias[o];
      for (int i = 0; i < d.in; ++i) {
        acc += w[size_t(o) * d.in + i] * in[size_t(b) * d.in + i];
      }
      out[size_t(b) * d.out + o] = acc;
    }
  }
}

void DenseBackwardData(DenseDims d, std::span<const double> dout,
                       std::span<const double> w, std::span<double> din) {
  for (int b = 0; b < d.batch; ++b) {
    for (int i = 0; i < d.in; ++i) {
      double acc = 0.0;
      for (int o = 0; o < d.out; ++o) {
        acc += dout[size_t(b) * d.out + o] * w[size_t(o) * d.in + i];
      }
      din[size_t(b) * d.in + i] = acc;
    }
  }
}

void DenseBackwardParams(DenseDims d, std::span<const double> in,
                         std::span<const double> dout, std::span<double> dw,
                         std::span<double> db) {
  for (int o = 0; o < d.out; ++o) {
    double bacc = 0.0;
    for (int b = 0; b < d.batch; ++b) bacc += dout[size_t(b) * d.out + o];
    db[o] = bacc;
    for (int i = 0; i < d.in; ++i) {
      double acc = 0.0;
      for (int b = 0; b < d.batch; ++b) {
        acc += dout[size_t(b) * d.out + o] * in[size_t(b) * d.in + i];
      }
      dw[size_t(o) * d.in + i] = acc;
    }
  }
}

void Conv2dForward(int batch, const Conv2dGeometry& g,
                   std::span<const double> in, std::span<const double> w,
                   std::span<const double> bias, std::span<double> out) {
  const int oh = g.out_height(), ow = g.out_width(), k = g.kernel;
  for (int b = 0; b < batch; ++b) {
    for (int oc = 0; oc < g.out_channels; ++oc) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          double acc = bias[oc];
          for (int ic = 0; ic < g.in_channels; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
              const int iy = oy * g.stride - g.padding + ky;
              if (iy < 0 || iy >= g.in_height) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int ix = ox * g.stride - g.padding + kx;
                if (ix < 0 || ix >= g.in_width) continue;
                acc += w[((size_t(oc) * g.in_channels + ic) * k + ky) * k + kx] *
                       in[size_t(b) * g.input_size() +
                          (size_t(ic) * g.in_height + iy) * g.in_width + ix];
              }
            }
          }
          out[size_t(b) * g.output_size() + (size_t(oc) * oh + oy) * ow + ox] =
              acc;
        }
      }
    }
  }
}

void Conv2dBackwardData(int batch, const Conv2dGeometry& g,
                        std::span<const double> dout, std::span<const double> w,
                        std::span<double> din) {
  const int oh = g.out_height(), ow = g.out_width(), k = g.kernel;
  std::fill(din.begin(), din.begin() + size_t(batch) * g.input_size(), 0.0);
  for (int b = 0; b < batch; ++b) {
    for (int ic = 0; ic < g.in_channels; ++ic) {
      for (int oc = 0; oc < g.out_channels; ++oc) {
        for (int oy = 0; oy < oh; ++oy) {
          for (int ox = 0; ox < ow; ++ox) {
            const double go =
                dout[size_t(b) * g.output_size() + (size_t(oc) * oh + oy) * ow +
                     ox];
            for (int ky = 0; ky < k; ++ky) {
              const int iy = oy * g.stride - g.padding + ky;
              if (iy < 0 || iy >= g.in_height) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int ix = ox * g.stride - g.padding + kx;
                if (ix < 0 || ix >= g.in_width) continue;
                din[size_t(b) * g.input_size() +
                    (size_t(ic) * g.in_height + iy) * g.in_width + ix] +=
                    go * w[((size_t(oc) * g.in_channels + ic) * k + ky) * k + kx];
              }
            }
          }
        }
      }
    }
  }
}

void Conv2dBackwardParams(int batch, const Conv2dGeometry& g,
                          std::span<const double> in,
                          std::span<const double> dout, std::span<double> dw,
                          std::span<double> db) {
  const int oh = g.out_height(), ow = g.out_width(), k = g.kernel;
  for (int oc = 0; oc < g.out_channels; ++oc) {
    double bacc = 0.0;
    for (int b = 0; b < batch; ++b) {
      for (int p = 0; p < oh * ow; ++p) {
        bacc += dout[size_t(b) * g.output_size() + size_t(oc) * oh * ow + p];
      }
    }
    db[oc] = bacc;
    for (int ic = 0; ic < g.in_channels; ++ic) {
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          double acc = 0.0;
          for (int b = 0; b < batch; ++b) {
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * g.stride - g.padding + ky;
              if (iy < 0 || iy >= g.in_height) continue;
              for (int ox = 0; ox < ow; ++ox) {
                const int ix = ox * g.stride - g.padding + kx;
                if (ix < 0 || ix >= g.in_width) continue;
                acc += dout[size_t(b) * g.output_size() +
                            (size_t(oc) * oh + oy) * ow + ox] *
                       in[size_t(b) * g.input_size() +
                          (size_t(ic) * g.in_height + iy) * g.in_width + ix];
              }
            }
          }
          dw[((size_t(oc) * g.in_channels + ic) * k + ky) * k + kx] = acc;
        }
      }
    }
  }
}

void Activation(ActivationKind kind, const TtfsCoder& coder,
                ActivationMode mode, std::span<const double> in,
                std::span<double> out) {
  for (size_t i = 0; i < in.size(); ++i) {
    out[i] = internal::ActivateOne(kind, coder, mode, in[i]);
  }
}

void ActivationBackward(ActivationKind kind, const TtfsCoder& coder,
                        std::span<const double> pre,
                        std::span<const double> dout, std::span<double> din) {
  for (size_t i = 0; i < pre.size(); ++i) {
    din[i] = dout[i] * internal::GradOne(kind, coder, pre[i]);
  }
}

void BatchNormForwardTrain(BatchNormDims d, std::span<const double> in,
                           std::span<const double> gamma,
                           std::span<const double> beta, double epsilon,
                           std::span<double> xhat, std::span<double> y,
                           std::span<double> mean, std::span<double> inv_std) {
  const double n = double(d.batch) * d.spatial;
  for (int c = 0; c < d.channels; ++c) {
    auto at = [&](int b, int s) {
      return (size_t(b) * d.channels + c) * d.spatial + s;
    };
    double sum = 0.0;
    for (int b = 0; b < d.batch; ++b)
      for (int s = 0; s < d.spatial; ++s) sum += in[at(b, s)];
    const double mu = sum / n;
    double sq = 0.0;
    for (int b = 0; b < d.batch; ++b)
      for (int s = 0; s < d.spatial; ++s) {
        const double dv = in[at(b, s)] - mu;
        sq += dv * dv;
      }
    const double istd = 1.0 / std::sqrt(sq / n + epsilon);
    mean[c] = mu;
    inv_std[c] = istd;
    for (int b = 0; b < d.batch; ++b)
      for (int s = 0; s < d.spatial; ++s) {
        const size_t i = at(b, s);
        xhat[i] = (in[i] - mu) * istd;
        y[i] = gamma[c] * xhat[i] + beta[c];
      }
  }
}

void BatchNormInference(BatchNormDims d, std::span<const double> in,
                        const BatchNormParams& bn, std::span<double> y) {
  for (int b = 0; b < d.batch; ++b) {
    for (int c = 0; c < d.channels; ++c) {
      const double scale =
          bn.gamma[c] / std::sqrt(bn.running_var[c] + bn.epsilon);
      for (int s = 0; s < d.spatial; ++s) {
        const size_t i = (size_t(b) * d.channels + c) * d.spatial + s;
        y[i] = (in[i] - bn.running_mean[c]) * scale + bn.beta[c];
      }
    }
  }
}

void BatchNormBackward(BatchNormDims d, std::span<const double> dy,
                       std::span<const double> xhat,
                       std::span<const double> gamma,
                       std::span<const double> inv_std, std::span<double> dx,
                       std::span<double> dgamma, std::span<double> dbeta) {
  const double n = double(d.batch) * d.spatial;
  for (int c = 0; c < d.channels; ++c) {
    auto at = [&](int b, int s) {
      return (size_t(b) * d.channels + c) * d.spatial + s;
    };
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int b = 0; b < d.batch; ++b)
      for (int s = 0; s < d.spatial; ++s) {
        sum_dy += dy[at(b, s)];
        sum_dy_xhat += dy[at(b, s)] * xhat[at(b, s)];
      }
    dbeta[c] = sum_dy;
    dgamma[c] = sum_dy_xhat;
    const double k = gamma[c] * inv_std[c] / n;
    for (int b = 0; b < d.batch; ++b)
      for (int s = 0; s < d.spatial; ++s) {
        const size_t i = at(b, s);
        dx[i] = k * (n * dy[i] - sum_dy - xhat[i] * sum_dy_xhat);
      }
  }
}

}  // namespace ttfscat::kernels::reference
