// Copyright 2026 The avc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "avc/tensor.hpp"

namespace avc {

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

inline Index conv_out_size(Index in, Index k, Index dilation, Index padding) {
  return in + 2 * padding - dilation * (k - 1);
}

// Unfolds a [C,H,W] image into a (C*k*k) x (Ho*Wo) patch matrix.
template <typename Scalar>
void im2col(const Scalar* x, Index channels, Index h, Index w, Index k, Index dilation,
            Index padding, Index ho, Index wo, RowMat<Scalar>& col) {
  col.resize(channels * k * k, ho * wo);
  for (Index c = 0; c < channels; ++c) {
    const Scalar* plane = x + c * h * w;
    for (Index ki = 0; ki < k; ++ki) {
      for (Index kj = 0; kj < k; ++kj) {
        Scalar* row = col.row((c * k + ki) * k + kj).data();
        const Index dx = kj * dilation - padding;
        const Index ox_lo = std::clamp<Index>(-dx, 0, wo);
        const Index ox_hi = std::clamp<Index>(w - dx, 0, wo);
        for (Index oy = 0; oy < ho; ++oy) {
          Scalar* dst = row + oy * wo;
          const Index y = oy + ki * dilation - padding;
          if (y < 0 || y >= h) {
            std::fill(dst, dst + wo, Scalar(0));
            continue;
          }
          std::fill(dst, dst + ox_lo, Scalar(0));
          const Scalar* src = plane + y * w;
          for (Index ox = ox_lo; ox < ox_hi; ++ox) dst[ox] = src[ox + dx];
          std::fill(dst + std::max(ox_hi, ox_lo), dst + wo, Scalar(0));
        }
      }
    }
  }
}

// Adjoint of im2col: scatters patch-matrix gradients back onto the image.
template <typename Scalar>
void col2im(const RowMat<Scalar>& col, Index channels, Index h, Index w, Index k,
            Index dilation, Index padding, Index ho, Index wo, Scalar* dx) {
  for (Index c = 0; c < channels; ++c) {
    Scalar* plane = dx + c * h * w;
    for (Index ki = 0; ki < k; ++ki) {
      for (Index kj = 0; kj < k; ++kj) {
        const Scalar* row = col.row((c * k + ki) * k + kj).data();
        const Index shift = kj * dilation - padding;
        const Index ox_lo = std::clamp<Index>(-shift, 0, wo);
        const Index ox_hi = std::clamp<Index>(w - shift, 0, wo);
        for (Index oy = 0; oy < ho; ++oy) {
          const Index y = oy + ki * dilation - padding;
          if (y < 0 || y >= h) continue;
          const Scalar* src = row + oy * wo;
          Scalar* dst = plane + y * w;
          for (Index ox = ox_lo; ox < ox_hi; ++ox) dst[ox + shift] += src[ox];
        }
      }
    }
  }
}

// Bilinear interpolation weights (align-corners false) as an (n*factor) x n
// matrix.
template <typename Scalar>
RowMat<Scalar> bilinear_matrix(Index n, Index factor) {
  RowMat<Scalar> m = RowMat<Scalar>::Zero(n * factor, n);
  for (Index i = 0; i < n * factor; ++i) {
    double src = (static_cast<double>(i) + 0.5) / static_cast<double>(factor) - 0.5;
    if (src < 0) src = 0;
    Index i0 = static_cast<Index>(std::floor(src));
    if (i0 > n - 1) i0 = n - 1;
    const Index i1 = std::min<Index>(i0 + 1, n - 1);
    const double frac = src - static_cast<double>(i0);
    m(i, i0) += static_cast<Scalar>(1.0 - frac);
    m(i, i1) += static_cast<Scalar>(frac);
  }
  return m;
}

}  // namespace detail

// 2-D convolution with stride 1 on a single [C_in,H,W] image.
template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& input, const Tensor<Scalar>& weight,
                      const Tensor<Scalar>& bias, Index dilation = 1, Index padding = 0) {
  detail::require(input.rank() == 3, "conv2d: input must be [C,H,W], got " + to_string(input.shape()));
  detail::require(weight.rank() == 4 && weight.dim(2) == weight.dim(3),
                  "conv2d: weight must be [C_out,C_in,k,k], got " + to_string(weight.shape()));
  detail::require(weight.dim(1) == input.dim(0),
                  "conv2d: weight expects " + std::to_string(weight.dim(1)) +
                      " input channels, input has " + std::to_string(input.dim(0)));
  detail::require(bias.rank() == 1 && bias.dim(0) == weight.dim(0),
                  "conv2d: bias must be [C_out], got " + to_string(bias.shape()));
  detail::require(dilation >= 1 && padding >= 0, "conv2d: dilation must be >= 1 and padding >= 0");

  const Index cin = input.dim(0), h = input.dim(1), w = input.dim(2);
  const Index cout = weight.dim(0), k = weight.dim(2);
  const Index ho = detail::conv_out_size(h, k, dilation, padding);
  const Index wo = detail::conv_out_size(w, k, dilation, padding);
  detail::require(ho >= 1 && wo >= 1, "conv2d: kernel footprint exceeds padded input");

  auto col = std::make_shared<RowMat<Scalar>>();
  detail::im2col(input.value().data(), cin, h, w, k, dilation, padding, ho, wo, *col);
  auto wmat = weight.matrix(cout, cin * k * k);

  Vec<Scalar> out(cout * ho * wo);
  Eigen::Map<RowMat<Scalar>> omat(out.data(), cout, ho * wo);
  omat.noalias() = wmat * (*col);
  omat.colwise() += bias.value();

  return make_result<Scalar>(
      "conv2d", {cout, ho, wo}, std::move(out), {input.node(), weight.node(), bias.node()},
      [=](Node<Scalar>& self) {
        auto& x = *self.inputs[0];
        auto& wt = *self.inputs[1];
        auto& b = *self.inputs[2];
        Eigen::Map<const RowMat<Scalar>> gout(self.grad.data(), cout, ho * wo);
        if (wt.requires_grad) {
          Eigen::Map<RowMat<Scalar>> gw(wt.grad_buffer().data(), cout, cin * k * k);
          gw.noalias() += gout * col->transpose();
        }
        if (b.requires_grad) b.grad_buffer() += gout.rowwise().sum();
        if (x.requires_grad) {
          Eigen::Map<const RowMat<Scalar>> wm(wt.value.data(), cout, cin * k * k);
          RowMat<Scalar> gcol = wm.transpose() * gout;
          detail::col2im(gcol, cin, h, w, k, dilation, padding, ho, wo, x.grad_buffer().data());
        }
      });
}

// out = weight * input + bias.
template <typename Scalar>
Tensor<Scalar> fully_connected(const Tensor<Scalar>& input, const Tensor<Scalar>& weight,
                               const Tensor<Scalar>& bias) {
  detail::require(input.rank() == 1, "fully_connected: input must be a vector, got " + to_string(input.shape()));
  detail::require(weight.rank() == 2 && weight.dim(1) == input.dim(0),
                  "fully_connected: weight " + to_string(weight.shape()) + " incompatible with input " +
                      to_string(input.shape()));
  detail::require(bias.rank() == 1 && bias.dim(0) == weight.dim(0),
                  "fully_connected: bias " + to_string(bias.shape()) + " incompatible with weight " +
                      to_string(weight.shape()));
  const Index o = weight.dim(0), d = weight.dim(1);
  Vec<Scalar> out = weight.matrix(o, d) * input.value() + bias.value();
  return make_result<Scalar>(
      "fully_connected", {o}, std::move(out), {input.node(), weight.node(), bias.node()},
      [o, d](Node<Scalar>& self) {
        auto& x = *self.inputs[0];
        auto& wt = *self.inputs[1];
        auto& b = *self.inputs[2];
        if (wt.requires_grad) {
          Eigen::Map<RowMat<Scalar>> gw(wt.grad_buffer().data(), o, d);
          gw.noalias() += self.grad * x.value.transpose();
        }
        if (b.requires_grad) b.grad_buffer() += self.grad;
        if (x.requires_grad) {
          Eigen::Map<const RowMat<Scalar>> wm(wt.value.data(), o, d);
          x.grad_buffer().noalias() += wm.transpose() * self.grad;
        }
      });
}

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& input) {
  Vec<Scalar> out = input.value().cwiseMax(Scalar(0));
  return make_result<Scalar>("relu", input.shape(), std::move(out), {input.node()},
                             [](Node<Scalar>& self) {
                               auto& x = *self.inputs[0];
                               x.grad_buffer().array() +=
                                   (x.value.array() > Scalar(0)).select(self.grad.array(), Scalar(0));
                             });
}

// 2x2 max pooling with stride 2; odd trailing rows/columns are dropped.
template <typename Scalar>
Tensor<Scalar> max_pool2(const Tensor<Scalar>& input) {
  detail::require(input.rank() == 3, "max_pool2: input must be [C,H,W], got " + to_string(input.shape()));
  const Index c = input.dim(0), h = input.dim(1), w = input.dim(2);
  const Index ho = h / 2, wo = w / 2;
  detail::require(ho >= 1 && wo >= 1, "max_pool2: input too small " + to_string(input.shape()));
  Vec<Scalar> out(c * ho * wo);
  auto argmax = std::make_shared<std::vector<Index>>(out.size());
  const Scalar* x = input.value().data();
  for (Index ch = 0; ch < c; ++ch) {
    for (Index oy = 0; oy < ho; ++oy) {
      for (Index ox = 0; ox < wo; ++ox) {
        Index best = ch * h * w + (2 * oy) * w + 2 * ox;
        for (Index dy = 0; dy < 2; ++dy) {
          for (Index dx = 0; dx < 2; ++dx) {
            const Index idx = ch * h * w + (2 * oy + dy) * w + 2 * ox + dx;
            if (x[idx] > x[best]) best = idx;
          }
        }
        const Index o = (ch * ho + oy) * wo + ox;
        out[o] = x[best];
        (*argmax)[o] = best;
      }
    }
  }
  return make_result<Scalar>("max_pool2", {c, ho, wo}, std::move(out), {input.node()},
                             [argmax](Node<Scalar>& self) {
                               auto& g = self.inputs[0]->grad_buffer();
                               for (Index i = 0; i < self.grad.size(); ++i) g[(*argmax)[i]] += self.grad[i];
                             });
}

// Spatial mean per channel: [C,H,W] -> [C].
template <typename Scalar>
Tensor<Scalar> global_avg_pool(const Tensor<Scalar>& input) {
  detail::require(input.rank() == 3, "global_avg_pool: input must be [C,H,W], got " + to_string(input.shape()));
  const Index c = input.dim(0), hw = input.dim(1) * input.dim(2);
  Vec<Scalar> out = input.matrix(c, hw).rowwise().mean();
  return make_result<Scalar>("global_avg_pool", {c}, std::move(out), {input.node()},
                             [c, hw](Node<Scalar>& self) {
                               Eigen::Map<RowMat<Scalar>> g(self.inputs[0]->grad_buffer().data(), c, hw);
                               g.colwise() += self.grad / static_cast<Scalar>(hw);
                             });
}

// Per-channel scale and shift broadcast over the spatial dims.
template <typename Scalar>
Tensor<Scalar> elementwise_affine(const Tensor<Scalar>& input, const Tensor<Scalar>& scale,
                                  const Tensor<Scalar>& shift) {
  detail::require(input.rank() == 3, "elementwise_affine: input must be [C,H,W], got " + to_string(input.shape()));
  const Index c = input.dim(0), hw = input.dim(1) * input.dim(2);
  detail::require(scale.rank() == 1 && scale.dim(0) == c && shift.rank() == 1 && shift.dim(0) == c,
                  "elementwise_affine: expected scale/shift of length " + std::to_string(c) + ", got " +
                      to_string(scale.shape()) + " and " + to_string(shift.shape()));
  Vec<Scalar> out(c * hw);
  Eigen::Map<RowMat<Scalar>> omat(out.data(), c, hw);
  omat = (input.matrix(c, hw).array().colwise() * scale.value().array()).colwise() + shift.value().array();
  return make_result<Scalar>(
      "elementwise_affine", input.shape(), std::move(out), {input.node(), scale.node(), shift.node()},
      [c, hw](Node<Scalar>& self) {
        auto& x = *self.inputs[0];
        auto& s = *self.inputs[1];
        auto& b = *self.inputs[2];
        Eigen::Map<const RowMat<Scalar>> g(self.grad.data(), c, hw);
        if (x.requires_grad) {
          Eigen::Map<RowMat<Scalar>> gx(x.grad_buffer().data(), c, hw);
          gx.array() += g.array().colwise() * s.value.array();
        }
        if (s.requires_grad) {
          Eigen::Map<const RowMat<Scalar>> xm(x.value.data(), c, hw);
          s.grad_buffer() += (g.array() * xm.array()).rowwise().sum().matrix();
        }
        if (b.requires_grad) b.grad_buffer() += g.rowwise().sum();
      });
}

// Bilinear upsampling by an integer factor, align-corners false.
template <typename Scalar>
Tensor<Scalar> upsample_bilinear(const Tensor<Scalar>& input, Index factor) {
  detail::require(input.rank() == 3, "upsample_bilinear: input must be [C,H,W], got " + to_string(input.shape()));
  detail::require(factor >= 1, "upsample_bilinear: factor must be >= 1");
  const Index c = input.dim(0), h = input.dim(1), w = input.dim(2);
  const Index ho = h * factor, wo = w * factor;
  auto ry = std::make_shared<RowMat<Scalar>>(detail::bilinear_matrix<Scalar>(h, factor));
  auto rx = std::make_shared<RowMat<Scalar>>(detail::bilinear_matrix<Scalar>(w, factor));
  Vec<Scalar> out(c * ho * wo);
  for (Index ch = 0; ch < c; ++ch) {
    Eigen::Map<const RowMat<Scalar>> plane(input.value().data() + ch * h * w, h, w);
    Eigen::Map<RowMat<Scalar>> dst(out.data() + ch * ho * wo, ho, wo);
    dst.noalias() = (*ry) * plane * rx->transpose();
  }
  return make_result<Scalar>("upsample_bilinear", {c, ho, wo}, std::move(out), {input.node()},
                             [=](Node<Scalar>& self) {
                               auto& g = self.inputs[0]->grad_buffer();
                               for (Index ch = 0; ch < c; ++ch) {
                                 Eigen::Map<const RowMat<Scalar>> gout(self.grad.data() + ch * ho * wo, ho, wo);
                                 Eigen::Map<RowMat<Scalar>> gin(g.data() + ch * h * w, h, w);
                                 gin.noalias() += ry->transpose() * gout * (*rx);
                               }
                             });
}

// First n entries of a vector.
template <typename Scalar>
Tensor<Scalar> slice_front(const Tensor<Scalar>& input, Index n) {
  detail::require(input.rank() == 1 && n >= 1 && n <= input.dim(0),
                  "slice_front: cannot take " + std::to_string(n) + " entries of " + to_string(input.shape()));
  if (n == input.dim(0)) return input;
  Vec<Scalar> out = input.value().head(n);
  return make_result<Scalar>("slice_front", {n}, std::move(out), {input.node()}, [n](Node<Scalar>& self) {
    self.inputs[0]->grad_buffer().head(n) += self.grad;
  });
}

template <typename Scalar>
Tensor<Scalar> reshape(const Tensor<Scalar>& input, Shape shape) {
  detail::require(numel(shape) == input.numel(),
                  "reshape: cannot view " + to_string(input.shape()) + " as " + to_string(shape));
  return make_result<Scalar>("reshape", std::move(shape), input.value(), {input.node()},
                             [](Node<Scalar>& self) { self.inputs[0]->grad_buffer() += self.grad; });
}

template <typename Scalar>
Tensor<Scalar> add(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  detail::require(a.shape() == b.shape(), "add: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  return make_result<Scalar>("add", a.shape(), a.value() + b.value(), {a.node(), b.node()},
                             [](Node<Scalar>& self) {
                               for (auto& in : self.inputs)
                                 if (in->requires_grad) in->grad_buffer() += self.grad;
                             });
}

template <typename Scalar>
Tensor<Scalar> mul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  detail::require(a.shape() == b.shape(), "mul: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  Vec<Scalar> out = a.value().cwiseProduct(b.value());
  return make_result<Scalar>("mul", a.shape(), std::move(out), {a.node(), b.node()},
                             [](Node<Scalar>& self) {
                               auto& x = *self.inputs[0];
                               auto& y = *self.inputs[1];
                               if (x.requires_grad) x.grad_buffer() += self.grad.cwiseProduct(y.value);
                               if (y.requires_grad) y.grad_buffer() += self.grad.cwiseProduct(x.value);
                             });
}

template <typename Scalar>
Tensor<Scalar> scale(const Tensor<Scalar>& a, Scalar factor) {
  return make_result<Scalar>("scale", a.shape(), a.value() * factor, {a.node()},
                             [factor](Node<Scalar>& self) { self.inputs[0]->grad_buffer() += self.grad * factor; });
}

template <typename Scalar>
Tensor<Scalar> sum(const Tensor<Scalar>& a) {
  Vec<Scalar> out(1);
  out[0] = a.value().sum();
  return make_result<Scalar>("sum", {1}, std::move(out), {a.node()},
                             [](Node<Scalar>& self) { self.inputs[0]->grad_buffer().array() += self.grad[0]; });
}

// Sum of squared differences over all elements.
template <typename Scalar>
Tensor<Scalar> sse_loss(const Tensor<Scalar>& pred, const Tensor<Scalar>& target) {
  detail::require(pred.shape() == target.shape(),
                  "sse_loss: prediction " + to_string(pred.shape()) + " vs target " + to_string(target.shape()));
  Vec<Scalar> out(1);
  out[0] = (pred.value() - target.value()).squaredNorm();
  return make_result<Scalar>("sse_loss", {1}, std::move(out), {pred.node(), target.node()},
                             [](Node<Scalar>& self) {
                               auto& p = *self.inputs[0];
                               auto& t = *self.inputs[1];
                               const Scalar g = Scalar(2) * self.grad[0];
                               if (p.requires_grad) p.grad_buffer() += g * (p.value - t.value);
                               if (t.requires_grad) t.grad_buffer() += g * (t.value - p.value);
                             });
}

}  // namespace avc
