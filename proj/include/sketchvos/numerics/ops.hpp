#pragma once

#include <vector>

#include "sketchvos/numerics/autograd.hpp"

// Differentiable operators. Every function here records its adjoint on the
// graph when an input requires gradients. Instantiated for float and double.
namespace sketchvos::numerics {

// Elementwise, identical shapes.
template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> scale(const Var<T>& a, T s);
template <typename T> Var<T> relu(const Var<T>& x);
template <typename T> Var<T> sigmoid(const Var<T>& x);

template <typename T> Var<T> sum(const Var<T>& x);
template <typename T> Var<T> mean(const Var<T>& x);
/// sum(x * weights) with constant weights; scalar readout used by gradient checks.
template <typename T> Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights);

template <typename T> Var<T> reshape(const Var<T>& x, Shape shape);
/// Contiguous range of the flattened input, reshaped to `shape`.
template <typename T> Var<T> slice_flat(const Var<T>& x, std::size_t offset, Shape shape);
/// Concatenates C_i x H x W tensors along the channel axis.
template <typename T> Var<T> concat_channels(const std::vector<Var<T>>& xs);

/// (m x k) * (k x n).
template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> transpose(const Var<T>& a);

/// Softmax of a matrix along axis 0 (columns sum to 1) or axis 1 (rows sum to 1).
/// Max-subtracted; throws DomainError on non-finite input.
template <typename T> Var<T> softmax(const Var<T>& x, int axis);

/// result[p, r] = sum_c Q[c, p] K[c, r] / sqrt(C) for Q: C x P, K: C x R.
template <typename T> Var<T> scaled_dot_scores(const Var<T>& q, const Var<T>& k);

/// result[r, p] = -||K[:, r] - Q[:, p]||^2 for K: C x R, Q: C x P.
template <typename T> Var<T> neg_sq_distance(const Var<T>& k, const Var<T>& q);

/// x: Cin x H x W, w: Cout x Cin x k x k, b: Cout. Zero padding.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride, int pad);

/// Half-pixel-center bilinear interpolation (align_corners = false), with
/// source coordinates clamped to the input extent.
template <typename T> Var<T> bilinear_resize(const Var<T>& x, int out_h, int out_w);

/// C x H x W -> C x 1 x 1 spatial mean.
template <typename T> Var<T> global_avg_pool(const Var<T>& x);
/// C x 1 x 1 (or C x 1) -> C x H x W by replication.
template <typename T> Var<T> broadcast_spatial(const Var<T>& x, int h, int w);

inline constexpr double kBceClamp = 1e-7;

/// Mean binary cross-entropy of probabilities against a {0,1} target.
/// Probabilities are clamped to [1e-7, 1 - 1e-7]; the clamp has zero gradient
/// outside that band. Throws DomainError for targets outside {0,1}.
template <typename T> Var<T> bce_loss(const Var<T>& prob, const Tensor<T>& target);

}  // namespace sketchvos::numerics
