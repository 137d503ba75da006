#pragma once

#include <span>

#include "fencenet/tensor.hpp"

// Differentiable primitives used by the models. Every op takes the tape first;
// the op records a backward closure only when the tape is recording and at least
// one input requires a gradient.
//
// Sequence tensors are [C, T] or batched [B, C, T]; feature tensors are [N] or [B, N].
namespace fencenet::ops {

enum class ConvPadding {
  causal,    // left zero-padding of (k-1)*d; output t sees inputs <= t
  centered,  // symmetric zero-padding; output t sees inputs around t
};

// out[c, t] = bias[c] + sum_i sum_ci weight[c, ci, i] * in[ci, t - dilation * i + shift]
// where shift = 0 for causal and dilation * (k-1)/2 for centered. Out-of-range
// positions read as zero, so the output length equals the input length.
template <typename T>
Tensor<T> conv1d(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& weight,
                 const Tensor<T>& bias, int dilation,
                 ConvPadding padding = ConvPadding::causal);

// weight [M, N], bias [M]; input [N] or [B, N].
template <typename T>
Tensor<T> dense(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& weight,
                const Tensor<T>& bias);

// effective[c] = magnitude[c] * direction[c] / ||direction[c]||, norm over each
// output-channel slice. Throws NumericalError on a zero-norm slice.
template <typename T>
Tensor<T> weight_norm(Tape<T>& tape, const Tensor<T>& direction, const Tensor<T>& magnitude);

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& input);

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

// Scalar sum of all elements.
template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& input);

// Multiplies row (b, c) of a [B, C, T] (or [C, T]) tensor by scale[b * C + c].
// The scale is a constant; only the input receives a gradient.
template <typename T>
Tensor<T> scale_channels(Tape<T>& tape, const Tensor<T>& input, std::span<const T> scale);

// Flips the last (time) axis.
template <typename T>
Tensor<T> reverse_time(Tape<T>& tape, const Tensor<T>& input);

// Column t = T-1 of a [C, T] / [B, C, T] tensor -> [C] / [B, C].
template <typename T>
Tensor<T> last_step(Tape<T>& tape, const Tensor<T>& input);

// [C, T] -> [C*T], [B, C, T] -> [B, C*T].
template <typename T>
Tensor<T> flatten(Tape<T>& tape, const Tensor<T>& input);

// Concatenates feature vectors along the last axis: [N1] ++ [N2] or [B, N1] ++ [B, N2].
template <typename T>
Tensor<T> concat(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

// Mean over the batch of -log softmax(logits)[label]. logits is [K] with one label
// or [B, K] with B labels. Throws ArgumentError for labels outside [0, K).
template <typename T>
Tensor<T> softmax_cross_entropy(Tape<T>& tape, const Tensor<T>& logits, std::span<const int> labels);

}  // namespace fencenet::ops
