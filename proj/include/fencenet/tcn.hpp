#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fencenet/ops.hpp"
#include "fencenet/param_io.hpp"
#include "fencenet/random.hpp"
#include "fencenet/tensor.hpp"

namespace fencenet {

enum class Mode { train, eval };

struct TcnBlockConfig {
  int in_channels = 0;
  int out_channels = 0;
  int kernel_size = 1;
  int dilation = 1;
  double dropout_rate = 0.0;
};

// 1 + 2(k-1)d: two stacked dilated convolutions.
int block_receptive_field(const TcnBlockConfig& block);
int stack_receptive_field(std::span<const TcnBlockConfig> blocks);

// Zeroes whole channels across every time step with probability `rate` and scales
// the survivors by 1/(1-rate). Identity in eval mode or when rate == 0.
// rng may be null only when the call is an identity.
template <typename T>
Tensor<T> spatial_dropout(Tape<T>& tape, const Tensor<T>& input, double rate, Mode mode, Rng* rng);

// Weight-normalized convolution: weight[c] = magnitude[c] * direction[c] / ||direction[c]||.
template <typename T>
struct WeightNormConv {
  Tensor<T> direction;  // [out, in, k]
  Tensor<T> magnitude;  // [out]
  Tensor<T> bias;       // [out]

  // He fan-in normal direction, magnitude = ||direction[c]|| so the initial
  // effective weight equals the direction, zero bias.
  static WeightNormConv initialize(int in_channels, int out_channels, int kernel_size, Rng& rng);

  Tensor<T> effective_weight(Tape<T>& tape) const;
};

// Residual TCN block:
//   f(x)  = Dropout(ReLU(WN-Conv2(Dropout(ReLU(WN-Conv1(x))))))
//   out   = ReLU(adapter(x) + f(x))
// The 1x1 adapter exists only when in_channels != out_channels.
template <typename T>
class TcnBlock {
 public:
  TcnBlock(const TcnBlockConfig& config, ops::ConvPadding padding, Rng& rng);

  Tensor<T> forward(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng) const;

  const TcnBlockConfig& config() const { return config_; }
  ops::ConvPadding padding() const { return padding_; }
  bool has_adapter() const { return adapter_weight_.has_value(); }

  WeightNormConv<T>& first_conv() { return conv1_; }
  WeightNormConv<T>& second_conv() { return conv2_; }
  // [out, in, 1] / [out]; only valid when has_adapter().
  Tensor<T>& adapter_weight() { return *adapter_weight_; }
  Tensor<T>& adapter_bias() { return *adapter_bias_; }

  void append_parameters(const std::string& prefix, ParameterList<T>& out) const;

 private:
  TcnBlockConfig config_;
  ops::ConvPadding padding_;
  WeightNormConv<T> conv1_;
  WeightNormConv<T> conv2_;
  std::optional<Tensor<T>> adapter_weight_;
  std::optional<Tensor<T>> adapter_bias_;
};

template <typename T>
class TcnStack {
 public:
  TcnStack() = default;
  // Validates that consecutive blocks chain (block i out == block i+1 in).
  TcnStack(std::span<const TcnBlockConfig> blocks, ops::ConvPadding padding, Rng& rng);

  Tensor<T> forward(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng) const;

  std::size_t size() const { return blocks_.size(); }
  TcnBlock<T>& block(std::size_t i) { return blocks_.at(i); }
  const TcnBlock<T>& block(std::size_t i) const { return blocks_.at(i); }
  int in_channels() const;
  int out_channels() const;
  int receptive_field() const;

  void append_parameters(const std::string& prefix, ParameterList<T>& out) const;

 private:
  std::vector<TcnBlock<T>> blocks_;
};

extern template struct WeightNormConv<float>;
extern template struct WeightNormConv<double>;
extern template class TcnBlock<float>;
extern template class TcnBlock<double>;
extern template class TcnStack<float>;
extern template class TcnStack<double>;

}  // namespace fencenet
