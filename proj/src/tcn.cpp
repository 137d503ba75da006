#include "fencenet/tcn.hpp"

#include <cmath>

#include "fencenet/errors.hpp"

namespace fencenet {

int block_receptive_field(const TcnBlockConfig& block) {
  return 1 + 2 * (block.kernel_size - 1) * block.dilation;
}

int stack_receptive_field(std::span<const TcnBlockConfig> blocks) {
  int field = 1;
  for (const auto& b : blocks) field += 2 * (b.kernel_size - 1) * b.dilation;
  return field;
}

template <typename T>
Tensor<T> spatial_dropout(Tape<T>& tape, const Tensor<T>& input, double rate, Mode mode, Rng* rng) {
  if (rate < 0.0 || rate >= 1.0) throw ArgumentError("dropout rate must be in [0, 1)");
  if (mode == Mode::eval || rate == 0.0) return input;
  if (rng == nullptr) throw ArgumentError("spatial_dropout in train mode needs an rng");
  const std::size_t rows = input.rank() == 3 ? input.dim(0) * input.dim(1) : input.dim(0);
  std::bernoulli_distribution drop(rate);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> scale(rows);
  for (auto& s : scale) s = drop(*rng) ? T(0) : keep_scale;
  return ops::scale_channels<T>(tape, input, scale);
}

template <typename T>
WeightNormConv<T> WeightNormConv<T>::initialize(int in_channels, int out_channels, int kernel_size, Rng& rng) {
  if (in_channels < 1 || out_channels < 1 || kernel_size < 1) {
    throw ConfigError("convolution dimensions must be positive");
  }
  const auto in = static_cast<std::size_t>(in_channels);
  const auto out = static_cast<std::size_t>(out_channels);
  const auto k = static_cast<std::size_t>(kernel_size);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(in * k)));
  std::vector<T> v(out * in * k);
  for (auto& x : v) x = static_cast<T>(normal(rng));
  std::vector<T> g(out);
  for (std::size_t c = 0; c < out; ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < in * k; ++j) sq += static_cast<double>(v[c * in * k + j]) * v[c * in * k + j];
    g[c] = static_cast<T>(std::sqrt(sq));
  }
  return {Tensor<T>::from({out, in, k}, std::move(v), true), Tensor<T>::from({out}, std::move(g), true),
          Tensor<T>::zeros({out}, true)};
}

template <typename T>
Tensor<T> WeightNormConv<T>::effective_weight(Tape<T>& tape) const {
  return ops::weight_norm(tape, direction, magnitude);
}

template <typename T>
TcnBlock<T>::TcnBlock(const TcnBlockConfig& config, ops::ConvPadding padding, Rng& rng)
    : config_(config), padding_(padding) {
  if (config.dilation < 1) throw ConfigError("block dilation must be >= 1");
  if (config.dropout_rate < 0.0 || config.dropout_rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  conv1_ = WeightNormConv<T>::initialize(config.in_channels, config.out_channels, config.kernel_size, rng);
  conv2_ = WeightNormConv<T>::initialize(config.out_channels, config.out_channels, config.kernel_size, rng);
  if (config.in_channels != config.out_channels) {
    const auto in = static_cast<std::size_t>(config.in_channels);
    const auto out = static_cast<std::size_t>(config.out_channels);
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(in)));
    std::vector<T> w(out * in);
    for (auto& x : w) x = static_cast<T>(normal(rng));
    adapter_weight_ = Tensor<T>::from({out, in, 1}, std::move(w), true);
    adapter_bias_ = Tensor<T>::zeros({out}, true);
  }
}

template <typename T>
Tensor<T> TcnBlock<T>::forward(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng) const {
  const std::size_t channel_axis = input.rank() == 3 ? 1 : 0;
  if (input.rank() < 2 || input.dim(channel_axis) != static_cast<std::size_t>(config_.in_channels)) {
    throw DimensionError("TCN block expects " + std::to_string(config_.in_channels) + " input channels, got " +
                         shape_string(input.shape()));
  }
  auto h = ops::conv1d(tape, input, conv1_.effective_weight(tape), conv1_.bias, config_.dilation, padding_);
  h = spatial_dropout(tape, ops::relu(tape, h), config_.dropout_rate, mode, rng);
  h = ops::conv1d(tape, h, conv2_.effective_weight(tape), conv2_.bias, config_.dilation, padding_);
  h = spatial_dropout(tape, ops::relu(tape, h), config_.dropout_rate, mode, rng);
  const Tensor<T> residual =
      has_adapter() ? ops::conv1d(tape, input, *adapter_weight_, *adapter_bias_, 1, padding_) : input;
  return ops::relu(tape, ops::add(tape, residual, h));
}

template <typename T>
void TcnBlock<T>::append_parameters(const std::string& prefix, ParameterList<T>& out) const {
  out.push_back({prefix + "conv1.direction", conv1_.direction});
  out.push_back({prefix + "conv1.magnitude", conv1_.magnitude});
  out.push_back({prefix + "conv1.bias", conv1_.bias});
  out.push_back({prefix + "conv2.direction", conv2_.direction});
  out.push_back({prefix + "conv2.magnitude", conv2_.magnitude});
  out.push_back({prefix + "conv2.bias", conv2_.bias});
  if (has_adapter()) {
    out.push_back({prefix + "adapter.weight", *adapter_weight_});
    out.push_back({prefix + "adapter.bias", *adapter_bias_});
  }
}

template <typename T>
TcnStack<T>::TcnStack(std::span<const TcnBlockConfig> blocks, ops::ConvPadding padding, Rng& rng) {
  if (blocks.empty()) throw ConfigError("a TCN stack needs at least one block");
  for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
    if (blocks[i].out_channels != blocks[i + 1].in_channels) {
      throw ConfigError("block " + std::to_string(i + 1) + " expects " + std::to_string(blocks[i + 1].in_channels) +
                        " channels but block " + std::to_string(i) + " produces " +
                        std::to_string(blocks[i].out_channels));
    }
  }
  blocks_.reserve(blocks.size());
  for (const auto& b : blocks) blocks_.emplace_back(b, padding, rng);
}

template <typename T>
Tensor<T> TcnStack<T>::forward(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng) const {
  Tensor<T> h = input;
  for (const auto& block : blocks_) h = block.forward(tape, h, mode, rng);
  return h;
}

template <typename T>
int TcnStack<T>::in_channels() const {
  return blocks_.front().config().in_channels;
}

template <typename T>
int TcnStack<T>::out_channels() const {
  return blocks_.back().config().out_channels;
}

template <typename T>
int TcnStack<T>::receptive_field() const {
  std::vector<TcnBlockConfig> configs;
  for (const auto& b : blocks_) configs.push_back(b.config());
  return stack_receptive_field(configs);
}

template <typename T>
void TcnStack<T>::append_parameters(const std::string& prefix, ParameterList<T>& out) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].append_parameters(prefix + "block" + std::to_string(i) + ".", out);
  }
}

template Tensor<float> spatial_dropout(Tape<float>&, const Tensor<float>&, double, Mode, Rng*);
template Tensor<double> spatial_dropout(Tape<double>&, const Tensor<double>&, double, Mode, Rng*);
template struct WeightNormConv<float>;
template struct WeightNormConv<double>;
template class TcnBlock<float>;
template class TcnBlock<double>;
template class TcnStack<float>;
template class TcnStack<double>;

}  // namespace fencenet
