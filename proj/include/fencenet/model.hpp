#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fencenet/tcn.hpp"

namespace fencenet {

enum class ModelKind {
  fencenet,             // causal stack, last time step readout
  fencenet_wide,        // same topology as fencenet, wider channels come from the config
  bifencenet,           // causal stack on x, second causal stack on reverse(x)
  bifencenet_forward2,  // both stacks see x un-reversed
  acausal_flatten,      // centered convolutions, flattened final block output
};

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct BlockSpec {
  int channels = 0;
  int kernel_size = 1;
  int dilation = 1;
};

struct ModelConfig {
  ModelKind kind = ModelKind::fencenet;
  int input_channels = 18;
  int input_length = 28;
  std::vector<BlockSpec> blocks;  // per direction for the bidirectional kinds
  int dense_hidden = 128;
  int num_classes = 6;
  double dropout_rate = 0.2;

  bool bidirectional() const;
  std::vector<TcnBlockConfig> block_configs() const;
  int receptive_field() const;

  // Throws ConfigError listing every violated rule.
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& config);
void from_json(const nlohmann::json& j, ModelConfig& config);

template <typename T>
class Model {
 public:
  // Validates the config and initializes parameters from rng.
  Model(const ModelConfig& config, Rng& rng);

  // [C, L] -> [num_classes] or [B, C, L] -> [B, num_classes].
  Tensor<T> forward(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng) const;

  // Output of stack `direction` before the readout, for the input that stack sees
  // (the reversed sequence for the backward stack of bifencenet).
  Tensor<T> features(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng, std::size_t direction = 0) const;

  // Dense -> ReLU -> dense on a readout vector ([N] or [B, N]).
  Tensor<T> head(Tape<T>& tape, const Tensor<T>& readout) const;

  std::size_t num_stacks() const { return stacks_.size(); }
  TcnStack<T>& stack(std::size_t i) { return stacks_.at(i); }
  const TcnStack<T>& stack(std::size_t i) const { return stacks_.at(i); }

  ParameterList<T> parameters() const;
  std::size_t parameter_count() const;
  const ModelConfig& config() const { return config_; }

 private:
  void check_input(const Tensor<T>& input) const;

  ModelConfig config_;
  std::vector<TcnStack<T>> stacks_;
  Tensor<T> hidden_weight_, hidden_bias_;
  Tensor<T> output_weight_, output_bias_;
};

// A checkpoint directory holds model.json (the ModelConfig) and model.params.
void save_checkpoint(const std::filesystem::path& dir, const Model<float>& model);
// Throws DimensionError when the parameter file disagrees with the config.
Model<float> load_checkpoint(const std::filesystem::path& dir);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace fencenet
