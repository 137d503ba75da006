#include "fencenet/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fencenet/errors.hpp"

namespace fencenet {

namespace {

constexpr int kMinReceptiveField = 28;

template <typename T>
Tensor<T> he_normal(std::size_t rows, std::size_t cols, double gain, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(gain / static_cast<double>(cols)));
  std::vector<T> values(rows * cols);
  for (auto& v : values) v = static_cast<T>(normal(rng));
  return Tensor<T>::from({rows, cols}, std::move(values), true);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::fencenet: return "fencenet";
    case ModelKind::fencenet_wide: return "fencenet_wide";
    case ModelKind::bifencenet: return "bifencenet";
    case ModelKind::bifencenet_forward2: return "bifencenet_forward2";
    case ModelKind::acausal_flatten: return "acausal_flatten";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (auto kind : {ModelKind::fencenet, ModelKind::fencenet_wide, ModelKind::bifencenet,
                    ModelKind::bifencenet_forward2, ModelKind::acausal_flatten}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

bool ModelConfig::bidirectional() const {
  return kind == ModelKind::bifencenet || kind == ModelKind::bifencenet_forward2;
}

std::vector<TcnBlockConfig> ModelConfig::block_configs() const {
  std::vector<TcnBlockConfig> out;
  int in = input_channels;
  for (const auto& b : blocks) {
    out.push_back({in, b.channels, b.kernel_size, b.dilation, dropout_rate});
    in = b.channels;
  }
  return out;
}

int ModelConfig::receptive_field() const {
  return stack_receptive_field(block_configs());
}

void ModelConfig::validate() const {
  std::vector<std::string> failures;
  const std::size_t expected_blocks = bidirectional() ? 4 : 6;
  if (blocks.size() != expected_blocks) {
    failures.push_back(std::string(to_string(kind)) + " needs " + std::to_string(expected_blocks) +
                       " blocks per stack, got " + std::to_string(blocks.size()));
  }
  if (input_channels < 1) failures.emplace_back("input_channels must be positive");
  if (input_length < 1) failures.emplace_back("input_length must be positive");
  if (dense_hidden < 1) failures.emplace_back("dense_hidden must be positive");
  if (num_classes < 2) failures.emplace_back("num_classes must be at least 2");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) failures.emplace_back("dropout_rate must be in [0, 1)");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.channels < 1 || b.kernel_size < 1 || b.dilation < 1) {
      failures.push_back("block " + std::to_string(i) + " needs positive channels, kernel_size and dilation");
    }
    if (i > 0 && b.channels < blocks[i - 1].channels) {
      failures.push_back("hidden sizes must be non-decreasing (block " + std::to_string(i) + ")");
    }
    if (i > 0 && b.kernel_size > blocks[i - 1].kernel_size) {
      failures.push_back("kernel sizes must be non-increasing (block " + std::to_string(i) + ")");
    }
  }
  if (!blocks.empty() && receptive_field() < kMinReceptiveField) {
    failures.push_back("receptive field " + std::to_string(receptive_field()) + " is below " +
                       std::to_string(kMinReceptiveField));
  }
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << "invalid model config:";
    for (const auto& f : failures) msg << "\n  - " << f;
    throw ConfigError(msg.str());
  }
}

void to_json(nlohmann::json& j, const ModelConfig& config) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : config.blocks) {
    blocks.push_back({{"channels", b.channels}, {"kernel_size", b.kernel_size}, {"dilation", b.dilation}});
  }
  j = {{"kind", std::string(to_string(config.kind))},
       {"input_channels", config.input_channels},
       {"input_length", config.input_length},
       {"blocks", blocks},
       {"dense_hidden", config.dense_hidden},
       {"num_classes", config.num_classes},
       {"dropout_rate", config.dropout_rate}};
}

void from_json(const nlohmann::json& j, ModelConfig& config) {
  try {
    ModelConfig out;
    out.kind = model_kind_from_string(j.at("kind").get<std::string>());
    out.input_channels = j.value("input_channels", out.input_channels);
    out.input_length = j.value("input_length", out.input_length);
    out.dense_hidden = j.value("dense_hidden", out.dense_hidden);
    out.num_classes = j.value("num_classes", out.num_classes);
    out.dropout_rate = j.value("dropout_rate", out.dropout_rate);
    for (const auto& b : j.at("blocks")) {
      out.blocks.push_back({b.at("channels").get<int>(), b.at("kernel_size").get<int>(), b.value("dilation", 1)});
    }
    config = std::move(out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model config: ") + e.what());
  }
}

template <typename T>
Model<T>::Model(const ModelConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const auto blocks = config_.block_configs();
  const auto padding = config_.kind == ModelKind::acausal_flatten ? ops::ConvPadding::centered
                                                                  : ops::ConvPadding::causal;
  stacks_.emplace_back(blocks, padding, rng);
  if (config_.bidirectional()) stacks_.emplace_back(blocks, padding, rng);

  std::size_t readout = static_cast<std::size_t>(stacks_.front().out_channels()) * stacks_.size();
  if (config_.kind == ModelKind::acausal_flatten) readout *= static_cast<std::size_t>(config_.input_length);
  const auto hidden = static_cast<std::size_t>(config_.dense_hidden);
  const auto classes = static_cast<std::size_t>(config_.num_classes);
  hidden_weight_ = he_normal<T>(hidden, readout, 2.0, rng);
  hidden_bias_ = Tensor<T>::zeros({hidden}, true);
  output_weight_ = he_normal<T>(classes, hidden, 1.0, rng);
  output_bias_ = Tensor<T>::zeros({classes}, true);
}

template <typename T>
void Model<T>::check_input(const Tensor<T>& input) const {
  if (input.rank() != 2 && input.rank() != 3) {
    throw DimensionError("model input must be [C, L] or [B, C, L], got " + shape_string(input.shape()));
  }
  const std::size_t c = input.dim(input.rank() - 2);
  const std::size_t l = input.dim(input.rank() - 1);
  if (c != static_cast<std::size_t>(config_.input_channels) || l != static_cast<std::size_t>(config_.input_length)) {
    throw DimensionError("model expects [" + std::to_string(config_.input_channels) + ", " +
                         std::to_string(config_.input_length) + "] windows, got " + shape_string(input.shape()));
  }
}

template <typename T>
Tensor<T> Model<T>::features(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng,
                             std::size_t direction) const {
  check_input(input);
  return stacks_.at(direction).forward(tape, input, mode, rng);
}

template <typename T>
Tensor<T> Model<T>::head(Tape<T>& tape, const Tensor<T>& readout) const {
  auto h = ops::relu(tape, ops::dense(tape, readout, hidden_weight_, hidden_bias_));
  return ops::dense(tape, h, output_weight_, output_bias_);
}

template <typename T>
Tensor<T> Model<T>::forward(Tape<T>& tape, const Tensor<T>& input, Mode mode, Rng* rng) const {
  check_input(input);
  switch (config_.kind) {
    case ModelKind::fencenet:
    case ModelKind::fencenet_wide:
      return head(tape, ops::last_step(tape, stacks_[0].forward(tape, input, mode, rng)));
    case ModelKind::acausal_flatten:
      return head(tape, ops::flatten(tape, stacks_[0].forward(tape, input, mode, rng)));
    case ModelKind::bifencenet:
    case ModelKind::bifencenet_forward2: {
      const auto forward_last = ops::last_step(tape, stacks_[0].forward(tape, input, mode, rng));
      const Tensor<T> second_input =
          config_.kind == ModelKind::bifencenet ? ops::reverse_time(tape, input) : input;
      const auto backward_last = ops::last_step(tape, stacks_[1].forward(tape, second_input, mode, rng));
      return head(tape, ops::concat(tape, forward_last, backward_last));
    }
  }
  throw ConfigError("unhandled model kind");
}

template <typename T>
ParameterList<T> Model<T>::parameters() const {
  ParameterList<T> out;
  for (std::size_t i = 0; i < stacks_.size(); ++i) {
    stacks_[i].append_parameters(i == 0 ? "forward." : "backward.", out);
  }
  out.push_back({"head.hidden.weight", hidden_weight_});
  out.push_back({"head.hidden.bias", hidden_bias_});
  out.push_back({"head.output.weight", output_weight_});
  out.push_back({"head.output.bias", output_bias_});
  return out;
}

template <typename T>
std::size_t Model<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.numel();
  return n;
}

void save_checkpoint(const std::filesystem::path& dir, const Model<float>& model) {
  std::filesystem::create_directories(dir);
  std::ofstream config(dir / "model.json");
  config << nlohmann::json(model.config()).dump(2) << '\n';
  if (!config) throw DataError("cannot write " + (dir / "model.json").string());
  save_parameters(dir / "model.params", model.parameters());
}

Model<float> load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw DataError("checkpoint config not found: " + (dir / "model.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed checkpoint config: " + std::string(e.what()));
  }
  const auto config = j.get<ModelConfig>();
  Rng rng(0);
  Model<float> model(config, rng);
  auto params = model.parameters();
  assign_parameters(params, load_parameters<float>(dir / "model.params"));
  return model;
}

template class Model<float>;
template class Model<double>;

}  // namespace fencenet
