#include "fencenet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fencenet/errors.hpp"

namespace fencenet {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("adam betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},       {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
       {"beta1", c.beta1},         {"beta2", c.beta2},           {"epsilon", c.epsilon},
       {"weight_decay", c.weight_decay}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  try {
    TrainConfig out;
    out.epochs = j.value("epochs", out.epochs);
    out.batch_size = j.value("batch_size", out.batch_size);
    out.learning_rate = j.value("learning_rate", out.learning_rate);
    out.beta1 = j.value("beta1", out.beta1);
    out.beta2 = j.value("beta2", out.beta2);
    out.epsilon = j.value("epsilon", out.epsilon);
    out.weight_decay = j.value("weight_decay", out.weight_decay);
    out.seed = j.value("seed", out.seed);
    c = out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed train config: ") + e.what());
  }
}

template <typename T>
void adam_step(ParameterList<T>& params, AdamState<T>& state, const TrainConfig& config) {
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.tensor.numel(), T(0));
      state.second_moment.emplace_back(p.tensor.numel(), T(0));
    }
  }
  if (state.first_moment.size() != params.size()) throw DimensionError("adam state does not match parameter list");
  ++state.step;
  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].tensor.mutable_data();
    auto grads = params[i].tensor.grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != values.size()) throw DimensionError("adam state shape mismatch for " + params[i].name);
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double g = static_cast<double>(grads[k]) + config.weight_decay * values[k];
      const double mk = config.beta1 * m[k] + (1.0 - config.beta1) * g;
      const double vk = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double update = (mk / correction1) / (std::sqrt(vk / correction2) + config.epsilon);
      values[k] = static_cast<T>(values[k] - config.learning_rate * update);
    }
  }
}

void write_train_log(const std::filesystem::path& path, const TrainLog& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write train log " + path.string());
  for (const auto& e : log.epochs) {
    out << nlohmann::json{{"epoch", e.epoch},
                          {"mean_loss", e.mean_loss},
                          {"train_accuracy", e.train_accuracy},
                          {"seconds", e.seconds}}
               .dump()
        << '\n';
  }
  out << nlohmann::json{{"parameter_checksum", log.parameter_checksum}}.dump() << '\n';
}

Tensor<float> batch_tensor(std::span<const WindowSample> windows, std::span<const std::size_t> order) {
  if (order.empty()) throw ArgumentError("empty batch");
  const auto& first = windows[order.front()];
  const auto c = static_cast<std::size_t>(first.channels);
  const auto l = static_cast<std::size_t>(first.length);
  std::vector<float> data;
  data.reserve(order.size() * c * l);
  for (auto idx : order) {
    const auto& w = windows[idx];
    if (static_cast<std::size_t>(w.channels) != c || static_cast<std::size_t>(w.length) != l) {
      throw DimensionError("window " + w.video_id + "@" + std::to_string(w.start_offset) +
                           " does not match the batch shape");
    }
    data.insert(data.end(), w.data.begin(), w.data.end());
  }
  return Tensor<float>::from({order.size(), c, l}, std::move(data));
}

Trainer::Trainer(Model<float>& model, const TrainConfig& config)
    : model_(model),
      config_(config),
      params_(model.parameters()),
      shuffle_rng_(derive_rng(config.seed, "train-shuffle")),
      dropout_rng_(derive_rng(config.seed, "train-dropout")) {
  config_.validate();
}

EpochStats Trainer::run_epoch(std::span<const WindowSample> windows) {
  if (windows.empty()) throw ArgumentError("training set is empty");
  const auto start = std::chrono::steady_clock::now();
  ++epoch_;
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), shuffle_rng_);

  double loss_sum = 0.0;
  std::size_t correct = 0;
  const auto batch = static_cast<std::size_t>(config_.batch_size);
  for (std::size_t begin = 0, b = 0; begin < order.size(); begin += batch, ++b) {
    const std::span<const std::size_t> ids(order.data() + begin, std::min(batch, order.size() - begin));
    std::vector<int> labels;
    labels.reserve(ids.size());
    for (auto i : ids) labels.push_back(windows[i].label);

    for (auto& p : params_) p.tensor.zero_grad();
    Tape<float> tape;
    const auto logits = model_.forward(tape, batch_tensor(windows, ids), Mode::train, &dropout_rng_);
    auto non_finite = [&] {
      std::ostringstream msg;
      msg << "non-finite loss at epoch " << epoch_ << ", batch " << b << " (lr " << config_.learning_rate << ")";
      return NumericalError(msg.str());
    };
    Tensor<float> loss;
    try {
      loss = ops::softmax_cross_entropy(tape, logits, labels);
    } catch (const NumericalError&) {
      throw non_finite();
    }
    const double value = loss.item();
    if (!std::isfinite(value)) throw non_finite();
    tape.backward(loss);
    adam_step(params_, state_, config_);

    loss_sum += value * static_cast<double>(ids.size());
    const auto k = logits.dim(1);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto row = logits.data().subspan(r * k, k);
      const auto pred = std::distance(row.begin(), std::max_element(row.begin(), row.end()));
      if (pred == labels[r]) ++correct;
    }
  }
  EpochStats stats;
  stats.epoch = epoch_;
  stats.mean_loss = loss_sum / static_cast<double>(windows.size());
  stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(windows.size());
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

TrainLog train(Model<float>& model, std::span<const WindowSample> windows, const TrainConfig& config,
               const std::function<void(const EpochStats&)>& on_epoch) {
  Trainer trainer(model, config);
  TrainLog log;
  for (int e = 0; e < config.epochs; ++e) {
    log.epochs.push_back(trainer.run_epoch(windows));
    if (on_epoch) on_epoch(log.epochs.back());
  }
  log.parameter_checksum = parameter_checksum(model.parameters());
  return log;
}

std::vector<int> predict_windows(const Model<float>& model, std::span<const WindowSample> windows,
                                 std::size_t batch_size) {
  std::vector<int> predictions;
  predictions.reserve(windows.size());
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::span<const std::size_t> ids(order.data() + begin, std::min(batch_size, order.size() - begin));
    Tape<float> tape(false);
    const auto logits = model.forward(tape, batch_tensor(windows, ids), Mode::eval, nullptr);
    const auto k = logits.dim(1);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto row = logits.data().subspan(r * k, k);
      predictions.push_back(static_cast<int>(std::distance(row.begin(), std::max_element(row.begin(), row.end()))));
    }
  }
  return predictions;
}

template void adam_step(ParameterList<float>&, AdamState<float>&, const TrainConfig&);
template void adam_step(ParameterList<double>&, AdamState<double>&, const TrainConfig&);
template struct AdamState<float>;
template struct AdamState<double>;

}  // namespace fencenet
