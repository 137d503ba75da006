#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"

#include "fencenet/model.hpp"
#include "fencenet/preprocess.hpp"

namespace fencenet {

struct TrainConfig {
  int epochs = 103;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  // Throws ConfigError when epochs < 1, batch_size < 1 or learning_rate <= 0.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);

// First and second moment estimates for every parameter, plus the step count.
template <typename T>
struct AdamState {
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::int64_t step = 0;
};

// One bias-corrected Adam update of every parameter from its .grad(). Weight
// decay, when nonzero, is added to the gradient as an L2 term.
template <typename T>
void adam_step(ParameterList<T>& params, AdamState<T>& state, const TrainConfig& config);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;  // training-mode predictions during the pass
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  std::uint64_t parameter_checksum = 0;
};

void write_train_log(const std::filesystem::path& path, const TrainLog& log);

// Packs windows [begin, end) of `order` into a [B, C, L] tensor.
Tensor<float> batch_tensor(std::span<const WindowSample> windows, std::span<const std::size_t> order);

// Mini-batch Adam on mean cross-entropy. Shuffling and dropout draw from
// streams derived from config.seed, so a run is reproducible from (seed, data).
class Trainer {
 public:
  Trainer(Model<float>& model, const TrainConfig& config);

  // One pass over shuffled windows. Throws NumericalError on a non-finite loss.
  EpochStats run_epoch(std::span<const WindowSample> windows);

  int epochs_run() const { return epoch_; }

 private:
  Model<float>& model_;
  TrainConfig config_;
  ParameterList<float> params_;
  AdamState<float> state_;
  Rng shuffle_rng_;
  Rng dropout_rng_;
  int epoch_ = 0;
};

// Runs config.epochs epochs. `on_epoch` (optional) sees each epoch's stats.
TrainLog train(Model<float>& model, std::span<const WindowSample> windows, const TrainConfig& config,
               const std::function<void(const EpochStats&)>& on_epoch = {});

// Eval-mode argmax over windows, batched.
std::vector<int> predict_windows(const Model<float>& model, std::span<const WindowSample> windows,
                                 std::size_t batch_size = 256);

extern template struct AdamState<float>;
extern template struct AdamState<double>;

}  // namespace fencenet
