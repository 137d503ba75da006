#include "doctest.h"

#include <cmath>
#include <limits>

#include "fencenet/errors.hpp"
#include "fencenet/presets.hpp"
#include "fencenet/synth.hpp"
#include "fencenet/train.hpp"
#include "helpers.hpp"

using namespace fencenet;
using fencenet::testing::random_tensor;

namespace {

std::vector<WindowSample> synthetic_windows(std::size_t count, std::uint64_t seed) {
  SynthConfig sc;
  sc.num_fencers = 2;
  sc.reps_per_action = 2;
  sc.seed = seed;
  const auto dataset = synth_generate(sc);
  PreprocessConfig pc;
  std::vector<WindowSample> windows;
  for (std::size_t i = 0; windows.size() < count; ++i) {
    const auto& seq = dataset[(i * 7) % dataset.size()];
    auto w = sample_windows(seq, pc, 0);
    windows.push_back(w[i % w.size()]);
  }
  return windows;
}

// Reference Adam for a single scalar parameter.
struct ScalarAdam {
  double m = 0, v = 0;
  int t = 0;
  double step(double param, double g, const TrainConfig& c) {
    ++t;
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g * g;
    const double mh = m / (1 - std::pow(c.beta1, t));
    const double vh = v / (1 - std::pow(c.beta2, t));
    return param - c.learning_rate * mh / (std::sqrt(vh) + c.epsilon);
  }
};

}  // namespace

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.seed = 77;
  c.epochs = 5;
  const auto back = nlohmann::json(c).get<TrainConfig>();
  CHECK(back.seed == 77);
  CHECK(back.epochs == 5);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Rng rng(1);
  ParameterList<double> params = {{"w", random_tensor<double>({4, 3}, rng, true)}};
  const std::vector<double> before(params[0].tensor.data().begin(), params[0].tensor.data().end());
  params[0].tensor.zero_grad();
  AdamState<double> state;
  TrainConfig c;
  for (int i = 0; i < 5; ++i) adam_step(params, state, c);
  CHECK(std::vector<double>(params[0].tensor.data().begin(), params[0].tensor.data().end()) == before);
}

TEST_CASE("adam: first step is about -lr * sign(g)") {
  Rng rng(2);
  ParameterList<double> params = {{"w", random_tensor<double>({10}, rng, true)}};
  const std::vector<double> before(params[0].tensor.data().begin(), params[0].tensor.data().end());
  auto grad = params[0].tensor.mutable_grad();
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = (i % 2 == 0 ? 1.0 : -1.0) * (0.01 + 0.3 * i);
  AdamState<double> state;
  TrainConfig c;
  adam_step(params, state, c);
  for (std::size_t i = 0; i < 10; ++i) {
    const double step = params[0].tensor.at(i) - before[i];
    CHECK(step == doctest::Approx(-c.learning_rate * (grad[i] > 0 ? 1.0 : -1.0)).epsilon(1e-5));
  }
}

TEST_CASE("adam: constant gradient step tends to lr and matches a scalar reference") {
  ParameterList<double> params = {{"w", Tensor<double>::from({2}, {0.5, -0.25}, true)}};
  AdamState<double> state;
  TrainConfig c;
  c.learning_rate = 0.01;
  ScalarAdam ref0, ref1;
  double p0 = 0.5, p1 = -0.25;
  double last_step = 0.0;
  for (int i = 0; i < 2000; ++i) {
    auto g = params[0].tensor.mutable_grad();
    g[0] = 0.3;
    g[1] = -2.0;
    const double before = params[0].tensor.at(0);
    adam_step(params, state, c);
    last_step = params[0].tensor.at(0) - before;
    p0 = ref0.step(p0, 0.3, c);
    p1 = ref1.step(p1, -2.0, c);
  }
  CHECK(std::abs(last_step) == doctest::Approx(c.learning_rate).epsilon(1e-4));
  CHECK(params[0].tensor.at(0) == doctest::Approx(p0).epsilon(1e-12));
  CHECK(params[0].tensor.at(1) == doctest::Approx(p1).epsilon(1e-12));
}

TEST_CASE("adam: weight decay adds an L2 term") {
  ParameterList<double> params = {{"w", Tensor<double>::from({1}, {2.0}, true)}};
  params[0].tensor.zero_grad();
  AdamState<double> state;
  TrainConfig c;
  c.weight_decay = 0.1;
  ScalarAdam ref;
  const double expected = ref.step(2.0, 0.1 * 2.0, c);
  adam_step(params, state, c);
  CHECK(params[0].tensor.at(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("one epoch changes every parameter and the checksum") {
  Rng rng(3);
  const auto preset = load_preset("fencenet-small");
  Model<float> model(preset.model, rng);
  const auto windows = synthetic_windows(64, 1);
  auto params = model.parameters();
  std::vector<std::vector<float>> before;
  for (const auto& p : params) before.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  const auto checksum = parameter_checksum(params);
  TrainConfig c;
  c.epochs = 1;
  c.batch_size = 32;
  const auto log = train(model, windows, c);
  CHECK(log.epochs.size() == 1);
  CHECK(log.parameter_checksum != checksum);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::vector<float> after(params[i].tensor.data().begin(), params[i].tensor.data().end());
    CHECK_MESSAGE(after != before[i], params[i].name);
  }
}

TEST_CASE("training is reproducible from the seed") {
  const auto preset = load_preset("fencenet-small");
  const auto windows = synthetic_windows(96, 2);
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 32;
  c.seed = 5;
  Rng r1(9), r2(9);
  Model<float> a(preset.model, r1), b(preset.model, r2);
  const auto la = train(a, windows, c);
  const auto lb = train(b, windows, c);
  CHECK(la.parameter_checksum == lb.parameter_checksum);
  for (std::size_t e = 0; e < 2; ++e) {
    CHECK(la.epochs[e].mean_loss == lb.epochs[e].mean_loss);
    CHECK(la.epochs[e].train_accuracy == lb.epochs[e].train_accuracy);
  }
  c.seed = 6;
  Rng r3(9);
  Model<float> other(preset.model, r3);
  CHECK(train(other, windows, c).parameter_checksum != la.parameter_checksum);
}

TEST_CASE("overfit: 32 windows are memorized and the smoothed loss falls") {
  Rng rng(4);
  auto preset = load_preset("fencenet");
  preset.model.dropout_rate = 0.0;
  Model<float> model(preset.model, rng);
  const auto windows = synthetic_windows(32, 3);
  TrainConfig c;
  c.batch_size = 32;
  c.learning_rate = 3e-4;
  c.seed = 1;
  Trainer trainer(model, c);
  std::vector<double> losses;
  bool memorized = false;
  for (int epoch = 0; epoch < 200 && !memorized; ++epoch) {
    losses.push_back(trainer.run_epoch(windows).mean_loss);
    const auto predictions = predict_windows(model, windows);
    memorized = true;
    for (std::size_t i = 0; i < windows.size(); ++i) memorized = memorized && predictions[i] == windows[i].label;
  }
  CHECK(memorized);
  REQUIRE(losses.size() >= 10);
  // five-epoch moving average, compared over disjoint blocks
  std::vector<double> smoothed;
  for (std::size_t i = 0; i + 5 <= losses.size(); i += 5) {
    double s = 0.0;
    for (std::size_t k = i; k < i + 5; ++k) s += losses[k];
    smoothed.push_back(s / 5.0);
  }
  for (std::size_t i = 1; i < smoothed.size(); ++i) CHECK(smoothed[i] < smoothed[i - 1]);
}

TEST_CASE("non-finite loss aborts with epoch, batch and learning rate") {
  Rng rng(5);
  const auto preset = load_preset("fencenet-small");
  Model<float> model(preset.model, rng);
  for (auto& p : model.parameters()) {
    if (p.name == "head.output.bias") p.tensor.mutable_data()[0] = std::numeric_limits<float>::quiet_NaN();
  }
  TrainConfig c;
  c.epochs = 1;
  try {
    train(model, synthetic_windows(16, 4), c);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("epoch 1") != std::string::npos);
    CHECK(msg.find("batch 0") != std::string::npos);
    CHECK(msg.find("lr") != std::string::npos);
  }
}

TEST_CASE("training rejects empty or mis-shaped input") {
  Rng rng(6);
  const auto preset = load_preset("fencenet-small");
  Model<float> model(preset.model, rng);
  TrainConfig c;
  c.epochs = 1;
  CHECK_THROWS_AS(train(model, std::vector<WindowSample>{}, c), ArgumentError);
  auto windows = synthetic_windows(4, 5);
  windows[2].channels = 12;
  windows[2].data.resize(12 * 28);
  CHECK_THROWS_AS(train(model, windows, c), DimensionError);
}
