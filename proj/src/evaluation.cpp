#include "fencenet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "fencenet/errors.hpp"

namespace fencenet {

namespace {

[[noreturn]] void rethrow_with_context(const std::exception_ptr& error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const DimensionError& e) {
    throw DimensionError(context + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(context + e.what());
  } catch (const DataError& e) {
    throw DataError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + e.what());
  }
}

std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  return derive_rng(seed, "fold", static_cast<std::uint64_t>(fold))();
}

std::string percent(double fraction) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << 100.0 * fraction;
  return out.str();
}

std::string format_fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; errors are rethrown in index order.
template <typename Fn>
void run_parallel(std::size_t n, int jobs, Fn fn, const std::function<std::string(std::size_t)>& context) {
  std::vector<std::exception_ptr> errors(n);
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) rethrow_with_context(errors[i], context(i));
  }
}

}  // namespace

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"name", c.name}, {"model", c.model}, {"train", c.train}, {"preprocess", c.preprocess}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  try {
    ExperimentConfig out;
    out.name = j.value("name", out.name);
    out.model = j.at("model").get<ModelConfig>();
    if (j.contains("train")) out.train = j["train"].get<TrainConfig>();
    if (j.contains("preprocess")) out.preprocess = j["preprocess"].get<PreprocessConfig>();
    c = std::move(out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

VoteCounts tally_votes(std::span<const int> window_predictions) {
  VoteCounts votes{};
  for (int p : window_predictions) {
    if (p < 0 || p >= kNumClasses) throw ArgumentError("prediction outside the class range");
    ++votes[static_cast<std::size_t>(p)];
  }
  return votes;
}

int majority_vote(const VoteCounts& votes) {
  int best = 0;
  for (int k = 1; k < kNumClasses; ++k) {
    if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) best = k;
  }
  if (votes[static_cast<std::size_t>(best)] == 0) throw DataError("no window predictions to vote on");
  return best;
}

VideoPrediction predict_video(const Model<float>& model, const PoseSequence& seq, const PreprocessConfig& preprocess,
                              std::uint64_t seed) {
  const auto windows = build_samples(seq, preprocess, seed);
  if (windows.empty()) throw DataError("video " + seq.video_id + " produced no windows");
  const auto predictions = predict_windows(model, windows);
  VideoPrediction out;
  out.video_id = seq.video_id;
  out.fencer_id = seq.fencer_id;
  out.label = seq.label();
  out.votes = tally_votes(predictions);
  out.predicted = majority_vote(out.votes);
  return out;
}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || truth >= kNumClasses || predicted < 0 || predicted >= kNumClasses) {
    throw ArgumentError("confusion matrix index out of range");
  }
  ++counts_[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
}

int ConfusionMatrix::row_total(int truth) const {
  int n = 0;
  for (int v : counts_.at(static_cast<std::size_t>(truth))) n += v;
  return n;
}

int ConfusionMatrix::total() const {
  int n = 0;
  for (int k = 0; k < kNumClasses; ++k) n += row_total(k);
  return n;
}

int ConfusionMatrix::trace() const {
  int n = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) n += counts_[k][k];
  return n;
}

double ConfusionMatrix::row_percent(int truth, int predicted) const {
  const int row = row_total(truth);
  return row == 0 ? 0.0 : 100.0 * count(truth, predicted) / row;
}

double FoldResult::accuracy() const {
  return test_videos == 0 ? 0.0 : static_cast<double>(correct_videos) / static_cast<double>(test_videos);
}

double FoldResult::window_accuracy() const {
  return test_windows == 0 ? 0.0 : static_cast<double>(correct_windows) / static_cast<double>(test_windows);
}

ConfusionMatrix EvaluationReport::confusion() const {
  ConfusionMatrix m;
  for (const auto& p : predictions) m.add(p.label, p.predicted);
  return m;
}

double EvaluationReport::accuracy() const {
  if (predictions.empty()) return 0.0;
  const auto correct = std::count_if(predictions.begin(), predictions.end(),
                                     [](const VideoPrediction& p) { return p.label == p.predicted; });
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double EvaluationReport::window_accuracy() const {
  std::size_t windows = 0, correct = 0;
  for (const auto& f : folds) {
    windows += f.test_windows;
    correct += f.correct_windows;
  }
  return windows == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(windows);
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  const auto confusion = report.confusion();
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"held_out_fencer", f.held_out_fencer},
                     {"train_videos", f.train_videos},
                     {"train_windows", f.train_windows},
                     {"test_videos", f.test_videos},
                     {"correct_videos", f.correct_videos},
                     {"accuracy", f.accuracy()},
                     {"test_windows", f.test_windows},
                     {"correct_windows", f.correct_windows},
                     {"window_accuracy", f.window_accuracy()},
                     {"parameter_checksum", f.log.parameter_checksum}});
  }
  nlohmann::json classes = nlohmann::json::array();
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json percents = nlohmann::json::array();
  nlohmann::json per_class = nlohmann::json::object();
  for (int t = 0; t < kNumClasses; ++t) {
    classes.push_back(std::string(action_name(t)));
    nlohmann::json count_row = nlohmann::json::array();
    nlohmann::json percent_row = nlohmann::json::array();
    for (int p = 0; p < kNumClasses; ++p) {
      count_row.push_back(confusion.count(t, p));
      percent_row.push_back(confusion.row_percent(t, p));
    }
    counts.push_back(count_row);
    percents.push_back(percent_row);
    per_class[std::string(action_name(t))] = confusion.class_accuracy(t);
  }
  nlohmann::json predictions = nlohmann::json::array();
  for (const auto& p : report.predictions) {
    predictions.push_back({{"video_id", p.video_id},
                           {"fencer_id", p.fencer_id},
                           {"label", std::string(action_name(p.label))},
                           {"predicted", std::string(action_name(p.predicted))},
                           {"votes", p.votes},
                           {"fold", p.fold}});
  }
  return {{"label", report.label},
          {"protocol", report.protocol},
          {"parameter_count", report.parameter_count},
          {"config", report.config},
          {"num_folds", report.folds.size()},
          {"num_videos", report.predictions.size()},
          {"correct_videos", confusion.trace()},
          {"accuracy", report.accuracy()},
          {"window_accuracy", report.window_accuracy()},
          {"classes", classes},
          {"per_class_accuracy", per_class},
          {"confusion_counts", counts},
          {"confusion_percent", percents},
          {"folds", folds},
          {"predictions", predictions}};
}

std::string report_to_text(const EvaluationReport& report) {
  const auto confusion = report.confusion();
  std::ostringstream out;
  out << "variant:          " << report.label << '\n'
      << "protocol:         " << report.protocol << " (" << report.folds.size() << " fold"
      << (report.folds.size() == 1 ? "" : "s") << ")\n"
      << "parameters:       " << report.parameter_count << '\n'
      << "video accuracy:   " << percent(report.accuracy()) << "% (" << confusion.trace() << '/' << confusion.total()
      << ")\n"
      << "window accuracy:  " << percent(report.window_accuracy()) << "%\n\n";

  out << std::setw(6) << "fold" << std::setw(8) << "fencer" << std::setw(8) << "videos" << std::setw(9) << "correct"
      << std::setw(10) << "acc(%)" << std::setw(12) << "win acc(%)" << '\n';
  for (const auto& f : report.folds) {
    out << std::setw(6) << f.fold << std::setw(8) << f.held_out_fencer << std::setw(8) << f.test_videos
        << std::setw(9) << f.correct_videos << std::setw(10) << percent(f.accuracy()) << std::setw(12)
        << percent(f.window_accuracy()) << '\n';
  }

  out << "\nconfusion matrix (rows: true class, % of row)\n" << std::setw(6) << "";
  for (int p = 0; p < kNumClasses; ++p) out << std::setw(7) << action_name(p);
  out << std::setw(8) << "n" << '\n';
  for (int t = 0; t < kNumClasses; ++t) {
    out << std::setw(6) << action_name(t);
    for (int p = 0; p < kNumClasses; ++p) out << std::setw(7) << format_fixed(confusion.row_percent(t, p), 0);
    out << std::setw(8) << confusion.row_total(t) << '\n';
  }
  return out.str();
}

std::string confusion_to_csv(const EvaluationReport& report) {
  const auto confusion = report.confusion();
  std::ostringstream out;
  out << "true";
  for (int p = 0; p < kNumClasses; ++p) out << ',' << action_name(p);
  for (int p = 0; p < kNumClasses; ++p) out << ',' << action_name(p) << "_pct";
  out << '\n';
  for (int t = 0; t < kNumClasses; ++t) {
    out << action_name(t);
    for (int p = 0; p < kNumClasses; ++p) out << ',' << confusion.count(t, p);
    for (int p = 0; p < kNumClasses; ++p) out << ',' << format_fixed(confusion.row_percent(t, p), 2);
    out << '\n';
  }
  return out.str();
}

std::string predictions_to_csv(std::span<const VideoPrediction> predictions) {
  std::ostringstream out;
  out << "video_id,fencer_id,label,predicted,fold";
  for (int k = 0; k < kNumClasses; ++k) out << ",votes_" << action_name(k);
  out << '\n';
  for (const auto& p : predictions) {
    out << p.video_id << ',' << p.fencer_id << ',' << action_name(p.label) << ',' << action_name(p.predicted) << ','
        << p.fold;
    for (int v : p.votes) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

void write_report(const std::filesystem::path& dir, const EvaluationReport& report) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_text(dir / "report.txt", report_to_text(report));
  write_text(dir / "confusion.csv", confusion_to_csv(report));
  write_text(dir / "predictions.csv", predictions_to_csv(report.predictions));
  for (const auto& f : report.folds) {
    char name[32];
    std::snprintf(name, sizeof(name), "fold_%02d", f.fold);
    const auto fold_dir = dir / "folds" / name;
    std::filesystem::create_directories(fold_dir);
    write_train_log(fold_dir / "train_log.jsonl", f.log);
  }
}

ExperimentConfig resolve_experiment(const ExperimentConfig& config, const Dataset& dataset,
                                    std::span<const std::size_t> train_indices) {
  ExperimentConfig out = config;
  out.model.input_channels = keypoint_channels(out.preprocess.keypoints);
  if (out.preprocess.padding == PaddingMode::zero_pad) {
    if (out.preprocess.pad_length == 0) {
      out.preprocess.pad_length = zero_pad_target(dataset, train_indices, out.preprocess.window);
    }
    out.model.input_length = out.preprocess.pad_length;
  } else {
    out.model.input_length = out.preprocess.window;
  }
  return out;
}

FoldResult run_fold(const Dataset& dataset, const Split& split, const ExperimentConfig& config, int fold,
                    std::vector<VideoPrediction>& predictions, const RunOptions& options, Model<float>* trained) {
  if (split.train.empty()) throw ArgumentError("training split is empty");
  const auto resolved = resolve_experiment(config, dataset, split.train);
  const std::uint64_t data_seed = resolved.train.seed;

  std::vector<WindowSample> train_windows;
  for (auto i : split.train) {
    auto samples = build_samples(dataset[i], resolved.preprocess, data_seed);
    train_windows.insert(train_windows.end(), std::make_move_iterator(samples.begin()),
                         std::make_move_iterator(samples.end()));
  }

  auto train_config = resolved.train;
  train_config.seed = fold_seed(resolved.train.seed, fold);
  auto init_rng = derive_rng(train_config.seed, "init");
  Model<float> model(resolved.model, init_rng);

  FoldResult result;
  result.fold = fold;
  result.train_videos = split.train.size();
  result.train_windows = train_windows.size();
  result.log = train(model, train_windows, train_config, [&](const EpochStats& e) {
    if (options.progress) {
      options.progress("fold " + std::to_string(fold) + " epoch " + std::to_string(e.epoch) + " loss " +
                       format_fixed(e.mean_loss, 4) + " train acc " + percent(e.train_accuracy) + "%");
    }
  });

  for (auto i : split.test) {
    const auto windows = build_samples(dataset[i], resolved.preprocess, data_seed);
    const auto window_predictions = predict_windows(model, windows);
    VideoPrediction p;
    p.video_id = dataset[i].video_id;
    p.fencer_id = dataset[i].fencer_id;
    p.label = dataset[i].label();
    p.votes = tally_votes(window_predictions);
    p.predicted = majority_vote(p.votes);
    p.fold = fold;
    result.test_windows += window_predictions.size();
    result.correct_windows += static_cast<std::size_t>(
        std::count(window_predictions.begin(), window_predictions.end(), p.label));
    if (p.predicted == p.label) ++result.correct_videos;
    predictions.push_back(std::move(p));
  }
  result.test_videos = split.test.size();
  if (trained != nullptr) *trained = std::move(model);
  return result;
}

EvaluationReport run_cv_pi(const Dataset& dataset, const ExperimentConfig& config, const RunOptions& options) {
  const auto fencers = fencer_ids(dataset);
  if (fencers.size() < 2) throw ArgumentError("person-independent cross-validation needs at least two fencers");

  std::vector<FoldResult> folds(fencers.size());
  std::vector<std::vector<VideoPrediction>> fold_predictions(fencers.size());
  std::vector<ExperimentConfig> resolved(fencers.size());
  std::mutex progress_mutex;
  RunOptions fold_options = options;
  if (options.progress) {
    fold_options.progress = [&](const std::string& msg) {
      std::lock_guard lock(progress_mutex);
      options.progress(config.name + ": " + msg);
    };
  }
  run_parallel(
      fencers.size(), options.jobs,
      [&](std::size_t i) {
        const auto split = split_pi(dataset, fencers[i]);
        resolved[i] = resolve_experiment(config, dataset, split.train);
        folds[i] = run_fold(dataset, split, config, static_cast<int>(i) + 1, fold_predictions[i], fold_options);
        folds[i].held_out_fencer = fencers[i];
      },
      [&](std::size_t i) {
        return "fold " + std::to_string(i + 1) + " (fencer " + std::to_string(fencers[i]) + "): ";
      });

  EvaluationReport report;
  report.label = config.name;
  report.protocol = "pi";
  report.config = resolved.front();
  Rng rng(0);
  report.parameter_count = Model<float>(resolved.front().model, rng).parameter_count();
  report.folds = std::move(folds);
  for (auto& preds : fold_predictions) {
    report.predictions.insert(report.predictions.end(), preds.begin(), preds.end());
  }
  return report;
}

EvaluationReport run_random_split(const Dataset& dataset, double fraction, const ExperimentConfig& config,
                                  const RunOptions& options) {
  auto rng = derive_rng(config.train.seed, "random-split");
  const auto split = split_random(dataset, fraction, rng);
  if (split.test.empty()) throw ArgumentError("random split produced an empty test set (fraction " +
                                              format_fixed(fraction, 3) + ")");
  EvaluationReport report;
  report.label = config.name;
  report.protocol = "random";
  report.config = resolve_experiment(config, dataset, split.train);
  Model<float> model(report.config.model, rng);
  report.parameter_count = model.parameter_count();
  RunOptions fold_options = options;
  if (options.progress) {
    fold_options.progress = [&](const std::string& msg) { options.progress(config.name + ": " + msg); };
  }
  report.folds.push_back(run_fold(dataset, split, config, 1, report.predictions, fold_options));
  return report;
}

std::vector<AblationRow> run_ablation_suite(const Dataset& dataset, std::span<const ExperimentConfig> variants,
                                            const RunOptions& options) {
  std::vector<AblationRow> rows;
  for (const auto& variant : variants) {
    AblationRow row;
    row.variant = variant.name;
    row.report = run_cv_pi(dataset, variant, options);
    row.parameters = row.report.parameter_count;
    const auto confusion = row.report.confusion();
    row.accuracy = 100.0 * row.report.accuracy();
    for (int k = 0; k < kNumClasses; ++k) row.class_accuracy[static_cast<std::size_t>(k)] = confusion.class_accuracy(k);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ablation_to_text(std::span<const AblationRow> rows) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "variant" << std::right << std::setw(12) << "params(1e6)" << std::setw(10)
      << "acc(%)";
  for (int k = 0; k < kNumClasses; ++k) out << std::setw(6) << action_name(k);
  out << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.variant << std::right << std::setw(12)
        << format_fixed(static_cast<double>(r.parameters) / 1e6, 2) << std::setw(10) << format_fixed(r.accuracy, 1);
    for (double c : r.class_accuracy) out << std::setw(6) << format_fixed(c, 0);
    out << '\n';
  }
  return out.str();
}

nlohmann::json ablation_to_json(std::span<const AblationRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json per_class = nlohmann::json::object();
    for (int k = 0; k < kNumClasses; ++k) {
      per_class[std::string(action_name(k))] = r.class_accuracy[static_cast<std::size_t>(k)];
    }
    out.push_back({{"variant", r.variant},
                   {"parameters", r.parameters},
                   {"parameters_millions", static_cast<double>(r.parameters) / 1e6},
                   {"accuracy", r.accuracy},
                   {"class_accuracy", per_class}});
  }
  return out;
}

}  // namespace fencenet
