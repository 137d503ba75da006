#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fencenet/model.hpp"
#include "fencenet/pose.hpp"
#include "fencenet/preprocess.hpp"
#include "fencenet/splits.hpp"
#include "fencenet/train.hpp"

namespace fencenet {

// Everything needed to train and evaluate one ablation row.
struct ExperimentConfig {
  std::string name = "fencenet";
  ModelConfig model;
  TrainConfig train;
  PreprocessConfig preprocess;
};

void to_json(nlohmann::json& j, const ExperimentConfig& config);
void from_json(const nlohmann::json& j, ExperimentConfig& config);

using VoteCounts = std::array<int, kNumClasses>;

VoteCounts tally_votes(std::span<const int> window_predictions);
// Modal class; ties go to the lowest class index. Throws DataError when no votes were cast.
int majority_vote(const VoteCounts& votes);

struct VideoPrediction {
  std::string video_id;
  int fencer_id = 0;
  int label = 0;
  int predicted = 0;
  VoteCounts votes{};
  int fold = 0;
};

// Samples the video under `preprocess`, classifies every window and votes.
VideoPrediction predict_video(const Model<float>& model, const PoseSequence& seq, const PreprocessConfig& preprocess,
                              std::uint64_t seed);

// Rows are true classes, columns predictions, in the fixed class order.
class ConfusionMatrix {
 public:
  void add(int truth, int predicted);
  int count(int truth, int predicted) const { return counts_.at(truth).at(predicted); }
  int row_total(int truth) const;
  int total() const;
  int trace() const;
  // 100 * count / row_total, or 0 for an empty row.
  double row_percent(int truth, int predicted) const;
  double class_accuracy(int truth) const { return row_percent(truth, truth); }

 private:
  std::array<std::array<int, kNumClasses>, kNumClasses> counts_{};
};

struct FoldResult {
  int fold = 0;
  int held_out_fencer = 0;  // 0 for a random split
  std::size_t train_videos = 0;
  std::size_t train_windows = 0;
  std::size_t test_videos = 0;
  std::size_t correct_videos = 0;
  std::size_t test_windows = 0;
  std::size_t correct_windows = 0;
  TrainLog log;

  double accuracy() const;
  double window_accuracy() const;
};

struct EvaluationReport {
  std::string label;
  std::string protocol;  // "pi" or "random"
  std::size_t parameter_count = 0;
  ExperimentConfig config;  // as resolved for the run (channels, pad length)
  std::vector<FoldResult> folds;
  std::vector<VideoPrediction> predictions;

  // Both are recomputed from `predictions`.
  ConfusionMatrix confusion() const;
  double accuracy() const;
  double window_accuracy() const;
};

nlohmann::json report_to_json(const EvaluationReport& report);
std::string report_to_text(const EvaluationReport& report);
std::string confusion_to_csv(const EvaluationReport& report);
std::string predictions_to_csv(std::span<const VideoPrediction> predictions);
// report.json, report.txt, confusion.csv, predictions.csv and folds/fold_NN/train_log.jsonl.
void write_report(const std::filesystem::path& dir, const EvaluationReport& report);

struct RunOptions {
  int jobs = 1;
  std::function<void(const std::string&)> progress;  // optional, may be called from worker threads
};

// Fills in the input channel count from the keypoint set and, for zero padding,
// the pad length from the training videos.
ExperimentConfig resolve_experiment(const ExperimentConfig& config, const Dataset& dataset,
                                    std::span<const std::size_t> train_indices);

// Trains a fresh model on split.train and evaluates every split.test video.
// Predictions are appended to `predictions`.
FoldResult run_fold(const Dataset& dataset, const Split& split, const ExperimentConfig& config, int fold,
                    std::vector<VideoPrediction>& predictions, const RunOptions& options = {},
                    Model<float>* trained = nullptr);

// One fold per fencer, each holding that fencer out. Needs at least two fencers.
EvaluationReport run_cv_pi(const Dataset& dataset, const ExperimentConfig& config, const RunOptions& options = {});

// Single run holding out `fraction` of every (fencer, action) group.
// Throws ArgumentError when the test split is empty.
EvaluationReport run_random_split(const Dataset& dataset, double fraction, const ExperimentConfig& config,
                                  const RunOptions& options = {});

struct AblationRow {
  std::string variant;
  std::size_t parameters = 0;
  double accuracy = 0.0;  // percent
  std::array<double, kNumClasses> class_accuracy{};
  EvaluationReport report;
};

// PI cross-validation of every variant, in order.
std::vector<AblationRow> run_ablation_suite(const Dataset& dataset, std::span<const ExperimentConfig> variants,
                                            const RunOptions& options = {});

std::string ablation_to_text(std::span<const AblationRow> rows);
nlohmann::json ablation_to_json(std::span<const AblationRow> rows);

}  // namespace fencenet
