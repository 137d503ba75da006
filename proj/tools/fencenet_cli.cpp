#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fencenet/errors.hpp"
#include "fencenet/evaluation.hpp"
#include "fencenet/model.hpp"
#include "fencenet/pose.hpp"
#include "fencenet/presets.hpp"
#include "fencenet/splits.hpp"
#include "fencenet/synth.hpp"
#include "fencenet/train.hpp"

namespace fs = std::filesystem;
using namespace fencenet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitShape = 3;
constexpr int kExitNumerical = 4;

// Config source plus per-field overrides, shared by the training subcommands.
struct ConfigOptions {
  std::string preset;
  std::string config_file;
  std::string preset_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> weight_decay;
  std::optional<double> dropout;
  std::optional<std::string> keypoints;
  std::optional<std::string> sampling;
  std::optional<std::string> padding;
  std::optional<std::string> transform;
};

void add_override_flags(CLI::App* cmd, ConfigOptions& o) {
  cmd->add_option("--preset-dir", o.preset_dir, "Directory of <name>.json presets used instead of the bundled ones");
  cmd->add_option("--seed", o.seed, "Root seed");
  cmd->add_option("--epochs", o.epochs, "Training epochs (per fold)");
  cmd->add_option("--batch-size", o.batch_size, "Mini-batch size");
  cmd->add_option("--lr", o.learning_rate, "Adam learning rate");
  cmd->add_option("--weight-decay", o.weight_decay, "L2 weight decay");
  cmd->add_option("--dropout", o.dropout, "Spatial dropout rate");
  cmd->add_option("--keypoints", o.keypoints, "default9 | full13 | lower6");
  cmd->add_option("--sampling", o.sampling, "stride | random");
  cmd->add_option("--padding", o.padding, "sample | zero_pad");
  cmd->add_option("--transform", o.transform, "forward | reversed | shuffled");
}

void add_config_flags(CLI::App* cmd, ConfigOptions& o, bool variant_alias) {
  auto* preset = cmd->add_option("--preset", o.preset, "Bundled preset name (see `fencenet presets`)");
  if (variant_alias) {
    cmd->add_option("--variant", o.preset, "Alias of --preset")->excludes(preset);
  }
  cmd->add_option("--config", o.config_file, "Experiment config JSON (e.g. a previous run's config.json)");
  add_override_flags(cmd, o);
}

void apply_overrides(ExperimentConfig& c, const ConfigOptions& o) {
  if (o.seed) c.train.seed = *o.seed;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.learning_rate) c.train.learning_rate = *o.learning_rate;
  if (o.weight_decay) c.train.weight_decay = *o.weight_decay;
  if (o.dropout) c.model.dropout_rate = *o.dropout;
  if (o.keypoints) c.preprocess.keypoints = keypoint_set_from_string(*o.keypoints);
  if (o.sampling) c.preprocess.sampling = sampling_policy_from_string(*o.sampling);
  if (o.padding) c.preprocess.padding = padding_mode_from_string(*o.padding);
  if (o.transform) c.preprocess.transform = transform_from_string(*o.transform);
  c.model.input_channels = keypoint_channels(c.preprocess.keypoints);
  c.train.validate();
}

ExperimentConfig resolve_config(const ConfigOptions& o, const std::string& fallback_preset = "fencenet") {
  if (!o.preset.empty() && !o.config_file.empty()) throw ConfigError("--preset and --config are mutually exclusive");
  ExperimentConfig c = !o.config_file.empty() ? load_experiment_file(o.config_file)
                                              : load_preset(o.preset.empty() ? fallback_preset : o.preset,
                                                            o.preset_dir);
  apply_overrides(c, o);
  return c;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// config.json: the experiment config with every default expanded, plus the run
// arguments that are not part of it. It is accepted back by --config.
nlohmann::json run_config_json(const ExperimentConfig& c, const nlohmann::json& run) {
  nlohmann::json j = c;
  j["run"] = run;
  return j;
}

Dataset load_dataset(const std::string& manifest) {
  auto dataset = read_manifest(manifest);
  if (dataset.empty()) throw DataError("manifest is empty: " + manifest);
  return dataset;
}

std::function<void(const std::string&)> progress_printer(bool verbose) {
  if (!verbose) return {};
  return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

int cmd_synth(const SynthConfig& config, const std::string& out) {
  const auto dataset = synth_generate(config);
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_manifest(out, dataset);
  std::cout << "wrote " << dataset.size() << " videos to " << out << '\n';
  return kExitOk;
}

int cmd_train(const ConfigOptions& o, const std::string& manifest, const std::string& out, int holdout, bool verbose) {
  const auto config = resolve_config(o);
  const auto dataset = load_dataset(manifest);
  Split split;
  if (holdout > 0) {
    split = split_pi(dataset, holdout);
  } else {
    for (std::size_t i = 0; i < dataset.size(); ++i) split.train.push_back(i);
  }

  fs::create_directories(out);
  write_json(fs::path(out) / "config.json",
             run_config_json(config, {{"command", "train"}, {"manifest", manifest}, {"holdout_fencer", holdout}}));

  std::vector<VideoPrediction> predictions;
  Model<float> model = [&] {
    Rng rng(0);
    return Model<float>(resolve_experiment(config, dataset, split.train).model, rng);
  }();
  RunOptions options;
  options.progress = progress_printer(verbose);
  const auto result = run_fold(dataset, split, config, 1, predictions, options, &model);

  const fs::path checkpoint = fs::path(out) / "checkpoint";
  save_checkpoint(checkpoint, model);
  write_json(checkpoint / "experiment.json", resolve_experiment(config, dataset, split.train));
  write_train_log(fs::path(out) / "train_log.jsonl", result.log);
  if (!split.test.empty()) write_text(fs::path(out) / "predictions.csv", predictions_to_csv(predictions));

  const auto& last = result.log.epochs.back();
  std::cout << config.name << ": " << result.train_windows << " windows from " << result.train_videos
            << " videos, " << model.parameter_count() << " parameters, final loss " << last.mean_loss
            << ", train accuracy " << 100.0 * last.train_accuracy << "%\n";
  if (!split.test.empty()) {
    std::cout << "held-out fencer " << holdout << ": " << result.correct_videos << '/' << result.test_videos
              << " videos correct\n";
  }
  std::cout << "checkpoint: " << checkpoint.string() << '\n';
  return kExitOk;
}

int cmd_crossval(const ConfigOptions& o, const std::string& manifest, const std::string& out,
                 const std::string& protocol, double fraction, int jobs, bool verbose) {
  const auto config = resolve_config(o);
  const auto dataset = load_dataset(manifest);
  fs::create_directories(out);
  write_json(fs::path(out) / "config.json", run_config_json(config, {{"command", "crossval"},
                                                                       {"manifest", manifest},
                                                                       {"protocol", protocol},
                                                                       {"fraction", fraction}}));
  RunOptions options;
  options.jobs = jobs;
  options.progress = progress_printer(verbose);
  const auto report = protocol == "random" ? run_random_split(dataset, fraction, config, options)
                                           : run_cv_pi(dataset, config, options);
  write_report(out, report);
  std::cout << report_to_text(report);
  return kExitOk;
}

int cmd_ablation(const ConfigOptions& o, const std::string& manifest, const std::string& out,
                 const std::vector<std::string>& variants, int jobs, bool verbose) {
  const auto dataset = load_dataset(manifest);
  std::vector<ExperimentConfig> configs;
  for (const auto& v : variants) {
    auto c = load_preset(v, o.preset_dir);
    apply_overrides(c, o);
    configs.push_back(c);
  }
  fs::create_directories(out);
  RunOptions options;
  options.jobs = jobs;
  options.progress = progress_printer(verbose);
  const auto rows = run_ablation_suite(dataset, configs, options);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto dir = fs::path(out) / rows[i].variant;
    write_report(dir, rows[i].report);
    write_json(dir / "config.json",
               run_config_json(configs[i], {{"command", "crossval"}, {"manifest", manifest}, {"protocol", "pi"}}));
  }
  write_text(fs::path(out) / "ablation.txt", ablation_to_text(rows));
  write_json(fs::path(out) / "ablation.json", ablation_to_json(rows));
  std::cout << ablation_to_text(rows);
  return kExitOk;
}

int cmd_predict(const std::string& checkpoint, const std::string& manifest, const std::string& out,
                const ConfigOptions& o) {
  const auto model = load_checkpoint(checkpoint);
  ExperimentConfig experiment;
  experiment.model = model.config();
  if (const auto path = fs::path(checkpoint) / "experiment.json"; fs::exists(path)) {
    experiment = load_experiment_file(path);
  }
  auto preprocess = experiment.preprocess;
  if (o.keypoints) preprocess.keypoints = keypoint_set_from_string(*o.keypoints);
  if (o.sampling) preprocess.sampling = sampling_policy_from_string(*o.sampling);
  if (o.padding) preprocess.padding = padding_mode_from_string(*o.padding);
  if (o.transform) preprocess.transform = transform_from_string(*o.transform);
  if (preprocess.padding == PaddingMode::zero_pad && preprocess.pad_length == 0) {
    preprocess.pad_length = model.config().input_length;
  }
  const std::uint64_t seed = o.seed.value_or(experiment.train.seed);

  const auto dataset = load_dataset(manifest);
  std::vector<VideoPrediction> predictions;
  for (const auto& seq : dataset) predictions.push_back(predict_video(model, seq, preprocess, seed));
  const auto csv = predictions_to_csv(predictions);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
    write_text(out, csv);
    std::size_t correct = 0;
    for (const auto& p : predictions) correct += p.predicted == p.label ? 1 : 0;
    std::cout << "wrote " << predictions.size() << " predictions to " << out << " (" << correct << " match the label)\n";
  }
  return kExitOk;
}

int cmd_presets(const std::string& show, const std::string& preset_dir) {
  if (!show.empty()) {
    std::cout << nlohmann::json(load_preset(show, preset_dir)).dump(2) << '\n';
    return kExitOk;
  }
  for (const auto& name : preset_names()) {
    const auto c = load_preset(name);
    Rng rng(0);
    std::cout << name << "  (" << to_string(c.model.kind) << ", " << Model<float>(c.model, rng).parameter_count()
              << " parameters, " << c.train.epochs << " epochs)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FenceNet footwork classifiers: synthetic data, training, cross-validation and ablations"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print per-epoch progress to stderr");

  SynthConfig synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic manifest");
  synth_cmd->add_option("--out", synth_out, "Output manifest (JSONL)")->required();
  synth_cmd->add_option("--fencers", synth.num_fencers, "Number of fencers")->capture_default_str();
  synth_cmd->add_option("--reps", synth.reps_per_action, "Repetitions per action")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Coordinate noise in body heights")->capture_default_str();

  ConfigOptions train_opts;
  std::string train_manifest, train_out;
  int holdout = 0;
  auto* train_cmd = app.add_subcommand("train", "Train one model and save a checkpoint");
  train_cmd->add_option("--manifest", train_manifest, "Pose manifest (JSONL)")->required();
  train_cmd->add_option("--out", train_out, "Output directory")->required();
  train_cmd->add_option("--holdout-fencer", holdout, "Leave this fencer out and evaluate on it");
  add_config_flags(train_cmd, train_opts, false);

  ConfigOptions cv_opts;
  std::string cv_manifest, cv_out, protocol = "pi";
  double fraction = 0.2;
  int cv_jobs = 1;
  auto* cv_cmd = app.add_subcommand("crossval", "Person-independent CV or a random split");
  cv_cmd->add_option("--manifest", cv_manifest, "Pose manifest (JSONL)")->required();
  cv_cmd->add_option("--out", cv_out, "Output directory")->required();
  cv_cmd->add_option("--protocol", protocol, "pi | random")
      ->check(CLI::IsMember({"pi", "random"}))
      ->capture_default_str();
  cv_cmd->add_option("--fraction", fraction, "Test fraction for --protocol random")->capture_default_str();
  cv_cmd->add_option("--jobs", cv_jobs, "Folds trained concurrently")->check(CLI::PositiveNumber);
  add_config_flags(cv_cmd, cv_opts, true);

  ConfigOptions ab_opts;
  std::string ab_manifest, ab_out;
  std::vector<std::string> variants = {"fencenet", "bifencenet", "reversed",       "shuffled",   "forward2",
                                       "wide",     "regular-conv1d", "zero-padding", "full-body", "lower-body"};
  int ab_jobs = 1;
  auto* ab_cmd = app.add_subcommand("ablation", "PI cross-validation of several presets, summarized as one table");
  ab_cmd->add_option("--manifest", ab_manifest, "Pose manifest (JSONL)")->required();
  ab_cmd->add_option("--out", ab_out, "Output directory")->required();
  ab_cmd->add_option("--variants", variants, "Preset names, comma separated")->delimiter(',')->capture_default_str();
  ab_cmd->add_option("--jobs", ab_jobs, "Folds trained concurrently")->check(CLI::PositiveNumber);
  add_override_flags(ab_cmd, ab_opts);

  ConfigOptions pred_opts;
  std::string checkpoint, pred_manifest, pred_out;
  auto* pred_cmd = app.add_subcommand("predict", "Classify every video of a manifest with a checkpoint");
  pred_cmd->add_option("--checkpoint", checkpoint, "Checkpoint directory")->required();
  pred_cmd->add_option("--manifest", pred_manifest, "Pose manifest (JSONL)")->required();
  pred_cmd->add_option("--out", pred_out, "Output CSV (default: stdout)");
  pred_cmd->add_option("--seed", pred_opts.seed, "Seed for random sampling and transforms");
  pred_cmd->add_option("--keypoints", pred_opts.keypoints, "Override the checkpoint's keypoint set");
  pred_cmd->add_option("--sampling", pred_opts.sampling, "Override the sampling policy");
  pred_cmd->add_option("--padding", pred_opts.padding, "Override the padding mode");
  pred_cmd->add_option("--transform", pred_opts.transform, "Override the transform");

  std::string show, presets_dir;
  auto* presets_cmd = app.add_subcommand("presets", "List bundled presets or print one");
  presets_cmd->add_option("--show", show, "Print this preset as JSON");
  presets_cmd->add_option("--preset-dir", presets_dir, "Directory of <name>.json presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, synth_out);
    if (*train_cmd) return cmd_train(train_opts, train_manifest, train_out, holdout, verbose);
    if (*cv_cmd) return cmd_crossval(cv_opts, cv_manifest, cv_out, protocol, fraction, cv_jobs, verbose);
    if (*ab_cmd) return cmd_ablation(ab_opts, ab_manifest, ab_out, variants, ab_jobs, verbose);
    if (*pred_cmd) return cmd_predict(checkpoint, pred_manifest, pred_out, pred_opts);
    if (*presets_cmd) return cmd_presets(show, presets_dir);
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitShape;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitInput;
}
