#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "faultnet/faultnet.hpp"
#include "run_config.hpp"

namespace faultnet::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string checkpoint;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string resume;
  std::string bundle;
  std::string manifest;
  std::string split = "validation";
  std::string input;
  std::string decision_log;
};

RunConfig load_config(const Options& opt, bool preparing) {
  RunConfig cfg = load_run_config(opt.config);
  if (opt.seed) override_seed(cfg, *opt.seed);
  if (!opt.out.empty()) {
    if (preparing) override_bundle_dir(cfg, opt.out);
    else override_output_dir(cfg, opt.out);
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

fs::path with_extension(fs::path path, const char* ext) {
  path.replace_extension(ext);
  return path;
}

fs::path require_bundle_dir(const Options& opt, const std::optional<RunConfig>& cfg) {
  fs::path dir;
  if (!opt.bundle.empty()) dir = opt.bundle;
  else if (cfg && cfg->bundle) dir = *cfg->bundle;
  else throw Error(ErrorCode::config, "no dataset bundle given (use --bundle or dataset.bundle)");
  if (!fs::exists(dir / "bundle.json")) {
    throw Error(ErrorCode::config, "dataset bundle '" + dir.string() + "' does not exist; run prepare first");
  }
  return dir;
}

std::vector<Sample> select_split(const DatasetBundle& bundle, const std::string& which) {
  const SplitDataset parts = bundle.split();
  if (which == "validation") return parts.validation;
  if (which == "train") return parts.train;
  if (which == "all") return bundle.samples;
  throw Error(ErrorCode::config, "--split must be train, validation or all");
}

void check_bundle_fits(const DatasetBundle& bundle, const Model& model) {
  if (Shape{bundle.channels, bundle.window_len} != model.input_shape()) {
    throw Error(ErrorCode::input, "bundle windows are [" + std::to_string(bundle.channels) + " x " +
                                      std::to_string(bundle.window_len) + "] but the model expects " +
                                      model.input_shape().to_string());
  }
  if (bundle.task != model.task()) throw Error(ErrorCode::input, "bundle task does not match the model");
  if (model.task() == Task::classification && bundle.labels != model.labels()) {
    throw Error(ErrorCode::input, "bundle labels differ from the checkpoint's label map");
  }
}

struct LoadedRecordings {
  std::vector<RawRecording> recordings;
  LabelMap labels;
  std::vector<std::string> errors;
};

/// Reads every manifest row, collecting per-row problems instead of
/// stopping at the first one.
LoadedRecordings load_manifest_recordings(const fs::path& manifest, Task task, LabelMap labels,
                                          bool labels_fixed) {
  LoadedRecordings out;
  const auto rows = read_manifest(manifest);
  if (rows.empty()) throw Error(ErrorCode::data, "manifest '" + manifest.string() + "' lists no recordings");
  const fs::path base = manifest.parent_path();
  std::optional<std::size_t> channels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "manifest row " + std::to_string(i + 2) + " (" + rows[i].file + "): ";
    try {
      Target target;
      if (task == Task::classification) {
        target = labels_fixed ? labels.index_of(rows[i].label) : labels.intern(rows[i].label);
      } else {
        target = parse_double(rows[i].label, "regression target");
      }
      const fs::path file = fs::path(rows[i].file).is_absolute() ? fs::path(rows[i].file) : base / rows[i].file;
      Tensor series = read_recording_csv(file);
      if (!channels) channels = series.shape()[0];
      if (series.shape()[0] != *channels) {
        throw Error(ErrorCode::data, "has " + std::to_string(series.shape()[0]) + " channels, expected " +
                                         std::to_string(*channels));
      }
      out.recordings.push_back({std::move(series), target, fs::path(rows[i].file).stem().string()});
    } catch (const Error& e) {
      out.errors.push_back(where + e.what());
    }
  }
  out.labels = std::move(labels);
  return out;
}

int cmd_prepare(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(opt, true);
  if (!cfg.manifest) throw Error(ErrorCode::config, "dataset.manifest is required for prepare");
  if (!cfg.bundle) throw Error(ErrorCode::config, "dataset.bundle (or --out) is required for prepare");
  if (!fs::exists(*cfg.manifest)) throw Error(ErrorCode::config, "manifest '" + cfg.manifest->string() + "' does not exist");

  const bool fixed = !cfg.classes.empty();
  LoadedRecordings loaded = load_manifest_recordings(*cfg.manifest, cfg.task, LabelMap(cfg.classes), fixed);
  if (!loaded.errors.empty()) {
    for (const auto& e : loaded.errors) err << e << "\n";
    err << loaded.errors.size() << " manifest row(s) failed; no bundle written\n";
    return kExitInputError;
  }
  const DatasetBundle bundle = prepare_dataset(loaded.recordings, loaded.labels, cfg.task, cfg.prepare);
  write_bundle(*cfg.bundle, bundle);

  out << "recordings: " << loaded.recordings.size() << "\n";
  out << "samples: " << bundle.samples.size() << " (window " << bundle.window_len << ", "
      << bundle.channels << " channel(s))\n";
  if (bundle.task == Task::classification) {
    const auto counts = bundle.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
      out << "  class " << c << " " << bundle.labels.name_of(static_cast<int>(c)) << ": " << counts[c] << "\n";
    }
  }
  out << "split: " << bundle.train_indices.size() << " train / " << bundle.validation_indices.size()
      << " validation (seed " << bundle.seed << ")\n";
  if (bundle.stats && bundle.stats->any_degenerate()) {
    err << "warning: constant channel(s) in the training split were only mean-shifted\n";
  }
  out << "bundle: " << cfg.bundle->string() << "\n";
  return kExitOk;
}

int cmd_train(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(opt, false);
  if (!cfg.model) throw Error(ErrorCode::config, "the model section is required for train");
  if (!cfg.checkpoint) throw Error(ErrorCode::config, "output.checkpoint (or --out) is required for train");
  const fs::path bundle_dir = require_bundle_dir(opt, cfg);
  std::optional<Checkpoint> resume;
  if (!opt.resume.empty()) resume = load_checkpoint(opt.resume);

  const DatasetBundle bundle = read_bundle(bundle_dir);
  if (bundle.task != cfg.task) throw Error(ErrorCode::config, "bundle task does not match dataset.task");

  TrainingState state;
  if (resume) {
    check_bundle_fits(bundle, resume->model);
    const Model fresh = build_model(*cfg.model, resume->model.input_shape(), bundle.labels, 0);
    if (fresh.config() != resume->model.config()) {
      throw Error(ErrorCode::config, "resume checkpoint architecture differs from the config");
    }
    if (!resume->optimizer) throw Error(ErrorCode::config, "resume checkpoint has no optimizer state");
    state = TrainingState{resume->model, *resume->optimizer, resume->iteration};
  } else {
    Model model = build_model(*cfg.model, Shape{bundle.channels, bundle.window_len}, bundle.labels, cfg.training.seed);
    model.set_standardization(bundle.stats);
    state = start_training(std::move(model), cfg.training);
  }

  const SplitDataset parts = bundle.split();
  TrainResult result;
  try {
    result = train(std::move(state), parts, cfg.training);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  }

  const Model& model = result.state.model;
  Checkpoint ckpt{model, result.state.optimizer, result.state.iteration, cfg.text};
  save_checkpoint(*cfg.checkpoint, ckpt);
  if (cfg.log) write_text(*cfg.log, result.log.to_csv());

  out << "trained " << result.log.rows.size() << " iteration(s), total " << result.state.iteration << "\n";
  if (!result.log.rows.empty()) out << "final train loss " << format_double(result.log.rows.back().train_loss) << "\n";
  out << "checkpoint: " << cfg.checkpoint->string() << "\n";
  if (!parts.validation.empty()) {
    const MetricsReport report = evaluate(model, parts.validation);
    const std::string table = format_table(report, cfg.name, model.labels().names());
    out << table;
    if (cfg.report) {
      write_text(*cfg.report, to_json(report, model.labels().names()) + "\n");
      write_text(with_extension(*cfg.report, ".txt"), table);
    }
  }
  return kExitOk;
}

fs::path require_checkpoint(const Options& opt, const std::optional<RunConfig>& cfg) {
  if (!opt.checkpoint.empty()) return opt.checkpoint;
  if (cfg && cfg->checkpoint) return *cfg->checkpoint;
  throw Error(ErrorCode::config, "--checkpoint (or a config with output.checkpoint) is required");
}

int cmd_eval(const Options& opt, std::ostream& out, std::ostream&) {
  std::optional<RunConfig> cfg;
  if (!opt.config.empty()) cfg = load_run_config(opt.config);
  const Checkpoint ckpt = load_checkpoint(require_checkpoint(opt, cfg));
  const Model& model = ckpt.model;

  std::vector<Sample> samples;
  if (!opt.manifest.empty()) {
    if (!fs::exists(opt.manifest)) throw Error(ErrorCode::config, "manifest '" + opt.manifest + "' does not exist");
    LoadedRecordings loaded = load_manifest_recordings(opt.manifest, model.task(), model.labels(), true);
    if (!loaded.errors.empty()) throw Error(ErrorCode::data, loaded.errors.front());
    for (const RawRecording& rec : loaded.recordings) {
      for (Sample& s : segment(rec, model.input_shape()[1])) samples.push_back(std::move(s));
    }
  } else {
    const DatasetBundle bundle = read_bundle(require_bundle_dir(opt, cfg));
    check_bundle_fits(bundle, model);
    samples = select_split(bundle, opt.split);
  }
  const MetricsReport report = evaluate(model, samples);
  const std::string name = cfg ? cfg->name : "task";
  const std::string table = format_table(report, name, model.labels().names());
  out << table;
  if (!opt.out.empty()) {
    write_text(fs::path(opt.out) / "metrics.json", to_json(report, model.labels().names()) + "\n");
    write_text(fs::path(opt.out) / "metrics.txt", table);
  }
  return kExitOk;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int cmd_predict(const Options& opt, std::ostream& out, std::ostream&) {
  const Checkpoint ckpt = load_checkpoint(opt.checkpoint);
  const Tensor window = read_recording_csv(opt.input);
  const Prediction p = predict(ckpt.model, window);

  char timing[32];
  std::snprintf(timing, sizeof timing, "%.3f", p.latency_ms);
  nlohmann::json record{{"timestamp", utc_timestamp()}, {"input", opt.input}, {"inference_ms", p.latency_ms}};
  if (ckpt.model.task() == Task::classification) {
    const std::string& name = ckpt.model.labels().name_of(p.label);
    out << "label=" << name << " confidence=" << format_double(p.confidence) << " inference_ms=" << timing << "\n";
    record["label"] = name;
    record["confidence"] = p.confidence;
  } else {
    out << "estimate=" << format_double(p.estimate) << " inference_ms=" << timing << "\n";
    record["estimate"] = p.estimate;
  }
  if (!opt.decision_log.empty()) {
    std::ofstream log(opt.decision_log, std::ios::app);
    if (!log) throw Error(ErrorCode::io, "cannot append to '" + opt.decision_log + "'");
    log << record.dump() << "\n";
  }
  return kExitOk;
}

int cmd_export_features(const Options& opt, std::ostream& out, std::ostream&) {
  std::optional<RunConfig> cfg;
  if (!opt.config.empty()) cfg = load_run_config(opt.config);
  if (opt.out.empty()) throw Error(ErrorCode::config, "--out is required for export-features");
  const Checkpoint ckpt = load_checkpoint(require_checkpoint(opt, cfg));
  const DatasetBundle bundle = read_bundle(require_bundle_dir(opt, cfg));
  check_bundle_fits(bundle, ckpt.model);
  const auto samples = select_split(bundle, opt.split);
  const FeatureExport features = export_features(ckpt.model, samples);
  const fs::path path = fs::path(opt.out) / "features.csv";
  write_text(path, features.to_csv(ckpt.model.labels()));
  out << "features: " << features.features.size() << " rows x " << features.features.front().size()
      << " dims -> " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"faultnet: 1D-CNN fault classification and degradation regression"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Overrides the config seed");
  };

  auto* prepare = app.add_subcommand("prepare", "Segment, split and standardize a manifest into a bundle");
  prepare->add_option("--config", opt.config, "Run config (JSON)")->required();
  prepare->add_option("--out", opt.out, "Run directory (bundle goes to DIR/bundle)");
  add_seed(prepare);

  auto* train_cmd = app.add_subcommand("train", "Train a model on a prepared bundle");
  train_cmd->add_option("--config", opt.config, "Run config (JSON)")->required();
  train_cmd->add_option("--out", opt.out, "Directory for the checkpoint, report and log");
  train_cmd->add_option("--resume", opt.resume, "Continue from this checkpoint");
  add_seed(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", opt.checkpoint, "Checkpoint (JSON); defaults to the config's output.checkpoint");
  eval_cmd->add_option("--config", opt.config, "Run config locating the bundle");
  eval_cmd->add_option("--bundle", opt.bundle, "Dataset bundle directory");
  eval_cmd->add_option("--manifest", opt.manifest, "Evaluate raw recordings listed in a manifest");
  eval_cmd->add_option("--split", opt.split, "train | validation | all")->default_str("validation");
  eval_cmd->add_option("--out", opt.out, "Directory for metrics.json and metrics.txt");

  auto* predict_cmd = app.add_subcommand("predict", "Classify or score one window");
  predict_cmd->add_option("--checkpoint", opt.checkpoint, "Checkpoint (JSON)")->required();
  predict_cmd->add_option("--input", opt.input, "Window CSV (t,ch0,...)")->required();
  predict_cmd->add_option("--decision-log", opt.decision_log, "Append a JSON decision record here");

  auto* export_cmd = app.add_subcommand("export-features", "Write penultimate features and a 2D PCA projection");
  export_cmd->add_option("--checkpoint", opt.checkpoint, "Checkpoint (JSON); defaults to the config's output.checkpoint");
  export_cmd->add_option("--config", opt.config, "Run config locating the bundle");
  export_cmd->add_option("--bundle", opt.bundle, "Dataset bundle directory");
  export_cmd->add_option("--split", opt.split, "train | validation | all")->default_str("validation");
  export_cmd->add_option("--out", opt.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    const CLI::Option* o = sub->get_option_no_throw("--seed");
    if (o != nullptr && o->count() > 0) opt.seed = seed;
  }

  try {
    if (prepare->parsed()) return cmd_prepare(opt, out, err);
    if (train_cmd->parsed()) return cmd_train(opt, out, err);
    if (eval_cmd->parsed()) return cmd_eval(opt, out, err);
    if (predict_cmd->parsed()) return cmd_predict(opt, out, err);
    if (export_cmd->parsed()) return cmd_export_features(opt, out, err);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace faultnet::cli
