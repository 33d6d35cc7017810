#include "run_config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "faultnet/error.hpp"

namespace faultnet::cli {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> optional_path(const json& section, const char* key,
                                                   const std::filesystem::path& base) {
  if (!section.contains(key) || section.at(key).is_null()) return std::nullopt;
  if (!section.at(key).is_string()) throw Error(ErrorCode::config, std::string("'") + key + "' must be a path string");
  return resolve(base, section.at(key).get<std::string>());
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, "config is not valid JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "name" && key != "dataset" && key != "model" && key != "training" && key != "output") {
      throw Error(ErrorCode::config, "unknown config section '" + key + "'");
    }
  }

  RunConfig cfg;
  cfg.text = doc.dump();
  try {
    cfg.name = doc.value("name", cfg.name);
    const json dataset = doc.value("dataset", json::object());
    cfg.manifest = optional_path(dataset, "manifest", base_dir);
    cfg.bundle = optional_path(dataset, "bundle", base_dir);
    const std::string task = dataset.value("task", std::string("classification"));
    if (task == "classification") cfg.task = Task::classification;
    else if (task == "regression") cfg.task = Task::regression;
    else throw Error(ErrorCode::config, "dataset.task must be classification or regression");
    cfg.classes = dataset.value("classes", std::vector<std::string>{});
    cfg.prepare.window_len = dataset.value("window_len", cfg.prepare.window_len);
    if (dataset.contains("crop_n") && !dataset.at("crop_n").is_null()) {
      cfg.prepare.crop_n = dataset.at("crop_n").get<std::size_t>();
    }
    cfg.prepare.train_fraction = dataset.value("train_fraction", cfg.prepare.train_fraction);
    cfg.prepare.seed = dataset.value("seed", cfg.prepare.seed);
    cfg.prepare.standardize = dataset.value("standardize", cfg.prepare.standardize);
    if (cfg.prepare.window_len == 0) throw Error(ErrorCode::config, "dataset.window_len must be positive");
    if (cfg.prepare.crop_n && *cfg.prepare.crop_n == 0) throw Error(ErrorCode::config, "dataset.crop_n must be positive");
    if (!(cfg.prepare.train_fraction > 0.0 && cfg.prepare.train_fraction < 1.0)) {
      throw Error(ErrorCode::config, "dataset.train_fraction must lie in (0, 1)");
    }

    if (doc.contains("model")) {
      cfg.model = model_config_from_json(doc.at("model").dump());
      const Task head_task = cfg.model->task();
      if (head_task != cfg.task) {
        throw Error(ErrorCode::config, std::string("model head is for ") + to_string(head_task) +
                                           " but dataset.task is " + to_string(cfg.task));
      }
    }
    if (doc.contains("training")) {
      json training = doc.at("training");
      if (!training.contains("loss")) {
        training["loss"] = cfg.task == Task::classification ? "cross_entropy" : "least_squares";
      }
      cfg.training = train_config_from_json(training.dump());
      const bool ce = cfg.training.loss != LossKind::least_squares;
      if (ce != (cfg.task == Task::classification)) {
        throw Error(ErrorCode::config, std::string("training.loss ") + to_string(cfg.training.loss) +
                                           " does not fit a " + to_string(cfg.task) + " task");
      }
    }
    const json output = doc.value("output", json::object());
    cfg.checkpoint = optional_path(output, "checkpoint", base_dir);
    cfg.report = optional_path(output, "report", base_dir);
    cfg.log = optional_path(output, "log", base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config, "cannot read config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path.parent_path());
}

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.prepare.seed = seed;
  config.training.seed = seed;
  json doc = json::parse(config.text);
  doc["dataset"]["seed"] = seed;
  if (doc.contains("training")) doc["training"]["seed"] = seed;
  config.text = doc.dump();
}

void override_bundle_dir(RunConfig& config, const std::filesystem::path& dir) {
  config.bundle = dir / "bundle";
}

void override_output_dir(RunConfig& config, const std::filesystem::path& dir) {
  config.checkpoint = dir / "model.ckpt.json";
  config.report = dir / "report.json";
  config.log = dir / "training_log.csv";
}

}  // namespace faultnet::cli
