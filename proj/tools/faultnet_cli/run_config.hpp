#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "faultnet/bundle.hpp"
#include "faultnet/model.hpp"
#include "faultnet/trainer.hpp"

namespace faultnet::cli {

/// One JSON document describing a run. Relative paths resolve against the
/// directory holding the config file.
struct RunConfig {
  std::string name = "task";
  std::string text;  // normalized JSON of the whole document

  // dataset
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> bundle;
  Task task = Task::classification;
  std::vector<std::string> classes;  // optional fixed label order
  PrepareOptions prepare;

  // model / training
  std::optional<ModelConfig> model;
  TrainConfig training;

  // output
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> log;
};

/// Parses and validates every section; throws faultnet::Error (config or
/// parse) before anything touches the filesystem beyond reading.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

/// Applies --seed to both the split seed and the training seed.
void override_seed(RunConfig& config, std::uint64_t seed);

/// `prepare --out DIR` writes DIR/bundle.
void override_bundle_dir(RunConfig& config, const std::filesystem::path& dir);

/// `train --out DIR` writes checkpoint, report and log into DIR; the
/// bundle location still comes from the config.
void override_output_dir(RunConfig& config, const std::filesystem::path& dir);

}  // namespace faultnet::cli
