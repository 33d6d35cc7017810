#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "faultnet/model.hpp"
#include "faultnet/optimizers.hpp"

namespace faultnet {

inline constexpr const char* kCheckpointFormat = "faultnet-checkpoint/1";

struct Checkpoint {
  Model model;
  std::optional<OptimizerState> optimizer;
  std::size_t iteration = 0;
  std::string run_config;  // JSON text of the run configuration, may be empty
};

/// Serializes to a single JSON document. Doubles are written with enough
/// digits to round-trip exactly.
std::string checkpoint_to_json(const Checkpoint& checkpoint);

/// Throws ParseError (with byte offset) on malformed JSON, a version error on
/// a foreign format string, and a build error when stored shapes disagree
/// with the stored architecture.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace faultnet
