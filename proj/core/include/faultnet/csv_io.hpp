#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "faultnet/tensor.hpp"

namespace faultnet {

/// Reads a recording CSV with header `t,ch0[,ch1,...]`, one row per time
/// step. The t column is ignored. Returns [channels x rows].
Tensor read_recording_csv(const std::filesystem::path& path);

/// Writes [channels x length] with t = row / sample_rate.
void write_recording_csv(const std::filesystem::path& path, const Tensor& series,
                         double sample_rate = 1.0);

struct ManifestRow {
  std::string file;
  std::string label;
};

/// Reads a manifest with header `file,label`.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-string parse; throws a data error naming `context`.
double parse_double(std::string_view text, const std::string& context);

}  // namespace faultnet
