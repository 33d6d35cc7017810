#include "faultnet/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "faultnet/error.hpp"

namespace faultnet {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

double parse_double(std::string_view text, const std::string& context) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::data, context + ": '" + std::string(text) + "' is not a number");
  }
  if (!std::isfinite(value)) throw Error(ErrorCode::data, context + ": non-finite value");
  return value;
}

Tensor read_recording_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::data, path.string() + ": empty file");
  const auto header = split_fields(trim(line));
  if (header.size() < 2 || trim(header[0]) != "t") {
    throw Error(ErrorCode::data, path.string() + ": header must be 't,ch0[,ch1,...]'");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (trim(header[c]) != "ch" + std::to_string(c - 1)) {
      throw Error(ErrorCode::data, path.string() + ": header column " + std::to_string(c) +
                                       " must be ch" + std::to_string(c - 1));
    }
  }
  const std::size_t channels = header.size() - 1;
  std::vector<std::vector<double>> columns(channels);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::data, path.string() + ":" + std::to_string(row) + ": expected " +
                                       std::to_string(header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < channels; ++c) {
      columns[c].push_back(parse_double(fields[c + 1], path.string() + ":" + std::to_string(row)));
    }
  }
  const std::size_t length = columns[0].size();
  if (length == 0) throw Error(ErrorCode::data, path.string() + ": no measurements");
  std::vector<double> data;
  data.reserve(channels * length);
  for (const auto& col : columns) data.insert(data.end(), col.begin(), col.end());
  return Tensor(Shape{channels, length}, std::move(data));
}

void write_recording_csv(const std::filesystem::path& path, const Tensor& series, double sample_rate) {
  if (series.shape().rank() != 2) {
    throw Error(ErrorCode::shape_mismatch, "recording must be [channels x length]");
  }
  const std::size_t channels = series.shape()[0];
  const std::size_t length = series.shape()[1];
  std::ofstream out = open_output(path);
  out << "t";
  for (std::size_t c = 0; c < channels; ++c) out << ",ch" << c;
  out << "\n";
  const auto x = series.values();
  std::string line;
  for (std::size_t i = 0; i < length; ++i) {
    line = format_double(static_cast<double>(i) / sample_rate);
    for (std::size_t c = 0; c < channels; ++c) {
      line += ',';
      line += format_double(x[c * length + i]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "file,label") {
    throw Error(ErrorCode::data, path.string() + ": header must be 'file,label'");
  }
  std::vector<ManifestRow> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      throw Error(ErrorCode::data, path.string() + ":" + std::to_string(row) +
                                       ": expected 'file,label'");
    }
    rows.push_back({std::string(trim(fields[0])), std::string(trim(fields[1]))});
  }
  return rows;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out = open_output(path);
  out << "file,label\n";
  for (const auto& r : rows) out << r.file << "," << r.label << "\n";
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

}  // namespace faultnet
