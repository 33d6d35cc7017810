#include "faultnet/bundle.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "faultnet/csv_io.hpp"
#include "faultnet/error.hpp"

namespace faultnet {

using nlohmann::json;

SplitDataset DatasetBundle::split() const {
  return split_from_indices(samples, train_indices, validation_indices, seed, train_fraction);
}

std::vector<std::size_t> DatasetBundle::class_counts() const {
  std::vector<std::size_t> counts(labels.size(), 0);
  if (task != Task::classification) return counts;
  for (const Sample& s : samples) ++counts.at(static_cast<std::size_t>(class_of(s.target)));
  return counts;
}

DatasetBundle prepare_dataset(const std::vector<RawRecording>& recordings, const LabelMap& labels,
                              Task task, const PrepareOptions& options) {
  if (recordings.empty()) throw Error(ErrorCode::data, "no recordings to prepare");
  DatasetBundle bundle;
  bundle.task = task;
  bundle.labels = labels;
  bundle.window_len = options.window_len;
  bundle.seed = options.seed;
  bundle.train_fraction = options.train_fraction;
  bundle.channels = recordings.front().series.shape()[0];
  for (const RawRecording& rec : recordings) {
    if (rec.series.shape()[0] != bundle.channels) {
      throw Error(ErrorCode::data, "recording '" + rec.source_id + "' has " +
                                       std::to_string(rec.series.shape()[0]) + " channels, expected " +
                                       std::to_string(bundle.channels));
    }
    const RawRecording cropped = options.crop_n ? crop_head(rec, *options.crop_n) : rec;
    for (Sample& s : segment(cropped, options.window_len)) {
      bundle.samples.push_back(std::move(s));
      bundle.sources.push_back(rec.source_id);
    }
  }
  SplitDataset parts = split(bundle.samples, options.train_fraction, options.seed);
  bundle.train_indices = std::move(parts.train_indices);
  bundle.validation_indices = std::move(parts.validation_indices);
  if (options.standardize) bundle.stats = fit_standardization(parts.train);
  return bundle;
}

void write_bundle(const std::filesystem::path& dir, const DatasetBundle& bundle) {
  std::filesystem::create_directories(dir);
  json meta;
  meta["format_version"] = kBundleFormat;
  meta["task"] = to_string(bundle.task);
  meta["channels"] = bundle.channels;
  meta["window_len"] = bundle.window_len;
  meta["labels"] = bundle.labels.names();
  meta["num_samples"] = bundle.samples.size();
  meta["train_indices"] = bundle.train_indices;
  meta["validation_indices"] = bundle.validation_indices;
  meta["seed"] = bundle.seed;
  meta["train_fraction"] = bundle.train_fraction;
  if (bundle.stats) {
    meta["standardization"] = {{"mean", bundle.stats->mean},
                               {"stddev", bundle.stats->stddev},
                               {"degenerate", bundle.stats->degenerate}};
  } else {
    meta["standardization"] = nullptr;
  }
  {
    std::ofstream out(dir / "bundle.json", std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + (dir / "bundle.json").string());
    out << meta.dump(1) << "\n";
  }
  std::ofstream out(dir / "samples.csv", std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + (dir / "samples.csv").string());
  out << "sample_id,source,target,values\n";
  std::string line;
  for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
    const Sample& s = bundle.samples[i];
    line = std::to_string(i) + "," + bundle.sources[i] + ",";
    if (bundle.task == Task::classification) line += bundle.labels.name_of(class_of(s.target));
    else line += format_double(value_of(s.target));
    for (double v : s.window.values()) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorCode::io, "failed writing " + (dir / "samples.csv").string());
}

DatasetBundle read_bundle(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "bundle.json", std::ios::binary);
  if (!meta_in) throw Error(ErrorCode::io, "no dataset bundle at '" + dir.string() + "'");
  std::ostringstream text;
  text << meta_in.rdbuf();
  json meta;
  try {
    meta = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, "bundle.json is not valid JSON at byte " + std::to_string(e.byte));
  }
  DatasetBundle bundle;
  try {
    if (meta.value("format_version", std::string()) != kBundleFormat) {
      throw Error(ErrorCode::version, "unsupported bundle format in " + dir.string());
    }
    bundle.task = meta.at("task").get<std::string>() == "regression" ? Task::regression : Task::classification;
    bundle.channels = meta.at("channels").get<std::size_t>();
    bundle.window_len = meta.at("window_len").get<std::size_t>();
    bundle.labels = LabelMap(meta.at("labels").get<std::vector<std::string>>());
    bundle.train_indices = meta.at("train_indices").get<std::vector<std::size_t>>();
    bundle.validation_indices = meta.at("validation_indices").get<std::vector<std::size_t>>();
    bundle.seed = meta.at("seed").get<std::uint64_t>();
    bundle.train_fraction = meta.at("train_fraction").get<double>();
    if (!meta.at("standardization").is_null()) {
      const json& s = meta.at("standardization");
      bundle.stats = StandardizationStats{s.at("mean").get<std::vector<double>>(),
                                          s.at("stddev").get<std::vector<double>>(),
                                          s.at("degenerate").get<std::vector<bool>>()};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::data, std::string("malformed bundle.json: ") + e.what());
  }

  std::ifstream in(dir / "samples.csv", std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "missing samples.csv in '" + dir.string() + "'");
  std::string line;
  std::getline(in, line);
  const std::size_t width = bundle.channels * bundle.window_len;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::string where = (dir / "samples.csv").string() + ":" + std::to_string(row);
    std::vector<std::string_view> fields;
    std::string_view view(line);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      fields.push_back(view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3 + width) {
      throw Error(ErrorCode::data, where + ": expected " + std::to_string(3 + width) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    std::vector<double> values(width);
    for (std::size_t k = 0; k < width; ++k) values[k] = parse_double(fields[3 + k], where);
    Target target = bundle.task == Task::classification
                        ? Target(bundle.labels.index_of(std::string(fields[2])))
                        : Target(parse_double(fields[2], where));
    bundle.samples.push_back({Tensor(Shape{bundle.channels, bundle.window_len}, std::move(values)), target});
    bundle.sources.emplace_back(fields[1]);
  }
  if (bundle.samples.size() != meta.at("num_samples").get<std::size_t>()) {
    throw Error(ErrorCode::data, "samples.csv holds " + std::to_string(bundle.samples.size()) +
                                     " rows, bundle.json declares " +
                                     std::to_string(meta.at("num_samples").get<std::size_t>()));
  }
  return bundle;
}

}  // namespace faultnet
