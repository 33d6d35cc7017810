#include "faultnet/data_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "faultnet/error.hpp"
#include "faultnet/random.hpp"

namespace faultnet {

int class_of(const Target& target) {
  if (const int* c = std::get_if<int>(&target)) return *c;
  throw Error(ErrorCode::data, "sample carries a regression target where a class was expected");
}

double value_of(const Target& target) {
  if (const double* v = std::get_if<double>(&target)) return *v;
  throw Error(ErrorCode::data, "sample carries a class label where a regression target was expected");
}

LabelMap::LabelMap(std::vector<std::string> names) {
  for (auto& name : names) {
    if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
      throw Error(ErrorCode::label, "duplicate class name '" + name + "'");
    }
    names_.push_back(std::move(name));
  }
}

int LabelMap::intern(const std::string& name) {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) return static_cast<int>(it - names_.begin());
  names_.push_back(name);
  return static_cast<int>(names_.size() - 1);
}

int LabelMap::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorCode::label, "unknown label '" + name + "'");
  return static_cast<int>(it - names_.begin());
}

const std::string& LabelMap::name_of(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= names_.size()) {
    throw Error(ErrorCode::label, "class index " + std::to_string(index) + " outside label map of " +
                                      std::to_string(names_.size()));
  }
  return names_[static_cast<std::size_t>(index)];
}

std::vector<Sample> segment(const RawRecording& recording, std::size_t window_len) {
  const Shape& shape = recording.series.shape();
  if (shape.rank() != 2) {
    throw Error(ErrorCode::data, "recording '" + recording.source_id +
                                     "' must be [channels x length], got " + shape.to_string());
  }
  const std::size_t channels = shape[0];
  const std::size_t length = shape[1];
  if (window_len == 0 || window_len > length) {
    throw Error(ErrorCode::segmentation, "window length " + std::to_string(window_len) +
                                             " does not fit recording '" + recording.source_id +
                                             "' of length " + std::to_string(length));
  }
  const auto x = recording.series.values();
  std::vector<Sample> samples;
  const std::size_t count = length / window_len;
  samples.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    std::vector<double> window(channels * window_len);
    for (std::size_t c = 0; c < channels; ++c) {
      const auto src = x.subspan(c * length + w * window_len, window_len);
      std::copy(src.begin(), src.end(), window.begin() + static_cast<std::ptrdiff_t>(c * window_len));
    }
    samples.push_back({Tensor(Shape{channels, window_len}, std::move(window)), recording.target});
  }
  return samples;
}

RawRecording crop_head(const RawRecording& recording, std::size_t n) {
  const Shape& shape = recording.series.shape();
  const std::size_t channels = shape[0];
  const std::size_t length = shape.rank() == 2 ? shape[1] : 0;
  if (n == 0 || n > length) {
    throw Error(ErrorCode::crop, "cannot crop recording '" + recording.source_id + "' of length " +
                                     std::to_string(length) + " to " + std::to_string(n));
  }
  const auto x = recording.series.values();
  std::vector<double> out(channels * n);
  for (std::size_t c = 0; c < channels; ++c) {
    const auto src = x.subspan(c * length, n);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return {Tensor(Shape{channels, n}, std::move(out)), recording.target, recording.source_id};
}

bool StandardizationStats::any_degenerate() const {
  return std::any_of(degenerate.begin(), degenerate.end(), [](bool b) { return b; });
}

StandardizationStats fit_standardization(std::span<const Sample> train) {
  if (train.size() < 2) {
    throw Error(ErrorCode::data, "standardization needs at least 2 training samples, got " +
                                     std::to_string(train.size()));
  }
  const Shape& shape = train.front().window.shape();
  const std::size_t channels = shape[0];
  const std::size_t len = shape[1];
  StandardizationStats stats;
  stats.mean.assign(channels, 0.0);
  stats.stddev.assign(channels, 0.0);
  stats.degenerate.assign(channels, false);
  for (const Sample& s : train) {
    if (s.window.shape() != shape) {
      throw Error(ErrorCode::data, "inconsistent sample shapes " + shape.to_string() + " and " +
                                       s.window.shape().to_string());
    }
  }
  const double count = static_cast<double>(train.size() * len);
  for (std::size_t c = 0; c < channels; ++c) {
    double acc = 0.0;
    for (const Sample& s : train) {
      for (double v : s.window.values().subspan(c * len, len)) acc += v;
    }
    const double mu = acc / count;
    double sq = 0.0;
    for (const Sample& s : train) {
      for (double v : s.window.values().subspan(c * len, len)) sq += (v - mu) * (v - mu);
    }
    const double sd = std::sqrt(sq / count);
    stats.mean[c] = mu;
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mu)))) {
      stats.stddev[c] = 1.0;
      stats.degenerate[c] = true;
    } else {
      stats.stddev[c] = sd;
    }
  }
  return stats;
}

Tensor apply_standardization(const Tensor& window, const StandardizationStats& stats) {
  const Shape& shape = window.shape();
  if (shape.rank() != 2 || shape[0] != stats.channels()) {
    throw Error(ErrorCode::shape_mismatch, "standardization stats cover " +
                                               std::to_string(stats.channels()) +
                                               " channels, window is " + shape.to_string());
  }
  const std::size_t len = shape[1];
  std::vector<double> out(window.values().begin(), window.values().end());
  for (std::size_t c = 0; c < shape[0]; ++c) {
    for (std::size_t i = 0; i < len; ++i) {
      double& v = out[c * len + i];
      v = (v - stats.mean[c]) / stats.stddev[c];
    }
  }
  return Tensor(shape, std::move(out));
}

std::vector<Sample> apply_standardization(std::span<const Sample> samples,
                                          const StandardizationStats& stats) {
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back({apply_standardization(s.window, stats), s.target});
  return out;
}

Tensor invert_standardization(const Tensor& window, const StandardizationStats& stats) {
  const Shape& shape = window.shape();
  if (shape.rank() != 2 || shape[0] != stats.channels()) {
    throw Error(ErrorCode::shape_mismatch, "standardization stats do not match window " +
                                               shape.to_string());
  }
  const std::size_t len = shape[1];
  std::vector<double> out(window.values().begin(), window.values().end());
  for (std::size_t c = 0; c < shape[0]; ++c) {
    for (std::size_t i = 0; i < len; ++i) {
      double& v = out[c * len + i];
      v = v * stats.stddev[c] + stats.mean[c];
    }
  }
  return Tensor(shape, std::move(out));
}

std::pair<std::vector<Sample>, StandardizationStats> standardize(
    std::span<const Sample> samples, const std::optional<StandardizationStats>& stats) {
  StandardizationStats used = stats ? *stats : fit_standardization(samples);
  return {apply_standardization(samples, used), std::move(used)};
}

std::size_t train_count(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
}

SplitDataset split(std::span<const Sample> samples, double train_fraction, std::uint64_t seed) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::split, "split needs at least 2 samples, got " +
                                      std::to_string(samples.size()));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::split, "train_fraction must lie in (0, 1)");
  }
  const std::size_t n_train = train_count(samples.size(), train_fraction);
  if (n_train == 0 || n_train == samples.size()) {
    throw Error(ErrorCode::split, "train_fraction " + std::to_string(train_fraction) + " on " +
                                      std::to_string(samples.size()) +
                                      " samples leaves one side empty");
  }
  Rng rng(seed);
  std::vector<std::size_t> order = permutation(samples.size(), rng);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return split_from_indices(samples, std::move(train_idx), std::move(val_idx), seed, train_fraction);
}

SplitDataset split_from_indices(std::span<const Sample> samples, std::vector<std::size_t> train_indices,
                                std::vector<std::size_t> validation_indices, std::uint64_t seed,
                                double train_fraction) {
  std::vector<bool> seen(samples.size(), false);
  auto take = [&](const std::vector<std::size_t>& indices, std::vector<Sample>& dst) {
    for (std::size_t i : indices) {
      if (i >= samples.size() || seen[i]) {
        throw Error(ErrorCode::split, "split index " + std::to_string(i) +
                                          " is out of range or repeated");
      }
      seen[i] = true;
      dst.push_back(samples[i]);
    }
  };
  SplitDataset out;
  take(train_indices, out.train);
  take(validation_indices, out.validation);
  out.train_indices = std::move(train_indices);
  out.validation_indices = std::move(validation_indices);
  out.seed = seed;
  out.train_fraction = train_fraction;
  return out;
}

}  // namespace faultnet
