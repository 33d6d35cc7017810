#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "faultnet/csv_io.hpp"
#include "faultnet/data_pipeline.hpp"
#include "faultnet/error.hpp"
#include "faultnet/synthetic.hpp"
#include "oracles.hpp"

using namespace faultnet;
namespace fs = std::filesystem;

namespace {

RawRecording ramp(std::size_t channels, std::size_t length) {
  std::vector<double> v(channels * length);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  return {Tensor(Shape{channels, length}, v), Target{0}, "ramp"};
}

std::vector<Sample> numbered(std::size_t n) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({Tensor(Shape{1, 2}, {static_cast<double>(i), 1.0}), Target{static_cast<int>(i % 2)}});
  return out;
}

fs::path scratch(const std::string& name) {
  const char* root = std::getenv("FAULTNET_TEST_TMP");
  fs::path dir = fs::path(root ? root : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Segment, Examples) {
  EXPECT_EQ(segment(ramp(1, 12000), 6000).size(), 2u);
  EXPECT_EQ(segment(ramp(1, 6000), 6000).size(), 1u);
  EXPECT_EQ(segment(ramp(1, 6999), 6000).size(), 1u);
  try {
    segment(ramp(1, 100), 101);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::segmentation);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("100"), std::string::npos);
    EXPECT_NE(msg.find("101"), std::string::npos);
  }
}

TEST(SegmentProperty, WindowsReproduceThePrefix) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = 1 + gen() % 3, len = 5 + gen() % 200, w = 1 + gen() % len;
    const Tensor series(Shape{c, len}, oracle::random_vec(gen, c * len));
    const auto windows = segment({series, Target{1}, "r"}, w);
    ASSERT_EQ(windows.size(), len / w);
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::vector<double> joined;
      for (const auto& s : windows) {
        EXPECT_EQ(class_of(s.target), 1);
        for (std::size_t t = 0; t < w; ++t) joined.push_back(s.window.at(ch, t));
      }
      for (std::size_t t = 0; t < joined.size(); ++t) EXPECT_EQ(joined[t], series.at(ch, t));
    }
  }
}

TEST(CropHead, Examples) {
  EXPECT_EQ(crop_head(ramp(1, 50000), 1000).series.shape(), (Shape{1, 1000}));
  const auto r = ramp(2, 30);
  EXPECT_EQ(crop_head(r, 30).series, r.series);
  const auto single = crop_head(r, 1);
  EXPECT_EQ(single.series, Tensor(Shape{2, 1}, {0, 30}));
  try {
    crop_head(r, 31);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::crop);
  }
}

TEST(Standardize, FittedStatsGiveZeroMeanUnitStd) {
  std::mt19937_64 gen(4);
  std::vector<Sample> train;
  for (int i = 0; i < 20; ++i) {
    auto v = oracle::random_vec(gen, 2 * 16, -3, 9);
    for (std::size_t t = 16; t < 32; ++t) v[t] = v[t] * 40 + 1000;
    train.push_back({Tensor(Shape{2, 16}, v), Target{0}});
  }
  const auto [out, stats] = standardize(train);
  EXPECT_FALSE(stats.any_degenerate());
  for (std::size_t c = 0; c < 2; ++c) {
    double s = 0, ss = 0, n = 0;
    for (const auto& x : out)
      for (std::size_t t = 0; t < 16; ++t) { s += x.window.at(c, t); ss += x.window.at(c, t) * x.window.at(c, t); ++n; }
    EXPECT_NEAR(s / n, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(ss / n - (s / n) * (s / n)), 1.0, 1e-9);
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Tensor back = invert_standardization(out[i].window, stats);
    for (std::size_t k = 0; k < back.size(); ++k)
      EXPECT_LE(std::abs(back[k] - train[i].window[k]), 1e-9 * std::max(1.0, std::abs(train[i].window[k])));
  }
  // Applying the stats a second time moves the data again.
  EXPECT_NE(apply_standardization(out[0].window, stats), out[0].window);
}

TEST(Standardize, ConstantChannelIsFlaggedAndCentered) {
  std::vector<Sample> train;
  for (int i = 0; i < 4; ++i) train.push_back({Tensor(Shape{2, 3}, {5, 5, 5, double(i), 1, 2}), Target{0}});
  const auto [out, stats] = standardize(train);
  EXPECT_TRUE(stats.degenerate[0]);
  EXPECT_FALSE(stats.degenerate[1]);
  EXPECT_TRUE(stats.any_degenerate());
  for (const auto& s : out)
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(s.window.at(0, t), 0.0);
}

TEST(Standardize, NeedsTwoSamplesToFit) {
  const auto one = numbered(1);
  EXPECT_THROW(fit_standardization(one), Error);
}

TEST(Split, CwruScaleCounts) {
  const auto samples = numbered(1320);
  const auto s = split(samples, 0.9, 7);
  EXPECT_EQ(s.train.size(), 1188u);
  EXPECT_EQ(s.validation.size(), 132u);
  std::set<std::size_t> seen(s.train_indices.begin(), s.train_indices.end());
  for (std::size_t i : s.validation_indices) EXPECT_TRUE(seen.insert(i).second);
  EXPECT_EQ(seen.size(), 1320u);
}

TEST(Split, SeedDeterminismAndSensitivity) {
  const auto samples = numbered(1320);
  EXPECT_EQ(split(samples, 0.9, 11).train_indices, split(samples, 0.9, 11).train_indices);
  for (std::uint64_t s = 0; s < 10; ++s)
    EXPECT_NE(split(samples, 0.9, s).train_indices, split(samples, 0.9, s + 100).train_indices);
}

TEST(Split, EmptySideIsAnError) {
  const auto samples = numbered(3);
  for (double f : {0.1, 0.9}) {
    try {
      split(samples, f, 0);
      FAIL() << f;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::split);
    }
  }
}

TEST(SplitProperty, PartitionAndFraction) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + gen() % 500;
    const double f = frac(gen);
    const auto samples = numbered(n);
    const auto s = split(samples, f, gen());
    EXPECT_LE(std::abs(static_cast<double>(s.train.size()) - f * static_cast<double>(n)), 1.0);
    std::vector<std::size_t> all = s.train_indices;
    all.insert(all.end(), s.validation_indices.begin(), s.validation_indices.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(all[i], i);
    for (std::size_t i = 0; i < s.train.size(); ++i) EXPECT_EQ(s.train[i].window, samples[s.train_indices[i]].window);
  }
}

TEST(LabelMap, Bijection) {
  LabelMap m;
  EXPECT_EQ(m.intern("normal"), 0);
  EXPECT_EQ(m.intern("fault"), 1);
  EXPECT_EQ(m.intern("normal"), 0);
  EXPECT_EQ(m.name_of(1), "fault");
  EXPECT_EQ(m.index_of("fault"), 1);
  try {
    m.index_of("unknown");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::label);
  }
}

TEST(Synthetic, NoiselessSinusoid) {
  SyntheticSpec spec{{{250.0, 2.5, 0.0}}, 1000.0, 400, 2, 1};
  const auto recs = generate_synthetic(spec);
  ASSERT_EQ(recs.size(), 2u);
  const auto v = recs[0].series.values();
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  EXPECT_NEAR(peak, 2.5, 1e-12);
  EXPECT_LE(peak, 2.5);
}

TEST(Synthetic, DeterministicUnderSeed) {
  SyntheticSpec spec{{{10.0, 1.0, 0.3}, {40.0, 1.0, 0.3}}, 500.0, 256, 3, 42};
  const auto a = generate_synthetic(spec), b = generate_synthetic(spec);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].series, b[i].series);
    EXPECT_EQ(a[i].source_id, b[i].source_id);
  }
  spec.seed = 43;
  EXPECT_NE(generate_synthetic(spec)[0].series, a[0].series);
}

TEST(Synthetic, SpecErrors) {
  try {
    generate_synthetic({{{-1.0, 1.0, 0.0}}, 1000.0, 100, 1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::spec);
  }
  EXPECT_THROW(generate_synthetic({{{5.0, 1.0, 0.0}}, 1000.0, 0, 1, 0}), Error);
}

TEST(Synthetic, SeparableInSpectralEnergy) {
  // One-second recordings at 1 kHz: periodogram bin b is b Hz.
  SyntheticSpec spec{{{50.0, 1.0, 0.5}, {120.0, 1.0, 0.5}}, 1000.0, 1000, 25, 9};
  const auto recs = generate_synthetic(spec);
  for (const auto& r : recs) {
    const oracle::Vec x(r.series.values().begin(), r.series.values().end());
    const double margin = oracle::periodogram_bin(x, 50) - oracle::periodogram_bin(x, 120);
    if (class_of(r.target) == 0) EXPECT_GT(margin, 0.0);
    else EXPECT_LT(margin, 0.0);
  }
}

TEST(Synthetic, DegradationTargetsInUnitInterval) {
  DegradationSpec spec;
  spec.recordings = 50;
  const auto recs = generate_degradation(spec);
  ASSERT_EQ(recs.size(), 50u);
  for (const auto& r : recs) {
    EXPECT_GE(value_of(r.target), 0.0);
    EXPECT_LE(value_of(r.target), 1.0);
    EXPECT_EQ(r.series.shape(), (Shape{1, 512}));
  }
}

TEST(BearingCorpus, FullScaleSegmentsTo1320) {
  const auto corpus = generate_bearing_corpus({}, BearingTask::ten_way);
  EXPECT_EQ(corpus.recordings.size(), 56u);
  EXPECT_EQ(corpus.labels.size(), 10u);
  EXPECT_EQ(corpus.labels.name_of(0), "normal");
  std::size_t total = 0, normal = 0;
  for (const auto& r : corpus.recordings) {
    const std::size_t n = segment(r, 6000).size();
    total += n;
    if (class_of(r.target) == 0) normal += n;
  }
  EXPECT_EQ(total, 1320u);
  EXPECT_EQ(normal, 280u);
  EXPECT_EQ(generate_bearing_corpus({}, BearingTask::binary).labels.names(),
            (std::vector<std::string>{"normal", "fault"}));
  EXPECT_EQ(generate_bearing_corpus({12000.0, 0.3, 0, 0.01}, BearingTask::four_way).labels.size(), 4u);
}

TEST(CsvIo, RecordingRoundTripIsExact) {
  const fs::path dir = scratch("csv_roundtrip");
  std::mt19937_64 gen(1);
  const Tensor series(Shape{2, 50}, oracle::random_vec(gen, 100, -1e3, 1e3));
  write_recording_csv(dir / "r.csv", series, 12000.0);
  EXPECT_EQ(read_recording_csv(dir / "r.csv"), series);

  write_manifest(dir / "m.csv", {{"r.csv", "normal"}, {"r.csv", "IR007"}});
  const auto rows = read_manifest(dir / "m.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].label, "IR007");
}

TEST(CsvIo, MalformedInputIsADataError) {
  const fs::path dir = scratch("csv_bad");
  std::ofstream(dir / "bad.csv") << "t,ch0\n0,1.0\n1,abc\n";
  try {
    read_recording_csv(dir / "bad.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::data);
  }
  EXPECT_THROW(parse_double("1.5x", "field"), Error);
  EXPECT_EQ(parse_double(format_double(0.1 + 0.2), "x"), 0.1 + 0.2);
}
