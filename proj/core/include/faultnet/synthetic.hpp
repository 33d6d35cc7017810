#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "faultnet/data_pipeline.hpp"

namespace faultnet {

/// One class of the sinusoid fixture: A * sin(2 pi f t) + N(0, noise_std^2).
struct ToneClass {
  double frequency = 0.0;
  double amplitude = 1.0;
  double noise_std = 0.0;
};

struct SyntheticSpec {
  std::vector<ToneClass> classes;
  double sample_rate = 1000.0;
  std::size_t length = 0;               // points per recording
  std::size_t recordings_per_class = 1;
  std::uint64_t seed = 0;
};

/// Recordings are emitted class by class; targets are class indices.
std::vector<RawRecording> generate_synthetic(const SyntheticSpec& spec);

/// Monotone degradation fixture: a carrier tone plus a fault tone whose
/// amplitude equals the health index h in [0, 1], which is also the target.
struct DegradationSpec {
  std::size_t recordings = 200;
  std::size_t length = 512;
  double sample_rate = 1000.0;
  double carrier_frequency = 13.0;
  double fault_frequency = 97.0;
  double noise_std = 0.05;
  std::uint64_t seed = 0;
};

std::vector<RawRecording> generate_degradation(const DegradationSpec& spec);

/// Label granularity for the bearing surrogate corpus.
enum class BearingTask { binary, four_way, ten_way };

/// Stand-in for a drive-end bearing test rig sampled at 12 kHz: 4 normal
/// recordings and 52 seeded-fault recordings (inner race, ball, outer race
/// at three fault diameters). Faults are impulse trains at the bearing
/// defect frequencies exciting a damped structural resonance. Recording
/// lengths are chosen so 6000-point windows yield 1320 samples.
struct BearingCorpusSpec {
  double sample_rate = 12000.0;
  double noise_std = 0.3;
  std::uint64_t seed = 0;
  /// Multiplies every recording length (1.0 gives the full-size corpus).
  double length_scale = 1.0;
};

struct BearingCorpus {
  std::vector<RawRecording> recordings;
  LabelMap labels;
};

BearingCorpus generate_bearing_corpus(const BearingCorpusSpec& spec, BearingTask task);

}  // namespace faultnet
