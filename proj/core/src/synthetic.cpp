#include "faultnet/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "faultnet/error.hpp"
#include "faultnet/random.hpp"

namespace faultnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::vector<RawRecording> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.classes.empty()) throw Error(ErrorCode::spec, "synthetic spec needs at least one class");
  if (spec.length == 0) throw Error(ErrorCode::spec, "synthetic length must be positive");
  if (!(spec.sample_rate > 0.0)) throw Error(ErrorCode::spec, "sample rate must be positive");
  if (spec.recordings_per_class == 0) throw Error(ErrorCode::spec, "recordings_per_class must be positive");
  for (const ToneClass& tone : spec.classes) {
    if (!(tone.frequency > 0.0)) throw Error(ErrorCode::spec, "tone frequency must be positive");
    if (tone.noise_std < 0.0) throw Error(ErrorCode::spec, "noise std must be non-negative");
  }

  Rng rng(spec.seed);
  std::vector<RawRecording> out;
  out.reserve(spec.classes.size() * spec.recordings_per_class);
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const ToneClass& tone = spec.classes[c];
    for (std::size_t r = 0; r < spec.recordings_per_class; ++r) {
      std::vector<double> x(spec.length);
      for (std::size_t i = 0; i < spec.length; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate;
        x[i] = std::sin(kTwoPi * tone.frequency * t) * tone.amplitude;
        if (tone.noise_std > 0.0) x[i] += tone.noise_std * rng.normal();
      }
      out.push_back({Tensor(Shape{1, spec.length}, std::move(x)), static_cast<int>(c),
                     "class" + std::to_string(c) + "_" + std::to_string(r)});
    }
  }
  return out;
}

std::vector<RawRecording> generate_degradation(const DegradationSpec& spec) {
  if (spec.recordings == 0 || spec.length == 0) {
    throw Error(ErrorCode::spec, "degradation fixture needs recordings and length");
  }
  if (!(spec.sample_rate > 0.0) || !(spec.carrier_frequency > 0.0) || !(spec.fault_frequency > 0.0)) {
    throw Error(ErrorCode::spec, "degradation frequencies and sample rate must be positive");
  }
  Rng rng(spec.seed);
  std::vector<RawRecording> out;
  out.reserve(spec.recordings);
  for (std::size_t r = 0; r < spec.recordings; ++r) {
    const double health = rng.uniform();
    const double carrier_phase = kTwoPi * rng.uniform();
    const double fault_phase = kTwoPi * rng.uniform();
    std::vector<double> x(spec.length);
    for (std::size_t i = 0; i < spec.length; ++i) {
      const double t = static_cast<double>(i) / spec.sample_rate;
      x[i] = std::sin(kTwoPi * spec.carrier_frequency * t + carrier_phase) +
             health * std::sin(kTwoPi * spec.fault_frequency * t + fault_phase) +
             spec.noise_std * rng.normal();
    }
    out.push_back({Tensor(Shape{1, spec.length}, std::move(x)), health,
                   "unit" + std::to_string(r)});
  }
  return out;
}

namespace {

enum class FaultType { none, inner_race, ball, outer_race };

struct BearingCondition {
  FaultType type;
  int diameter_mils;  // 0 for normal
  int load_hp;
  std::size_t length;
};

// Defect frequencies as multiples of shaft speed for a 6205-2RS deep
// groove bearing.
constexpr double kInnerRaceOrder = 5.4152;
constexpr double kOuterRaceOrder = 3.5848;
constexpr double kBallSpinOrder = 4.7135;

constexpr std::array<double, 4> kShaftRpm{1797.0, 1772.0, 1750.0, 1730.0};

std::vector<BearingCondition> bearing_conditions() {
  std::vector<BearingCondition> out;
  // Normal baselines: the first is short (40 windows), the rest long (80).
  out.push_back({FaultType::none, 0, 0, 243938});
  out.push_back({FaultType::none, 0, 1, 483903});
  out.push_back({FaultType::none, 0, 2, 483903});
  out.push_back({FaultType::none, 0, 3, 485643});
  // 52 fault recordings; outer race has several sensor positions at 7 and
  // 21 mils. Every length yields exactly 20 windows of 6000 points.
  std::size_t k = 0;
  auto fault_length = [&k]() { return 121265 + (k++ * 211) % 1650; };
  for (int d : {7, 14, 21}) {
    for (int load = 0; load < 4; ++load) out.push_back({FaultType::inner_race, d, load, fault_length()});
  }
  for (int d : {7, 14, 21}) {
    for (int load = 0; load < 4; ++load) out.push_back({FaultType::ball, d, load, fault_length()});
  }
  for (int d : {7, 14, 21}) {
    const int positions = d == 14 ? 1 : 3;
    for (int pos = 0; pos < positions; ++pos) {
      for (int load = 0; load < 4; ++load) out.push_back({FaultType::outer_race, d, load, fault_length()});
    }
  }
  return out;
}

std::string condition_label(const BearingCondition& c, BearingTask task) {
  if (c.type == FaultType::none) return "normal";
  if (task == BearingTask::binary) return "fault";
  const char* prefix = c.type == FaultType::inner_race ? "IR" : c.type == FaultType::ball ? "B" : "OR";
  if (task == BearingTask::four_way) return prefix;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%03d", prefix, c.diameter_mils);
  return buf;
}

}  // namespace

BearingCorpus generate_bearing_corpus(const BearingCorpusSpec& spec, BearingTask task) {
  if (!(spec.sample_rate > 0.0) || !(spec.length_scale > 0.0) || spec.noise_std < 0.0) {
    throw Error(ErrorCode::spec, "bearing corpus needs positive sample rate and length scale");
  }
  BearingCorpus corpus;
  corpus.labels.intern("normal");
  Rng rng(spec.seed);
  std::size_t index = 0;
  for (const BearingCondition& cond : bearing_conditions()) {
    const auto length = static_cast<std::size_t>(static_cast<double>(cond.length) * spec.length_scale);
    if (length == 0) throw Error(ErrorCode::spec, "length_scale too small");
    const double shaft_hz = kShaftRpm[static_cast<std::size_t>(cond.load_hp)] / 60.0;
    const double shaft_phase = kTwoPi * rng.uniform();
    std::vector<double> x(length);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = static_cast<double>(i) / spec.sample_rate;
      x[i] = 0.08 * std::sin(kTwoPi * shaft_hz * t + shaft_phase) +
             0.03 * std::sin(2.0 * kTwoPi * shaft_hz * t + 2.0 * shaft_phase) +
             spec.noise_std * rng.normal();
    }

    if (cond.type != FaultType::none) {
      double order = kOuterRaceOrder;
      double resonance = 3800.0;
      double amplitude = 1.2;
      bool modulated = false;
      if (cond.type == FaultType::inner_race) {
        order = kInnerRaceOrder;
        resonance = 3100.0;
        amplitude = 1.0;
        modulated = true;
      } else if (cond.type == FaultType::ball) {
        order = 2.0 * kBallSpinOrder;
        resonance = 2500.0;
        amplitude = 0.8;
        modulated = true;
      }
      // Severity scales the impact energy and detunes the ringing mode.
      const double severity = static_cast<double>(cond.diameter_mils) / 7.0;
      amplitude *= 0.6 + 0.6 * (severity - 1.0);
      resonance *= 1.0 + 0.12 * (severity - 2.0);
      const double decay = 0.0012 * (1.0 + 0.35 * (severity - 1.0));
      const double period = 1.0 / (order * shaft_hz);
      const auto ring = static_cast<std::size_t>(6.0 * decay * spec.sample_rate);

      double t_impact = period * rng.uniform();
      const double duration = static_cast<double>(length) / spec.sample_rate;
      while (t_impact < duration) {
        double a = amplitude * (1.0 + 0.1 * rng.normal());
        if (modulated) a *= 0.7 + 0.3 * std::cos(kTwoPi * shaft_hz * t_impact + shaft_phase);
        const auto start = static_cast<std::size_t>(std::ceil(t_impact * spec.sample_rate));
        for (std::size_t i = start; i < std::min(length, start + ring); ++i) {
          const double dt = static_cast<double>(i) / spec.sample_rate - t_impact;
          x[i] += a * std::exp(-dt / decay) * std::sin(kTwoPi * resonance * dt);
        }
        t_impact += period * (1.0 + 0.01 * rng.normal());
      }
    }

    const int target = corpus.labels.intern(condition_label(cond, task));
    corpus.recordings.push_back({Tensor(Shape{1, length}, std::move(x)), target,
                                 "rec" + std::to_string(index++) + "_" + condition_label(cond, BearingTask::ten_way)});
  }
  return corpus;
}

}  // namespace faultnet
