// Writes synthetic corpora as recording CSVs plus manifests, in the same
// layout `prepare` expects for real data.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "faultnet/csv_io.hpp"
#include "faultnet/error.hpp"
#include "faultnet/synthetic.hpp"

namespace fs = std::filesystem;
using namespace faultnet;

namespace {

void write_corpus(const fs::path& dir, const std::vector<RawRecording>& recs, double sample_rate,
                  const std::function<std::string(const RawRecording&)>& label, const std::string& manifest) {
  fs::create_directories(dir);
  std::vector<ManifestRow> rows;
  for (const auto& r : recs) {
    const std::string file = r.source_id + ".csv";
    if (!fs::exists(dir / file)) write_recording_csv(dir / file, r.series, sample_rate);
    rows.push_back({file, label(r)});
  }
  write_manifest(dir / manifest, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faultnet-fixture: synthetic recordings for trying the pipeline"};
  app.require_subcommand(1);
  std::string out;
  std::uint64_t seed = 0;

  auto* tones = app.add_subcommand("tones", "Noisy sinusoids, one frequency per class");
  std::vector<double> freqs{50.0, 120.0};
  double noise = 0.5, rate = 1000.0;
  std::size_t length = 1024, per_class = 100;
  tones->add_option("--frequencies", freqs, "One frequency (Hz) per class")->delimiter(',');
  tones->add_option("--noise", noise, "Gaussian noise std");
  tones->add_option("--sample-rate", rate, "Hz");
  tones->add_option("--length", length, "Points per recording");
  tones->add_option("--recordings", per_class, "Recordings per class");

  auto* degradation = app.add_subcommand("degradation", "Fault-tone amplitude equal to a health index in [0,1]");
  std::size_t deg_count = 200, deg_length = 512;
  degradation->add_option("--recordings", deg_count, "Number of recordings");
  degradation->add_option("--length", deg_length, "Points per recording");

  auto* bearing = app.add_subcommand("bearing", "4 normal + 52 seeded-fault recordings at 12 kHz (1320 windows of 6000)");
  double scale = 1.0;
  bearing->add_option("--length-scale", scale, "Shrinks every recording (1 = full size)");

  for (auto* sub : {tones, degradation, bearing}) {
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_option("--seed", seed, "Generator seed");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (tones->parsed()) {
      SyntheticSpec spec;
      for (double f : freqs) spec.classes.push_back({f, 1.0, noise});
      spec.sample_rate = rate;
      spec.length = length;
      spec.recordings_per_class = per_class;
      spec.seed = seed;
      write_corpus(out, generate_synthetic(spec), rate,
                   [](const RawRecording& r) { return "class" + std::to_string(class_of(r.target)); }, "manifest.csv");
    } else if (degradation->parsed()) {
      DegradationSpec spec;
      spec.recordings = deg_count;
      spec.length = deg_length;
      spec.seed = seed;
      write_corpus(out, generate_degradation(spec), spec.sample_rate,
                   [](const RawRecording& r) { return format_double(value_of(r.target)); }, "manifest.csv");
    } else {
      const std::pair<BearingTask, const char*> tasks[] = {{BearingTask::ten_way, "manifest_ten_way.csv"},
                                                           {BearingTask::four_way, "manifest_four_way.csv"},
                                                           {BearingTask::binary, "manifest_binary.csv"}};
      for (const auto& [task, name] : tasks) {
        const auto corpus = generate_bearing_corpus({12000.0, 0.3, seed, scale}, task);
        const LabelMap& labels = corpus.labels;
        write_corpus(out, corpus.recordings, 12000.0,
                     [&labels](const RawRecording& r) { return labels.name_of(class_of(r.target)); }, name);
        if (task == BearingTask::ten_way) fs::copy_file(fs::path(out) / name, fs::path(out) / "manifest.csv",
                                                        fs::copy_options::overwrite_existing);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 2;
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}
