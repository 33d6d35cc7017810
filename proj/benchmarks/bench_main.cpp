#include <benchmark/benchmark.h>

#include "faultnet/faultnet.hpp"

using namespace faultnet;

namespace {

Tensor signal(std::size_t channels, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(channels * length);
  for (double& x : v) x = rng.normal();
  return Tensor(Shape{channels, length}, std::move(v));
}

const char* kCwruNet = R"([
  {"kind":"conv1d","num_filters":16,"kernel_size":64,"stride":8},{"kind":"relu"},{"kind":"maxpool"},
  {"kind":"conv1d","num_filters":32,"kernel_size":8,"stride":2},{"kind":"relu"},{"kind":"maxpool"},
  {"kind":"flatten"},{"kind":"dense","units":64},{"kind":"relu"},
  {"kind":"dense"},{"kind":"softmax_head"}])";

LabelMap ten_classes() {
  LabelMap m;
  for (int i = 0; i < 10; ++i) m.intern("c" + std::to_string(i));
  return m;
}

}  // namespace

// Args: kernel size, stride.
void BM_Conv1DForward(benchmark::State& state) {
  Rng rng(1);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Conv1DLayer layer = make_conv1d(1, 16, k, d, rng);
  const Tensor x = signal(1, 6000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv1d_forward(layer, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Conv1DForward)->Args({64, 8})->Args({100, 100})->Args({200, 200})->Args({16, 1});

void BM_Conv1DBackward(benchmark::State& state) {
  Rng rng(1);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Conv1DLayer layer = make_conv1d(1, 16, k, d, rng);
  const Tensor x = signal(1, 6000, 2);
  const Tensor g = signal(16, conv_output_length(6000, k, d), 3);
  for (auto _ : state) benchmark::DoNotOptimize(conv1d_backward(layer, x, g));
}
BENCHMARK(BM_Conv1DBackward)->Args({64, 8})->Args({100, 100});

void BM_MaxPool(benchmark::State& state) {
  const Tensor x = signal(16, 743, 4);
  for (auto _ : state) benchmark::DoNotOptimize(maxpool_apply(2, 2, x));
}
BENCHMARK(BM_MaxPool);

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = signal(n, n, 5), b = signal(n, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(64)->Arg(128);

void BM_PredictCwruScale(benchmark::State& state) {
  const Model model = build_model(model_config_from_json(kCwruNet), Shape{1, 6000}, ten_classes(), 7);
  const Tensor x = signal(1, 6000, 8);
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, x));
}
BENCHMARK(BM_PredictCwruScale)->Unit(benchmark::kMillisecond);

void BM_TrainStepCwruScale(benchmark::State& state) {
  Model model = build_model(model_config_from_json(kCwruNet), Shape{1, 6000}, ten_classes(), 7);
  const auto batch = static_cast<std::size_t>(state.range(0));
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < batch + 1; ++i) samples.push_back({signal(1, 6000, 10 + i), Target{static_cast<int>(i % 10)}});
  SplitDataset data;
  data.train.assign(samples.begin(), samples.end() - 1);
  data.validation.assign(samples.end() - 1, samples.end());
  TrainConfig cfg;
  cfg.batch_size = batch;
  cfg.eval_every = 1000000;
  TrainingState ts = start_training(std::move(model), cfg);
  for (auto _ : state) {
    cfg.max_iterations = ts.iteration + 1;
    ts = train(std::move(ts), data, cfg).state;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_TrainStepCwruScale)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
