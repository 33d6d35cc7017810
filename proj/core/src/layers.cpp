#include "faultnet/layers.hpp"

#include <algorithm>
#include <cmath>

#include "faultnet/error.hpp"

namespace faultnet {

namespace {

void require_shape(const Tensor& t, const Shape& expected, const char* what) {
  if (t.shape() != expected) {
    throw Error(ErrorCode::shape_mismatch, std::string(what) + ": expected shape " +
                                               expected.to_string() + ", got " +
                                               t.shape().to_string());
  }
}

Tensor uniform_tensor(const Shape& shape, double limit, Rng& rng) {
  std::vector<double> values(shape.numel());
  for (double& v : values) v = rng.uniform(-limit, limit);
  return Tensor(shape, std::move(values));
}

}  // namespace

std::size_t conv_output_length(std::size_t length, std::size_t kernel, std::size_t stride) {
  if (stride == 0) throw Error(ErrorCode::config, "convolution stride must be positive");
  if (kernel == 0) throw Error(ErrorCode::config, "kernel size must be positive");
  if (kernel > length) {
    throw Error(ErrorCode::window, "kernel size " + std::to_string(kernel) +
                                       " exceeds input length " + std::to_string(length));
  }
  return (length - kernel) / stride + 1;
}

Conv1DLayer make_conv1d(std::size_t in_channels, std::size_t num_filters, std::size_t kernel_size,
                        std::size_t stride, Rng& rng) {
  if (stride == 0) throw Error(ErrorCode::config, "convolution stride must be positive");
  const double fan_in = static_cast<double>(in_channels * kernel_size);
  const double fan_out = static_cast<double>(num_filters * kernel_size);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Conv1DLayer layer;
  layer.kernels = uniform_tensor(Shape{num_filters, in_channels, kernel_size}, limit, rng);
  layer.biases = Tensor::zeros(Shape{num_filters});
  layer.stride = stride;
  return layer;
}

Tensor conv1d_forward(const Conv1DLayer& layer, const Tensor& input) {
  if (input.shape().rank() != 2 || input.shape()[0] != layer.in_channels()) {
    throw Error(ErrorCode::shape_mismatch,
                "conv1d expects input [" + std::to_string(layer.in_channels()) + " x k], got " +
                    input.shape().to_string());
  }
  const std::size_t channels = layer.in_channels();
  const std::size_t length = input.shape()[1];
  const std::size_t m = layer.kernel_size();
  const std::size_t d = layer.stride;
  const std::size_t filters = layer.num_filters();
  const std::size_t out_len = conv_output_length(length, m, d);

  const double* x = input.values().data();
  const double* k = layer.kernels.values().data();
  const double* b = layer.biases.values().data();
  std::vector<double> out(filters * out_len);
  for (std::size_t f = 0; f < filters; ++f) {
    double* dst = out.data() + f * out_len;
    std::fill(dst, dst + out_len, b[f]);
    for (std::size_t c = 0; c < channels; ++c) {
      const double* kernel = k + (f * channels + c) * m;
      const double* signal = x + c * length;
      for (std::size_t i = 0; i < out_len; ++i) {
        const double* window = signal + i * d;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += window[j] * kernel[j];
        dst[i] += acc;
      }
    }
  }
  return Tensor(Shape{filters, out_len}, std::move(out));
}

Conv1DGrads conv1d_backward(const Conv1DLayer& layer, const Tensor& input, const Tensor& grad_out) {
  const std::size_t channels = layer.in_channels();
  if (input.shape().rank() != 2 || input.shape()[0] != channels) {
    throw Error(ErrorCode::shape_mismatch, "conv1d backward: bad input shape " +
                                               input.shape().to_string());
  }
  const std::size_t length = input.shape()[1];
  const std::size_t m = layer.kernel_size();
  const std::size_t d = layer.stride;
  const std::size_t filters = layer.num_filters();
  const std::size_t out_len = conv_output_length(length, m, d);
  require_shape(grad_out, Shape{filters, out_len}, "conv1d backward grad_out");

  const double* x = input.values().data();
  const double* k = layer.kernels.values().data();
  const double* g = grad_out.values().data();
  std::vector<double> grad_input(channels * length, 0.0);
  std::vector<double> grad_kernels(filters * channels * m, 0.0);
  std::vector<double> grad_biases(filters, 0.0);

  for (std::size_t f = 0; f < filters; ++f) {
    const double* gf = g + f * out_len;
    double bias_acc = 0.0;
    for (std::size_t i = 0; i < out_len; ++i) bias_acc += gf[i];
    grad_biases[f] = bias_acc;
    for (std::size_t c = 0; c < channels; ++c) {
      const double* kernel = k + (f * channels + c) * m;
      double* dk = grad_kernels.data() + (f * channels + c) * m;
      const double* signal = x + c * length;
      double* dx = grad_input.data() + c * length;
      for (std::size_t i = 0; i < out_len; ++i) {
        const double gi = gf[i];
        if (gi == 0.0) continue;
        const double* window = signal + i * d;
        double* dwindow = dx + i * d;
        for (std::size_t j = 0; j < m; ++j) {
          dk[j] += gi * window[j];
          dwindow[j] += gi * kernel[j];
        }
      }
    }
  }
  return {Tensor(input.shape(), std::move(grad_input)),
          Tensor(layer.kernels.shape(), std::move(grad_kernels)),
          Tensor(layer.biases.shape(), std::move(grad_biases))};
}

Tensor relu_forward(const Tensor& input) {
  std::vector<double> out(input.values().begin(), input.values().end());
  for (double& v : out) v = v < 0.0 ? 0.0 : v;  // NaN passes through
  return Tensor(input.shape(), std::move(out));
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  require_shape(grad_out, input.shape(), "relu backward grad_out");
  const auto x = input.values();
  const auto g = grad_out.values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? g[i] : 0.0;
  return Tensor(input.shape(), std::move(out));
}

std::size_t pool_output_length(std::size_t length, std::size_t pool_size, std::size_t stride) {
  if (pool_size == 0 || stride == 0) {
    throw Error(ErrorCode::config, "pool size and pool stride must be positive");
  }
  if (pool_size > length) {
    throw Error(ErrorCode::window, "pool size " + std::to_string(pool_size) +
                                       " exceeds input length " + std::to_string(length));
  }
  return (length - pool_size) / stride + 1;
}

std::pair<Tensor, PoolCache> maxpool_apply(std::size_t pool_size, std::size_t stride,
                                           const Tensor& input) {
  if (input.shape().rank() != 2) {
    throw Error(ErrorCode::shape_mismatch,
                "maxpool expects input [channels x L], got " + input.shape().to_string());
  }
  const std::size_t channels = input.shape()[0];
  const std::size_t length = input.shape()[1];
  const std::size_t out_len = pool_output_length(length, pool_size, stride);
  const double* x = input.values().data();

  std::vector<double> out(channels * out_len);
  PoolCache cache{input.shape(), std::vector<std::size_t>(channels * out_len)};
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < out_len; ++i) {
      const std::size_t start = c * length + i * stride;
      std::size_t best = start;
      // A NaN wins its window so divergence stays visible downstream.
      for (std::size_t l = 1; l < pool_size && !std::isnan(x[best]); ++l) {
        if (x[start + l] > x[best] || std::isnan(x[start + l])) best = start + l;
      }
      out[c * out_len + i] = x[best];
      cache.winners[c * out_len + i] = best;
    }
  }
  return {Tensor(Shape{channels, out_len}, std::move(out)), std::move(cache)};
}

Tensor maxpool_forward(MaxPool1DLayer& layer, const Tensor& input) {
  auto [output, cache] = maxpool_apply(layer.pool_size, layer.stride, input);
  layer.argmax_cache = std::move(cache);
  return output;
}

Tensor maxpool_backward(const MaxPool1DLayer& layer, const Tensor& grad_out) {
  if (!layer.argmax_cache) {
    throw Error(ErrorCode::state, "maxpool backward called before forward");
  }
  const PoolCache& cache = *layer.argmax_cache;
  const std::size_t channels = cache.input_shape[0];
  require_shape(grad_out, Shape{channels, cache.winners.size() / channels},
                "maxpool backward grad_out");
  std::vector<double> grad_input(cache.input_shape.numel(), 0.0);
  const auto g = grad_out.values();
  for (std::size_t i = 0; i < g.size(); ++i) grad_input[cache.winners[i]] += g[i];
  return Tensor(cache.input_shape, std::move(grad_input));
}

Tensor flatten_forward(const Tensor& input) { return input.reshape(Shape{input.size()}); }

Tensor flatten_backward(const Tensor& grad_out, const Shape& input_shape) {
  return grad_out.reshape(input_shape);
}

DenseLayer make_dense(std::size_t in_features, std::size_t out_features, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_features + out_features));
  return {uniform_tensor(Shape{in_features, out_features}, limit, rng),
          Tensor::zeros(Shape{out_features})};
}

Tensor dense_forward(const DenseLayer& layer, const Tensor& input) {
  const std::size_t in = layer.in_features();
  const std::size_t out = layer.out_features();
  require_shape(input, Shape{in}, "dense input");
  const double* x = input.values().data();
  const double* w = layer.weights.values().data();
  std::vector<double> y(layer.biases.values().begin(), layer.biases.values().end());
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = x[i];
    const double* row = w + i * out;
    for (std::size_t o = 0; o < out; ++o) y[o] += row[o] * xi;
  }
  return Tensor(Shape{out}, std::move(y));
}

DenseGrads dense_backward(const DenseLayer& layer, const Tensor& input, const Tensor& grad_out) {
  const std::size_t in = layer.in_features();
  const std::size_t out = layer.out_features();
  require_shape(input, Shape{in}, "dense backward input");
  require_shape(grad_out, Shape{out}, "dense backward grad_out");
  const double* x = input.values().data();
  const double* w = layer.weights.values().data();
  const double* g = grad_out.values().data();
  std::vector<double> grad_input(in, 0.0);
  std::vector<double> grad_weights(in * out);
  for (std::size_t i = 0; i < in; ++i) {
    const double* row = w + i * out;
    double* dw = grad_weights.data() + i * out;
    double acc = 0.0;
    for (std::size_t o = 0; o < out; ++o) {
      dw[o] = x[i] * g[o];
      acc += row[o] * g[o];
    }
    grad_input[i] = acc;
  }
  return {Tensor(input.shape(), std::move(grad_input)),
          Tensor(layer.weights.shape(), std::move(grad_weights)), grad_out};
}

Tensor softmax(const Tensor& logits) {
  if (logits.shape().rank() != 1 || logits.size() < 2) {
    throw Error(ErrorCode::input, "softmax needs a vector of at least 2 logits, got " +
                                      logits.shape().to_string());
  }
  if (!logits.all_finite()) throw Error(ErrorCode::numeric, "softmax received a non-finite logit");
  const auto z = logits.values();
  const double shift = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - shift);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return Tensor(logits.shape(), std::move(p));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax_head: return "softmax_head";
    case LayerKind::sigmoid_head: return "sigmoid_head";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(const std::string& name) {
  for (auto kind : {LayerKind::conv1d, LayerKind::relu, LayerKind::maxpool, LayerKind::flatten,
                    LayerKind::dense, LayerKind::softmax_head, LayerKind::sigmoid_head}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::config, "unknown layer kind '" + name + "'");
}

}  // namespace faultnet
