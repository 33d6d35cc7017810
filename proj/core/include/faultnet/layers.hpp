#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "faultnet/random.hpp"
#include "faultnet/tensor.hpp"

namespace faultnet {

// Strided 1D convolution -----------------------------------------------------

/// Valid (unpadded) strided convolution. Each filter spans every input
/// channel; per-channel window products are summed.
struct Conv1DLayer {
  Tensor kernels;  // [num_filters x in_channels x kernel_size]
  Tensor biases;   // [num_filters]
  std::size_t stride = 1;

  std::size_t num_filters() const { return kernels.shape()[0]; }
  std::size_t in_channels() const { return kernels.shape()[1]; }
  std::size_t kernel_size() const { return kernels.shape()[2]; }
};

struct Conv1DGrads {
  Tensor input;
  Tensor kernels;
  Tensor biases;
};

/// floor((length - kernel) / stride) + 1. Throws when kernel > length.
std::size_t conv_output_length(std::size_t length, std::size_t kernel, std::size_t stride);

/// Scaled-uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases.
Conv1DLayer make_conv1d(std::size_t in_channels, std::size_t num_filters, std::size_t kernel_size,
                        std::size_t stride, Rng& rng);

/// input [channels x k] -> [num_filters x out_len]; no activation.
Tensor conv1d_forward(const Conv1DLayer& layer, const Tensor& input);

Conv1DGrads conv1d_backward(const Conv1DLayer& layer, const Tensor& input, const Tensor& grad_out);

// ReLU ---------------------------------------------------------------------

Tensor relu_forward(const Tensor& input);

/// Passes grad_out where input > 0. The subgradient at exactly 0 is 0.
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

// Max pooling --------------------------------------------------------------

struct PoolCache {
  Shape input_shape;
  std::vector<std::size_t> winners;  // flat input index per output element
};

struct MaxPool1DLayer {
  std::size_t pool_size = 2;
  std::size_t stride = 2;
  std::optional<PoolCache> argmax_cache;
};

std::size_t pool_output_length(std::size_t length, std::size_t pool_size, std::size_t stride);

/// Stateless pooling of [channels x L]; returns output and winning indices.
/// Ties go to the earliest element of the window.
std::pair<Tensor, PoolCache> maxpool_apply(std::size_t pool_size, std::size_t stride,
                                           const Tensor& input);

/// Pools and records the winners in layer.argmax_cache.
Tensor maxpool_forward(MaxPool1DLayer& layer, const Tensor& input);

/// Routes grad_out to the cached winners; overlapping windows accumulate.
Tensor maxpool_backward(const MaxPool1DLayer& layer, const Tensor& grad_out);

// Flatten / dense ----------------------------------------------------------

Tensor flatten_forward(const Tensor& input);
Tensor flatten_backward(const Tensor& grad_out, const Shape& input_shape);

/// Fully connected y = W^T x + b.
struct DenseLayer {
  Tensor weights;  // [in x out]
  Tensor biases;   // [out]

  std::size_t in_features() const { return weights.shape()[0]; }
  std::size_t out_features() const { return weights.shape()[1]; }
};

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor biases;
};

DenseLayer make_dense(std::size_t in_features, std::size_t out_features, Rng& rng);

/// input [in] -> [out].
Tensor dense_forward(const DenseLayer& layer, const Tensor& input);
DenseGrads dense_backward(const DenseLayer& layer, const Tensor& input, const Tensor& grad_out);

// Heads ----------------------------------------------------------------------

/// Max-subtracted softmax over a rank-1 logit vector (N >= 2).
Tensor softmax(const Tensor& logits);

double sigmoid(double x);

// Declarative layer description ----------------------------------------------

enum class LayerKind { conv1d, relu, maxpool, flatten, dense, softmax_head, sigmoid_head };

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

inline bool is_head(LayerKind kind) {
  return kind == LayerKind::softmax_head || kind == LayerKind::sigmoid_head;
}

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  std::size_t num_filters = 0;  // conv1d
  std::size_t kernel_size = 0;  // conv1d
  std::size_t stride = 0;       // conv1d, maxpool (maxpool defaults to pool_size)
  std::size_t pool_size = 0;    // maxpool (default 2)
  std::size_t units = 0;        // dense; 0 before a head means "size it to the head"

  bool operator==(const LayerSpec&) const = default;
};

}  // namespace faultnet
