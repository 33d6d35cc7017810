#include "faultnet/model.hpp"

#include <json.hpp>

#include "faultnet/error.hpp"

namespace faultnet {

using nlohmann::json;

const char* to_string(Task task) {
  return task == Task::classification ? "classification" : "regression";
}

Task ModelConfig::task() const {
  if (layers.empty() || !is_head(layers.back().kind)) {
    throw Error(ErrorCode::config, "model must end with softmax_head or sigmoid_head");
  }
  return layers.back().kind == LayerKind::softmax_head ? Task::classification : Task::regression;
}

ModelConfig model_config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, std::string("model config: ") + e.what());
  }
  const json& list = doc.is_array() ? doc : doc.value("layers", json::array());
  if (!list.is_array() || list.empty()) throw Error(ErrorCode::config, "model config needs a non-empty 'layers' list");
  ModelConfig config;
  auto count = [](const json& obj, const char* key) -> std::size_t {
    if (!obj.contains(key)) return 0;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(ErrorCode::config, std::string("layer field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
  };
  for (const json& entry : list) {
    if (!entry.is_object() || !entry.contains("kind") || !entry.at("kind").is_string()) {
      throw Error(ErrorCode::config, "every layer needs a string 'kind'");
    }
    LayerSpec spec;
    spec.kind = layer_kind_from_string(entry.at("kind").get<std::string>());
    spec.num_filters = count(entry, "num_filters");
    spec.kernel_size = count(entry, "kernel_size");
    spec.stride = count(entry, "stride");
    spec.pool_size = count(entry, "pool_size");
    spec.units = count(entry, "units");
    config.layers.push_back(spec);
  }
  config.task();  // throws when the head is missing
  return config;
}

std::string to_json(const ModelConfig& config) {
  json list = json::array();
  for (const LayerSpec& s : config.layers) {
    json entry{{"kind", to_string(s.kind)}};
    switch (s.kind) {
      case LayerKind::conv1d:
        entry["num_filters"] = s.num_filters;
        entry["kernel_size"] = s.kernel_size;
        entry["stride"] = s.stride;
        break;
      case LayerKind::maxpool:
        entry["pool_size"] = s.pool_size;
        entry["stride"] = s.stride;
        break;
      case LayerKind::dense:
        entry["units"] = s.units;
        break;
      default:
        break;
    }
    list.push_back(std::move(entry));
  }
  return json{{"layers", list}}.dump();
}

namespace {

std::string describe(std::size_t index, const LayerSpec& spec) {
  return "layer " + std::to_string(index) + " (" + to_string(spec.kind) + ")";
}

std::string producer(std::size_t index, const std::vector<LayerSpec>& specs) {
  return index == 0 ? std::string("the input") : describe(index - 1, specs[index - 1]);
}

}  // namespace

Model build_model(const ModelConfig& config, const Shape& input_shape, const LabelMap& labels,
                  std::uint64_t seed) {
  const Task task = config.task();
  const auto& specs = config.layers;
  for (std::size_t i = 0; i + 1 < specs.size(); ++i) {
    if (is_head(specs[i].kind)) throw Error(ErrorCode::config, "only the last layer may be a head, found " + describe(i, specs[i]));
  }
  if (input_shape.rank() != 2) {
    throw Error(ErrorCode::build, "model input must be [channels x length], got " + input_shape.to_string());
  }
  std::size_t head_width = 1;
  if (task == Task::classification) {
    if (labels.size() < 2) throw Error(ErrorCode::build, "classification needs at least 2 classes");
    head_width = labels.size();
  }

  Model model;
  model.input_shape_ = input_shape;
  model.head_width_ = head_width;
  if (task == Task::classification) model.labels_ = labels;
  Rng rng(seed);

  Shape shape = input_shape;
  ModelConfig resolved = config;
  for (std::size_t i = 0; i + 1 < specs.size(); ++i) {
    LayerSpec& spec = resolved.layers[i];
    auto mismatch = [&](const std::string& expectation) {
      return Error(ErrorCode::build, describe(i, spec) + " expects " + expectation + " but " +
                                         producer(i, specs) + " produces " + shape.to_string());
    };
    try {
      switch (spec.kind) {
        case LayerKind::conv1d: {
          if (spec.num_filters == 0 || spec.kernel_size == 0 || spec.stride == 0) {
            throw Error(ErrorCode::config, describe(i, spec) + " needs positive num_filters, kernel_size and stride");
          }
          if (shape.rank() != 2) throw mismatch("[channels x length]");
          if (spec.kernel_size > shape[1]) throw mismatch("length >= kernel_size " + std::to_string(spec.kernel_size));
          const std::size_t out_len = conv_output_length(shape[1], spec.kernel_size, spec.stride);
          model.layers_.emplace_back(make_conv1d(shape[0], spec.num_filters, spec.kernel_size, spec.stride, rng));
          shape = Shape{spec.num_filters, out_len};
          break;
        }
        case LayerKind::relu:
          model.layers_.emplace_back(ReluLayer{});
          break;
        case LayerKind::maxpool: {
          if (spec.pool_size == 0) spec.pool_size = 2;
          if (spec.stride == 0) spec.stride = spec.pool_size;
          if (shape.rank() != 2) throw mismatch("[channels x length]");
          if (spec.pool_size > shape[1]) throw mismatch("length >= pool_size " + std::to_string(spec.pool_size));
          const std::size_t out_len = pool_output_length(shape[1], spec.pool_size, spec.stride);
          model.layers_.emplace_back(MaxPool1DLayer{spec.pool_size, spec.stride, std::nullopt});
          shape = Shape{shape[0], out_len};
          break;
        }
        case LayerKind::flatten:
          model.layers_.emplace_back(FlattenLayer{});
          shape = Shape{shape.numel()};
          break;
        case LayerKind::dense: {
          if (shape.rank() != 1) throw mismatch("a flat vector (add a flatten layer)");
          const bool feeds_head = i + 2 == specs.size();
          if (spec.units == 0) {
            if (!feeds_head) throw Error(ErrorCode::config, describe(i, spec) + " needs 'units'");
            spec.units = head_width;
          }
          model.layers_.emplace_back(make_dense(shape[0], spec.units, rng));
          shape = Shape{spec.units};
          break;
        }
        case LayerKind::softmax_head:
        case LayerKind::sigmoid_head:
          break;
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::window) throw Error(ErrorCode::build, describe(i, spec) + ": " + e.what());
      throw;
    }
  }

  const std::size_t head_index = specs.size() - 1;
  if (specs.size() < 2 || specs[head_index - 1].kind != LayerKind::dense) {
    throw Error(ErrorCode::build, describe(head_index, specs[head_index]) + " must follow a dense layer");
  }
  if (shape != Shape{head_width}) {
    throw Error(ErrorCode::build, describe(head_index, specs[head_index]) + " expects [" +
                                      std::to_string(head_width) + "] but " +
                                      describe(head_index - 1, specs[head_index - 1]) + " produces " +
                                      shape.to_string());
  }
  model.config_ = std::move(resolved);
  model.zero_gradients();
  return model;
}

void Model::set_standardization(std::optional<StandardizationStats> stats) {
  if (stats && stats->channels() != input_shape_[0]) {
    throw Error(ErrorCode::shape_mismatch, "standardization covers " + std::to_string(stats->channels()) +
                                               " channels, model input has " + std::to_string(input_shape_[0]));
  }
  stats_ = std::move(stats);
}

Tensor Model::preprocess(const Tensor& window) const {
  if (window.shape() != input_shape_) {
    throw Error(ErrorCode::input, "window shape " + window.shape().to_string() + " does not match model input " +
                                      input_shape_.to_string());
  }
  return stats_ ? apply_standardization(window, *stats_) : window;
}

namespace {

struct PureForward {
  Tensor operator()(const Conv1DLayer& l, const Tensor& x) const { return conv1d_forward(l, x); }
  Tensor operator()(const ReluLayer&, const Tensor& x) const { return relu_forward(x); }
  Tensor operator()(const MaxPool1DLayer& l, const Tensor& x) const {
    return maxpool_apply(l.pool_size, l.stride, x).first;
  }
  Tensor operator()(const FlattenLayer&, const Tensor& x) const { return flatten_forward(x); }
  Tensor operator()(const DenseLayer& l, const Tensor& x) const { return dense_forward(l, x); }
};

}  // namespace

Tensor Model::logits(const Tensor& input) const {
  Tensor x = input;
  for (const Layer& layer : layers_) {
    x = std::visit([&x](const auto& l) { return PureForward{}(l, x); }, layer);
  }
  return x;
}

Tensor Model::penultimate(const Tensor& input) const {
  Tensor x = input;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    x = std::visit([&x](const auto& l) { return PureForward{}(l, x); }, layers_[i]);
  }
  return x;
}

Tensor Model::apply_head(const Tensor& logits) const {
  if (task() == Task::classification) return softmax(logits);
  return Tensor::scalar(sigmoid(logits[0]));
}

Tensor Model::forward_train(const Tensor& input) {
  tape_.clear();
  Tensor x = input;
  for (Layer& layer : layers_) {
    tape_.push_back(x);
    if (auto* pool = std::get_if<MaxPool1DLayer>(&layer)) {
      x = maxpool_forward(*pool, x);
    } else {
      x = std::visit([&x](const auto& l) { return PureForward{}(l, x); }, layer);
    }
  }
  return x;
}

void Model::backward(const Tensor& grad_logits) {
  if (tape_.size() != layers_.size()) throw Error(ErrorCode::state, "backward called before forward_train");
  auto accumulate = [this](std::size_t slot, const Tensor& g) {
    auto& acc = grad_acc_[slot];
    const auto v = g.values();
    for (std::size_t k = 0; k < v.size(); ++k) acc[k] += v[k];
  };
  // Parameter slots are laid out front to back, two per parametric layer.
  std::size_t slot = 0;
  std::vector<std::size_t> first_slot(layers_.size(), 0);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    first_slot[i] = slot;
    if (std::holds_alternative<Conv1DLayer>(layers_[i]) || std::holds_alternative<DenseLayer>(layers_[i])) slot += 2;
  }

  Tensor g = grad_logits;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Tensor& input = tape_[i];
    Layer& layer = layers_[i];
    if (const auto* conv = std::get_if<Conv1DLayer>(&layer)) {
      Conv1DGrads grads = conv1d_backward(*conv, input, g);
      accumulate(first_slot[i], grads.kernels);
      accumulate(first_slot[i] + 1, grads.biases);
      g = std::move(grads.input);
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      g = relu_backward(input, g);
    } else if (const auto* pool = std::get_if<MaxPool1DLayer>(&layer)) {
      g = maxpool_backward(*pool, g);
    } else if (std::holds_alternative<FlattenLayer>(layer)) {
      g = flatten_backward(g, input.shape());
    } else {
      DenseGrads grads = dense_backward(std::get<DenseLayer>(layer), input, g);
      accumulate(first_slot[i], grads.weights);
      accumulate(first_slot[i] + 1, grads.biases);
      g = std::move(grads.input);
    }
  }
}

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> out;
  for (const Layer& layer : layers_) {
    if (const auto* conv = std::get_if<Conv1DLayer>(&layer)) {
      out.push_back(conv->kernels);
      out.push_back(conv->biases);
    } else if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      out.push_back(dense->weights);
      out.push_back(dense->biases);
    }
  }
  return out;
}

std::vector<std::string> Model::parameter_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = "layer" + std::to_string(i);
    if (std::holds_alternative<Conv1DLayer>(layers_[i])) {
      out.push_back(prefix + ".conv1d.kernels");
      out.push_back(prefix + ".conv1d.biases");
    } else if (std::holds_alternative<DenseLayer>(layers_[i])) {
      out.push_back(prefix + ".dense.weights");
      out.push_back(prefix + ".dense.biases");
    }
  }
  return out;
}

void Model::set_parameters(const std::vector<Tensor>& params) {
  const auto names = parameter_names();
  if (params.size() != names.size()) {
    throw Error(ErrorCode::build, "model has " + std::to_string(names.size()) + " parameter tensors, got " +
                                      std::to_string(params.size()));
  }
  const auto current = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != current[i].shape()) {
      throw Error(ErrorCode::build, names[i] + ": expected shape " + current[i].shape().to_string() +
                                        ", got " + params[i].shape().to_string());
    }
  }
  std::size_t k = 0;
  for (Layer& layer : layers_) {
    if (auto* conv = std::get_if<Conv1DLayer>(&layer)) {
      conv->kernels = params[k++];
      conv->biases = params[k++];
    } else if (auto* dense = std::get_if<DenseLayer>(&layer)) {
      dense->weights = params[k++];
      dense->biases = params[k++];
    }
  }
}

std::vector<Tensor> Model::gradients() const {
  const auto params = parameters();
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.emplace_back(params[i].shape(), grad_acc_[i]);
  return out;
}

void Model::zero_gradients() {
  const auto params = parameters();
  grad_acc_.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) grad_acc_[i].assign(params[i].size(), 0.0);
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& p : parameters()) n += p.size();
  return n;
}

}  // namespace faultnet
