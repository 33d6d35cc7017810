#include "faultnet/trainer.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "faultnet/csv_io.hpp"
#include "faultnet/error.hpp"
#include "faultnet/random.hpp"

namespace faultnet {

using nlohmann::json;

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::cross_entropy: return "cross_entropy";
    case LossKind::categorical_cross_entropy: return "categorical_cross_entropy";
    case LossKind::least_squares: return "least_squares";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  for (auto kind : {LossKind::cross_entropy, LossKind::categorical_cross_entropy, LossKind::least_squares}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::config, "unknown loss '" + name + "'");
}

void TrainConfig::validate() const {
  optimizer.validate();
  if (batch_size == 0) throw Error(ErrorCode::config, "batch_size must be positive");
  if (eval_every == 0) throw Error(ErrorCode::config, "eval_every must be positive");
}

void TrainConfig::check_compatible(const Model& model) const {
  const bool classification = model.task() == Task::classification;
  const bool ce = loss != LossKind::least_squares;
  if (classification != ce) {
    throw Error(ErrorCode::config, std::string("loss ") + to_string(loss) + " does not match a " +
                                       to_string(model.task()) + " head");
  }
}

TrainConfig train_config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, std::string("training config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::config, "training config must be an object");
  TrainConfig cfg;
  try {
    if (doc.contains("optimizer")) cfg.optimizer.kind = optimizer_kind_from_string(doc.at("optimizer").get<std::string>());
    cfg.optimizer.learning_rate = doc.value("learning_rate", cfg.optimizer.learning_rate);
    cfg.optimizer.beta1 = doc.value("beta1", cfg.optimizer.beta1);
    cfg.optimizer.beta2 = doc.value("beta2", cfg.optimizer.beta2);
    cfg.optimizer.epsilon = doc.value("epsilon", cfg.optimizer.epsilon);
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    cfg.max_iterations = doc.value("max_iterations", cfg.max_iterations);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("loss")) cfg.loss = loss_kind_from_string(doc.at("loss").get<std::string>());
    cfg.eval_every = doc.value("eval_every", cfg.eval_every);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, std::string("training config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string to_json(const TrainConfig& c) {
  return json{{"optimizer", to_string(c.optimizer.kind)},
              {"learning_rate", c.optimizer.learning_rate},
              {"beta1", c.optimizer.beta1},
              {"beta2", c.optimizer.beta2},
              {"epsilon", c.optimizer.epsilon},
              {"batch_size", c.batch_size},
              {"max_iterations", c.max_iterations},
              {"seed", c.seed},
              {"loss", to_string(c.loss)},
              {"eval_every", c.eval_every}}
      .dump();
}

std::string TrainingLog::to_csv() const {
  std::string out = "iteration,train_loss,val_metric\n";
  for (const LogRow& r : rows) {
    out += std::to_string(r.iteration) + "," + format_double(r.train_loss) + ",";
    if (r.val_metric) out += format_double(*r.val_metric);
    out += "\n";
  }
  return out;
}

TrainingState start_training(Model model, const TrainConfig& config) {
  config.validate();
  config.check_compatible(model);
  OptimizerState opt = make_optimizer_state(config.optimizer, model.parameters());
  return {std::move(model), std::move(opt), 0};
}

std::vector<std::size_t> batch_indices(std::size_t num_samples, std::size_t batch_size,
                                       std::uint64_t seed, std::size_t iteration) {
  if (num_samples == 0 || batch_size == 0 || iteration == 0) {
    throw Error(ErrorCode::input, "batch_indices needs samples, a batch size and a 1-based iteration");
  }
  const std::size_t per_epoch = (num_samples + batch_size - 1) / batch_size;
  const std::size_t epoch = (iteration - 1) / per_epoch;
  const std::size_t position = (iteration - 1) % per_epoch;
  Rng rng(seed, epoch);
  const auto order = permutation(num_samples, rng);
  const std::size_t begin = position * batch_size;
  const std::size_t end = std::min(num_samples, begin + batch_size);
  return {order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end)};
}

namespace {

struct Prepared {
  std::vector<Tensor> inputs;
  std::vector<Target> targets;
};

Prepared prepare(const Model& model, std::span<const Sample> samples) {
  Prepared out;
  out.inputs.reserve(samples.size());
  out.targets.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].window.shape() != model.input_shape()) {
      throw Error(ErrorCode::data, "sample " + std::to_string(i) + " has shape " +
                                       samples[i].window.shape().to_string() + ", model expects " +
                                       model.input_shape().to_string());
    }
    out.inputs.push_back(model.preprocess(samples[i].window));
    out.targets.push_back(samples[i].target);
  }
  return out;
}

MetricsReport evaluate_prepared(const Model& model, const Prepared& data) {
  if (data.inputs.empty()) throw Error(ErrorCode::evaluation, "cannot evaluate an empty sample set");
  if (model.task() == Task::classification) {
    std::vector<int> predictions;
    std::vector<int> labels;
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
      predictions.push_back(static_cast<int>(argmax(model.apply_head(model.logits(data.inputs[i])))));
      labels.push_back(class_of(data.targets[i]));
    }
    return classification_metrics(predictions, labels, 0, model.head_width());
  }
  std::vector<double> estimates;
  std::vector<double> targets;
  for (std::size_t i = 0; i < data.inputs.size(); ++i) {
    estimates.push_back(model.apply_head(model.logits(data.inputs[i]))[0]);
    targets.push_back(value_of(data.targets[i]));
  }
  return regression_metrics(estimates, targets);
}

double headline_metric(const MetricsReport& report) {
  if (const auto* c = std::get_if<ClassificationReport>(&report)) return c->overall_accuracy;
  return std::get<RegressionReport>(report).rmse;
}

}  // namespace

TrainResult train(TrainingState state, const SplitDataset& split, const TrainConfig& config) {
  config.validate();
  config.check_compatible(state.model);
  TrainResult result;
  if (state.iteration >= config.max_iterations) {
    result.state = std::move(state);
    return result;
  }
  if (split.train.empty()) throw Error(ErrorCode::data, "training split is empty");

  Model& model = state.model;
  const Prepared train_data = prepare(model, split.train);
  const Prepared val_data = prepare(model, split.validation);
  const bool classification = model.task() == Task::classification;
  const CrossEntropyForm form = config.loss == LossKind::categorical_cross_entropy
                                    ? CrossEntropyForm::categorical
                                    : CrossEntropyForm::per_class_binary;
  if (classification) {
    for (const Target& t : train_data.targets) {
      const int c = class_of(t);
      if (c < 0 || static_cast<std::size_t>(c) >= model.head_width()) {
        throw Error(ErrorCode::label, "training label " + std::to_string(c) + " outside the " +
                                          std::to_string(model.head_width()) + "-way head");
      }
    }
  }
  const auto names = model.parameter_names();
  std::vector<double> grad_logits(model.head_width());

  while (state.iteration < config.max_iterations) {
    const std::size_t iteration = state.iteration + 1;
    const auto batch = batch_indices(train_data.inputs.size(), config.batch_size, config.seed, iteration);
    const double weight = 1.0 / static_cast<double>(batch.size());
    model.zero_gradients();
    double loss = 0.0;
    for (std::size_t idx : batch) {
      const Tensor logits = model.forward_train(train_data.inputs[idx]);
      if (classification) {
        if (!logits.all_finite()) throw DivergenceError(iteration, logits[0]);
        const Tensor probs = softmax(logits);
        loss += cross_entropy_sample(probs.values(), class_of(train_data.targets[idx]), weight,
                                     grad_logits, form);
      } else {
        const double estimate = sigmoid(logits[0]);
        const double residual = value_of(train_data.targets[idx]) - estimate;
        loss += weight * residual * residual;
        grad_logits[0] = -2.0 * residual * weight * estimate * (1.0 - estimate);
      }
      model.backward(Tensor(Shape{grad_logits.size()}, grad_logits));
    }
    if (!std::isfinite(loss)) throw DivergenceError(iteration, loss);
    model.set_parameters(optimizer_step(state.optimizer, model.parameters(), model.gradients(), names));
    state.iteration = iteration;

    LogRow row{iteration, loss, std::nullopt};
    if (!val_data.inputs.empty() && (iteration % config.eval_every == 0 || iteration == config.max_iterations)) {
      row.val_metric = headline_metric(evaluate_prepared(model, val_data));
    }
    result.log.rows.push_back(row);
  }
  model.zero_gradients();
  result.state = std::move(state);
  return result;
}

TrainResult train(Model model, const SplitDataset& split, const TrainConfig& config) {
  return train(start_training(std::move(model), config), split, config);
}

MetricsReport evaluate(const Model& model, std::span<const Sample> samples) {
  if (samples.empty()) throw Error(ErrorCode::evaluation, "cannot evaluate an empty sample set");
  return evaluate_prepared(model, prepare(model, samples));
}

Prediction predict(const Model& model, const Tensor& window) {
  const auto start = std::chrono::steady_clock::now();
  const Tensor output = model.apply_head(model.logits(model.preprocess(window)));
  Prediction p;
  if (model.task() == Task::classification) {
    p.label = static_cast<int>(argmax(output));
    p.confidence = output[static_cast<std::size_t>(p.label)];
    p.probabilities = output;
  } else {
    p.estimate = output[0];
  }
  const auto stop = std::chrono::steady_clock::now();
  p.latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return p;
}

FeatureExport export_features(const Model& model, std::span<const Sample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::projection, "a 2D projection needs at least 2 samples, got " +
                                           std::to_string(samples.size()));
  }
  FeatureExport out;
  for (const Sample& s : samples) {
    const Tensor input = model.preprocess(s.window);
    const Tensor features = model.penultimate(input);
    out.features.emplace_back(features.values().begin(), features.values().end());
    out.targets.push_back(s.target);
    const Tensor head = model.apply_head(model.logits(input));
    if (model.task() == Task::classification) out.predictions.emplace_back(static_cast<int>(argmax(head)));
    else out.predictions.emplace_back(head[0]);
  }

  const auto q = static_cast<Eigen::Index>(out.features.size());
  const auto dim = static_cast<Eigen::Index>(out.features.front().size());
  Eigen::MatrixXd x(q, dim);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = out.features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd centroid = x.colwise().mean();
  x.rowwise() -= centroid;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::MatrixXd& v = svd.matrixV();

  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(dim, 2);
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, v.cols()); ++k) {
    Eigen::VectorXd axis = v.col(k);
    Eigen::Index pivot = 0;
    axis.cwiseAbs().maxCoeff(&pivot);
    if (axis(pivot) < 0.0) axis = -axis;
    axes.col(k) = axis;
  }
  const Eigen::MatrixXd projected = x * axes;
  for (Eigen::Index i = 0; i < q; ++i) out.projection.push_back({projected(i, 0), projected(i, 1)});
  for (int k = 0; k < 2; ++k) {
    out.components[static_cast<std::size_t>(k)].assign(axes.col(k).data(), axes.col(k).data() + dim);
  }
  return out;
}

std::string FeatureExport::to_csv(const LabelMap& labels) const {
  auto render = [&labels](const Target& t) -> std::string {
    if (const int* c = std::get_if<int>(&t)) {
      return static_cast<std::size_t>(*c) < labels.size() ? labels.name_of(*c) : std::to_string(*c);
    }
    return format_double(std::get<double>(t));
  };
  std::ostringstream os;
  os << "sample_id,label,prediction,pc1,pc2";
  const std::size_t dim = features.empty() ? 0 : features.front().size();
  for (std::size_t j = 0; j < dim; ++j) os << ",f" << j;
  os << "\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    os << i << "," << render(targets[i]) << "," << render(predictions[i]) << ","
       << format_double(projection[i][0]) << "," << format_double(projection[i][1]);
    for (double f : features[i]) os << "," << format_double(f);
    os << "\n";
  }
  return os.str();
}

}  // namespace faultnet
