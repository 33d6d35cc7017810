#include "faultnet/loss_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "faultnet/error.hpp"

namespace faultnet {

double cross_entropy_sample(std::span<const double> probs, int label, double weight,
                            std::span<double> grad_logits, CrossEntropyForm form) {
  const std::size_t n = probs.size();
  constexpr double lo = kProbabilityFloor;
  constexpr double hi = 1.0 - kProbabilityFloor;

  // g[j] = d(contribution)/d(p_j); zero where the clamp is active.
  std::vector<double> g(n, 0.0);
  double contribution = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = probs[j];
    const double pc = std::clamp(p, lo, hi);
    const bool inside = p > lo && p < hi;
    const bool is_true = static_cast<int>(j) == label;
    if (is_true) {
      contribution -= weight * std::log(pc);
      if (inside) g[j] = -weight / p;
    } else if (form == CrossEntropyForm::per_class_binary) {
      contribution -= weight * std::log(1.0 - pc);
      if (inside) g[j] = weight / (1.0 - p);
    }
  }
  double dot = 0.0;
  for (std::size_t j = 0; j < n; ++j) dot += g[j] * probs[j];
  for (std::size_t k = 0; k < n; ++k) grad_logits[k] = probs[k] * (g[k] - dot);
  return contribution;
}

LossResult cross_entropy_loss(const Tensor& probs, std::span<const int> labels,
                              CrossEntropyForm form) {
  if (probs.shape().rank() != 2) {
    throw Error(ErrorCode::input, "cross entropy expects probabilities [q x N], got " +
                                      probs.shape().to_string());
  }
  const std::size_t q = probs.shape()[0];
  const std::size_t n = probs.shape()[1];
  if (labels.size() != q) {
    throw Error(ErrorCode::input, "cross entropy: " + std::to_string(q) + " probability rows but " +
                                      std::to_string(labels.size()) + " labels");
  }
  const auto p = probs.values();
  for (std::size_t i = 0; i < q; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n) {
      throw Error(ErrorCode::label, "label " + std::to_string(labels[i]) + " at row " +
                                        std::to_string(i) + " outside [0, " + std::to_string(n) +
                                        ")");
    }
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += p[i * n + j];
    if (std::abs(row_sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::input, "probability row " + std::to_string(i) + " sums to " +
                                        std::to_string(row_sum));
    }
  }
  std::vector<double> grad(q * n);
  double loss = 0.0;
  const double weight = 1.0 / static_cast<double>(q);
  for (std::size_t i = 0; i < q; ++i) {
    loss += cross_entropy_sample(p.subspan(i * n, n), labels[i], weight,
                                 std::span<double>(grad).subspan(i * n, n), form);
  }
  return {loss, Tensor(probs.shape(), std::move(grad))};
}

LossResult least_squares_loss(std::span<const double> estimates, std::span<const double> targets) {
  if (estimates.size() != targets.size()) {
    throw Error(ErrorCode::input, "least squares: " + std::to_string(estimates.size()) +
                                      " estimates vs " + std::to_string(targets.size()) +
                                      " targets");
  }
  if (estimates.empty()) throw Error(ErrorCode::input, "least squares needs at least one sample");
  const double q = static_cast<double>(estimates.size());
  std::vector<double> grad(estimates.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double r = targets[i] - estimates[i];
    loss += r * r;
    grad[i] = -2.0 * r / q;
  }
  return {loss / q, Tensor::vector(std::move(grad))};
}

ClassificationReport classification_metrics(std::span<const int> predictions,
                                            std::span<const int> labels,
                                            std::size_t positive_class, std::size_t num_classes) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::input, "metrics: " + std::to_string(predictions.size()) +
                                      " predictions vs " + std::to_string(labels.size()) +
                                      " labels");
  }
  if (labels.empty()) throw Error(ErrorCode::evaluation, "metrics need at least one sample");
  if (num_classes == 0) {
    int top = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) top = std::max({top, labels[i], predictions[i]});
    num_classes = static_cast<std::size_t>(top) + 1;
  }
  auto check = [&](int v, const char* what) {
    if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
      throw Error(ErrorCode::label, std::string(what) + " " + std::to_string(v) +
                                        " outside [0, " + std::to_string(num_classes) + ")");
    }
  };
  if (positive_class >= num_classes) {
    throw Error(ErrorCode::label, "positive class " + std::to_string(positive_class) +
                                      " outside [0, " + std::to_string(num_classes) + ")");
  }

  ClassificationReport report;
  report.num_samples = labels.size();
  report.num_classes = num_classes;
  report.positive_class = positive_class;
  report.confusion_matrix.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  const int pos = static_cast<int>(positive_class);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check(labels[i], "label");
    check(predictions[i], "prediction");
    ++report.confusion_matrix[labels[i]][predictions[i]];
    if (labels[i] == predictions[i]) ++correct;
    const bool truth = labels[i] == pos;
    const bool predicted = predictions[i] == pos;
    if (truth && predicted) ++report.counts.tp;
    else if (!truth && predicted) ++report.counts.fp;
    else if (truth && !predicted) ++report.counts.fn_;
    else ++report.counts.tn;
  }
  const auto& c = report.counts;
  const double q = static_cast<double>(report.num_samples);
  report.accuracy = static_cast<double>(c.tp + c.tn) / q;
  report.overall_accuracy = static_cast<double>(correct) / q;
  if (c.tp + c.fp > 0) report.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn_ > 0) report.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn_);
  return report;
}

RegressionReport regression_metrics(std::span<const double> estimates,
                                    std::span<const double> targets) {
  if (estimates.size() != targets.size()) {
    throw Error(ErrorCode::input, "regression metrics: " + std::to_string(estimates.size()) +
                                      " estimates vs " + std::to_string(targets.size()) +
                                      " targets");
  }
  if (targets.empty()) throw Error(ErrorCode::evaluation, "regression metrics need samples");
  const double q = static_cast<double>(targets.size());
  double ss_res = 0.0;
  double abs_sum = 0.0;
  double target_mean = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = targets[i] - estimates[i];
    ss_res += r * r;
    abs_sum += std::abs(r);
    target_mean += targets[i];
  }
  target_mean /= q;
  double ss_tot = 0.0;
  for (double y : targets) ss_tot += (y - target_mean) * (y - target_mean);

  RegressionReport report;
  report.num_samples = targets.size();
  report.mse = ss_res / q;
  report.mae = abs_sum / q;
  report.rmse = std::sqrt(report.mse);
  if (targets.size() >= 2 && ss_tot > 0.0) report.r2 = 1.0 - ss_res / ss_tot;
  return report;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
  return buf;
}

std::string fixed(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string to_json(const MetricsReport& report, const std::vector<std::string>& class_names) {
  nlohmann::json doc;
  if (const auto* c = std::get_if<ClassificationReport>(&report)) {
    doc["task"] = "classification";
    doc["num_samples"] = c->num_samples;
    doc["num_classes"] = c->num_classes;
    doc["positive_class"] = c->positive_class;
    doc["accuracy"] = c->accuracy;
    doc["overall_accuracy"] = c->overall_accuracy;
    doc["precision"] = optional_json(c->precision);
    doc["recall"] = optional_json(c->recall);
    doc["counts"] = {{"tp", c->counts.tp}, {"fp", c->counts.fp}, {"fn", c->counts.fn_},
                     {"tn", c->counts.tn}};
    doc["confusion_matrix"] = c->confusion_matrix;
    if (!class_names.empty()) doc["class_names"] = class_names;
  } else {
    const auto& r = std::get<RegressionReport>(report);
    doc["task"] = "regression";
    doc["num_samples"] = r.num_samples;
    doc["mse"] = r.mse;
    doc["mae"] = r.mae;
    doc["r2"] = optional_json(r.r2);
    doc["rmse"] = r.rmse;
  }
  return doc.dump(2);
}

std::string format_table(const MetricsReport& report, const std::string& task_name,
                         const std::vector<std::string>& class_names) {
  std::ostringstream os;
  const std::size_t first = std::max<std::size_t>(task_name.size(), 4) + 2;
  if (const auto* c = std::get_if<ClassificationReport>(&report)) {
    os << pad("Task", first) << pad("Accuracy", 12) << pad("Precision", 12) << "Recall\n";
    os << pad(task_name, first) << pad(percent(c->accuracy), 12) << pad(percent(c->precision), 12)
       << percent(c->recall) << "\n";
    os << "overall accuracy " << percent(c->overall_accuracy) << " ("
       << static_cast<std::size_t>(c->overall_accuracy * static_cast<double>(c->num_samples) + 0.5)
       << "/" << c->num_samples << "), positive class ";
    if (c->positive_class < class_names.size()) os << class_names[c->positive_class];
    else os << c->positive_class;
    os << "\nconfusion matrix (rows = true, columns = predicted):\n";
    for (const auto& row : c->confusion_matrix) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%6zu", row[j]);
        os << buf;
      }
      os << "\n";
    }
  } else {
    const auto& r = std::get<RegressionReport>(report);
    os << pad("Task", first) << pad("MSE", 12) << pad("MAE", 12) << pad("R2", 12) << "RMSE\n";
    os << pad(task_name, first) << pad(fixed(r.mse), 12) << pad(fixed(r.mae), 12)
       << pad(fixed(r.r2), 12) << fixed(r.rmse) << "\n";
  }
  return os.str();
}

}  // namespace faultnet
