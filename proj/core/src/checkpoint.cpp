#include "faultnet/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "faultnet/error.hpp"

namespace faultnet {

using nlohmann::json;

namespace {

json tensor_to_json(const Tensor& t) {
  return json{{"shape", t.shape().dims()},
              {"data", std::vector<double>(t.values().begin(), t.values().end())}};
}

Tensor tensor_from_json(const json& j, const std::string& what) {
  try {
    auto dims = j.at("shape").get<std::vector<std::size_t>>();
    auto data = j.at("data").get<std::vector<double>>();
    return Tensor(Shape(std::move(dims)), std::move(data));
  } catch (const Error& e) {
    throw Error(ErrorCode::build, what + ": " + e.what());
  }
}

json tensors_to_json(const std::vector<Tensor>& ts) {
  json out = json::array();
  for (const Tensor& t : ts) out.push_back(tensor_to_json(t));
  return out;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  const Model& model = ckpt.model;
  json doc;
  doc["format_version"] = kCheckpointFormat;
  doc["model"] = json::parse(to_json(model.config()));
  doc["model"]["input_shape"] = model.input_shape().dims();
  doc["model"]["task"] = to_string(model.task());
  doc["labels"] = model.labels().names();
  if (const auto& stats = model.standardization()) {
    doc["standardization"] = {{"mean", stats->mean}, {"stddev", stats->stddev}, {"degenerate", stats->degenerate}};
  } else {
    doc["standardization"] = nullptr;
  }
  json params = json::array();
  const auto names = model.parameter_names();
  const auto values = model.parameters();
  for (std::size_t i = 0; i < values.size(); ++i) {
    json entry = tensor_to_json(values[i]);
    entry["name"] = names[i];
    params.push_back(std::move(entry));
  }
  doc["parameters"] = std::move(params);
  if (ckpt.optimizer) {
    const OptimizerState& o = *ckpt.optimizer;
    doc["optimizer"] = {{"kind", to_string(o.config.kind)},
                        {"learning_rate", o.config.learning_rate},
                        {"beta1", o.config.beta1},
                        {"beta2", o.config.beta2},
                        {"epsilon", o.config.epsilon},
                        {"step", o.step},
                        {"first_moment", tensors_to_json(o.first_moment)},
                        {"second_moment", tensors_to_json(o.second_moment)}};
  } else {
    doc["optimizer"] = nullptr;
  }
  doc["iteration"] = ckpt.iteration;
  doc["run_config"] = ckpt.run_config.empty() ? json(nullptr) : json::parse(ckpt.run_config);
  return doc.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, std::string("checkpoint is not valid JSON at byte ") + std::to_string(e.byte));
  }
  try {
    if (!doc.is_object() || !doc.contains("format_version")) {
      throw Error(ErrorCode::version, "checkpoint has no format_version");
    }
    const auto version = doc.at("format_version").get<std::string>();
    if (version != kCheckpointFormat) {
      throw Error(ErrorCode::version, "checkpoint format '" + version + "' is incompatible with " +
                                          kCheckpointFormat);
    }
    const json& model_doc = doc.at("model");
    const ModelConfig config = model_config_from_json(model_doc.dump());
    Shape input_shape;
    try {
      input_shape = Shape(model_doc.at("input_shape").get<std::vector<std::size_t>>());
    } catch (const Error& e) {
      throw Error(ErrorCode::build, std::string("input_shape: ") + e.what());
    }
    const LabelMap labels(doc.at("labels").get<std::vector<std::string>>());

    Checkpoint ckpt;
    ckpt.model = build_model(config, input_shape, labels, 0);
    if (!doc.at("standardization").is_null()) {
      const json& s = doc.at("standardization");
      StandardizationStats stats;
      stats.mean = s.at("mean").get<std::vector<double>>();
      stats.stddev = s.at("stddev").get<std::vector<double>>();
      stats.degenerate = s.at("degenerate").get<std::vector<bool>>();
      if (stats.stddev.size() != stats.mean.size() || stats.degenerate.size() != stats.mean.size()) {
        throw Error(ErrorCode::build, "standardization arrays disagree in length");
      }
      ckpt.model.set_standardization(std::move(stats));
    }
    std::vector<Tensor> params;
    for (const json& p : doc.at("parameters")) {
      params.push_back(tensor_from_json(p, p.value("name", std::string("parameter"))));
    }
    ckpt.model.set_parameters(params);

    if (!doc.at("optimizer").is_null()) {
      const json& o = doc.at("optimizer");
      OptimizerState state;
      state.config.kind = optimizer_kind_from_string(o.at("kind").get<std::string>());
      state.config.learning_rate = o.at("learning_rate").get<double>();
      state.config.beta1 = o.at("beta1").get<double>();
      state.config.beta2 = o.at("beta2").get<double>();
      state.config.epsilon = o.at("epsilon").get<double>();
      state.step = o.at("step").get<std::size_t>();
      for (const json& t : o.at("first_moment")) state.first_moment.push_back(tensor_from_json(t, "first_moment"));
      for (const json& t : o.at("second_moment")) state.second_moment.push_back(tensor_from_json(t, "second_moment"));
      const auto current = ckpt.model.parameters();
      if (state.config.kind == OptimizerKind::adam) {
        if (state.first_moment.size() != current.size() || state.second_moment.size() != current.size()) {
          throw Error(ErrorCode::build, "optimizer moments do not match the parameter list");
        }
        for (std::size_t i = 0; i < current.size(); ++i) {
          if (state.first_moment[i].shape() != current[i].shape() ||
              state.second_moment[i].shape() != current[i].shape()) {
            throw Error(ErrorCode::build, "optimizer moment " + std::to_string(i) + " has the wrong shape");
          }
        }
      }
      ckpt.optimizer = std::move(state);
    }
    ckpt.iteration = doc.at("iteration").get<std::size_t>();
    if (doc.contains("run_config") && !doc.at("run_config").is_null()) ckpt.run_config = doc.at("run_config").dump();
    return ckpt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::build, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string text = checkpoint_to_json(checkpoint);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write checkpoint '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read checkpoint '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace faultnet
