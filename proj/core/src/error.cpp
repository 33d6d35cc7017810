#include "faultnet/error.hpp"

namespace faultnet {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_shape: return "invalid-shape";
    case ErrorCode::shape_mismatch: return "shape";
    case ErrorCode::axis: return "axis";
    case ErrorCode::window: return "window";
    case ErrorCode::config: return "config";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::state: return "state";
    case ErrorCode::label: return "label";
    case ErrorCode::input: return "input";
    case ErrorCode::data: return "data";
    case ErrorCode::segmentation: return "segmentation";
    case ErrorCode::crop: return "crop";
    case ErrorCode::split: return "split";
    case ErrorCode::spec: return "spec";
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::projection: return "projection";
    case ErrorCode::build: return "build";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::parse: return "parse";
    case ErrorCode::version: return "version";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

DivergenceError::DivergenceError(std::size_t iteration, double loss)
    : Error(ErrorCode::divergence,
            "training diverged at iteration " + std::to_string(iteration) +
                ": loss is not finite"),
      iteration_(iteration),
      loss_(loss) {}

}  // namespace faultnet
