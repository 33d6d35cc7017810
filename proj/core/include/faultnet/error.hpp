#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace faultnet {

enum class ErrorCode {
  invalid_shape,
  shape_mismatch,
  axis,
  window,
  config,
  numeric,
  state,
  label,
  input,
  data,
  segmentation,
  crop,
  split,
  spec,
  evaluation,
  projection,
  build,
  divergence,
  parse,
  version,
  io,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// front ends map failures onto exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, double loss);

  std::size_t iteration() const noexcept { return iteration_; }
  double loss() const noexcept { return loss_; }

 private:
  std::size_t iteration_;
  double loss_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t byte_offset, const std::string& message)
      : Error(ErrorCode::parse, message), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace faultnet
