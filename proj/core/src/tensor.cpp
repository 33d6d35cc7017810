#include "faultnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "faultnet/error.hpp"

namespace faultnet {

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
  for (std::size_t d : dims) {
    if (d == 0) {
      std::ostringstream os;
      os << "shape dimensions must be >= 1, got [";
      for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
      os << "]";
      throw Error(ErrorCode::invalid_shape, os.str());
    }
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::shape_mismatch, std::string(what) + ": shape mismatch " +
                                               a.shape().to_string() + " vs " +
                                               b.shape().to_string());
  }
}

}  // namespace

Shape::Shape(std::initializer_list<std::size_t> dims) : dims_(dims) { check_dims(dims_); }

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) { check_dims(dims_); }

std::size_t Shape::numel() const noexcept {
  if (dims_.empty()) return 0;
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::string Shape::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dims_[i]);
  }
  return out + "]";
}

Tensor::Tensor() : shape_{1}, data_(1, 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.rank() == 0) throw Error(ErrorCode::invalid_shape, "tensor shape must not be empty");
  if (shape_.numel() != data_.size()) {
    throw Error(ErrorCode::invalid_shape, "shape " + shape_.to_string() + " needs " +
                                              std::to_string(shape_.numel()) + " values, got " +
                                              std::to_string(data_.size()));
  }
}

Tensor Tensor::zeros(const Shape& shape) { return filled(shape, 0.0); }

Tensor Tensor::filled(const Shape& shape, double value) {
  if (shape.rank() == 0) throw Error(ErrorCode::invalid_shape, "tensor shape must not be empty");
  return Tensor(shape, std::vector<double>(shape.numel(), value));
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(ErrorCode::invalid_shape, "vector must have at least one element");
  return Tensor(Shape{n}, std::move(values));
}

double Tensor::at(std::size_t row, std::size_t col) const {
  if (shape_.rank() != 2) throw Error(ErrorCode::shape_mismatch, "at(row, col) needs a rank-2 tensor");
  return data_.at(row * shape_[1] + col);
}

Tensor Tensor::reshape(const Shape& shape) const {
  if (shape.numel() != data_.size()) {
    throw Error(ErrorCode::shape_mismatch,
                "cannot reshape " + shape_.to_string() + " to " + shape.to_string());
  }
  return Tensor(shape, data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor zeros(const Shape& shape) { return Tensor::zeros(shape); }

Tensor zeros_like(const Tensor& t) { return Tensor::zeros(t.shape()); }

Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "elementwise");
  std::vector<double> out(a.size());
  const auto x = a.values();
  const auto y = b.values();
  switch (op) {
    case BinaryOp::add:
      std::transform(x.begin(), x.end(), y.begin(), out.begin(), std::plus<>());
      break;
    case BinaryOp::sub:
      std::transform(x.begin(), x.end(), y.begin(), out.begin(), std::minus<>());
      break;
    case BinaryOp::mul:
      std::transform(x.begin(), x.end(), y.begin(), out.begin(), std::multiplies<>());
      break;
  }
  return Tensor(a.shape(), std::move(out));
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= factor;
  return Tensor(a.shape(), std::move(out));
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().rank() != 2 || b.shape().rank() != 2) {
    throw Error(ErrorCode::shape_mismatch, "matmul needs rank-2 operands, got " +
                                               a.shape().to_string() + " and " +
                                               b.shape().to_string());
  }
  const std::size_t rows = a.shape()[0];
  const std::size_t inner = a.shape()[1];
  const std::size_t cols = b.shape()[1];
  if (b.shape()[0] != inner) {
    throw Error(ErrorCode::shape_mismatch, "matmul inner dimensions disagree: " +
                                               a.shape().to_string() + " . " +
                                               b.shape().to_string());
  }
  const auto x = a.values();
  const auto y = b.values();
  std::vector<double> out(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      const double lhs = x[i * inner + k];
      const double* rhs = y.data() + k * cols;
      double* dst = out.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) dst[j] += lhs * rhs[j];
    }
  }
  return Tensor(Shape{rows, cols}, std::move(out));
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_shape, "argmax of empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace {

double reduce_strided(ReduceOp op, const double* base, std::size_t count, std::size_t stride) {
  switch (op) {
    case ReduceOp::sum:
    case ReduceOp::mean: {
      double acc = 0.0;
      for (std::size_t i = 0; i < count; ++i) acc += base[i * stride];
      return op == ReduceOp::mean ? acc / static_cast<double>(count) : acc;
    }
    case ReduceOp::max: {
      double best = base[0];
      for (std::size_t i = 1; i < count; ++i) best = std::max(best, base[i * stride]);
      return best;
    }
    case ReduceOp::argmax: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < count; ++i) {
        if (base[i * stride] > base[best * stride]) best = i;
      }
      return static_cast<double>(best);
    }
  }
  return 0.0;
}

}  // namespace

Tensor reduce(ReduceOp op, const Tensor& a, std::optional<std::size_t> axis) {
  if (!axis) return Tensor::scalar(reduce_strided(op, a.values().data(), a.size(), 1));

  const auto& dims = a.shape().dims();
  if (*axis >= dims.size()) {
    throw Error(ErrorCode::axis, "axis " + std::to_string(*axis) + " out of range for shape " +
                                     a.shape().to_string());
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < *axis; ++i) outer *= dims[i];
  std::size_t inner = 1;
  for (std::size_t i = *axis + 1; i < dims.size(); ++i) inner *= dims[i];
  const std::size_t count = dims[*axis];

  std::vector<std::size_t> out_dims;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i != *axis) out_dims.push_back(dims[i]);
  }
  if (out_dims.empty()) out_dims.push_back(1);

  std::vector<double> out(outer * inner);
  const double* data = a.values().data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      out[o * inner + i] = reduce_strided(op, data + o * count * inner + i, count, inner);
    }
  }
  return Tensor(Shape(std::move(out_dims)), std::move(out));
}

double sum(const Tensor& a) { return reduce(ReduceOp::sum, a)[0]; }
double max(const Tensor& a) { return reduce(ReduceOp::max, a)[0]; }
double mean(const Tensor& a) { return reduce(ReduceOp::mean, a)[0]; }

}  // namespace faultnet
