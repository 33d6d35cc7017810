#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace faultnet {

/// Ordered list of dimension sizes, every one >= 1.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims);
  explicit Shape(std::vector<std::size_t> dims);

  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t operator[](std::size_t axis) const { return dims_.at(axis); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  /// Number of elements; 0 for the (invalid) empty shape.
  std::size_t numel() const noexcept;

  bool operator==(const Shape&) const = default;

  std::string to_string() const;

 private:
  std::vector<std::size_t> dims_;
};

/// Dense row-major array of doubles.
///
/// A Tensor never changes after construction: every operation returns a new
/// value, so tensors can be shared across threads freely.
class Tensor {
 public:
  /// The default tensor is a single zero, shape [1].
  Tensor();
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(const Shape& shape);
  static Tensor filled(const Shape& shape, double value);
  static Tensor vector(std::vector<double> values);
  static Tensor scalar(double value) { return vector({value}); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const double> values() const noexcept { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double at(std::size_t row, std::size_t col) const;

  /// Same data, different shape. Throws when element counts differ.
  Tensor reshape(const Shape& shape) const;

  /// True when every entry is finite.
  bool all_finite() const noexcept;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

Tensor zeros(const Shape& shape);
Tensor zeros_like(const Tensor& t);

enum class BinaryOp { add, sub, mul };
enum class ReduceOp { sum, max, argmax, mean };

Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b);
inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::add, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::sub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::mul, a, b); }

Tensor scale(const Tensor& a, double factor);

/// Rank-2 product [r x s] . [s x t] -> [r x t].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Reduction over one axis (the axis is removed; a rank-1 input yields
/// shape [1]) or over the whole tensor when axis is absent. argmax returns
/// indices stored as doubles; ties go to the lowest index.
Tensor reduce(ReduceOp op, const Tensor& a, std::optional<std::size_t> axis = std::nullopt);

double sum(const Tensor& a);
double max(const Tensor& a);
double mean(const Tensor& a);
std::size_t argmax(std::span<const double> values);
inline std::size_t argmax(const Tensor& a) { return argmax(a.values()); }

}  // namespace faultnet
