#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fencenet {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

template <typename T>
struct TensorNode {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until first requested
  bool requires_grad = false;

  std::vector<T>& ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    return grad;
  }
};

}  // namespace detail

// Dense row-major array with an optional gradient buffer.
//
// Tensor is a shared handle: copies alias the same storage. Ops never write into
// their inputs, so a tensor is effectively immutable once its producing op returns.
// Parameters are the exception; the optimizer updates them in place between steps.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<T> values, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->data.size(); }

  std::span<const T> data() const { return node_->data; }
  std::span<T> mutable_data() { return node_->data; }
  T item() const;
  T at(std::size_t flat_index) const { return node_->data.at(flat_index); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value) { node_->requires_grad = value; }

  // Gradient buffer, zero-filled on first access.
  std::span<const T> grad() const { return node_->ensure_grad(); }
  std::span<T> mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();

  // Deep copy with no tape history.
  Tensor clone() const;

  detail::TensorNode<T>* node() const { return node_.get(); }
  const std::shared_ptr<detail::TensorNode<T>>& shared_node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode<T>> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::TensorNode<T>> node_;
};

// Define-by-run record of executed ops. Each entry is the op's backward closure;
// backward() replays them in exact reverse order.
template <typename T>
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t size() const { return entries_.size(); }

  void record(std::function<void()> backward_fn);

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every requires_grad
  // tensor reachable from the loss. Gradients accumulate; call zero_grad on
  // parameters between steps.
  void backward(const Tensor<T>& loss);

  void clear() { entries_.clear(); }

 private:
  bool recording_;
  std::vector<std::function<void()>> entries_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace fencenet
