#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "eat/errors.hpp"

namespace eat::diff {

using Shape = std::vector<int>;

inline long long numel(const Shape& shape) {
  long long n = 1;
  for (int d : shape) n *= d;
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

// Thread-local autograd switch. With recording off, primitives compute
// values but leave no trace; frozen models can then run on many threads.
inline thread_local bool t_grad_enabled = true;

inline bool grad_enabled() { return t_grad_enabled; }

class NoGradGuard {
 public:
  NoGradGuard() : prev_(t_grad_enabled) { t_grad_enabled = false; }
  ~NoGradGuard() { t_grad_enabled = prev_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// One node of the recorded computation: a leaf (no inputs) or one primitive
// application. `backward` scatters this node's grad into its inputs' grads.
template <class T>
struct TensorNode {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized lazily, kept in lockstep with value
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> inputs;
  std::function<void(TensorNode&)> backward;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

template <class T>
class Tensor {
 public:
  Tensor() : node_(std::make_shared<TensorNode<T>>()) {}

  explicit Tensor(Shape shape, bool requires_grad = false)
      : node_(std::make_shared<TensorNode<T>>()) {
    node_->shape = std::move(shape);
    node_->value.assign(static_cast<size_t>(numel(node_->shape)), T(0));
    node_->requires_grad = requires_grad;
    if (requires_grad) node_->ensure_grad();
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor from(Shape shape, std::vector<T> data, bool requires_grad = false) {
    if (static_cast<long long>(data.size()) != numel(shape)) {
      throw ShapeMismatch("tensor data of " + std::to_string(data.size()) +
                          " values does not fill shape " + shape_str(shape));
    }
    Tensor t(std::move(shape), requires_grad);
    t.node_->value = std::move(data);
    return t;
  }

  static Tensor scalar(T v) { return from({1}, {v}); }

  const Shape& shape() const { return node_->shape; }
  long long size() const { return static_cast<long long>(node_->value.size()); }

  int rows() const { return node_->shape.size() == 2 ? node_->shape[0] : throw_rank(); }
  int cols() const { return node_->shape.size() == 2 ? node_->shape[1] : throw_rank(); }

  std::vector<T>& values() { return node_->value; }
  const std::vector<T>& values() const { return node_->value; }

  std::vector<T>& grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  const std::vector<T>& grad() const {
    node_->ensure_grad();
    return node_->grad;
  }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) {
    node_->requires_grad = v;
    if (v) node_->ensure_grad();
  }
  void zero_grad() {
    node_->grad.assign(node_->value.size(), T(0));
  }

  T item() const {
    if (size() != 1) {
      throw ShapeMismatch("item() on tensor of shape " + shape_str(shape()));
    }
    return node_->value[0];
  }

  T at(int r, int c) const { return node_->value[static_cast<size_t>(r) * cols() + c]; }
  T& at(int r, int c) { return node_->value[static_cast<size_t>(r) * cols() + c]; }

  std::shared_ptr<TensorNode<T>> node() const { return node_; }

  // Detached copy of the values (no trace linkage).
  Tensor detach() const { return from(shape(), values(), false); }

 private:
  explicit Tensor(std::shared_ptr<TensorNode<T>> node) : node_(std::move(node)) {}

  [[noreturn]] int throw_rank() const {
    throw ShapeMismatch("expected a rank-2 tensor, got shape " + shape_str(shape()));
  }

  template <class U>
  friend Tensor<U> make_result(Shape shape, std::vector<U> value,
                               std::vector<Tensor<U>> inputs,
                               std::function<void(TensorNode<U>&)> backward);

  std::shared_ptr<TensorNode<T>> node_;
};

// Shared constructor for primitive results: records inputs and the backward
// closure only when grad mode is on and some input needs gradients.
template <class T>
Tensor<T> make_result(Shape shape, std::vector<T> value, std::vector<Tensor<T>> inputs,
                      std::function<void(TensorNode<T>&)> backward) {
  auto node = std::make_shared<TensorNode<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& in : inputs) needs = needs || in.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (const auto& in : inputs) node->inputs.push_back(in.node());
    node->backward = std::move(backward);
  }
  return Tensor<T>(node);
}

// Reverse topological schedule over the nodes reachable from one root.
// backward() seeds d(root)/d(root) = 1 and visits every node exactly once.
template <class T>
class Trace {
 public:
  static Trace from(const Tensor<T>& root) {
    Trace t;
    t.root_ = root.node();
    // iterative post-order DFS over inputs
    std::unordered_set<const TensorNode<T>*> seen;
    std::vector<std::pair<TensorNode<T>*, size_t>> stack;
    if (t.root_->requires_grad) {
      stack.push_back({t.root_.get(), 0});
      seen.insert(t.root_.get());
    }
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->inputs.size()) {
        TensorNode<T>* child = node->inputs[next++].get();
        if (child->requires_grad && !seen.count(child)) {
          seen.insert(child);
          stack.push_back({child, 0});
        }
      } else {
        t.order_.push_back(node);
        stack.pop_back();
      }
    }
    return t;
  }

  size_t size() const { return order_.size(); }

  void backward() {
    if (!root_ || root_->value.size() != 1) {
      throw NonScalarLoss("backward needs a scalar loss, got shape " +
                          shape_str(root_ ? root_->shape : Shape{}));
    }
    if (order_.empty()) return;  // loss does not depend on any parameter
    for (TensorNode<T>* node : order_) node->ensure_grad();
    root_->grad[0] += T(1);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      TensorNode<T>* node = *it;
      if (node->backward) node->backward(*node);
    }
  }

 private:
  std::shared_ptr<TensorNode<T>> root_;
  std::vector<TensorNode<T>*> order_;  // inputs before outputs
};

// Accumulates gradients into every reachable tensor that requires them.
template <class T>
void backward(const Tensor<T>& loss) {
  if (loss.size() != 1) {
    throw NonScalarLoss("backward needs a scalar loss, got shape " +
                        shape_str(loss.shape()));
  }
  Trace<T>::from(loss).backward();
}

}  // namespace eat::diff
