#pragma once

#include <functional>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sketchvos/numerics/tensor.hpp"

namespace sketchvos::numerics {

template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads `grad` of this node and accumulates into the parents.
  std::function<void(Node&)> backward_fn;

  Tensor<T>& grad_buffer() {
    if (grad.shape() != value.shape()) grad = Tensor<T>(value.shape());
    return grad;
  }
};

namespace detail {
inline thread_local int no_grad_depth = 0;
}

/// While alive, operations on the current thread do not record a graph.
class NoGradGuard {
 public:
  NoGradGuard() { ++detail::no_grad_depth; }
  ~NoGradGuard() { --detail::no_grad_depth; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

inline bool grad_enabled() { return detail::no_grad_depth == 0; }

/// Handle to a value in the reverse-mode graph.
template <typename T>
class Var {
 public:
  Var() : node_(std::make_shared<Node<T>>()) {}
  explicit Var(Tensor<T> value, bool requires_grad = false) : node_(std::make_shared<Node<T>>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  const Tensor<T>& value() const { return node_->value; }
  Tensor<T>& mutable_value() { return node_->value; }
  const Tensor<T>& grad() const { return node_->grad; }
  const Shape& shape() const { return node_->value.shape(); }
  int dim(int axis) const { return node_->value.dim(axis); }
  bool requires_grad() const { return node_->requires_grad; }
  const std::shared_ptr<Node<T>>& node() const { return node_; }

  void zero_grad() { node_->grad = Tensor<T>(); }

  /// Seeds d(this)/d(this) = 1 for a scalar and runs reverse accumulation.
  void backward() const {
    if (node_->value.size() != 1) throw ShapeError("backward() requires a scalar output");
    backward(Tensor<T>(node_->value.shape(), T(1)));
  }

  void backward(const Tensor<T>& seed) const {
    if (!node_->requires_grad) return;
    seed.require_same_shape(node_->value, "backward seed");
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    // Iterative post-order DFS.
    std::vector<std::pair<Node<T>*, std::size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
      auto& [n, next] = stack.back();
      if (next < n->parents.size()) {
        Node<T>* p = n->parents[next++].get();
        if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }
    node_->grad_buffer() += seed;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node<T>* n = *it;
      if (n->backward_fn && n->grad.shape() == n->value.shape()) n->backward_fn(*n);
    }
    // Interior gradients are transient; only leaves keep theirs.
    for (Node<T>* n : order) {
      if (n->backward_fn) n->grad = Tensor<T>();
    }
  }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Builds an interior node. The graph is recorded only when gradients are
/// enabled and at least one input requires them.
template <typename T>
Var<T> make_op(Tensor<T> out, std::vector<Var<T>> inputs, std::function<void(Node<T>&)> backward) {
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& in : inputs) needs = needs || in.requires_grad();
  }
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(out);
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (auto& in : inputs) node->parents.push_back(in.node());
    node->backward_fn = std::move(backward);
  }
  return Var<T>(std::move(node));
}

}  // namespace sketchvos::numerics
