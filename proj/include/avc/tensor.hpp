// Copyright 2026 The avc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "avc/errors.hpp"

namespace avc {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Index numel(const Shape& shape) {
  Index n = 1;
  for (Index d : shape) n *= d;
  return n;
}

inline std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

template <typename Scalar>
struct Node {
  Shape shape;
  Vec<Scalar> value;
  Vec<Scalar> grad;  // empty until something flows into it
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into inputs' grads.
  std::function<void(Node&)> backward;

  bool is_leaf() const { return !backward; }

  void accumulate(const Eigen::Ref<const Vec<Scalar>>& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
  Vec<Scalar>& grad_buffer() {
    if (grad.size() == 0) grad = Vec<Scalar>::Zero(value.size());
    return grad;
  }
};

// Handle to a node of the differentiable graph. Copies share the node.
template <typename Scalar>
class Tensor {
 public:
  using NodeT = Node<Scalar>;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<NodeT> node) : node_(std::move(node)) {}

  Tensor(Shape shape, Vec<Scalar> value, bool requires_grad = false)
      : node_(std::make_shared<NodeT>()) {
    for (Index d : shape) {
      if (d <= 0) throw DimensionError("tensor dims must be positive, got " + avc::to_string(shape));
    }
    if (avc::numel(shape) != value.size()) {
      throw DimensionError("tensor payload of " + std::to_string(value.size()) +
                           " values does not fill shape " + avc::to_string(shape));
    }
    node_->shape = std::move(shape);
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    Index n = avc::numel(shape);
    return Tensor(std::move(shape), Vec<Scalar>::Zero(n), requires_grad);
  }
  static Tensor constant(Shape shape, Scalar c, bool requires_grad = false) {
    Index n = avc::numel(shape);
    return Tensor(std::move(shape), Vec<Scalar>::Constant(n, c), requires_grad);
  }
  static Tensor scalar(Scalar c, bool requires_grad = false) {
    return constant({1}, c, requires_grad);
  }

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  Index dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t rank() const { return node_->shape.size(); }
  Index numel() const { return node_->value.size(); }

  const Vec<Scalar>& value() const { return node_->value; }
  // For optimizers and initializers only; mutating a value that already
  // feeds a recorded graph invalidates that graph.
  Vec<Scalar>& mutable_value() { return node_->value; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() != 0; }
  const Vec<Scalar>& grad() const { return node_->grad; }
  void clear_grad() const { node_->grad.resize(0); }

  Scalar item() const {
    if (numel() != 1) throw ContractError("item() on tensor of shape " + avc::to_string(shape()));
    return node_->value[0];
  }

  // Row-major 2-D view of the payload.
  Eigen::Map<const RowMat<Scalar>> matrix(Index rows, Index cols) const {
    return Eigen::Map<const RowMat<Scalar>>(node_->value.data(), rows, cols);
  }

  Tensor detach() const { return Tensor(node_->shape, node_->value, false); }

  const std::shared_ptr<NodeT>& node() const { return node_; }

 private:
  std::shared_ptr<NodeT> node_;
};

// Builds the output of an operation. The backward closure is only kept when
// some input participates in differentiation.
template <typename Scalar>
Tensor<Scalar> make_result(const char* op, Shape shape, Vec<Scalar> value,
                           std::vector<std::shared_ptr<Node<Scalar>>> inputs,
                           std::function<void(Node<Scalar>&)> backward) {
  auto node = std::make_shared<Node<Scalar>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  bool any = false;
  for (const auto& in : inputs) any = any || in->requires_grad;
  if (any) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Tensor<Scalar>(std::move(node));
}

// Topologically ordered operation records reachable from a root. Every node
// appears after all of its inputs.
template <typename Scalar>
class Graph {
 public:
  static Graph build(const Tensor<Scalar>& root) {
    Graph g;
    std::unordered_set<const Node<Scalar>*> seen;
    // Iterative post-order DFS.
    std::vector<std::pair<Node<Scalar>*, std::size_t>> stack;
    if (root.node()->requires_grad) {
      stack.emplace_back(root.node().get(), 0);
      seen.insert(root.node().get());
    }
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->inputs.size()) {
        Node<Scalar>* child = node->inputs[next++].get();
        if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
      } else {
        g.order_.push_back(node);
        stack.pop_back();
      }
    }
    return g;
  }

  std::span<Node<Scalar>* const> nodes() const { return order_; }
  std::size_t size() const { return order_.size(); }

 private:
  std::vector<Node<Scalar>*> order_;
};

// Reverse-mode sweep from a scalar loss. Leaf gradients accumulate across
// calls; intermediate gradients are released once propagated.
template <typename Scalar>
void backward(const Tensor<Scalar>& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward() requires a scalar loss, got shape " +
                        (loss.defined() ? to_string(loss.shape()) : std::string("<undefined>")));
  }
  if (!loss.requires_grad()) return;
  const Graph<Scalar> graph = Graph<Scalar>::build(loss);
  auto nodes = graph.nodes();
  nodes.back()->accumulate(Vec<Scalar>::Ones(1));
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    Node<Scalar>* node = *it;
    if (node->is_leaf()) {
      if (node->grad.size() == 0) node->grad = Vec<Scalar>::Zero(node->value.size());
      continue;
    }
    if (node->grad.size() == 0) node->grad = Vec<Scalar>::Zero(node->value.size());
    node->backward(*node);
    node->grad.resize(0);
  }
}

}  // namespace avc
