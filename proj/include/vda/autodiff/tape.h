#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "vda/autodiff/tensor.h"

namespace vda::ad {

class Tape;

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape; }
  std::size_t numel() const { return value().numel(); }
  double item() const { return value().item(); }
  bool requires_grad() const;
  // Gradient of the last backward() pass; empty if none reached this node.
  std::span<const double> grad() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records primitive applications in creation order, which is a topological
// order of the computation graph. backward() walks it once in reverse.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf whose gradient is read back through Var::grad().
  Var variable(Tensor value);
  // Leaf bound to an external tensor; backward() adds into param.grad.
  Var parameter(Tensor& param);

  // Used by primitives. The node requires grad when any input does; the
  // backward function is dropped otherwise.
  Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn,
             std::string_view op);

  void backward(const Var& loss);

  std::size_t size() const { return nodes_.size(); }
  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::string_view op(std::size_t id) const { return nodes_.at(id).op; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_.at(id).inputs; }
  // Gradient buffer of a node, zero-initialized on first access.
  std::vector<double>& grad(std::size_t id);
  std::span<const double> grad_view(std::size_t id) const { return nodes_.at(id).grad; }
  // Count of nodes whose backward function ran in the last backward().
  std::size_t backward_visits() const { return visits_; }

 private:
  struct Node {
    Tensor value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Tensor* param = nullptr;
    bool requires_grad = false;
    std::string_view op;
    std::vector<double> grad;
  };
  std::deque<Node> nodes_;
  std::size_t visits_ = 0;
};

}  // namespace vda::ad
