#include "vda/autodiff/tape.h"

#include <stdexcept>
#include <string>

namespace vda::ad {

const Tensor& Var::value() const {
  if (!tape_) throw std::logic_error("use of an empty Var");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_ && tape_->requires_grad(id_); }

std::span<const double> Var::grad() const {
  if (!tape_) throw std::logic_error("use of an empty Var");
  return tape_->grad_view(id_);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.value.requires_grad = false;
  n.op = "constant";
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.value.requires_grad = true;
  n.requires_grad = true;
  n.op = "variable";
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor& param) {
  Node n;
  n.value.shape = param.shape;
  n.value.data = param.data;
  n.value.requires_grad = param.requires_grad;
  n.requires_grad = param.requires_grad;
  n.param = &param;
  n.op = "parameter";
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn,
                 std::string_view op) {
  Node n;
  bool any = false;
  for (std::size_t id : inputs) {
    if (id >= nodes_.size()) throw std::logic_error("record: input id out of range");
    any = any || nodes_[id].requires_grad;
  }
  n.value = std::move(value);
  n.value.requires_grad = any;
  n.requires_grad = any;
  n.inputs = std::move(inputs);
  if (any) n.backward = std::move(fn);
  n.op = op;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

std::vector<double>& Tape::grad(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.empty()) n.grad.assign(n.value.numel(), 0.0);
  return n.grad;
}

void Tape::backward(const Var& loss) {
  if (loss.tape() != this) throw std::logic_error("backward: loss belongs to another tape");
  if (nodes_.empty()) throw std::logic_error("backward: empty tape");
  if (loss.numel() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                shape_str(loss.shape()));
  visits_ = 0;
  for (Node& n : nodes_) n.grad.clear();
  if (!nodes_[loss.id()].requires_grad) return;
  grad(loss.id())[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) {
      n.backward(*this, id);
      ++visits_;
    }
    if (n.param) {
      if (n.param->grad.empty()) n.param->grad.assign(n.grad.size(), 0.0);
      for (std::size_t i = 0; i < n.grad.size(); ++i) n.param->grad[i] += n.grad[i];
    }
  }
}

}  // namespace vda::ad
