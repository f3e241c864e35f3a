#include "vda/autodiff/tensor.h"

#include <stdexcept>

namespace vda::ad {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)) {
  for (std::size_t d : shape)
    if (d == 0) throw std::invalid_argument("tensor dimensions must be positive: " + shape_str(shape));
  data.assign(shape_numel(shape), fill);
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
  for (std::size_t d : shape)
    if (d == 0) throw std::invalid_argument("tensor dimensions must be positive: " + shape_str(shape));
  if (shape_numel(shape) != data.size())
    throw std::invalid_argument("tensor shape " + shape_str(shape) + " does not match " +
                                std::to_string(data.size()) + " values");
}

void Tensor::zero_grad() { grad.assign(data.size(), 0.0); }

double Tensor::item() const {
  if (data.size() != 1) throw std::logic_error("item() on non-scalar tensor " + shape_str(shape));
  return data[0];
}

}  // namespace vda::ad
