// Differentiable primitives. Every function records its result on the tape
// that owns its inputs; mixing tapes throws std::logic_error and shape
// mismatches throw std::invalid_argument naming the primitive and shapes.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vda/autodiff/tape.h"

namespace vda::ad {

// Elementwise binary ops. `b` may have the same shape as `a`, be a single
// element, or match a trailing suffix of `a`'s shape (broadcast over the
// leading axes).
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);

Var add_scalar(const Var& a, double c);
Var mul_scalar(const Var& a, double c);
// c - a
Var rsub_scalar(double c, const Var& a);
Var neg(const Var& a);

Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);
// Gradient is passed where lo < a < hi and zero elsewhere.
Var clamp(const Var& a, double lo, double hi);
// Exact GELU, x * Phi(x).
Var gelu(const Var& a);

// Along the last axis.
Var softmax(const Var& a);
Var log_softmax(const Var& a);
// Jensen-Shannon divergence (nats) between softmax(a) and softmax(b) along the
// last axis. Result drops the last axis.
Var jsd(const Var& a, const Var& b);

Var sum(const Var& a);
Var mean(const Var& a);
Var sum_last(const Var& a);
Var mean_axis(const Var& a, std::size_t axis);

Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(const Var& a, std::size_t axis, std::size_t begin, std::size_t end);
Var gather_rows(const Var& a, std::span<const std::size_t> rows);
Var reshape(const Var& a, Shape shape);

// x [..., in], weight [out, in], bias [out] (bias may be an empty Var).
Var linear(const Var& x, const Var& weight, const Var& bias);
// x [N, T, Cin], weight [Cout, K, Cin], bias [Cout]; zero padding on both
// ends. Output [N, (T + 2 padding - K) / stride + 1, Cout].
Var conv1d(const Var& x, const Var& weight, const Var& bias, std::size_t stride,
           std::size_t padding);
// Normalizes over the last axis; gain/bias [C] may be empty Vars.
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);

}  // namespace vda::ad
