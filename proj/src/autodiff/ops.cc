#include "vda/autodiff/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vda/kernels.h"

namespace vda::ad {
namespace {

Tape& tape_of(const Var& a) {
  if (!a.valid()) throw std::logic_error("primitive applied to an empty Var");
  return *a.tape();
}

Tape& tape_of(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  if (b.valid() && b.tape() != &t) throw std::logic_error("primitive inputs live on different tapes");
  return t;
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw std::invalid_argument(std::string("primitive '") + op + "': incompatible shapes " +
                              shape_str(a) + " and " + shape_str(b));
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const std::string& what) {
  throw std::invalid_argument(std::string("primitive '") + op + "': shape " + shape_str(a) + " " +
                              what);
}

// Size of the broadcast period of b inside a, or 0 if not broadcastable.
std::size_t broadcast_inner(const Shape& a, const Shape& b) {
  const std::size_t nb = shape_numel(b);
  if (nb == 1) return 1;
  if (b.size() > a.size()) return 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[b.size() - 1 - i] != a[a.size() - 1 - i]) return 0;
  return nb;
}

void accumulate(Tape& t, std::size_t id, const std::vector<double>& g) {
  if (!t.requires_grad(id)) return;
  auto& dst = t.grad(id);
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

Shape drop_axis(const Shape& s, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != axis) out.push_back(s[i]);
  if (out.empty()) out.push_back(1);
  return out;
}

enum class BinOp { kAdd, kSub, kMul, kDiv };

Var binary(const Var& a, const Var& b, BinOp op, const char* name) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (op == BinOp::kAdd || op == BinOp::kMul) {
    if (broadcast_inner(av.shape, bv.shape) == 0 && broadcast_inner(bv.shape, av.shape) != 0)
      return binary(b, a, op, name);
  }
  const std::size_t inner = broadcast_inner(av.shape, bv.shape);
  if (inner == 0) shape_error(name, av.shape, bv.shape);
  Tensor out(av.shape);
  const std::size_t n = av.numel();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = av.data[i], y = bv.data[i % inner];
    switch (op) {
      case BinOp::kAdd: out.data[i] = x + y; break;
      case BinOp::kSub: out.data[i] = x - y; break;
      case BinOp::kMul: out.data[i] = x * y; break;
      case BinOp::kDiv: out.data[i] = x / y; break;
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(
      std::move(out), {ia, ib},
      [ia, ib, inner, op](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        const auto& x = tp.value(ia).data;
        const auto& y = tp.value(ib).data;
        const std::size_t n = g.size();
        if (tp.requires_grad(ia)) {
          auto& ga = tp.grad(ia);
          for (std::size_t i = 0; i < n; ++i) {
            const double yi = y[i % inner];
            switch (op) {
              case BinOp::kAdd:
              case BinOp::kSub: ga[i] += g[i]; break;
              case BinOp::kMul: ga[i] += g[i] * yi; break;
              case BinOp::kDiv: ga[i] += g[i] / yi; break;
            }
          }
        }
        if (tp.requires_grad(ib)) {
          auto& gb = tp.grad(ib);
          for (std::size_t i = 0; i < n; ++i) {
            const double yi = y[i % inner];
            double d = 0.0;
            switch (op) {
              case BinOp::kAdd: d = g[i]; break;
              case BinOp::kSub: d = -g[i]; break;
              case BinOp::kMul: d = g[i] * x[i]; break;
              case BinOp::kDiv: d = -g[i] * x[i] / (yi * yi); break;
            }
            gb[i % inner] += d;
          }
        }
      },
      name);
}

// Elementwise unary op given value and derivative functions of (x, y).
template <typename F, typename D>
Var unary(const Var& a, const char* name, F f, D df) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  Tensor out(av.shape);
  for (std::size_t i = 0; i < av.numel(); ++i) out.data[i] = f(av.data[i]);
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, df](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        const auto& x = tp.value(ia).data;
        const auto& y = tp.value(self).data;
        auto& ga = tp.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
      },
      name);
}

}  // namespace

Var add(const Var& a, const Var& b) { return binary(a, b, BinOp::kAdd, "add"); }
Var sub(const Var& a, const Var& b) { return binary(a, b, BinOp::kSub, "sub"); }
Var mul(const Var& a, const Var& b) { return binary(a, b, BinOp::kMul, "mul"); }
Var div(const Var& a, const Var& b) { return binary(a, b, BinOp::kDiv, "div"); }

Var add_scalar(const Var& a, double c) {
  return unary(a, "add_scalar", [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var mul_scalar(const Var& a, double c) {
  return unary(a, "mul_scalar", [c](double x) { return x * c; }, [c](double, double) { return c; });
}

Var rsub_scalar(double c, const Var& a) {
  return unary(a, "rsub_scalar", [c](double x) { return c - x; }, [](double, double) { return -1.0; });
}

Var neg(const Var& a) { return mul_scalar(a, -1.0); }

Var exp(const Var& a) {
  return unary(a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var square(const Var& a) {
  return unary(a, "square", [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var clamp(const Var& a, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("primitive 'clamp': lo > hi");
  return unary(
      a, "clamp", [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var gelu(const Var& a) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return unary(
      a, "gelu", [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
      [](double x, double) {
        return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
      });
}

namespace {

// Row-wise softmax over the last axis.
void softmax_rows(const double* x, double* y, std::size_t rows, std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * n;
    double* yr = y + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (yr[i] = std::exp(xr[i] - mx));
    for (std::size_t i = 0; i < n; ++i) yr[i] /= s;
  }
}

void log_softmax_rows(const double* x, double* y, std::size_t rows, std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * n;
    double* yr = y + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(xr[i] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t i = 0; i < n; ++i) yr[i] = xr[i] - lse;
  }
}

}  // namespace

Var softmax(const Var& a) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const std::size_t n = av.shape.back(), rows = av.numel() / n;
  Tensor out(av.shape);
  softmax_rows(av.data.data(), out.data.data(), rows, n);
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, rows, n](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        const auto& y = tp.value(self).data;
        auto& ga = tp.grad(ia);
        for (std::size_t r = 0; r < rows; ++r) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += g[r * n + i] * y[r * n + i];
          for (std::size_t i = 0; i < n; ++i) ga[r * n + i] += y[r * n + i] * (g[r * n + i] - s);
        }
      },
      "softmax");
}

Var log_softmax(const Var& a) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const std::size_t n = av.shape.back(), rows = av.numel() / n;
  Tensor out(av.shape);
  log_softmax_rows(av.data.data(), out.data.data(), rows, n);
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, rows, n](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        const auto& y = tp.value(self).data;
        auto& ga = tp.grad(ia);
        for (std::size_t r = 0; r < rows; ++r) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += g[r * n + i];
          for (std::size_t i = 0; i < n; ++i)
            ga[r * n + i] += g[r * n + i] - std::exp(y[r * n + i]) * s;
        }
      },
      "log_softmax");
}

Var jsd(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.shape != bv.shape) shape_error("jsd", av.shape, bv.shape);
  const std::size_t n = av.shape.back(), rows = av.numel() / n;
  auto lp = std::make_shared<std::vector<double>>(av.numel());
  auto lq = std::make_shared<std::vector<double>>(av.numel());
  auto lm = std::make_shared<std::vector<double>>(av.numel());
  log_softmax_rows(av.data.data(), lp->data(), rows, n);
  log_softmax_rows(bv.data.data(), lq->data(), rows, n);
  Tensor out(drop_axis(av.shape, av.rank() - 1));
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = r * n; i < (r + 1) * n; ++i) {
      const double x = (*lp)[i], y = (*lq)[i];
      const double hi = std::max(x, y);
      (*lm)[i] = hi + std::log1p(std::exp(std::min(x, y) - hi)) - std::numbers::ln2;
      acc += 0.5 * std::exp(x) * (x - (*lm)[i]) + 0.5 * std::exp(y) * (y - (*lm)[i]);
    }
    out.data[r] = std::max(acc, 0.0);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(
      std::move(out), {ia, ib},
      [ia, ib, rows, n, lp, lq, lm](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        auto push = [&](std::size_t id, const std::vector<double>& logd) {
          if (!tp.requires_grad(id)) return;
          auto& ga = tp.grad(id);
          for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t i = r * n; i < (r + 1) * n; ++i)
              s += std::exp(logd[i]) * 0.5 * (logd[i] - (*lm)[i]);
            for (std::size_t i = r * n; i < (r + 1) * n; ++i) {
              const double p = std::exp(logd[i]);
              ga[i] += g[r] * p * (0.5 * (logd[i] - (*lm)[i]) - s);
            }
          }
        };
        push(ia, *lp);
        push(ib, *lq);
      },
      "jsd");
}

Var sum(const Var& a) {
  Tape& t = tape_of(a);
  double s = 0.0;
  for (double x : a.value().data) s += x;
  const std::size_t ia = a.id();
  return t.record(
      Tensor::scalar(s), {ia},
      [ia](Tape& tp, std::size_t self) {
        const double g = tp.grad(self)[0];
        for (double& x : tp.grad(ia)) x += g;
      },
      "sum");
}

Var mean(const Var& a) { return mul_scalar(sum(a), 1.0 / static_cast<double>(a.numel())); }

Var sum_last(const Var& a) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const std::size_t n = av.shape.back(), rows = av.numel() / n;
  Tensor out(drop_axis(av.shape, av.rank() - 1));
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += av.data[r * n + i];
    out.data[r] = s;
  }
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, rows, n](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        auto& ga = tp.grad(ia);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t i = 0; i < n; ++i) ga[r * n + i] += g[r];
      },
      "sum_last");
}

Var mean_axis(const Var& a, std::size_t axis) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  if (axis >= av.rank()) shape_error("mean_axis", av.shape, "has no axis " + std::to_string(axis));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= av.shape[i];
  for (std::size_t i = axis + 1; i < av.rank(); ++i) inner *= av.shape[i];
  const std::size_t len = av.shape[axis];
  Tensor out(drop_axis(av.shape, axis));
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t l = 0; l < len; ++l)
      kernels::axpy(scale, av.data.data() + (o * len + l) * inner, out.data.data() + o * inner,
                    inner);
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, outer, inner, len, scale](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        auto& ga = tp.grad(ia);
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t l = 0; l < len; ++l)
            kernels::axpy(scale, g.data() + o * inner, ga.data() + (o * len + l) * inner, inner);
      },
      "mean_axis");
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("primitive 'concat': no inputs");
  Tape& t = tape_of(parts[0]);
  const Shape& s0 = parts[0].shape();
  if (axis >= s0.size()) shape_error("concat", s0, "has no axis " + std::to_string(axis));
  Shape out_shape = s0;
  out_shape[axis] = 0;
  std::vector<std::size_t> ids, widths;
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s0[i];
  for (std::size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];
  for (const Var& p : parts) {
    tape_of(parts[0], p);
    const Shape& s = p.shape();
    if (s.size() != s0.size()) shape_error("concat", s0, s);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != axis && s[i] != s0[i]) shape_error("concat", s0, s);
    out_shape[axis] += s[axis];
    ids.push_back(p.id());
    widths.push_back(s[axis] * inner);
  }
  Tensor out(out_shape);
  const std::size_t row = out_shape[axis] * inner;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& src = parts[k].value().data;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(src.begin() + o * widths[k], widths[k], out.data.begin() + o * row + offset);
    offset += widths[k];
  }
  return t.record(
      std::move(out), ids,
      [ids, widths, outer, row](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        std::size_t off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (tp.requires_grad(ids[k])) {
            auto& gk = tp.grad(ids[k]);
            for (std::size_t o = 0; o < outer; ++o)
              for (std::size_t i = 0; i < widths[k]; ++i) gk[o * widths[k] + i] += g[o * row + off + i];
          }
          off += widths[k];
        }
      },
      "concat");
}

Var slice(const Var& a, std::size_t axis, std::size_t begin, std::size_t end) {
  Tape& t = tape_of(a);
  const Shape& s = a.shape();
  if (axis >= s.size() || begin >= end || end > s[axis])
    shape_error("slice", s,
                "cannot be sliced on axis " + std::to_string(axis) + " over [" +
                    std::to_string(begin) + "," + std::to_string(end) + ")");
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  Shape os = s;
  os[axis] = end - begin;
  Tensor out(os);
  const std::size_t in_row = s[axis] * inner, out_row = (end - begin) * inner, off = begin * inner;
  const auto& src = a.value().data;
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(src.begin() + o * in_row + off, out_row, out.data.begin() + o * out_row);
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, outer, in_row, out_row, off](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        auto& ga = tp.grad(ia);
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t i = 0; i < out_row; ++i) ga[o * in_row + off + i] += g[o * out_row + i];
      },
      "slice");
}

Var gather_rows(const Var& a, std::span<const std::size_t> rows) {
  Tape& t = tape_of(a);
  const Shape& s = a.shape();
  if (rows.empty()) shape_error("gather_rows", s, "gathered with an empty row list");
  const std::size_t width = a.numel() / s[0];
  Shape os = s;
  os[0] = rows.size();
  Tensor out(os);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= s[0])
      shape_error("gather_rows", s, "has no row " + std::to_string(rows[r]));
    std::copy_n(a.value().data.begin() + rows[r] * width, width, out.data.begin() + r * width);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia, idx, width](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        auto& ga = tp.grad(ia);
        for (std::size_t r = 0; r < idx.size(); ++r)
          for (std::size_t i = 0; i < width; ++i) ga[idx[r] * width + i] += g[r * width + i];
      },
      "gather_rows");
}

Var reshape(const Var& a, Shape shape) {
  Tape& t = tape_of(a);
  if (shape_numel(shape) != a.numel()) shape_error("reshape", a.shape(), shape);
  Tensor out(std::move(shape), a.value().data);
  const std::size_t ia = a.id();
  return t.record(
      std::move(out), {ia},
      [ia](Tape& tp, std::size_t self) { accumulate(tp, ia, tp.grad(self)); }, "reshape");
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  Tape& t = tape_of(x, weight);
  if (bias.valid()) tape_of(x, bias);
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (ws.size() != 2 || xs.back() != ws[1]) shape_error("linear", xs, ws);
  const std::size_t in = ws[1], out_dim = ws[0], rows = x.numel() / in;
  if (bias.valid() && (bias.numel() != out_dim)) shape_error("linear", ws, bias.shape());
  Shape os = xs;
  os.back() = out_dim;
  Tensor out(os);
  kernels::gemm_nt(x.value().data.data(), weight.value().data.data(), out.data.data(), rows,
                   out_dim, in);
  if (bias.valid()) {
    const auto& b = bias.value().data;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t o = 0; o < out_dim; ++o) out.data[r * out_dim + o] += b[o];
  }
  const std::size_t ix = x.id(), iw = weight.id();
  const bool has_bias = bias.valid();
  const std::size_t ib = has_bias ? bias.id() : 0;
  std::vector<std::size_t> inputs{ix, iw};
  if (has_bias) inputs.push_back(ib);
  return t.record(
      std::move(out), inputs,
      [ix, iw, ib, has_bias, rows, in, out_dim](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        if (tp.requires_grad(ix))
          kernels::gemm_nn(g.data(), tp.value(iw).data.data(), tp.grad(ix).data(), rows, in, out_dim);
        if (tp.requires_grad(iw))
          kernels::gemm_tn(g.data(), tp.value(ix).data.data(), tp.grad(iw).data(), out_dim, in, rows);
        if (has_bias && tp.requires_grad(ib)) {
          auto& gb = tp.grad(ib);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t o = 0; o < out_dim; ++o) gb[o] += g[r * out_dim + o];
        }
      },
      "linear");
}

Var conv1d(const Var& x, const Var& weight, const Var& bias, std::size_t stride,
           std::size_t padding) {
  Tape& t = tape_of(x, weight);
  if (bias.valid()) tape_of(x, bias);
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 3 || ws.size() != 3 || xs[2] != ws[2]) shape_error("conv1d", xs, ws);
  if (stride == 0) shape_error("conv1d", xs, "used with stride 0");
  const std::size_t n = xs[0], len = xs[1], cin = xs[2];
  const std::size_t cout = ws[0], k = ws[1];
  if (len + 2 * padding < k) shape_error("conv1d", xs, "is shorter than kernel " + std::to_string(k));
  if (bias.valid() && bias.numel() != cout) shape_error("conv1d", ws, bias.shape());
  const std::size_t tout = (len + 2 * padding - k) / stride + 1;
  const std::size_t kc = k * cin;
  // im2col: col[(b, t), (j, c)] = x[b, t * stride + j - padding, c]
  auto col = std::make_shared<std::vector<double>>(n * tout * kc, 0.0);
  const auto& xd = x.value().data;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t to = 0; to < tout; ++to)
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t ti = static_cast<std::ptrdiff_t>(to * stride + j) -
                                  static_cast<std::ptrdiff_t>(padding);
        if (ti < 0 || ti >= static_cast<std::ptrdiff_t>(len)) continue;
        std::copy_n(xd.begin() + (b * len + ti) * cin, cin,
                    col->begin() + (b * tout + to) * kc + j * cin);
      }
  Tensor out({n, tout, cout});
  kernels::gemm_nt(col->data(), weight.value().data.data(), out.data.data(), n * tout, cout, kc);
  if (bias.valid()) {
    const auto& bd = bias.value().data;
    for (std::size_t r = 0; r < n * tout; ++r)
      for (std::size_t o = 0; o < cout; ++o) out.data[r * cout + o] += bd[o];
  }
  const std::size_t ix = x.id(), iw = weight.id();
  const bool has_bias = bias.valid();
  const std::size_t ib = has_bias ? bias.id() : 0;
  std::vector<std::size_t> inputs{ix, iw};
  if (has_bias) inputs.push_back(ib);
  return t.record(
      std::move(out), inputs,
      [=](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        const std::size_t rows = n * tout;
        if (tp.requires_grad(iw))
          kernels::gemm_tn(g.data(), col->data(), tp.grad(iw).data(), cout, kc, rows);
        if (has_bias && tp.requires_grad(ib)) {
          auto& gb = tp.grad(ib);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t o = 0; o < cout; ++o) gb[o] += g[r * cout + o];
        }
        if (tp.requires_grad(ix)) {
          std::vector<double> dcol(rows * kc, 0.0);
          kernels::gemm_nn(g.data(), tp.value(iw).data.data(), dcol.data(), rows, kc, cout);
          auto& gx = tp.grad(ix);
          for (std::size_t b = 0; b < n; ++b)
            for (std::size_t to = 0; to < tout; ++to)
              for (std::size_t j = 0; j < k; ++j) {
                const std::ptrdiff_t ti = static_cast<std::ptrdiff_t>(to * stride + j) -
                                          static_cast<std::ptrdiff_t>(padding);
                if (ti < 0 || ti >= static_cast<std::ptrdiff_t>(len)) continue;
                const double* src = dcol.data() + (b * tout + to) * kc + j * cin;
                double* dst = gx.data() + (b * len + ti) * cin;
                for (std::size_t c = 0; c < cin; ++c) dst[c] += src[c];
              }
        }
      },
      "conv1d");
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  Tape& t = tape_of(x);
  if (gain.valid()) tape_of(x, gain);
  if (bias.valid()) tape_of(x, bias);
  const Shape& xs = x.shape();
  const std::size_t c = xs.back(), rows = x.numel() / c;
  if (gain.valid() && gain.numel() != c) shape_error("layer_norm", xs, gain.shape());
  if (bias.valid() && bias.numel() != c) shape_error("layer_norm", xs, bias.shape());
  auto xhat = std::make_shared<std::vector<double>>(x.numel());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  const auto& xd = x.value().data;
  Tensor out(xs);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xd.data() + r * c;
    double mu = 0.0;
    for (std::size_t i = 0; i < c; ++i) mu += xr[i];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t i = 0; i < c; ++i) var += (xr[i] - mu) * (xr[i] - mu);
    var /= static_cast<double>(c);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t i = 0; i < c; ++i) {
      const double h = (xr[i] - mu) * is;
      (*xhat)[r * c + i] = h;
      double y = h;
      if (gain.valid()) y *= gain.value().data[i];
      if (bias.valid()) y += bias.value().data[i];
      out.data[r * c + i] = y;
    }
  }
  const std::size_t ix = x.id();
  const bool has_gain = gain.valid(), has_bias = bias.valid();
  const std::size_t ig = has_gain ? gain.id() : 0, ib = has_bias ? bias.id() : 0;
  std::vector<std::size_t> inputs{ix};
  if (has_gain) inputs.push_back(ig);
  if (has_bias) inputs.push_back(ib);
  return t.record(
      std::move(out), inputs,
      [=](Tape& tp, std::size_t self) {
        const auto& g = tp.grad(self);
        const double* gd = has_gain ? tp.value(ig).data.data() : nullptr;
        if (has_gain && tp.requires_grad(ig)) {
          auto& gg = tp.grad(ig);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t i = 0; i < c; ++i) gg[i] += g[r * c + i] * (*xhat)[r * c + i];
        }
        if (has_bias && tp.requires_grad(ib)) {
          auto& gb = tp.grad(ib);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t i = 0; i < c; ++i) gb[i] += g[r * c + i];
        }
        if (tp.requires_grad(ix)) {
          auto& gx = tp.grad(ix);
          std::vector<double> dh(c);
          for (std::size_t r = 0; r < rows; ++r) {
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < c; ++i) {
              dh[i] = g[r * c + i] * (gd ? gd[i] : 1.0);
              m1 += dh[i];
              m2 += dh[i] * (*xhat)[r * c + i];
            }
            m1 /= static_cast<double>(c);
            m2 /= static_cast<double>(c);
            for (std::size_t i = 0; i < c; ++i)
              gx[r * c + i] += (*inv_std)[r] * (dh[i] - m1 - (*xhat)[r * c + i] * m2);
          }
        }
      },
      "layer_norm");
}

}  // namespace vda::ad
