// Copyright 2026 the nolgat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nolgat/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "nolgat/errors.hpp"

namespace nolgat {

namespace {

using detail::shape_str;

Value new_node(Shape shape, OpKind op, std::vector<Value> parents) {
  auto n = std::make_shared<DiffNode>();
  n->shape = std::move(shape);
  std::size_t size = 1;
  for (std::size_t d : n->shape) size *= d;
  n->data.assign(size, 0.0);
  n->grad.assign(size, 0.0);
  n->op = op;
  n->parents = std::move(parents);
  for (const Value& p : n->parents) n->requires_grad |= p->requires_grad;
  return n;
}

void check_rank(const Value& x, OpKind kind) {
  if (x->shape.empty() || x->shape.size() > 2) {
    throw std::invalid_argument(detail::str(
        op_name(kind), ": rank-1 or rank-2 tensor required, got shape ",
        shape_str(x->shape)));
  }
}

void check_segments(std::span<const std::int32_t> seg, std::size_t rows,
                    OpKind kind) {
  if (seg.size() != rows) {
    throw std::invalid_argument(detail::str(
        op_name(kind), ": segment ids cover ", seg.size(), " rows, tensor has ",
        rows));
  }
  if (rows == 0) return;
  if (seg[0] != 0) {
    throw std::invalid_argument(
        detail::str(op_name(kind), ": segment ids must start at 0"));
  }
  for (std::size_t i = 1; i < seg.size(); ++i) {
    if (seg[i] < seg[i - 1] || seg[i] > seg[i - 1] + 1) {
      throw std::invalid_argument(detail::str(
          op_name(kind), ": segment ids must be nondecreasing without gaps"));
    }
  }
}

// Broadcast classification for binary elementwise ops.
enum class Bcast { kRow, kCol };

Bcast classify_bcast(const Value& big, const Value& small, OpKind kind) {
  if (small->shape.size() == 1 && small->shape[0] == big->cols()) {
    return Bcast::kRow;
  }
  if (small->shape.size() == 2 && small->shape[0] == 1 &&
      small->shape[1] == big->cols()) {
    return Bcast::kRow;
  }
  if (small->shape.size() == 2 && small->shape[1] == 1 &&
      small->shape[0] == big->rows()) {
    return Bcast::kCol;
  }
  throw std::invalid_argument(detail::str(
      op_name(kind), ": incompatible shapes ", shape_str(big->shape), " and ",
      shape_str(small->shape)));
}

}  // namespace

std::string detail::shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

void detail::softmax_inplace(std::span<double> row) {
  if (row.empty()) return;
  double mx = row[0];
  for (double v : row) mx = std::max(mx, v);
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : row) v /= sum;
}

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "elementwise-multiply";
    case OpKind::kConcatCols: return "concat-last-axis";
    case OpKind::kLeakyRelu: return "leaky-relu";
    case OpKind::kElu: return "elu";
    case OpKind::kExp: return "exponential";
    case OpKind::kLog: return "natural-log";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kRowSoftmax: return "row-softmax";
    case OpKind::kRowLogSoftmax: return "row-log-softmax";
    case OpKind::kSegmentSoftmax: return "segment-softmax";
    case OpKind::kSegmentSum: return "segment-sum";
    case OpKind::kGatherRows: return "gather-rows";
    case OpKind::kScalarMul: return "scalar-multiply";
    case OpKind::kClamp: return "clamp";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
  }
  return "unknown";
}

Value make_constant(Shape shape, std::vector<double> data) {
  return make_leaf(std::move(shape), std::move(data), false);
}

Value make_leaf(Shape shape, std::vector<double> data, bool requires_grad) {
  std::size_t size = 1;
  for (std::size_t d : shape) size *= d;
  if (size != data.size()) {
    throw std::invalid_argument(detail::str(
        "leaf: shape ", shape_str(shape), " wants ", size, " values, got ",
        data.size()));
  }
  auto n = std::make_shared<DiffNode>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->grad.assign(n->data.size(), 0.0);
  n->requires_grad = requires_grad;
  return n;
}

Value detach(const Value& x) { return make_constant(x->shape, x->data); }

Value matmul(const Value& a, const Value& b) {
  if (a->shape.size() != 2 || b->shape.size() != 2 ||
      a->shape[1] != b->shape[0]) {
    throw std::invalid_argument(detail::str(
        "matmul: incompatible shapes ", shape_str(a->shape), " and ",
        shape_str(b->shape)));
  }
  const std::size_t m = a->shape[0], k = a->shape[1], n = b->shape[1];
  Value out = new_node({m, n}, OpKind::kMatmul, {a, b});
  const double* pa = a->data.data();
  const double* pb = b->data.data();
  double* pc = out->data.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      const double av = pa[i * k + t];
      if (av == 0.0) continue;
      const double* brow = pb + t * n;
      double* crow = pc + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  if (out->requires_grad) {
    out->backward_fn = [m, k, n](DiffNode& self) {
      DiffNode& A = *self.parents[0];
      DiffNode& B = *self.parents[1];
      const double* g = self.grad.data();
      if (A.requires_grad) {
        // dA = dC * B^T
        double* da = A.grad.data();
        const double* pb = B.data.data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t t = 0; t < k; ++t) {
            double acc = 0.0;
            const double* grow = g + i * n;
            const double* brow = pb + t * n;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            da[i * k + t] += acc;
          }
        }
      }
      if (B.requires_grad) {
        // dB = A^T * dC
        double* db = B.grad.data();
        const double* pa = A.data.data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t t = 0; t < k; ++t) {
            const double av = pa[i * k + t];
            if (av == 0.0) continue;
            const double* grow = g + i * n;
            double* brow = db + t * n;
            for (std::size_t j = 0; j < n; ++j) brow[j] += av * grow[j];
          }
        }
      }
    };
  }
  return out;
}

namespace {

Value binary_elementwise(OpKind kind, const Value& a, const Value& b) {
  check_rank(a, kind);
  check_rank(b, kind);
  const bool add_op = kind == OpKind::kAdd;

  // Identical shapes: plain elementwise.
  if (a->shape == b->shape) {
    Value out = new_node(a->shape, kind, {a, b});
    for (std::size_t i = 0; i < out->numel(); ++i) {
      out->data[i] = add_op ? a->data[i] + b->data[i] : a->data[i] * b->data[i];
    }
    if (out->requires_grad) {
      out->backward_fn = [add_op](DiffNode& self) {
        DiffNode& A = *self.parents[0];
        DiffNode& B = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const double g = self.grad[i];
          if (add_op) {
            if (A.requires_grad) A.grad[i] += g;
            if (B.requires_grad) B.grad[i] += g;
          } else {
            if (A.requires_grad) A.grad[i] += g * B.data[i];
            if (B.requires_grad) B.grad[i] += g * A.data[i];
          }
        }
      };
    }
    return out;
  }

  // One side broadcasts over the other.
  const bool a_big = a->numel() >= b->numel();
  const Value& big = a_big ? a : b;
  const Value& small = a_big ? b : a;
  const Bcast bc = classify_bcast(big, small, kind);
  const std::size_t rows = big->rows(), cols = big->cols();

  Value out = new_node(big->shape, kind, {big, small});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double s = bc == Bcast::kRow ? small->data[c] : small->data[r];
      const double v = big->data[r * cols + c];
      out->data[r * cols + c] = add_op ? v + s : v * s;
    }
  }
  if (out->requires_grad) {
    out->backward_fn = [add_op, bc, rows, cols](DiffNode& self) {
      DiffNode& big_p = *self.parents[0];
      DiffNode& small_p = *self.parents[1];
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t i = r * cols + c;
          const std::size_t si = bc == Bcast::kRow ? c : r;
          const double g = self.grad[i];
          if (add_op) {
            if (big_p.requires_grad) big_p.grad[i] += g;
            if (small_p.requires_grad) small_p.grad[si] += g;
          } else {
            if (big_p.requires_grad) big_p.grad[i] += g * small_p.data[si];
            if (small_p.requires_grad) small_p.grad[si] += g * big_p.data[i];
          }
        }
      }
    };
  }
  return out;
}

template <typename Fwd, typename Dfn>
Value unary_elementwise(OpKind kind, const Value& x, Fwd fwd, Dfn dfn) {
  check_rank(x, kind);
  Value out = new_node(x->shape, kind, {x});
  for (std::size_t i = 0; i < out->numel(); ++i) out->data[i] = fwd(x->data[i]);
  if (out->requires_grad) {
    out->backward_fn = [dfn](DiffNode& self) {
      DiffNode& X = *self.parents[0];
      if (!X.requires_grad) return;
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        X.grad[i] += self.grad[i] * dfn(X.data[i], self.data[i]);
      }
    };
  }
  return out;
}

}  // namespace

Value add(const Value& a, const Value& b) {
  return binary_elementwise(OpKind::kAdd, a, b);
}

Value mul(const Value& a, const Value& b) {
  return binary_elementwise(OpKind::kMul, a, b);
}

Value concat_cols(std::span<const Value> xs) {
  if (xs.empty()) {
    throw std::invalid_argument("concat-last-axis: no inputs");
  }
  const std::size_t rows = xs[0]->rows();
  std::size_t total = 0;
  std::vector<Value> parents;
  parents.reserve(xs.size());
  for (const Value& x : xs) {
    if (x->shape.size() != 2 || x->shape[0] != rows) {
      throw std::invalid_argument(detail::str(
          "concat-last-axis: expected rank-2 with ", rows, " rows, got ",
          shape_str(x->shape)));
    }
    total += x->shape[1];
    parents.push_back(x);
  }
  Value out = new_node({rows, total}, OpKind::kConcatCols, std::move(parents));
  std::size_t col0 = 0;
  for (const Value& x : xs) {
    const std::size_t c = x->shape[1];
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(x->data.data() + r * c, c,
                  out->data.data() + r * total + col0);
    }
    col0 += c;
  }
  if (out->requires_grad) {
    out->backward_fn = [rows, total](DiffNode& self) {
      std::size_t col0 = 0;
      for (Value& p : self.parents) {
        const std::size_t c = p->shape[1];
        if (p->requires_grad) {
          for (std::size_t r = 0; r < rows; ++r) {
            const double* g = self.grad.data() + r * total + col0;
            double* dst = p->grad.data() + r * c;
            for (std::size_t j = 0; j < c; ++j) dst[j] += g[j];
          }
        }
        col0 += c;
      }
    };
  }
  return out;
}

Value leaky_relu(const Value& x, double slope) {
  return unary_elementwise(
      OpKind::kLeakyRelu, x,
      [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Value elu(const Value& x) {
  return unary_elementwise(
      OpKind::kElu, x,
      [](double v) { return v > 0.0 ? v : std::expm1(v); },
      [](double v, double y) { return v > 0.0 ? 1.0 : y + 1.0; });
}

Value exp_(const Value& x) {
  return unary_elementwise(
      OpKind::kExp, x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Value log_(const Value& x) {
  // Domain violations follow IEEE semantics; the core never clamps.
  return unary_elementwise(
      OpKind::kLog, x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Value sigmoid(const Value& x) {
  return unary_elementwise(
      OpKind::kSigmoid, x,
      [](double v) {
        return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                        : std::exp(v) / (1.0 + std::exp(v));
      },
      [](double, double y) { return y * (1.0 - y); });
}

namespace {

// Softmax across the columns of each row (the classifier / relaxation axis).
Value rowwise_softmax(OpKind kind, const Value& x) {
  check_rank(x, kind);
  const std::size_t rows = x->rows(), cols = x->cols();
  const bool log_form = kind == OpKind::kRowLogSoftmax;

  Value out = new_node(x->shape, kind, {x});
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x->data.data() + r * cols;
    double* yr = out->data.data() + r * cols;
    double mx = xr[0];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, xr[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) sum += std::exp(xr[c] - mx);
    if (log_form) {
      const double lse = mx + std::log(sum);
      for (std::size_t c = 0; c < cols; ++c) yr[c] = xr[c] - lse;
    } else {
      for (std::size_t c = 0; c < cols; ++c) yr[c] = std::exp(xr[c] - mx) / sum;
    }
  }
  if (out->requires_grad) {
    out->backward_fn = [rows, cols, log_form](DiffNode& self) {
      DiffNode& X = *self.parents[0];
      if (!X.requires_grad) return;
      for (std::size_t r = 0; r < rows; ++r) {
        const double* y = self.data.data() + r * cols;
        const double* dy = self.grad.data() + r * cols;
        double* dx = X.grad.data() + r * cols;
        if (log_form) {
          // dx_c = dy_c - softmax(x)_c * sum(dy)
          double gsum = 0.0;
          for (std::size_t c = 0; c < cols; ++c) gsum += dy[c];
          for (std::size_t c = 0; c < cols; ++c) {
            dx[c] += dy[c] - std::exp(y[c]) * gsum;
          }
        } else {
          // dx_c = (dy_c - <dy, y>) * y_c
          double dot = 0.0;
          for (std::size_t c = 0; c < cols; ++c) dot += dy[c] * y[c];
          for (std::size_t c = 0; c < cols; ++c) {
            dx[c] += (dy[c] - dot) * y[c];
          }
        }
      }
    };
  }
  return out;
}

}  // namespace

Value row_softmax(const Value& x) {
  return rowwise_softmax(OpKind::kRowSoftmax, x);
}

Value row_log_softmax(const Value& x) {
  return rowwise_softmax(OpKind::kRowLogSoftmax, x);
}

// Softmax across the rows of each contiguous segment, each column
// independently (the attention axis: rows are edges grouped by target).
Value segment_softmax(const Value& x, std::span<const std::int32_t> segments) {
  const OpKind kind = OpKind::kSegmentSoftmax;
  check_rank(x, kind);
  const std::size_t rows = x->rows(), cols = x->cols();
  check_segments(segments, rows, kind);
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t start = 0;
  for (std::size_t r = 1; r <= rows; ++r) {
    if (r == rows || segments[r] != segments[start]) {
      runs.emplace_back(start, r);
      start = r;
    }
  }

  Value out = new_node(x->shape, kind, {x});
  for (auto [lo, hi] : runs) {
    for (std::size_t c = 0; c < cols; ++c) {
      double mx = x->data[lo * cols + c];
      for (std::size_t r = lo; r < hi; ++r) {
        mx = std::max(mx, x->data[r * cols + c]);
      }
      double sum = 0.0;
      for (std::size_t r = lo; r < hi; ++r) {
        sum += std::exp(x->data[r * cols + c] - mx);
      }
      for (std::size_t r = lo; r < hi; ++r) {
        out->data[r * cols + c] = std::exp(x->data[r * cols + c] - mx) / sum;
      }
    }
  }
  if (out->requires_grad) {
    out->backward_fn = [runs, cols](DiffNode& self) {
      DiffNode& X = *self.parents[0];
      if (!X.requires_grad) return;
      for (auto [lo, hi] : runs) {
        for (std::size_t c = 0; c < cols; ++c) {
          double dot = 0.0;
          for (std::size_t r = lo; r < hi; ++r) {
            const std::size_t i = r * cols + c;
            dot += self.grad[i] * self.data[i];
          }
          for (std::size_t r = lo; r < hi; ++r) {
            const std::size_t i = r * cols + c;
            X.grad[i] += (self.grad[i] - dot) * self.data[i];
          }
        }
      }
    };
  }
  return out;
}

Value segment_sum(const Value& x, std::span<const std::int32_t> segments) {
  check_rank(x, OpKind::kSegmentSum);
  const std::size_t rows = x->rows(), cols = x->cols();
  check_segments(segments, rows, OpKind::kSegmentSum);
  const std::size_t n_seg = rows == 0 ? 0 : segments[rows - 1] + 1;
  std::vector<std::int32_t> seg(segments.begin(), segments.end());

  Shape out_shape =
      x->shape.size() == 2 ? Shape{n_seg, cols} : Shape{n_seg};
  Value out = new_node(std::move(out_shape), OpKind::kSegmentSum, {x});
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t s = static_cast<std::size_t>(seg[r]);
    for (std::size_t c = 0; c < cols; ++c) {
      out->data[s * cols + c] += x->data[r * cols + c];
    }
  }
  if (out->requires_grad) {
    out->backward_fn = [seg = std::move(seg), rows, cols](DiffNode& self) {
      DiffNode& X = *self.parents[0];
      if (!X.requires_grad) return;
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t s = static_cast<std::size_t>(seg[r]);
        for (std::size_t c = 0; c < cols; ++c) {
          X.grad[r * cols + c] += self.grad[s * cols + c];
        }
      }
    };
  }
  return out;
}

Value gather_rows(const Value& x, std::span<const std::int32_t> indices) {
  check_rank(x, OpKind::kGatherRows);
  const std::size_t rows = x->rows(), cols = x->cols();
  for (std::int32_t i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= rows) {
      throw std::invalid_argument(detail::str(
          "gather-rows: index ", i, " out of range for ", rows, " rows"));
    }
  }
  std::vector<std::int32_t> idx(indices.begin(), indices.end());
  Shape out_shape = x->shape.size() == 2 ? Shape{idx.size(), cols}
                                         : Shape{idx.size()};
  Value out = new_node(std::move(out_shape), OpKind::kGatherRows, {x});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(x->data.data() + static_cast<std::size_t>(idx[r]) * cols, cols,
                out->data.data() + r * cols);
  }
  if (out->requires_grad) {
    out->backward_fn = [idx = std::move(idx), cols](DiffNode& self) {
      DiffNode& X = *self.parents[0];
      if (!X.requires_grad) return;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        double* dst = X.grad.data() + static_cast<std::size_t>(idx[r]) * cols;
        const double* g = self.grad.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dst[c] += g[c];
      }
    };
  }
  return out;
}

Value scalar_mul(const Value& x, double c) {
  return unary_elementwise(
      OpKind::kScalarMul, x, [c](double v) { return c * v; },
      [c](double, double) { return c; });
}

Value clamp(const Value& x, double lo, double hi) {
  if (!(lo < hi)) {
    throw std::invalid_argument(
        detail::str("clamp: invalid bounds [", lo, ", ", hi, "]"));
  }
  return unary_elementwise(
      OpKind::kClamp, x,
      [lo, hi](double v) { return std::min(hi, std::max(lo, v)); },
      [lo, hi](double v, double) { return (v > lo && v < hi) ? 1.0 : 0.0; });
}

namespace {

Value reduce_all(OpKind kind, const Value& x) {
  check_rank(x, kind);
  Value out = new_node({1}, kind, {x});
  double acc = 0.0;
  for (double v : x->data) acc += v;
  const double denom = kind == OpKind::kMean ? static_cast<double>(x->numel())
                                             : 1.0;
  out->data[0] = acc / denom;
  if (out->requires_grad) {
    out->backward_fn = [denom](DiffNode& self) {
      DiffNode& X = *self.parents[0];
      if (!X.requires_grad) return;
      const double g = self.grad[0] / denom;
      for (double& d : X.grad) d += g;
    };
  }
  return out;
}

}  // namespace

Value mean_all(const Value& x) { return reduce_all(OpKind::kMean, x); }
Value sum_all(const Value& x) { return reduce_all(OpKind::kSum, x); }

Value apply(OpKind kind, std::span<const Value> inputs, const OpAttrs& attrs) {
  auto want = [&](std::size_t n) {
    if (inputs.size() != n) {
      throw std::invalid_argument(detail::str(
          op_name(kind), ": expected ", n, " inputs, got ", inputs.size()));
    }
  };
  switch (kind) {
    case OpKind::kMatmul: want(2); return matmul(inputs[0], inputs[1]);
    case OpKind::kAdd: want(2); return add(inputs[0], inputs[1]);
    case OpKind::kMul: want(2); return mul(inputs[0], inputs[1]);
    case OpKind::kConcatCols: return concat_cols(inputs);
    case OpKind::kLeakyRelu: want(1); return leaky_relu(inputs[0], attrs.slope);
    case OpKind::kElu: want(1); return elu(inputs[0]);
    case OpKind::kExp: want(1); return exp_(inputs[0]);
    case OpKind::kLog: want(1); return log_(inputs[0]);
    case OpKind::kSigmoid: want(1); return sigmoid(inputs[0]);
    case OpKind::kRowSoftmax: want(1); return row_softmax(inputs[0]);
    case OpKind::kRowLogSoftmax: want(1); return row_log_softmax(inputs[0]);
    case OpKind::kSegmentSoftmax:
      want(1);
      return segment_softmax(inputs[0], attrs.segments);
    case OpKind::kSegmentSum:
      want(1);
      return segment_sum(inputs[0], attrs.segments);
    case OpKind::kGatherRows:
      want(1);
      return gather_rows(inputs[0], attrs.indices);
    case OpKind::kScalarMul: want(1); return scalar_mul(inputs[0], attrs.scalar);
    case OpKind::kClamp: want(1); return clamp(inputs[0], attrs.lo, attrs.hi);
    case OpKind::kMean: want(1); return mean_all(inputs[0]);
    case OpKind::kSum: want(1); return sum_all(inputs[0]);
    case OpKind::kLeaf: break;
  }
  throw std::invalid_argument("apply: leaf is not an operation");
}

void backward(const Value& root) {
  if (root->numel() != 1) {
    throw std::invalid_argument(detail::str(
        "backward: root must be scalar, got shape ",
        detail::shape_str(root->shape)));
  }
  // Iterative post-order DFS; each node enters the order exactly once.
  std::vector<DiffNode*> order;
  std::unordered_set<DiffNode*> visited;
  std::vector<std::pair<DiffNode*, std::size_t>> stack;
  if (root->requires_grad) {
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
  }
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      DiffNode* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }
}

}  // namespace nolgat
