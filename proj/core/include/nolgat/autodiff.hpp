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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nolgat {

// A minimal reverse-mode automatic differentiation core over dense
// double-precision tensors of rank 1 or 2 (row-major). The computation graph
// is built dynamically: every operation allocates a fresh node that records
// its inputs and a closure computing the exact vector-Jacobian product.
//
// Everything trains in 64-bit reals so that central finite differences are a
// meaningful oracle for the analytic gradients.

using Shape = std::vector<std::size_t>;

enum class OpKind {
  kLeaf,
  kMatmul,
  kAdd,
  kMul,
  kConcatCols,
  kLeakyRelu,
  kElu,
  kExp,
  kLog,
  kSigmoid,
  kRowSoftmax,
  kRowLogSoftmax,
  kSegmentSoftmax,
  kSegmentSum,
  kGatherRows,
  kScalarMul,
  kClamp,
  kMean,
  kSum,
};

/// Human-readable operation tag, used in diagnostics and test drivers.
std::string_view op_name(OpKind kind);

struct DiffNode;
using Value = std::shared_ptr<DiffNode>;

/// One node of the dynamically built computation graph: a dense tensor, its
/// accumulated gradient (always the same shape), and the recipe to push
/// gradients to its parents.
struct DiffNode {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // same shape as data, accumulated by backward()
  OpKind op = OpKind::kLeaf;
  bool requires_grad = false;
  std::vector<Value> parents;
  std::function<void(DiffNode&)> backward_fn;

  std::size_t numel() const { return data.size(); }
  // Canonical (rows, cols) view: rank-1 [m] is m rows of one column.
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
};

/// Attributes for the operations that need them.
struct OpAttrs {
  double scalar = 1.0;               // scalar-multiply factor
  double slope = 0.2;                // leaky-relu negative slope
  double lo = 0.0;                   // clamp lower bound
  double hi = 1.0;                   // clamp upper bound
  std::vector<std::int32_t> segments;  // segment-softmax / segment-sum
  std::vector<std::int32_t> indices;   // gather-rows
};

/// A leaf with no gradient tracking.
Value make_constant(Shape shape, std::vector<double> data);
/// A leaf that participates in gradients (parameters).
Value make_leaf(Shape shape, std::vector<double> data, bool requires_grad);
/// Constant copy of x's current data; gradients do not flow through it.
Value detach(const Value& x);

/// Generic entry point: applies `kind` to `inputs`, validating shapes and
/// recording the backward closure. Shape mismatches throw with a message
/// naming the kind and offending shapes.
Value apply(OpKind kind, std::span<const Value> inputs, const OpAttrs& attrs = {});

// Typed conveniences over apply(); these are what the model code uses.
Value matmul(const Value& a, const Value& b);
// add/mul accept identical shapes, a row vector [n] or [1,n] against [m,n],
// or a column [m,1] against [m,n]; the broadcast operand may be on either side.
Value add(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value concat_cols(std::span<const Value> xs);
Value leaky_relu(const Value& x, double slope = 0.2);
Value elu(const Value& x);
Value exp_(const Value& x);
Value log_(const Value& x);
Value sigmoid(const Value& x);
Value row_softmax(const Value& x);
Value row_log_softmax(const Value& x);
Value segment_softmax(const Value& x, std::span<const std::int32_t> segments);
Value segment_sum(const Value& x, std::span<const std::int32_t> segments);
Value gather_rows(const Value& x, std::span<const std::int32_t> indices);
Value scalar_mul(const Value& x, double c);
Value clamp(const Value& x, double lo, double hi);
Value mean_all(const Value& x);
Value sum_all(const Value& x);

/// Reverse-mode sweep from a scalar root. Visits every reachable node exactly
/// once in reverse topological order and accumulates exact vector-Jacobian
/// products into grad. The root must have exactly one element.
void backward(const Value& root);

namespace detail {
/// Numerically stable in-place softmax of one row; shared by the tensor ops
/// and the sampler so both produce identical values.
void softmax_inplace(std::span<double> row);
std::string shape_str(const Shape& s);
}  // namespace detail

}  // namespace nolgat
