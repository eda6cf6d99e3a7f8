// Copyright 2026 The lasr Authors
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

#include <vector>

#include "lasr/array.hpp"
#include "lasr/rng.hpp"

namespace lasr::ad {

using NodeId = int;

enum class Op {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kScale,
  kMatmul,
  kAddRow,
  kTanh,
  kSigmoid,
  kSoftmaxRows,
  kLogSoftmaxRows,
  kConcatRows,
  kConcatCols,
  kSliceRows,
  kSliceCols,
  kReshape,
  kTranspose,
  kConv1d,
  kLayerNorm,
  kDropout,
  kSumAll,
  kCustomScalar,
};

// Reverse-mode tape. Nodes are appended in evaluation order, so inputs always
// reference strictly earlier ids and the reverse sweep is already topological.
// Single-writer; use one Tape per forward pass.
class Tape {
 public:
  NodeId leaf(Array v);
  // Alias for leaf; marks values that are data rather than parameters.
  NodeId constant(Array v) { return leaf(std::move(v)); }

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double s);
  NodeId matmul(NodeId a, NodeId b);
  // Adds a 1xN row vector to every row of an MxN matrix.
  NodeId add_row(NodeId m, NodeId row);
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId softmax_rows(NodeId a);
  NodeId log_softmax_rows(NodeId a);
  NodeId concat_rows(const std::vector<NodeId>& parts);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId slice_rows(NodeId a, int r0, int r1);
  NodeId slice_cols(NodeId a, int c0, int c1);
  NodeId reshape(NodeId a, int r, int c);
  NodeId transpose(NodeId a);
  // Correlates a 1xU signal with C filters of odd width W (same padding,
  // zero-filled borders); returns CxU.
  NodeId conv1d_same(NodeId signal, NodeId filters);
  // Normalizes each row to zero mean / unit variance, then applies the
  // 1xN gain and bias rows.
  NodeId layer_norm(NodeId x, NodeId gain, NodeId bias, double eps = 1e-5);
  // Inverted dropout: keeps each entry with probability keep_prob and scales
  // survivors by 1/keep_prob; the mask comes from the explicit RNG stream.
  NodeId dropout(NodeId x, double keep_prob, util::Rng& rng);
  NodeId sum_all(NodeId a);
  NodeId mean_all(NodeId a);

  // Scalar node with a precomputed value and d(value)/d(input) arrays, for
  // losses whose gradient is produced analytically during the forward pass.
  NodeId custom_scalar(const std::vector<NodeId>& inputs, double value,
                       std::vector<Array> input_grads, const char* what);

  // Accumulates gradients for every node reachable from `loss` (must be 1x1).
  // Calling backward a second time without reset_backward is an error.
  void backward(NodeId loss);
  void reset_backward();

  const Array& value(NodeId id) const { return node(id).value; }
  const Array& grad(NodeId id) const { return node(id).grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::vector<NodeId> inputs;
    Array value;
    Array grad;
    // Per-op extras.
    double scalar = 0.0;       // kScale factor, kLayerNorm eps
    int a = 0, b = 0;          // slice bounds / reshape dims
    Array aux;                 // dropout mask, layer-norm x_hat, ...
    Array aux2;                // layer-norm inv_std column
    std::vector<Array> extra;  // custom-scalar input gradients
  };

  const Node& node(NodeId id) const;
  Node& node(NodeId id);
  NodeId push(Node n, const char* what);
  void check_finite(const Array& a, const char* what) const;

  std::vector<Node> nodes_;
  bool backward_run_ = false;
};

}  // namespace lasr::ad
