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

#include "lasr/tape.hpp"

#include <cmath>

#include "lasr/error.hpp"

namespace lasr::ad {

namespace {

void require_same_shape(const Array& x, const Array& y, const char* what) {
  check(x.same_shape(y), what, ": shape mismatch ", x.shape_str(), " vs ",
        y.shape_str());
}

}  // namespace

const Tape::Node& Tape::node(NodeId id) const {
  check(id >= 0 && id < static_cast<int>(nodes_.size()), "Tape: bad node id ",
        id);
  return nodes_[static_cast<std::size_t>(id)];
}

Tape::Node& Tape::node(NodeId id) {
  check(id >= 0 && id < static_cast<int>(nodes_.size()), "Tape: bad node id ",
        id);
  return nodes_[static_cast<std::size_t>(id)];
}

void Tape::check_finite(const Array& a, const char* what) const {
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (!std::isfinite(a.data[i])) {
      fail(what, ": non-finite value at flat index ", i, " (shape ",
           a.shape_str(), ")");
    }
  }
}

NodeId Tape::push(Node n, const char* what) {
  check_finite(n.value, what);
  n.grad = Array::zeros(n.value.rows, n.value.cols);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::leaf(Array v) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(v);
  return push(std::move(n), "leaf");
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Array& x = value(a);
  const Array& y = value(b);
  require_same_shape(x, y, "add");
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a, b};
  n.value = x;
  for (std::size_t i = 0; i < n.value.data.size(); ++i)
    n.value.data[i] += y.data[i];
  return push(std::move(n), "add");
}

NodeId Tape::sub(NodeId a, NodeId b) {
  const Array& x = value(a);
  const Array& y = value(b);
  require_same_shape(x, y, "sub");
  Node n;
  n.op = Op::kSub;
  n.inputs = {a, b};
  n.value = x;
  for (std::size_t i = 0; i < n.value.data.size(); ++i)
    n.value.data[i] -= y.data[i];
  return push(std::move(n), "sub");
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const Array& x = value(a);
  const Array& y = value(b);
  require_same_shape(x, y, "mul");
  Node n;
  n.op = Op::kMul;
  n.inputs = {a, b};
  n.value = x;
  for (std::size_t i = 0; i < n.value.data.size(); ++i)
    n.value.data[i] *= y.data[i];
  return push(std::move(n), "mul");
}

NodeId Tape::scale(NodeId a, double s) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {a};
  n.scalar = s;
  n.value = value(a);
  for (auto& v : n.value.data) v *= s;
  return push(std::move(n), "scale");
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  const Array& x = value(a);
  const Array& y = value(b);
  check(x.cols == y.rows, "matmul: inner dimensions disagree, ", x.shape_str(),
        " @ ", y.shape_str());
  Node n;
  n.op = Op::kMatmul;
  n.inputs = {a, b};
  n.value = Array::zeros(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const double xv = x.at(i, k);
      if (xv == 0.0) continue;
      const double* yr = &y.data[static_cast<std::size_t>(k) * y.cols];
      double* out = &n.value.data[static_cast<std::size_t>(i) * y.cols];
      for (int j = 0; j < y.cols; ++j) out[j] += xv * yr[j];
    }
  }
  return push(std::move(n), "matmul");
}

NodeId Tape::add_row(NodeId m, NodeId row) {
  const Array& x = value(m);
  const Array& r = value(row);
  check(r.rows == 1 && r.cols == x.cols, "add_row: matrix ", x.shape_str(),
        " and row ", r.shape_str(), " do not broadcast");
  Node n;
  n.op = Op::kAddRow;
  n.inputs = {m, row};
  n.value = x;
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) n.value.at(i, j) += r.data[j];
  return push(std::move(n), "add_row");
}

NodeId Tape::tanh(NodeId a) {
  Node n;
  n.op = Op::kTanh;
  n.inputs = {a};
  n.value = value(a);
  for (auto& v : n.value.data) v = std::tanh(v);
  return push(std::move(n), "tanh");
}

NodeId Tape::sigmoid(NodeId a) {
  Node n;
  n.op = Op::kSigmoid;
  n.inputs = {a};
  n.value = value(a);
  for (auto& v : n.value.data) {
    v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                 : std::exp(v) / (1.0 + std::exp(v));
  }
  return push(std::move(n), "sigmoid");
}

NodeId Tape::softmax_rows(NodeId a) {
  Node n;
  n.op = Op::kSoftmaxRows;
  n.inputs = {a};
  n.value = value(a);
  for (int i = 0; i < n.value.rows; ++i) {
    double* row = &n.value.data[static_cast<std::size_t>(i) * n.value.cols];
    double mx = row[0];
    for (int j = 1; j < n.value.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < n.value.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (int j = 0; j < n.value.cols; ++j) row[j] /= sum;
  }
  return push(std::move(n), "softmax_rows");
}

NodeId Tape::log_softmax_rows(NodeId a) {
  Node n;
  n.op = Op::kLogSoftmaxRows;
  n.inputs = {a};
  n.value = value(a);
  for (int i = 0; i < n.value.rows; ++i) {
    double* row = &n.value.data[static_cast<std::size_t>(i) * n.value.cols];
    double mx = row[0];
    for (int j = 1; j < n.value.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < n.value.cols; ++j) sum += std::exp(row[j] - mx);
    const double lse = mx + std::log(sum);
    for (int j = 0; j < n.value.cols; ++j) row[j] -= lse;
  }
  return push(std::move(n), "log_softmax_rows");
}

NodeId Tape::concat_rows(const std::vector<NodeId>& parts) {
  check(!parts.empty(), "concat_rows: empty part list");
  const int cols = value(parts[0]).cols;
  int rows = 0;
  for (NodeId p : parts) {
    check(value(p).cols == cols, "concat_rows: column mismatch ",
          value(p).shape_str(), " vs expected cols ", cols);
    rows += value(p).rows;
  }
  Node n;
  n.op = Op::kConcatRows;
  n.inputs = parts;
  n.value = Array::zeros(rows, cols);
  std::size_t off = 0;
  for (NodeId p : parts) {
    const Array& x = value(p);
    std::copy(x.data.begin(), x.data.end(), n.value.data.begin() + off);
    off += x.data.size();
  }
  return push(std::move(n), "concat_rows");
}

NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
  check(!parts.empty(), "concat_cols: empty part list");
  const int rows = value(parts[0]).rows;
  int cols = 0;
  for (NodeId p : parts) {
    check(value(p).rows == rows, "concat_cols: row mismatch ",
          value(p).shape_str(), " vs expected rows ", rows);
    cols += value(p).cols;
  }
  Node n;
  n.op = Op::kConcatCols;
  n.inputs = parts;
  n.value = Array::zeros(rows, cols);
  int coff = 0;
  for (NodeId p : parts) {
    const Array& x = value(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < x.cols; ++j) n.value.at(i, coff + j) = x.at(i, j);
    coff += x.cols;
  }
  return push(std::move(n), "concat_cols");
}

NodeId Tape::slice_rows(NodeId a, int r0, int r1) {
  const Array& x = value(a);
  check(0 <= r0 && r0 < r1 && r1 <= x.rows, "slice_rows: range [", r0, ", ",
        r1, ") out of bounds for ", x.shape_str());
  Node n;
  n.op = Op::kSliceRows;
  n.inputs = {a};
  n.a = r0;
  n.b = r1;
  n.value = Array::zeros(r1 - r0, x.cols);
  std::copy(x.data.begin() + static_cast<std::size_t>(r0) * x.cols,
            x.data.begin() + static_cast<std::size_t>(r1) * x.cols,
            n.value.data.begin());
  return push(std::move(n), "slice_rows");
}

NodeId Tape::slice_cols(NodeId a, int c0, int c1) {
  const Array& x = value(a);
  check(0 <= c0 && c0 < c1 && c1 <= x.cols, "slice_cols: range [", c0, ", ",
        c1, ") out of bounds for ", x.shape_str());
  Node n;
  n.op = Op::kSliceCols;
  n.inputs = {a};
  n.a = c0;
  n.b = c1;
  n.value = Array::zeros(x.rows, c1 - c0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = c0; j < c1; ++j) n.value.at(i, j - c0) = x.at(i, j);
  return push(std::move(n), "slice_cols");
}

NodeId Tape::reshape(NodeId a, int r, int c) {
  const Array& x = value(a);
  check(static_cast<std::int64_t>(r) * c == x.size(), "reshape: ",
        x.shape_str(), " cannot become ", r, "x", c);
  Node n;
  n.op = Op::kReshape;
  n.inputs = {a};
  n.value = Array(r, c, x.data);
  return push(std::move(n), "reshape");
}

NodeId Tape::transpose(NodeId a) {
  const Array& x = value(a);
  Node n;
  n.op = Op::kTranspose;
  n.inputs = {a};
  n.value = Array::zeros(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) n.value.at(j, i) = x.at(i, j);
  return push(std::move(n), "transpose");
}

NodeId Tape::conv1d_same(NodeId signal, NodeId filters) {
  const Array& x = value(signal);
  const Array& f = value(filters);
  check(x.rows == 1, "conv1d_same: signal must be 1xU, got ", x.shape_str());
  check(f.cols % 2 == 1, "conv1d_same: filter width must be odd, got ",
        f.shape_str());
  const int u_len = x.cols;
  const int width = f.cols;
  const int half = width / 2;
  Node n;
  n.op = Op::kConv1d;
  n.inputs = {signal, filters};
  n.value = Array::zeros(f.rows, u_len);
  for (int c = 0; c < f.rows; ++c) {
    for (int u = 0; u < u_len; ++u) {
      double acc = 0.0;
      for (int k = 0; k < width; ++k) {
        const int j = u + k - half;
        if (j < 0 || j >= u_len) continue;
        acc += f.at(c, k) * x.data[static_cast<std::size_t>(j)];
      }
      n.value.at(c, u) = acc;
    }
  }
  return push(std::move(n), "conv1d_same");
}

NodeId Tape::layer_norm(NodeId x, NodeId gain, NodeId bias, double eps) {
  const Array& v = value(x);
  const Array& g = value(gain);
  const Array& b = value(bias);
  check(g.rows == 1 && g.cols == v.cols && b.rows == 1 && b.cols == v.cols,
        "layer_norm: gain ", g.shape_str(), " / bias ", b.shape_str(),
        " do not match input ", v.shape_str());
  Node n;
  n.op = Op::kLayerNorm;
  n.inputs = {x, gain, bias};
  n.scalar = eps;
  n.value = Array::zeros(v.rows, v.cols);
  n.aux = Array::zeros(v.rows, v.cols);   // normalized rows
  n.aux2 = Array::zeros(v.rows, 1);       // 1/std per row
  for (int i = 0; i < v.rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < v.cols; ++j) mean += v.at(i, j);
    mean /= v.cols;
    double var = 0.0;
    for (int j = 0; j < v.cols; ++j) {
      const double d = v.at(i, j) - mean;
      var += d * d;
    }
    var /= v.cols;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    n.aux2.at(i, 0) = inv_std;
    for (int j = 0; j < v.cols; ++j) {
      const double xh = (v.at(i, j) - mean) * inv_std;
      n.aux.at(i, j) = xh;
      n.value.at(i, j) = xh * g.data[j] + b.data[j];
    }
  }
  return push(std::move(n), "layer_norm");
}

NodeId Tape::dropout(NodeId x, double keep_prob, util::Rng& rng) {
  check(keep_prob > 0.0 && keep_prob <= 1.0, "dropout: keep_prob ", keep_prob,
        " outside (0, 1]");
  const Array& v = value(x);
  Node n;
  n.op = Op::kDropout;
  n.inputs = {x};
  n.aux = Array::zeros(v.rows, v.cols);
  n.value = v;
  const double inv_keep = 1.0 / keep_prob;
  for (std::size_t i = 0; i < n.value.data.size(); ++i) {
    const double m = (keep_prob >= 1.0 || rng.uniform() < keep_prob)
                         ? inv_keep
                         : 0.0;
    n.aux.data[i] = m;
    n.value.data[i] *= m;
  }
  return push(std::move(n), "dropout");
}

NodeId Tape::sum_all(NodeId a) {
  Node n;
  n.op = Op::kSumAll;
  n.inputs = {a};
  double s = 0.0;
  for (double v : value(a).data) s += v;
  n.value = Array::scalar(s);
  return push(std::move(n), "sum_all");
}

NodeId Tape::mean_all(NodeId a) {
  const auto count = value(a).size();
  check(count > 0, "mean_all: empty input");
  return scale(sum_all(a), 1.0 / static_cast<double>(count));
}

NodeId Tape::custom_scalar(const std::vector<NodeId>& inputs, double val,
                           std::vector<Array> input_grads, const char* what) {
  check(inputs.size() == input_grads.size(),
        "custom_scalar: ", inputs.size(), " inputs but ", input_grads.size(),
        " gradient arrays");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    require_same_shape(value(inputs[i]), input_grads[i], what);
    check_finite(input_grads[i], what);
  }
  Node n;
  n.op = Op::kCustomScalar;
  n.inputs = inputs;
  n.value = Array::scalar(val);
  n.extra = std::move(input_grads);
  return push(std::move(n), what);
}

void Tape::reset_backward() {
  for (auto& n : nodes_) {
    std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  }
  backward_run_ = false;
}

void Tape::backward(NodeId loss) {
  check(!backward_run_,
        "backward: gradients already populated; call reset_backward first");
  const Array& lv = value(loss);
  check(lv.rows == 1 && lv.cols == 1, "backward: loss node has shape ",
        lv.shape_str(), ", expected 1x1 scalar");
  backward_run_ = true;
  node(loss).grad.data[0] = 1.0;

  for (NodeId id = loss; id >= 0; --id) {
    Node& n = node(id);
    bool all_zero = true;
    for (double g : n.grad.data) {
      if (g != 0.0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) continue;
    const Array& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd: {
        Array& ga = node(n.inputs[0]).grad;
        Array& gb = node(n.inputs[1]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          ga.data[i] += g.data[i];
          gb.data[i] += g.data[i];
        }
        break;
      }
      case Op::kSub: {
        Array& ga = node(n.inputs[0]).grad;
        Array& gb = node(n.inputs[1]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          ga.data[i] += g.data[i];
          gb.data[i] -= g.data[i];
        }
        break;
      }
      case Op::kMul: {
        const Array& x = value(n.inputs[0]);
        const Array& y = value(n.inputs[1]);
        Array& ga = node(n.inputs[0]).grad;
        Array& gb = node(n.inputs[1]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          ga.data[i] += g.data[i] * y.data[i];
          gb.data[i] += g.data[i] * x.data[i];
        }
        break;
      }
      case Op::kScale: {
        Array& ga = node(n.inputs[0]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          ga.data[i] += g.data[i] * n.scalar;
        break;
      }
      case Op::kMatmul: {
        const Array& x = value(n.inputs[0]);
        const Array& y = value(n.inputs[1]);
        Array& gx = node(n.inputs[0]).grad;
        Array& gy = node(n.inputs[1]).grad;
        // gx += g @ y^T
        for (int i = 0; i < x.rows; ++i) {
          for (int k = 0; k < y.cols; ++k) {
            const double gv = g.at(i, k);
            if (gv == 0.0) continue;
            for (int j = 0; j < x.cols; ++j) gx.at(i, j) += gv * y.at(j, k);
          }
        }
        // gy += x^T @ g
        for (int i = 0; i < x.rows; ++i) {
          for (int j = 0; j < x.cols; ++j) {
            const double xv = x.at(i, j);
            if (xv == 0.0) continue;
            for (int k = 0; k < y.cols; ++k) gy.at(j, k) += xv * g.at(i, k);
          }
        }
        break;
      }
      case Op::kAddRow: {
        Array& gm = node(n.inputs[0]).grad;
        Array& gr = node(n.inputs[1]).grad;
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) {
            gm.at(i, j) += g.at(i, j);
            gr.data[static_cast<std::size_t>(j)] += g.at(i, j);
          }
        break;
      }
      case Op::kTanh: {
        Array& gx = node(n.inputs[0]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          const double y = n.value.data[i];
          gx.data[i] += g.data[i] * (1.0 - y * y);
        }
        break;
      }
      case Op::kSigmoid: {
        Array& gx = node(n.inputs[0]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          const double y = n.value.data[i];
          gx.data[i] += g.data[i] * y * (1.0 - y);
        }
        break;
      }
      case Op::kSoftmaxRows: {
        Array& gx = node(n.inputs[0]).grad;
        for (int i = 0; i < g.rows; ++i) {
          double dot = 0.0;
          for (int j = 0; j < g.cols; ++j) dot += g.at(i, j) * n.value.at(i, j);
          for (int j = 0; j < g.cols; ++j)
            gx.at(i, j) += n.value.at(i, j) * (g.at(i, j) - dot);
        }
        break;
      }
      case Op::kLogSoftmaxRows: {
        Array& gx = node(n.inputs[0]).grad;
        for (int i = 0; i < g.rows; ++i) {
          double rowsum = 0.0;
          for (int j = 0; j < g.cols; ++j) rowsum += g.at(i, j);
          for (int j = 0; j < g.cols; ++j)
            gx.at(i, j) += g.at(i, j) - std::exp(n.value.at(i, j)) * rowsum;
        }
        break;
      }
      case Op::kConcatRows: {
        std::size_t off = 0;
        for (NodeId p : n.inputs) {
          Array& gp = node(p).grad;
          for (std::size_t i = 0; i < gp.data.size(); ++i)
            gp.data[i] += g.data[off + i];
          off += gp.data.size();
        }
        break;
      }
      case Op::kConcatCols: {
        int coff = 0;
        for (NodeId p : n.inputs) {
          Array& gp = node(p).grad;
          for (int i = 0; i < gp.rows; ++i)
            for (int j = 0; j < gp.cols; ++j) gp.at(i, j) += g.at(i, coff + j);
          coff += gp.cols;
        }
        break;
      }
      case Op::kSliceRows: {
        Array& gx = node(n.inputs[0]).grad;
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) gx.at(n.a + i, j) += g.at(i, j);
        break;
      }
      case Op::kSliceCols: {
        Array& gx = node(n.inputs[0]).grad;
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) gx.at(i, n.a + j) += g.at(i, j);
        break;
      }
      case Op::kReshape: {
        Array& gx = node(n.inputs[0]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          gx.data[i] += g.data[i];
        break;
      }
      case Op::kTranspose: {
        Array& gx = node(n.inputs[0]).grad;
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) gx.at(j, i) += g.at(i, j);
        break;
      }
      case Op::kConv1d: {
        const Array& x = value(n.inputs[0]);
        const Array& f = value(n.inputs[1]);
        Array& gx = node(n.inputs[0]).grad;
        Array& gf = node(n.inputs[1]).grad;
        const int u_len = x.cols;
        const int half = f.cols / 2;
        for (int c = 0; c < f.rows; ++c) {
          for (int u = 0; u < u_len; ++u) {
            const double gv = g.at(c, u);
            if (gv == 0.0) continue;
            for (int k = 0; k < f.cols; ++k) {
              const int j = u + k - half;
              if (j < 0 || j >= u_len) continue;
              gx.data[static_cast<std::size_t>(j)] += gv * f.at(c, k);
              gf.at(c, k) += gv * x.data[static_cast<std::size_t>(j)];
            }
          }
        }
        break;
      }
      case Op::kLayerNorm: {
        const Array& gain = value(n.inputs[1]);
        Array& gx = node(n.inputs[0]).grad;
        Array& gg = node(n.inputs[1]).grad;
        Array& gb = node(n.inputs[2]).grad;
        const int cols = g.cols;
        for (int i = 0; i < g.rows; ++i) {
          double mean_dxh = 0.0;
          double mean_dxh_xh = 0.0;
          for (int j = 0; j < cols; ++j) {
            const double xh = n.aux.at(i, j);
            const double go = g.at(i, j);
            gg.data[static_cast<std::size_t>(j)] += go * xh;
            gb.data[static_cast<std::size_t>(j)] += go;
            const double dxh = go * gain.data[static_cast<std::size_t>(j)];
            mean_dxh += dxh;
            mean_dxh_xh += dxh * xh;
          }
          mean_dxh /= cols;
          mean_dxh_xh /= cols;
          const double inv_std = n.aux2.at(i, 0);
          for (int j = 0; j < cols; ++j) {
            const double xh = n.aux.at(i, j);
            const double dxh = g.at(i, j) * gain.data[static_cast<std::size_t>(j)];
            gx.at(i, j) += inv_std * (dxh - mean_dxh - xh * mean_dxh_xh);
          }
        }
        break;
      }
      case Op::kDropout: {
        Array& gx = node(n.inputs[0]).grad;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          gx.data[i] += g.data[i] * n.aux.data[i];
        break;
      }
      case Op::kSumAll: {
        Array& gx = node(n.inputs[0]).grad;
        const double gv = g.data[0];
        for (auto& v : gx.data) v += gv;
        break;
      }
      case Op::kCustomScalar: {
        const double gv = g.data[0];
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          Array& gx = node(n.inputs[i]).grad;
          const Array& d = n.extra[i];
          for (std::size_t k = 0; k < gx.data.size(); ++k)
            gx.data[k] += gv * d.data[k];
        }
        break;
      }
    }
  }
}

}  // namespace lasr::ad
