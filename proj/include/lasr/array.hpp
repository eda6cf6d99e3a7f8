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

#include <cstdint>
#include <string>
#include <vector>

#include "lasr/error.hpp"
#include "lasr/rng.hpp"

namespace lasr::ad {

// Dense row-major matrix of doubles. Row vectors are 1xN, scalars 1x1.
struct Array {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Array() = default;
  Array(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
    check(r >= 0 && c >= 0, "Array: negative shape ", r, "x", c);
  }
  Array(int r, int c, std::vector<double> d)
      : rows(r), cols(c), data(std::move(d)) {
    check(static_cast<std::int64_t>(data.size()) ==
              static_cast<std::int64_t>(r) * c,
          "Array: data length ", data.size(), " does not match shape ", r, "x",
          c);
  }

  static Array zeros(int r, int c) { return Array(r, c); }

  static Array full(int r, int c, double v) {
    Array a(r, c);
    for (auto& x : a.data) x = v;
    return a;
  }

  static Array row(std::vector<double> d) {
    const int n = static_cast<int>(d.size());
    return Array(1, n, std::move(d));
  }

  static Array scalar(double v) { return Array(1, 1, {v}); }

  static Array identity(int n) {
    Array a(n, n);
    for (int i = 0; i < n; ++i) a.at(i, i) = 1.0;
    return a;
  }

  static Array uniform(int r, int c, double lo, double hi, util::Rng& rng) {
    Array a(r, c);
    for (auto& x : a.data) x = rng.uniform(lo, hi);
    return a;
  }

  double& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  std::int64_t size() const {
    return static_cast<std::int64_t>(rows) * cols;
  }

  bool same_shape(const Array& o) const {
    return rows == o.rows && cols == o.cols;
  }

  std::string shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }

  double item() const {
    check(rows == 1 && cols == 1, "Array::item: shape ", shape_str(),
          " is not scalar");
    return data[0];
  }
};

}  // namespace lasr::ad
