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

#include <functional>
#include <string>
#include <vector>

#include "lasr/tape.hpp"

namespace lasr::ad {

// Builds a scalar-loss graph on the given tape; receives the node ids of the
// leaves (created in the order of the value list passed to grad_check).
using GraphBuilder =
    std::function<NodeId(Tape&, const std::vector<NodeId>&)>;

struct LeafReport {
  int leaf = 0;
  double max_rel_err = 0.0;
  int worst_row = 0;
  int worst_col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  bool pass = false;
  double max_rel_err = 0.0;
  std::vector<LeafReport> leaves;
  std::string failure;  // non-empty when probing hit a non-finite value

  std::string summary() const;
};

// Compares the tape gradient of the built loss against central finite
// differences for every coordinate of every leaf.
GradCheckReport grad_check(const GraphBuilder& build,
                           const std::vector<Array>& leaves, double step,
                           double tol);

}  // namespace lasr::ad
