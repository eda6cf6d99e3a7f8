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

#include <string>
#include <vector>

namespace lasr::diag {

struct ComponentCheck {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = false;
};

// Finite-difference verification of every trainable component on tiny
// shapes: the full network under all three attention kinds, the smoothed
// cross entropy, the alignment-marginal loss, the expected-error loss and
// the joint objective.
std::vector<ComponentCheck> gradient_suite(double step = 1e-5,
                                           double tol = 1e-4);

bool all_pass(const std::vector<ComponentCheck>& checks);

}  // namespace lasr::diag
