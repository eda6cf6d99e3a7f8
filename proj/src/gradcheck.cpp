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

#include "lasr/gradcheck.hpp"

#include <cmath>

#include "lasr/error.hpp"

namespace lasr::ad {

namespace {

double eval_loss(const GraphBuilder& build, const std::vector<Array>& leaves) {
  Tape tape;
  std::vector<NodeId> ids;
  ids.reserve(leaves.size());
  for (const Array& a : leaves) ids.push_back(tape.leaf(a));
  const NodeId loss = build(tape, ids);
  return tape.value(loss).item();
}

}  // namespace

std::string GradCheckReport::summary() const {
  std::string s = pass ? "pass" : "FAIL";
  s += ", max rel err " + std::to_string(max_rel_err);
  if (!failure.empty()) s += ", " + failure;
  return s;
}

GradCheckReport grad_check(const GraphBuilder& build,
                           const std::vector<Array>& leaves, double step,
                           double tol) {
  check(step > 0.0, "grad_check: step must be positive, got ", step);
  GradCheckReport report;

  // Analytic gradients from one tape pass.
  Tape tape;
  std::vector<NodeId> ids;
  for (const Array& a : leaves) ids.push_back(tape.leaf(a));
  const NodeId loss = build(tape, ids);
  tape.backward(loss);

  std::vector<Array> probe = leaves;
  report.pass = true;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    LeafReport lr;
    lr.leaf = static_cast<int>(li);
    const Array& g = tape.grad(ids[li]);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) {
        const double saved = probe[li].at(r, c);
        double plus = 0.0, minus = 0.0;
        try {
          probe[li].at(r, c) = saved + step;
          plus = eval_loss(build, probe);
          probe[li].at(r, c) = saved - step;
          minus = eval_loss(build, probe);
        } catch (const Error& e) {
          probe[li].at(r, c) = saved;
          report.pass = false;
          report.failure = detail::cat("non-finite probe at leaf ", li,
                                       " coordinate (", r, ",", c,
                                       "): ", e.what());
          report.leaves.push_back(lr);
          return report;
        }
        probe[li].at(r, c) = saved;
        const double numeric = (plus - minus) / (2.0 * step);
        const double analytic = g.at(r, c);
        if (!std::isfinite(numeric)) {
          report.pass = false;
          report.failure = detail::cat("non-finite difference at leaf ", li,
                                       " coordinate (", r, ",", c, ")");
          report.leaves.push_back(lr);
          return report;
        }
        const double denom =
            std::max({std::fabs(analytic), std::fabs(numeric), 1.0});
        const double rel = std::fabs(analytic - numeric) / denom;
        if (rel > lr.max_rel_err) {
          lr.max_rel_err = rel;
          lr.worst_row = r;
          lr.worst_col = c;
          lr.analytic = analytic;
          lr.numeric = numeric;
        }
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, lr.max_rel_err);
    report.leaves.push_back(lr);
  }
  report.pass = report.max_rel_err < tol;
  return report;
}

}  // namespace lasr::ad
