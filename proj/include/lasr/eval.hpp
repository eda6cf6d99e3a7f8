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

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lasr::eval {

struct EditStats {
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
  int ref_words = 0;

  int errors() const { return substitutions + deletions + insertions; }
  EditStats& operator+=(const EditStats& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_words += o.ref_words;
    return *this;
  }
};

// Minimal S+D+I word alignment; equal-cost ties resolve to substitutions
// rather than insert+delete pairs.
EditStats levenshtein_words(const std::vector<std::string>& hyp,
                            const std::vector<std::string>& ref);

double wer_percent(const EditStats& stats);

// Pooled corpus WER: 100 * sum(S+D+I) / sum(N).
double corpus_wer(const std::vector<std::string>& hyps,
                  const std::vector<std::string>& refs);

double relative_improvement(double baseline_wer, double system_wer);

struct SetResult {
  int utterances = 0;
  EditStats stats;
  double wer = 0.0;
};

struct Report {
  std::map<std::string, SetResult> per_tag;  // keyed by tag name
  SetResult pooled;
};

// Hypotheses keyed by utterance id; references carry an optional
// {clean|noisy} tag. Per-tag WER plus a pooled recomputation over the union.
struct TaggedRef {
  std::string id;
  std::string text;
  std::optional<std::string> tag;
};

Report split_report(const std::vector<TaggedRef>& refs,
                    const std::map<std::string, std::string>& hyps_by_id);

std::string format_report(const Report& report);
std::string report_to_json(const Report& report);

}  // namespace lasr::eval
