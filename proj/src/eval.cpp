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

#include "lasr/eval.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "lasr/error.hpp"
#include "lasr/tokenizer.hpp"

namespace lasr::eval {

EditStats levenshtein_words(const std::vector<std::string>& hyp,
                            const std::vector<std::string>& ref) {
  const int m = static_cast<int>(hyp.size());
  const int n = static_cast<int>(ref.size());
  // cost[i][j]: best alignment of hyp[0..i) against ref[0..j).
  std::vector<std::vector<int>> cost(
      static_cast<std::size_t>(m) + 1,
      std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
  for (int i = 1; i <= m; ++i) cost[static_cast<std::size_t>(i)][0] = i;
  for (int j = 1; j <= n; ++j) cost[0][static_cast<std::size_t>(j)] = j;
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= n; ++j) {
      const int diag = cost[static_cast<std::size_t>(i - 1)]
                           [static_cast<std::size_t>(j - 1)] +
                       (hyp[static_cast<std::size_t>(i - 1)] !=
                        ref[static_cast<std::size_t>(j - 1)]);
      const int ins =
          cost[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] +
          1;
      const int del =
          cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)] +
          1;
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          std::min({diag, ins, del});
    }
  }

  EditStats stats;
  stats.ref_words = n;
  // Backtrace, preferring match/substitution on ties.
  int i = m, j = n;
  while (i > 0 || j > 0) {
    const int cur = cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (i > 0 && j > 0) {
      const bool differ = hyp[static_cast<std::size_t>(i - 1)] !=
                          ref[static_cast<std::size_t>(j - 1)];
      if (cur == cost[static_cast<std::size_t>(i - 1)]
                     [static_cast<std::size_t>(j - 1)] +
                     (differ ? 1 : 0)) {
        if (differ) ++stats.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 &&
        cur == cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)] + 1) {
      ++stats.deletions;
      --j;
      continue;
    }
    ++stats.insertions;
    --i;
  }
  return stats;
}

double wer_percent(const EditStats& stats) {
  check(stats.ref_words > 0, "wer_percent: no reference words");
  return 100.0 * stats.errors() / stats.ref_words;
}

double corpus_wer(const std::vector<std::string>& hyps,
                  const std::vector<std::string>& refs) {
  check(hyps.size() == refs.size(), "corpus_wer: ", hyps.size(),
        " hypotheses vs ", refs.size(), " references");
  EditStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    total += levenshtein_words(tokenizer::split_words(hyps[i]),
                               tokenizer::split_words(refs[i]));
  }
  return wer_percent(total);
}

double relative_improvement(double baseline_wer, double system_wer) {
  check(baseline_wer > 0.0, "relative_improvement: baseline WER must be > 0");
  return 100.0 * (baseline_wer - system_wer) / baseline_wer;
}

Report split_report(const std::vector<TaggedRef>& refs,
                    const std::map<std::string, std::string>& hyps_by_id) {
  Report report;
  for (const auto& ref : refs) {
    std::string tag = "clean";
    if (ref.tag) {
      check(*ref.tag == "clean" || *ref.tag == "noisy",
            "split_report: unknown tag '", *ref.tag, "' for utterance ",
            ref.id);
      tag = *ref.tag;
    }
    const auto it = hyps_by_id.find(ref.id);
    check(it != hyps_by_id.end(), "split_report: no hypothesis for utterance ",
          ref.id);
    const EditStats stats =
        levenshtein_words(tokenizer::split_words(it->second),
                          tokenizer::split_words(ref.text));
    auto& bucket = report.per_tag[tag];
    bucket.utterances += 1;
    bucket.stats += stats;
    report.pooled.utterances += 1;
    report.pooled.stats += stats;
  }
  for (auto& [tag, result] : report.per_tag) result.wer = wer_percent(result.stats);
  report.pooled.wer = wer_percent(report.pooled.stats);
  return report;
}

namespace {

void format_row(std::ostream& os, const std::string& name,
                const SetResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %6d %7d %8.2f %5d %5d %5d\n",
                name.c_str(), r.utterances, r.stats.ref_words, r.wer,
                r.stats.substitutions, r.stats.deletions, r.stats.insertions);
  os << buf;
}

}  // namespace

std::string format_report(const Report& report) {
  std::ostringstream os;
  os << "testset    utts   words     WER%     S     D     I\n";
  for (const auto& [tag, result] : report.per_tag)
    format_row(os, tag, result);
  if (report.per_tag.size() > 1) format_row(os, "pooled", report.pooled);
  return os.str();
}

std::string report_to_json(const Report& report) {
  nlohmann::json j;
  auto to_json = [](const SetResult& r) {
    nlohmann::json s;
    s["utterances"] = r.utterances;
    s["ref_words"] = r.stats.ref_words;
    s["substitutions"] = r.stats.substitutions;
    s["deletions"] = r.stats.deletions;
    s["insertions"] = r.stats.insertions;
    s["wer"] = r.wer;
    return s;
  };
  for (const auto& [tag, result] : report.per_tag) j[tag] = to_json(result);
  j["pooled"] = to_json(report.pooled);
  return j.dump(2);
}

}  // namespace lasr::eval
