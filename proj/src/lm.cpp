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

#include "lasr/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lasr/error.hpp"
#include "lasr/io.hpp"
#include "lasr/tokenizer.hpp"

namespace lasr::lm {

const std::string kSentStart = "<s>";
const std::string kSentEnd = "</s>";
const std::string kUnkWord = "<unk>";

namespace {

constexpr double kLog10Zero = -99.0;  // ARPA sentinel for "no probability"
constexpr double kLn10 = 2.302585092994045684017991454684364208;

std::string format_log10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int NGramLM::id_of(const std::string& word) const {
  const auto it = word_ids.find(word);
  if (it != word_ids.end()) return it->second;
  return word_ids.at(kUnkWord);
}

double NGramLM::cond_log10(const std::vector<int>& context, int word) const {
  // Use at most order-1 words of history.
  std::vector<int> ctx = context;
  const int max_ctx = order - 1;
  if (static_cast<int>(ctx.size()) > max_ctx)
    ctx.erase(ctx.begin(), ctx.end() - max_ctx);

  std::vector<int> gram = ctx;
  gram.push_back(word);
  const auto& table = tables[gram.size() - 1];
  const auto it = table.find(gram);
  if (it != table.end()) return it->second.logp;
  if (ctx.empty()) {
    // Unigram table misses the word entirely; treat as <unk>.
    const auto uit = table.find({word_ids.at(kUnkWord)});
    check(uit != table.end(), "NGramLM: no <unk> unigram in model");
    return uit->second.logp;
  }
  // Back off: apply the context's weight (1.0 if the context is unlisted)
  // and drop the oldest word.
  double bow = 0.0;
  const auto& ctx_table = tables[ctx.size() - 1];
  const auto cit = ctx_table.find(ctx);
  if (cit != ctx_table.end() && cit->second.has_bow) bow = cit->second.bow;
  ctx.erase(ctx.begin());
  return bow + cond_log10(ctx, word);
}

NGramLM ngram_train(const std::vector<std::string>& sentences,
                    const NGramTrainOptions& opts) {
  check(opts.order >= 1, "ngram_train: order must be >= 1, got ", opts.order);
  check(opts.discount >= 0.0 && opts.discount < 1.0,
        "ngram_train: discount ", opts.discount, " outside [0, 1)");
  check(!sentences.empty(), "ngram_train: empty corpus");

  NGramLM lm;
  lm.order = opts.order;
  auto intern = [&lm](const std::string& w) {
    const auto it = lm.word_ids.find(w);
    if (it != lm.word_ids.end()) return it->second;
    const int id = static_cast<int>(lm.vocab.size());
    lm.vocab.push_back(w);
    lm.word_ids[w] = id;
    return id;
  };
  const int start_id = intern(kSentStart);
  const int end_id = intern(kSentEnd);
  intern(kUnkWord);

  // Raw counts per order over <s>-padded sentences.
  std::vector<std::map<std::vector<int>, double>> counts(
      static_cast<std::size_t>(opts.order));
  bool any = false;
  for (const std::string& line : sentences) {
    const auto words = tokenizer::split_words(line);
    if (words.empty()) continue;
    any = true;
    std::vector<int> ids;
    ids.push_back(start_id);
    for (const auto& w : words) ids.push_back(intern(w));
    ids.push_back(end_id);
    for (int n = 1; n <= opts.order; ++n) {
      for (std::size_t i = 0; i + n <= ids.size(); ++i) {
        if (n == 1 && ids[i] == start_id) continue;  // <s> is never predicted
        std::vector<int> gram(ids.begin() + static_cast<std::ptrdiff_t>(i),
                              ids.begin() + static_cast<std::ptrdiff_t>(i + n));
        counts[static_cast<std::size_t>(n - 1)][gram] += 1.0;
      }
    }
  }
  check(any, "ngram_train: corpus has no usable sentences");

  lm.tables.assign(static_cast<std::size_t>(opts.order), {});

  // Prediction vocabulary: everything but <s>.
  const int pred_vocab =
      static_cast<int>(lm.vocab.size()) - 1;
  const double d = opts.discount;

  // Unigrams: interpolate with the uniform distribution.
  {
    const auto& uni = counts[0];
    double total = 0.0;
    for (const auto& [gram, c] : uni) total += c;
    const double distinct = static_cast<double>(uni.size());
    const double lambda = total > 0.0 ? d * distinct / total : 1.0;
    const double uniform = 1.0 / static_cast<double>(pred_vocab);
    for (int id = 0; id < static_cast<int>(lm.vocab.size()); ++id) {
      if (id == start_id) continue;
      const auto it = uni.find({id});
      const double seen = it != uni.end() ? (it->second - d) / total : 0.0;
      const double p = seen + lambda * uniform;
      NGramLM::Entry e;
      e.logp = p > 0.0 ? std::log10(p) : kLog10Zero;
      lm.tables[0][{id}] = e;
    }
    // <s> appears only as context.
    NGramLM::Entry start_entry;
    start_entry.logp = kLog10Zero;
    lm.tables[0][{start_id}] = start_entry;
  }

  // Higher orders, lowest first so interpolation can query the level below.
  for (int n = 2; n <= opts.order; ++n) {
    // Continuation totals and distinct-continuation counts per context.
    std::map<std::vector<int>, std::pair<double, int>> ctx_stats;
    for (const auto& [gram, c] : counts[static_cast<std::size_t>(n - 1)]) {
      std::vector<int> ctx(gram.begin(), gram.end() - 1);
      auto& [total, distinct] = ctx_stats[ctx];
      total += c;
      distinct += 1;
    }
    for (const auto& [gram, c] : counts[static_cast<std::size_t>(n - 1)]) {
      std::vector<int> ctx(gram.begin(), gram.end() - 1);
      const auto& [total, distinct] = ctx_stats.at(ctx);
      const double lambda = d * distinct / total;
      std::vector<int> lower_ctx(gram.begin() + 1, gram.end() - 1);
      const double lower =
          std::pow(10.0, lm.cond_log10(lower_ctx, gram.back()));
      const double p = (c - d) / total + lambda * lower;
      NGramLM::Entry e;
      e.logp = p > 0.0 ? std::log10(p) : kLog10Zero;
      lm.tables[static_cast<std::size_t>(n - 1)][gram] = e;
    }
    // Backoff weights live on the context's own (n-1)-gram entry.
    for (const auto& [ctx, stats] : ctx_stats) {
      const double lambda = d * stats.second / stats.first;
      auto& table = lm.tables[ctx.size() - 1];
      auto it = table.find(ctx);
      check(it != table.end(),
            "ngram_train: context without a lower-order entry");
      it->second.bow = lambda > 0.0 ? std::log10(lambda) : kLog10Zero;
      it->second.has_bow = true;
    }
  }
  return lm;
}

double ngram_score(const NGramLM& lm, const std::vector<std::string>& words) {
  check(lm.order >= 1 && !lm.tables.empty(), "ngram_score: untrained model");
  std::vector<int> context = {lm.word_ids.at(kSentStart)};
  double total_log10 = 0.0;
  for (const auto& w : words) {
    const int id = lm.id_of(w);
    total_log10 += lm.cond_log10(context, id);
    context.push_back(id);
  }
  total_log10 += lm.cond_log10(context, lm.word_ids.at(kSentEnd));
  return total_log10 * kLn10;
}

void save_arpa(const NGramLM& lm, const std::string& path) {
  // Deterministic ordering: n-grams sorted by their word strings.
  util::atomic_write(path, [&](std::ostream& os) {
    os << "\\data\\\n";
    for (int n = 1; n <= lm.order; ++n) {
      os << "ngram " << n << "="
         << lm.tables[static_cast<std::size_t>(n - 1)].size() << "\n";
    }
    for (int n = 1; n <= lm.order; ++n) {
      os << "\n\\" << n << "-grams:\n";
      std::vector<std::pair<std::vector<std::string>, const NGramLM::Entry*>>
          rows;
      for (const auto& [gram, entry] : lm.tables[static_cast<std::size_t>(n - 1)]) {
        std::vector<std::string> words;
        words.reserve(gram.size());
        for (int id : gram)
          words.push_back(lm.vocab[static_cast<std::size_t>(id)]);
        rows.emplace_back(std::move(words), &entry);
      }
      std::sort(rows.begin(), rows.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [words, entry] : rows) {
        os << format_log10(entry->logp);
        for (const auto& w : words) os << '\t' << w;
        if (entry->has_bow) os << '\t' << format_log10(entry->bow);
        os << "\n";
      }
    }
    os << "\n\\end\\\n";
  });
}

NGramLM load_arpa(const std::string& path) {
  const auto lines = util::read_lines(path);
  NGramLM lm;
  auto intern = [&lm](const std::string& w) {
    const auto it = lm.word_ids.find(w);
    if (it != lm.word_ids.end()) return it->second;
    const int id = static_cast<int>(lm.vocab.size());
    lm.vocab.push_back(w);
    lm.word_ids[w] = id;
    return id;
  };

  std::size_t i = 0;
  while (i < lines.size() && lines[i] != "\\data\\") ++i;
  check(i < lines.size(), "load_arpa: ", path, ": missing \\data\\ section");
  ++i;
  std::vector<std::size_t> expected;
  while (i < lines.size() && lines[i].rfind("ngram ", 0) == 0) {
    const auto eq = lines[i].find('=');
    check(eq != std::string::npos, "load_arpa: bad count line: ", lines[i]);
    expected.push_back(std::stoul(lines[i].substr(eq + 1)));
    ++i;
  }
  check(!expected.empty(), "load_arpa: no ngram counts in ", path);
  lm.order = static_cast<int>(expected.size());
  lm.tables.assign(expected.size(), {});

  int current = 0;
  for (; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (line == "\\end\\") break;
    if (line.front() == '\\') {
      const auto dash = line.find("-grams:");
      check(dash != std::string::npos, "load_arpa: bad section header ", line);
      current = std::stoi(line.substr(1, dash - 1));
      check(current >= 1 && current <= lm.order,
            "load_arpa: section order ", current, " out of range");
      continue;
    }
    check(current >= 1, "load_arpa: n-gram line outside a section: ", line);
    std::istringstream is(line);
    std::vector<std::string> fields;
    std::string f;
    while (is >> f) fields.push_back(f);
    const std::size_t n = static_cast<std::size_t>(current);
    check(fields.size() == n + 1 || fields.size() == n + 2,
          "load_arpa: malformed ", current, "-gram line: ", line);
    NGramLM::Entry e;
    e.logp = std::stod(fields[0]);
    std::vector<int> gram;
    for (std::size_t k = 1; k <= n; ++k) gram.push_back(intern(fields[k]));
    if (fields.size() == n + 2) {
      e.bow = std::stod(fields.back());
      e.has_bow = true;
    }
    lm.tables[n - 1][gram] = e;
  }
  for (std::size_t n = 0; n < expected.size(); ++n) {
    check(lm.tables[n].size() == expected[n], "load_arpa: section ", n + 1,
          " has ", lm.tables[n].size(), " entries, header said ", expected[n]);
  }
  check(lm.word_ids.count(kSentStart) && lm.word_ids.count(kSentEnd) &&
            lm.word_ids.count(kUnkWord),
        "load_arpa: model must contain <s>, </s> and <unk>");
  return lm;
}

}  // namespace lasr::lm
