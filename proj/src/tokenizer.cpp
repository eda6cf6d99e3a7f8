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

#include "lasr/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "lasr/error.hpp"
#include "lasr/io.hpp"

namespace lasr::tokenizer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSpecialLogProb = -99.0;
// Score for covering one unseen character with <unk> during encoding.
constexpr double kUnkLogProb = -100.0;

double logsumexp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const std::string kBoundary = "\xe2\x96\x81";  // U+2581 LOWER ONE EIGHTH BLOCK

std::vector<std::string> utf8_chars(const std::string& text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto byte = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if ((byte & 0xF8) == 0xF0) len = 4;
    else if ((byte & 0xF0) == 0xE0) len = 3;
    else if ((byte & 0xE0) == 0xC0) len = 2;
    len = std::min(len, text.size() - i);
    chars.push_back(text.substr(i, len));
    i += len;
  }
  return chars;
}

std::string normalize(const std::string& text) {
  std::string out;
  bool pending_space = false;
  bool seen_char = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (seen_char) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += kBoundary;
      pending_space = false;
    }
    out += c;
    seen_char = true;
  }
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream is(text);
  std::string w;
  while (is >> w) words.push_back(w);
  return words;
}

void SubwordModel::rebuild_index() {
  piece_ids.clear();
  max_piece_len = 1;
  for (int id = kNumSpecials; id < vocab_size(); ++id) {
    piece_ids[pieces[static_cast<std::size_t>(id)]] = id;
    max_piece_len = std::max(
        max_piece_len,
        static_cast<int>(utf8_chars(pieces[static_cast<std::size_t>(id)]).size()));
  }
}

SubwordModel SubwordModel::from_pieces(
    const std::vector<std::pair<std::string, double>>& entries) {
  SubwordModel m;
  m.pieces = {"<sos>", "<eos>", "<unk>"};
  m.log_probs = {kSpecialLogProb, kSpecialLogProb, kSpecialLogProb};
  for (const auto& [piece, lp] : entries) {
    check(!piece.empty(), "from_pieces: empty piece string");
    m.pieces.push_back(piece);
    m.log_probs.push_back(lp);
  }
  m.rebuild_index();
  return m;
}

namespace {

// Segmentation lattice over code points of one line. Edge (j -> j+len) exists
// when the chars j..j+len-1 form a known piece.
struct Lattice {
  // prefix[i] = byte offset of code point i
  std::vector<std::size_t> offsets;
  const std::string* text = nullptr;
  int n = 0;

  explicit Lattice(const std::string& line,
                   const std::vector<std::string>& chars) {
    text = &line;
    n = static_cast<int>(chars.size());
    offsets.resize(static_cast<std::size_t>(n) + 1);
    std::size_t off = 0;
    for (int i = 0; i < n; ++i) {
      offsets[static_cast<std::size_t>(i)] = off;
      off += chars[static_cast<std::size_t>(i)].size();
    }
    offsets[static_cast<std::size_t>(n)] = off;
  }

  std::string substr(int j, int i) const {
    return text->substr(offsets[static_cast<std::size_t>(j)],
                        offsets[static_cast<std::size_t>(i)] -
                            offsets[static_cast<std::size_t>(j)]);
  }
};

struct WeightedLine {
  std::string text;
  double weight = 1.0;
};

// One EM expectation pass over a line; returns its log-likelihood and adds
// weighted expected piece counts.
double accumulate_expectations(const SubwordModel& model,
                               const WeightedLine& line,
                               std::vector<double>* counts) {
  const auto chars = utf8_chars(line.text);
  const Lattice lat(line.text, chars);
  const int n = lat.n;
  if (n == 0) return 0.0;

  std::vector<double> fw(static_cast<std::size_t>(n) + 1, kNegInf);
  std::vector<double> bw(static_cast<std::size_t>(n) + 1, kNegInf);
  fw[0] = 0.0;
  bw[static_cast<std::size_t>(n)] = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::max(0, i - model.max_piece_len); j < i; ++j) {
      if (fw[static_cast<std::size_t>(j)] == kNegInf) continue;
      const auto it = model.piece_ids.find(lat.substr(j, i));
      if (it == model.piece_ids.end()) continue;
      fw[static_cast<std::size_t>(i)] =
          logsumexp2(fw[static_cast<std::size_t>(i)],
                     fw[static_cast<std::size_t>(j)] +
                         model.log_probs[static_cast<std::size_t>(it->second)]);
    }
  }
  for (int j = n - 1; j >= 0; --j) {
    for (int i = j + 1; i <= std::min(n, j + model.max_piece_len); ++i) {
      if (bw[static_cast<std::size_t>(i)] == kNegInf) continue;
      const auto it = model.piece_ids.find(lat.substr(j, i));
      if (it == model.piece_ids.end()) continue;
      bw[static_cast<std::size_t>(j)] =
          logsumexp2(bw[static_cast<std::size_t>(j)],
                     bw[static_cast<std::size_t>(i)] +
                         model.log_probs[static_cast<std::size_t>(it->second)]);
    }
  }
  const double total = fw[static_cast<std::size_t>(n)];
  check(total != kNegInf,
        "train_unigram: line has no segmentation under the current "
        "vocabulary: ",
        line.text);
  if (counts) {
    for (int j = 0; j < n; ++j) {
      if (fw[static_cast<std::size_t>(j)] == kNegInf) continue;
      for (int i = j + 1; i <= std::min(n, j + model.max_piece_len); ++i) {
        const auto it = model.piece_ids.find(lat.substr(j, i));
        if (it == model.piece_ids.end()) continue;
        const double post =
            fw[static_cast<std::size_t>(j)] +
            model.log_probs[static_cast<std::size_t>(it->second)] +
            bw[static_cast<std::size_t>(i)] - total;
        (*counts)[static_cast<std::size_t>(it->second)] +=
            line.weight * std::exp(post);
      }
    }
  }
  return total;
}

}  // namespace

SubwordModel train_unigram(const std::vector<std::string>& corpus,
                           const UnigramTrainOptions& opts,
                           NllTrace* nll_trace) {
  check(!corpus.empty(), "train_unigram: empty corpus");

  // Deduplicate normalized lines, keeping multiplicities as weights.
  std::map<std::string, double> line_weights;
  for (const std::string& raw : corpus) {
    const std::string norm = normalize(raw);
    if (!norm.empty()) line_weights[norm] += 1.0;
  }
  check(!line_weights.empty(), "train_unigram: corpus has no usable text");
  std::vector<WeightedLine> lines;
  lines.reserve(line_weights.size());
  for (const auto& [text, w] : line_weights) lines.push_back({text, w});

  // Character inventory and substring frequencies for the seed vocabulary.
  std::set<std::string> char_set;
  std::map<std::string, double> substr_counts;
  for (const auto& line : lines) {
    const auto chars = utf8_chars(line.text);
    const Lattice lat(line.text, chars);
    for (int j = 0; j < lat.n; ++j) {
      char_set.insert(chars[static_cast<std::size_t>(j)]);
      for (int i = j + 2; i <= std::min(lat.n, j + opts.max_piece_len); ++i)
        substr_counts[lat.substr(j, i)] += line.weight;
    }
  }

  const int capacity = opts.vocab_size - SubwordModel::kNumSpecials;
  check(static_cast<int>(char_set.size()) <= capacity,
        "train_unigram: vocab_size ", opts.vocab_size, " cannot hold ",
        char_set.size(), " distinct characters plus ",
        SubwordModel::kNumSpecials, " specials");

  // Seed: every character, plus frequent substrings weighted by count*length.
  std::vector<std::pair<std::string, double>> seed;
  for (const auto& c : char_set) seed.emplace_back(c, 1.0);
  std::vector<std::pair<std::string, double>> frequent;
  for (const auto& [s, cnt] : substr_counts) {
    if (cnt + 1e-12 >= opts.min_piece_count) {
      frequent.emplace_back(
          s, cnt * static_cast<double>(utf8_chars(s).size()));
    }
  }
  std::sort(frequent.begin(), frequent.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (static_cast<int>(frequent.size()) > opts.max_seed_pieces)
    frequent.resize(static_cast<std::size_t>(opts.max_seed_pieces));
  seed.insert(seed.end(), frequent.begin(), frequent.end());

  SubwordModel model = SubwordModel::from_pieces(seed);
  {
    // Initial probabilities proportional to the seed scores.
    double total = 0.0;
    for (std::size_t i = SubwordModel::kNumSpecials; i < model.pieces.size();
         ++i)
      total += seed[i - SubwordModel::kNumSpecials].second;
    for (std::size_t i = SubwordModel::kNumSpecials; i < model.pieces.size();
         ++i)
      model.log_probs[i] =
          std::log(seed[i - SubwordModel::kNumSpecials].second / total);
  }

  std::vector<double> counts;
  while (true) {
    // EM refinement at the current vocabulary.
    for (int iter = 0; iter < opts.em_iters_per_round; ++iter) {
      counts.assign(model.pieces.size(), 0.0);
      double nll = 0.0;
      for (const auto& line : lines)
        nll -= line.weight * accumulate_expectations(model, line, &counts);
      if (nll_trace) nll_trace->emplace_back(model.vocab_size(), nll);
      // Keep characters alive so any text stays coverable.
      for (std::size_t id = SubwordModel::kNumSpecials;
           id < model.pieces.size(); ++id) {
        if (utf8_chars(model.pieces[id]).size() == 1)
          counts[id] = std::max(counts[id], 1e-8);
      }
      double total = 0.0;
      for (std::size_t id = SubwordModel::kNumSpecials;
           id < model.pieces.size(); ++id)
        total += counts[id];
      for (std::size_t id = SubwordModel::kNumSpecials;
           id < model.pieces.size(); ++id)
        model.log_probs[id] =
            counts[id] > 0.0 ? std::log(counts[id] / total) : kNegInf;
    }

    const int excess = model.vocab_size() - opts.vocab_size;
    if (excess <= 0) break;

    // Prune the lowest-contribution multi-character pieces.
    std::vector<std::pair<double, int>> prunable;  // (count, id)
    for (int id = SubwordModel::kNumSpecials; id < model.vocab_size(); ++id) {
      if (utf8_chars(model.pieces[static_cast<std::size_t>(id)]).size() > 1)
        prunable.emplace_back(counts[static_cast<std::size_t>(id)], id);
    }
    std::sort(prunable.begin(), prunable.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first
                 ? a.first < b.first
                 : model.pieces[static_cast<std::size_t>(a.second)] >
                       model.pieces[static_cast<std::size_t>(b.second)];
    });
    int to_prune = std::max(
        1, static_cast<int>(std::ceil(prunable.size() * opts.prune_fraction)));
    to_prune = std::min({to_prune, excess, static_cast<int>(prunable.size())});
    std::set<int> drop;
    for (int i = 0; i < to_prune; ++i)
      drop.insert(prunable[static_cast<std::size_t>(i)].second);

    SubwordModel next;
    next.pieces = {"<sos>", "<eos>", "<unk>"};
    next.log_probs = {kSpecialLogProb, kSpecialLogProb, kSpecialLogProb};
    for (int id = SubwordModel::kNumSpecials; id < model.vocab_size(); ++id) {
      if (drop.count(id)) continue;
      next.pieces.push_back(model.pieces[static_cast<std::size_t>(id)]);
      next.log_probs.push_back(model.log_probs[static_cast<std::size_t>(id)]);
    }
    next.rebuild_index();
    model = std::move(next);
  }

  // Final ordering: characters first, then multi-char pieces, both sorted;
  // probabilities renormalized so the piece distribution sums to one.
  std::vector<std::pair<std::string, double>> finals;
  for (int id = SubwordModel::kNumSpecials; id < model.vocab_size(); ++id)
    finals.emplace_back(model.pieces[static_cast<std::size_t>(id)],
                        model.log_probs[static_cast<std::size_t>(id)]);
  std::sort(finals.begin(), finals.end(), [](const auto& a, const auto& b) {
    const auto la = utf8_chars(a.first).size();
    const auto lb = utf8_chars(b.first).size();
    const bool ma = la > 1, mb = lb > 1;
    if (ma != mb) return mb;
    return a.first < b.first;
  });
  double lse = kNegInf;
  for (const auto& [piece, lp] : finals) lse = logsumexp2(lse, lp);
  SubwordModel out;
  out.pieces = {"<sos>", "<eos>", "<unk>"};
  out.log_probs = {kSpecialLogProb, kSpecialLogProb, kSpecialLogProb};
  for (const auto& [piece, lp] : finals) {
    out.pieces.push_back(piece);
    out.log_probs.push_back(lp == kNegInf ? std::log(1e-12) : lp - lse);
  }
  out.rebuild_index();
  check(static_cast<int>(char_set.size()) + SubwordModel::kNumSpecials <=
            out.vocab_size(),
        "train_unigram: character coverage lost during pruning");
  return out;
}

std::vector<int> encode(const SubwordModel& model, const std::string& text) {
  const std::string norm = normalize(text);
  const auto chars = utf8_chars(norm);
  const Lattice lat(norm, chars);
  const int n = lat.n;
  std::vector<double> best(static_cast<std::size_t>(n) + 1, kNegInf);
  std::vector<int> best_piece(static_cast<std::size_t>(n) + 1, -1);
  std::vector<int> best_from(static_cast<std::size_t>(n) + 1, -1);
  best[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    // Longest candidates first so score ties settle on the longer piece.
    for (int j = std::max(0, i - model.max_piece_len); j < i; ++j) {
      if (best[static_cast<std::size_t>(j)] == kNegInf) continue;
      const auto it = model.piece_ids.find(lat.substr(j, i));
      if (it == model.piece_ids.end()) continue;
      const double score =
          best[static_cast<std::size_t>(j)] +
          model.log_probs[static_cast<std::size_t>(it->second)];
      if (score > best[static_cast<std::size_t>(i)]) {
        best[static_cast<std::size_t>(i)] = score;
        best_piece[static_cast<std::size_t>(i)] = it->second;
        best_from[static_cast<std::size_t>(i)] = j;
      }
    }
    // Unknown-character fallback covers exactly one code point.
    const double unk_score =
        best[static_cast<std::size_t>(i - 1)] + kUnkLogProb;
    if (unk_score > best[static_cast<std::size_t>(i)]) {
      best[static_cast<std::size_t>(i)] = unk_score;
      best_piece[static_cast<std::size_t>(i)] = SubwordModel::kUnk;
      best_from[static_cast<std::size_t>(i)] = i - 1;
    }
  }
  std::vector<int> ids;
  for (int i = n; i > 0; i = best_from[static_cast<std::size_t>(i)])
    ids.push_back(best_piece[static_cast<std::size_t>(i)]);
  std::reverse(ids.begin(), ids.end());
  return ids;
}

double encode_score(const SubwordModel& model, const std::string& text) {
  double score = 0.0;
  for (int id : encode(model, text)) {
    score += id == SubwordModel::kUnk
                 ? kUnkLogProb
                 : model.log_probs[static_cast<std::size_t>(id)];
  }
  return score;
}

std::string decode(const SubwordModel& model, const std::vector<int>& ids) {
  std::string joined;
  for (int id : ids) {
    check(id >= 0 && id < model.vocab_size(), "decode: invalid token id ", id,
          " for vocabulary of ", model.vocab_size());
    if (id == SubwordModel::kSos || id == SubwordModel::kEos) continue;
    joined += model.pieces[static_cast<std::size_t>(id)];
  }
  // Boundary characters back to spaces.
  std::string out;
  const auto chars = utf8_chars(joined);
  for (const auto& c : chars) out += (c == kBoundary) ? " " : c;
  // Trim.
  const auto b = out.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  const auto e = out.find_last_not_of(' ');
  return out.substr(b, e - b + 1);
}

TokenSequence add_sentinels(const std::vector<int>& payload) {
  TokenSequence t;
  t.reserve(payload.size() + 2);
  t.push_back(SubwordModel::kSos);
  t.insert(t.end(), payload.begin(), payload.end());
  t.push_back(SubwordModel::kEos);
  return t;
}

std::vector<int> strip_sentinels(const TokenSequence& target) {
  check(target.size() >= 2 && target.front() == SubwordModel::kSos &&
            target.back() == SubwordModel::kEos,
        "strip_sentinels: sequence is not of the form <sos> ... <eos>");
  return {target.begin() + 1, target.end() - 1};
}

void save_model(const SubwordModel& model, const std::string& path) {
  util::atomic_write(path, [&](std::ostream& os) {
    for (int id = 0; id < model.vocab_size(); ++id) {
      os << model.pieces[static_cast<std::size_t>(id)] << '\t'
         << format_double(model.log_probs[static_cast<std::size_t>(id)])
         << '\n';
    }
  });
}

SubwordModel load_model(const std::string& path) {
  SubwordModel m;
  for (const std::string& line : util::read_lines(path)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    check(tab != std::string::npos, "load_model: ", path,
          ": line without tab separator: ", line);
    m.pieces.push_back(line.substr(0, tab));
    m.log_probs.push_back(std::stod(line.substr(tab + 1)));
  }
  check(m.pieces.size() >= SubwordModel::kNumSpecials &&
            m.pieces[0] == "<sos>" && m.pieces[1] == "<eos>" &&
            m.pieces[2] == "<unk>",
        "load_model: ", path, " does not start with the special tokens");
  m.rebuild_index();
  return m;
}

Lexicon make_lexicon(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        word_prons) {
  // Dense phoneme ids in sorted symbol order.
  std::set<std::string> symbols;
  for (const auto& [word, prons] : word_prons)
    for (const auto& p : prons) symbols.insert(p);
  Lexicon lex;
  lex.phonemes.assign(symbols.begin(), symbols.end());
  std::unordered_map<std::string, int> sym_id;
  for (int i = 0; i < lex.num_phonemes(); ++i)
    sym_id[lex.phonemes[static_cast<std::size_t>(i)]] = i;
  for (const auto& [word, prons] : word_prons) {
    std::vector<int> ids;
    ids.reserve(prons.size());
    for (const auto& p : prons) ids.push_back(sym_id.at(p));
    lex.entries[word] = std::move(ids);
  }
  return lex;
}

std::vector<int> to_phonemes(const Lexicon& lex, const std::string& text) {
  std::vector<int> out;
  for (const std::string& word : split_words(text)) {
    const auto it = lex.entries.find(word);
    check(it != lex.entries.end(),
          "to_phonemes: word not in lexicon: ", word);
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

void save_lexicon(const Lexicon& lex, const std::string& path) {
  util::atomic_write(path, [&](std::ostream& os) {
    for (const auto& [word, ids] : lex.entries) {
      os << word;
      for (std::size_t i = 0; i < ids.size(); ++i)
        os << (i == 0 ? '\t' : ' ')
           << lex.phonemes[static_cast<std::size_t>(ids[i])];
      os << '\n';
    }
  });
}

Lexicon load_lexicon(const std::string& path) {
  std::vector<std::pair<std::string, std::vector<std::string>>> word_prons;
  for (const std::string& line : util::read_lines(path)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    check(tab != std::string::npos, "load_lexicon: ", path,
          ": line without tab separator: ", line);
    const std::string word = line.substr(0, tab);
    const auto prons = split_words(line.substr(tab + 1));
    check(!prons.empty(), "load_lexicon: ", path, ": word ", word,
          " has no phonemes");
    word_prons.emplace_back(word, prons);
  }
  return make_lexicon(word_prons);
}

}  // namespace lasr::tokenizer
