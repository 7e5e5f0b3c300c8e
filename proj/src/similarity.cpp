#include "llmaudit/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "utf8.hpp"

namespace llmaudit {

namespace {

std::vector<std::string> sorted_tokens(std::string_view text,
                                       const TokenizerConfig& cfg) {
  auto tokens = tokenize(text, cfg);
  std::sort(tokens.begin(), tokens.end());
  return tokens;
}

// Run-length counts over a sorted token list.
std::vector<std::pair<std::string_view, std::uint64_t>> term_counts(
    const std::vector<std::string>& sorted) {
  std::vector<std::pair<std::string_view, std::uint64_t>> out;
  for (const auto& t : sorted) {
    if (!out.empty() && out.back().first == t) {
      ++out.back().second;
    } else {
      out.emplace_back(t, 1);
    }
  }
  return out;
}

double clamp_score(double s) { return std::clamp(s, 0.0, 100.0); }

struct Range {
  std::size_t alo, ahi, blo, bhi;
};

struct Match {
  std::size_t i = 0, j = 0, size = 0;
};

// Longest common substring of a[alo,ahi) and b[blo,bhi). Among longest
// matches, the one starting earliest in a wins, then earliest in b.
Match longest_match(std::u32string_view a, std::u32string_view b,
                    const Range& r, std::vector<std::size_t>& prev,
                    std::vector<std::size_t>& cur) {
  const std::size_t width = r.bhi - r.blo;
  prev.assign(width + 1, 0);
  cur.assign(width + 1, 0);
  Match best{r.alo, r.blo, 0};
  for (std::size_t i = r.alo; i < r.ahi; ++i) {
    const char32_t ca = a[i];
    for (std::size_t jj = 0; jj < width; ++jj) {
      if (ca == b[r.blo + jj]) {
        const std::size_t k = prev[jj] + 1;
        cur[jj + 1] = k;
        if (k > best.size) {
          best = {i + 1 - k, r.blo + jj + 1 - k, k};
        }
      } else {
        cur[jj + 1] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& cfg) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_whitespace(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (cfg.strip_punctuation && utf8::is_punctuation(cp)) continue;
    utf8::append(current, cfg.case_fold ? utf8::fold_case(cp) : cp);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double jaccard_similarity(std::string_view a, std::string_view b,
                          const TokenizerConfig& cfg) {
  auto ta = sorted_tokens(a, cfg);
  auto tb = sorted_tokens(b, cfg);
  ta.erase(std::unique(ta.begin(), ta.end()), ta.end());
  tb.erase(std::unique(tb.begin(), tb.end()), tb.end());
  if (ta.empty() && tb.empty()) return 100.0;
  if (ta.empty() || tb.empty()) return 0.0;

  std::size_t common = 0;
  auto ia = ta.begin();
  auto ib = tb.begin();
  while (ia != ta.end() && ib != tb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = ta.size() + tb.size() - common;
  return clamp_score(100.0 * static_cast<double>(common) /
                     static_cast<double>(uni));
}

double cosine_similarity(std::string_view a, std::string_view b,
                         const TokenizerConfig& cfg) {
  const auto ta = sorted_tokens(a, cfg);
  const auto tb = sorted_tokens(b, cfg);
  if (ta.empty() && tb.empty()) return 100.0;
  if (ta.empty() || tb.empty()) return 0.0;

  const auto ca = term_counts(ta);
  const auto cb = term_counts(tb);
  std::uint64_t dot = 0, na = 0, nb = 0;
  for (const auto& [_, c] : ca) na += c * c;
  for (const auto& [_, c] : cb) nb += c * c;
  auto ia = ca.begin();
  auto ib = cb.begin();
  while (ia != ca.end() && ib != cb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  // sqrt of the product (not the product of square roots) keeps identical
  // inputs at exactly 100.
  const double denom =
      std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
  return clamp_score(100.0 * static_cast<double>(dot) / denom);
}

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  // Common prefix and suffix never contribute edits.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a.remove_prefix(1);
    b.remove_prefix(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a.remove_suffix(1);
    b.remove_suffix(1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  const auto ua = utf8::decode(a);
  const auto ub = utf8::decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 100.0;
  const std::size_t dist = levenshtein_distance(ua, ub);
  return clamp_score(100.0 * static_cast<double>(longest - dist) /
                     static_cast<double>(longest));
}

std::size_t gestalt_matches(std::u32string_view a, std::u32string_view b) {
  std::size_t matched = 0;
  std::vector<Range> pending{{0, a.size(), 0, b.size()}};
  std::vector<std::size_t> prev, cur;
  while (!pending.empty()) {
    const Range r = pending.back();
    pending.pop_back();
    if (r.alo >= r.ahi || r.blo >= r.bhi) continue;
    const Match m = longest_match(a, b, r, prev, cur);
    if (m.size == 0) continue;
    matched += m.size;
    pending.push_back({r.alo, m.i, r.blo, m.j});
    pending.push_back({m.i + m.size, r.ahi, m.j + m.size, r.bhi});
  }
  return matched;
}

double sequence_similarity(std::string_view a, std::string_view b) {
  auto ua = utf8::decode(a);
  auto ub = utf8::decode(b);
  const std::size_t total = ua.size() + ub.size();
  if (total == 0) return 100.0;
  if (ub < ua) std::swap(ua, ub);
  const std::size_t m = gestalt_matches(ua, ub);
  return clamp_score(200.0 * static_cast<double>(m) /
                     static_cast<double>(total));
}

SimilarityVector similarity_vector(std::string_view a, std::string_view b,
                                   const TokenizerConfig& cfg) {
  return SimilarityVector{
      .sequence = sequence_similarity(a, b),
      .levenshtein = levenshtein_similarity(a, b),
      .jaccard = jaccard_similarity(a, b, cfg),
      .cosine = cosine_similarity(a, b, cfg),
  };
}

}  // namespace llmaudit
