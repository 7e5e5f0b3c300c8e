#pragma once

// Pairwise text similarity, every score on a 0-100 scale.
//
// sequence and levenshtein operate on Unicode code points and are sensitive
// to order. jaccard and cosine operate on tokens and ignore order. All
// functions are pure and thread-safe.

#include <string>
#include <string_view>
#include <vector>

namespace llmaudit {

enum class SplitRule { kUnicodeWhitespace };

struct TokenizerConfig {
  bool case_fold = true;
  bool strip_punctuation = true;
  SplitRule split_rule = SplitRule::kUnicodeWhitespace;
};

struct SimilarityVector {
  double sequence = 0.0;
  double levenshtein = 0.0;
  double jaccard = 0.0;
  double cosine = 0.0;

  bool operator==(const SimilarityVector&) const = default;
};

/// Splits UTF-8 text into non-empty tokens. Invalid UTF-8 bytes decode to
/// U+FFFD so the function is total.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& cfg = {});

/// |A ∩ B| / |A ∪ B| over token sets.
double jaccard_similarity(std::string_view a, std::string_view b,
                          const TokenizerConfig& cfg = {});

/// Cosine of term-frequency vectors over the union vocabulary.
double cosine_similarity(std::string_view a, std::string_view b,
                         const TokenizerConfig& cfg = {});

/// Code-point edit distance D, reported as (1 - D / max(|a|, |b|)) * 100.
double levenshtein_similarity(std::string_view a, std::string_view b);

/// Ratcliff-Obershelp gestalt ratio 2M / (|a| + |b|) * 100.
///
/// The recursive longest-match decomposition depends on argument order when
/// several longest matches tie, so the pair is put in a canonical order
/// (code-point lexicographic) first. That makes the score symmetric and equal
/// to the textbook ratio computed with the smaller string first.
double sequence_similarity(std::string_view a, std::string_view b);

/// Number of code points matched by the Ratcliff-Obershelp decomposition of
/// (a, b), taken in the order given.
std::size_t gestalt_matches(std::u32string_view a, std::u32string_view b);

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);

SimilarityVector similarity_vector(std::string_view a, std::string_view b,
                                   const TokenizerConfig& cfg = {});

}  // namespace llmaudit
