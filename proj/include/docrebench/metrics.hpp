#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "docrebench/matching.hpp"
#include "docrebench/model.hpp"

namespace docrebench {

struct WordLevelScore {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

struct TextLevelScore {
    double cer = 0.0;
    double wer = 0.0;
    double char_weight = 0.0;  // total ground-truth characters
    double word_weight = 0.0;  // total ground-truth tokens
};

struct DocumentScore {
    std::string image_id;
    std::string domain;
    WordLevelScore word_level;
    TextLevelScore text_level;
};

/// Unit-cost Levenshtein distance over Unicode scalar values.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// Unit-cost Levenshtein distance over whole tokens.
std::size_t edit_distance(const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

/// Convenience over UTF-8; inputs should be NFC-normalized.
std::size_t edit_distance_utf8(std::string_view a, std::string_view b);

/// Character error rate: edits / max(1, |gt|). Not clipped at 1.
double cer(std::string_view gt, std::string_view pred);

/// Word error rate over whitespace tokens: edits / max(1, gt tokens).
double wer(std::string_view gt, std::string_view pred);

/// Harmonic mean; 0 when p + r == 0.
double f_measure(double p, double r);

/// TP = aligned pairs with exactly equal NFC texts; FP/FN count the remaining
/// predicted / ground-truth words in text regions.
WordLevelScore word_level_scores(const MatchResult& match, const DocumentAnnotation& gt,
                                 const DocumentAnnotation& pred);

/// Length-weighted CER/WER over ground-truth text regions. Each matched
/// region compares its reading-ordered ground-truth string against the
/// reading-ordered concatenation of its pooled predicted words; unmatched
/// regions count as fully deleted. Throws EmptyDocumentError when the ground
/// truth has no text region.
TextLevelScore text_level_scores(const MatchResult& match, const DocumentAnnotation& gt,
                                 const DocumentAnnotation& pred);

/// Combined word-level and text-level score for one document pair.
DocumentScore evaluate_pair(const DocumentAnnotation& gt, const DocumentAnnotation& pred);

}  // namespace docrebench
