#pragma once

#include <map>
#include <string>
#include <vector>

#include "docrebench/model.hpp"

namespace docrebench {

/// Predicted-region → ground-truth-region assignment. Every predicted text
/// region maps to its maximum-IOU ground-truth text region when that IOU is
/// strictly above 0.5; several predictions may share one ground-truth region.
struct RegionMapping {
    std::map<std::string, std::vector<std::string>> entries;  // gt id -> pred ids
    std::vector<std::string> unmatched_gt;
    std::vector<std::string> unmatched_pred;
};

struct AlignedPair {
    std::string gt_word_id;
    std::string pred_word_id;
    double iou = 0.0;
};

struct WordAlignment {
    std::vector<AlignedPair> pairs;
    std::vector<std::string> unmatched_gt_words;
    std::vector<std::string> unmatched_pred_words;
};

struct MatchResult {
    RegionMapping region_mapping;
    // gt region id -> pooled predicted word ids, ordered by (pred region id,
    // word position).
    std::map<std::string, std::vector<std::string>> pooled_word_ids;
    std::map<std::string, WordAlignment> per_region_alignments;
};

/// Argmax-IOU mapping with strict > 0.5 threshold. Ties on equal IOU resolve
/// to the earliest ground-truth region in input order.
RegionMapping match_regions(const std::vector<LayoutRegion>& gt,
                            const std::vector<LayoutRegion>& pred);

/// Merges the word lists of all predicted regions mapped to each ground-truth
/// region; order is (pred region id ascending, document word order).
std::map<std::string, std::vector<std::string>> pool_predicted_words(
    const RegionMapping& mapping, const DocumentAnnotation& pred_doc);

/// Greedy one-to-one alignment: candidate (gt, pred) pairs with IOU > 0.5 are
/// visited by IOU descending, ties by (gt index, pred index) ascending; a pair
/// is accepted when both sides are unclaimed.
WordAlignment align_words(const std::vector<const WordInstance*>& gt_words,
                          const std::vector<const WordInstance*>& pool);

/// Full protocol for one document pair: text regions only.
MatchResult match_documents(const DocumentAnnotation& gt, const DocumentAnnotation& pred);

}  // namespace docrebench
