#include "docrebench/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "docrebench/errors.hpp"
#include "docrebench/reconstruct.hpp"
#include "docrebench/unicode.hpp"

namespace docrebench {

namespace {

// Two-row DP over any equality-comparable sequence.
template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    return levenshtein(a, b);
}

std::size_t edit_distance(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
    return levenshtein(a, b);
}

std::size_t edit_distance_utf8(std::string_view a, std::string_view b) {
    return edit_distance(decode_utf8(a), decode_utf8(b));
}

double cer(std::string_view gt, std::string_view pred) {
    auto g = decode_utf8(gt);
    auto p = decode_utf8(pred);
    return static_cast<double>(edit_distance(g, p)) /
           static_cast<double>(std::max<std::size_t>(1, g.size()));
}

double wer(std::string_view gt, std::string_view pred) {
    auto g = split_tokens(gt);
    auto p = split_tokens(pred);
    return static_cast<double>(edit_distance(g, p)) /
           static_cast<double>(std::max<std::size_t>(1, g.size()));
}

double f_measure(double p, double r) {
    return (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
}

namespace {

long count_text_region_words(const DocumentAnnotation& doc) {
    std::unordered_set<std::string> text_regions;
    for (const auto& r : doc.regions)
        if (is_text_class(r.cls)) text_regions.insert(r.id);
    long n = 0;
    for (const auto& w : doc.words)
        if (text_regions.count(w.region_id)) ++n;
    return n;
}

}  // namespace

WordLevelScore word_level_scores(const MatchResult& match, const DocumentAnnotation& gt,
                                 const DocumentAnnotation& pred) {
    std::unordered_map<std::string, const WordInstance*> gt_words, pred_words;
    for (const auto& w : gt.words) gt_words.emplace(w.id, &w);
    for (const auto& w : pred.words) pred_words.emplace(w.id, &w);

    long tp = 0;
    for (const auto& [region_id, alignment] : match.per_region_alignments) {
        for (const auto& pair : alignment.pairs) {
            const auto* g = gt_words.at(pair.gt_word_id);
            const auto* p = pred_words.at(pair.pred_word_id);
            if (nfc(g->text) == nfc(p->text)) ++tp;
        }
    }

    WordLevelScore s;
    s.tp = tp;
    s.fp = count_text_region_words(pred) - tp;
    s.fn = count_text_region_words(gt) - tp;
    s.precision = (s.tp + s.fp) > 0 ? static_cast<double>(s.tp) / (s.tp + s.fp) : 0.0;
    s.recall = (s.tp + s.fn) > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
    s.f = f_measure(s.precision, s.recall);
    return s;
}

TextLevelScore text_level_scores(const MatchResult& match, const DocumentAnnotation& gt,
                                 const DocumentAnnotation& pred) {
    std::unordered_map<std::string, const WordInstance*> pred_words;
    for (const auto& w : pred.words) pred_words.emplace(w.id, &w);

    bool any_text_region = false;
    double cer_num = 0.0, char_total = 0.0;
    double wer_num = 0.0, word_total = 0.0;

    for (const auto& r : gt.regions) {
        if (!is_text_class(r.cls)) continue;
        any_text_region = true;

        std::string gt_str = region_text(gt, r.id);
        std::string pred_str;  // unmatched regions score as fully deleted
        auto it = match.pooled_word_ids.find(r.id);
        if (it != match.pooled_word_ids.end()) {
            std::vector<const WordInstance*> pool;
            pool.reserve(it->second.size());
            for (const auto& id : it->second) pool.push_back(pred_words.at(id));
            pred_str = ordered_text(pool, pred);
        }

        double chars = static_cast<double>(char_count(gt_str));
        double tokens = static_cast<double>(split_tokens(gt_str).size());
        cer_num += chars * cer(gt_str, pred_str);
        char_total += chars;
        wer_num += tokens * wer(gt_str, pred_str);
        word_total += tokens;
    }

    if (!any_text_region)
        throw EmptyDocumentError("document \"" + gt.image_id + "\" has no text region");

    TextLevelScore s;
    s.char_weight = char_total;
    s.word_weight = word_total;
    s.cer = char_total > 0 ? cer_num / char_total : 0.0;
    s.wer = word_total > 0 ? wer_num / word_total : 0.0;
    return s;
}

DocumentScore evaluate_pair(const DocumentAnnotation& gt, const DocumentAnnotation& pred) {
    MatchResult match = match_documents(gt, pred);
    DocumentScore score;
    score.image_id = gt.image_id;
    score.domain = gt.domain;
    score.word_level = word_level_scores(match, gt, pred);
    score.text_level = text_level_scores(match, gt, pred);
    return score;
}

}  // namespace docrebench
