#include "docrebench/matching.hpp"

#include <algorithm>
#include <unordered_map>

#include "docrebench/geometry.hpp"

namespace docrebench {

RegionMapping match_regions(const std::vector<LayoutRegion>& gt,
                            const std::vector<LayoutRegion>& pred) {
    RegionMapping mapping;

    std::vector<Polygon> gt_polys;
    gt_polys.reserve(gt.size());
    for (const auto& r : gt) gt_polys.emplace_back(r.polygon);

    std::vector<bool> gt_hit(gt.size(), false);
    for (const auto& p : pred) {
        Polygon pp(p.polygon);
        double best = 0.0;
        std::size_t best_i = 0;
        bool found = false;
        for (std::size_t i = 0; i < gt.size(); ++i) {
            double iou = polygon_iou(gt_polys[i], pp);
            if (iou > best) {  // strict: ties keep the earliest gt region
                best = iou;
                best_i = i;
                found = true;
            }
        }
        if (found && best > 0.5) {
            mapping.entries[gt[best_i].id].push_back(p.id);
            gt_hit[best_i] = true;
        } else {
            mapping.unmatched_pred.push_back(p.id);
        }
    }
    for (std::size_t i = 0; i < gt.size(); ++i)
        if (!gt_hit[i]) mapping.unmatched_gt.push_back(gt[i].id);

    for (auto& [gt_id, preds] : mapping.entries) std::sort(preds.begin(), preds.end());
    return mapping;
}

std::map<std::string, std::vector<std::string>> pool_predicted_words(
    const RegionMapping& mapping, const DocumentAnnotation& pred_doc) {
    // Word ids per predicted region, in document order.
    std::unordered_map<std::string, std::vector<std::string>> by_region;
    for (const auto& w : pred_doc.words) by_region[w.region_id].push_back(w.id);

    std::map<std::string, std::vector<std::string>> pools;
    for (const auto& [gt_id, pred_ids] : mapping.entries) {
        auto& pool = pools[gt_id];
        for (const auto& pid : pred_ids) {  // pred_ids already sorted
            auto it = by_region.find(pid);
            if (it == by_region.end()) continue;
            pool.insert(pool.end(), it->second.begin(), it->second.end());
        }
    }
    return pools;
}

WordAlignment align_words(const std::vector<const WordInstance*>& gt_words,
                          const std::vector<const WordInstance*>& pool) {
    struct Candidate {
        double iou;
        std::size_t gi;
        std::size_t pi;
    };
    std::vector<Candidate> cands;

    std::vector<Polygon> gt_polys;
    std::vector<BBox> gt_boxes;
    gt_polys.reserve(gt_words.size());
    for (const auto* w : gt_words) {
        gt_polys.emplace_back(w->polygon);
        gt_boxes.push_back(bbox_of(w->polygon));
    }

    for (std::size_t pi = 0; pi < pool.size(); ++pi) {
        Polygon pp(pool[pi]->polygon);
        BBox pb = bbox_of(pool[pi]->polygon);
        for (std::size_t gi = 0; gi < gt_words.size(); ++gi) {
            // bbox prefilter: polygon IOU never exceeds bbox overlap ratio
            if (gt_boxes[gi].x_max < pb.x_min || pb.x_max < gt_boxes[gi].x_min ||
                gt_boxes[gi].y_max < pb.y_min || pb.y_max < gt_boxes[gi].y_min)
                continue;
            double iou = polygon_iou(gt_polys[gi], pp);
            if (iou > 0.5) cands.push_back({iou, gi, pi});
        }
    }

    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.gi != b.gi) return a.gi < b.gi;
        return a.pi < b.pi;
    });

    WordAlignment out;
    std::vector<bool> gt_used(gt_words.size(), false), pool_used(pool.size(), false);
    for (const auto& c : cands) {
        if (gt_used[c.gi] || pool_used[c.pi]) continue;
        gt_used[c.gi] = true;
        pool_used[c.pi] = true;
        out.pairs.push_back({gt_words[c.gi]->id, pool[c.pi]->id, c.iou});
    }
    for (std::size_t i = 0; i < gt_words.size(); ++i)
        if (!gt_used[i]) out.unmatched_gt_words.push_back(gt_words[i]->id);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!pool_used[i]) out.unmatched_pred_words.push_back(pool[i]->id);
    return out;
}

MatchResult match_documents(const DocumentAnnotation& gt, const DocumentAnnotation& pred) {
    std::vector<LayoutRegion> gt_text, pred_text;
    for (const auto& r : gt.regions)
        if (is_text_class(r.cls)) gt_text.push_back(r);
    for (const auto& r : pred.regions)
        if (is_text_class(r.cls)) pred_text.push_back(r);

    MatchResult result;
    result.region_mapping = match_regions(gt_text, pred_text);
    result.pooled_word_ids = pool_predicted_words(result.region_mapping, pred);

    std::unordered_map<std::string, const WordInstance*> pred_words;
    for (const auto& w : pred.words) pred_words.emplace(w.id, &w);
    std::unordered_map<std::string, std::vector<const WordInstance*>> gt_words_by_region;
    for (const auto& w : gt.words) gt_words_by_region[w.region_id].push_back(&w);

    for (const auto& [gt_id, pool_ids] : result.pooled_word_ids) {
        std::vector<const WordInstance*> pool;
        pool.reserve(pool_ids.size());
        for (const auto& id : pool_ids) pool.push_back(pred_words.at(id));
        auto it = gt_words_by_region.find(gt_id);
        static const std::vector<const WordInstance*> kEmpty;
        const auto& gtw = it != gt_words_by_region.end() ? it->second : kEmpty;
        result.per_region_alignments[gt_id] = align_words(gtw, pool);
    }
    return result;
}

}  // namespace docrebench
