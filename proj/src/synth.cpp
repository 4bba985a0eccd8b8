#include "docrebench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "docrebench/errors.hpp"
#include "docrebench/geometry.hpp"
#include "docrebench/matching.hpp"
#include "docrebench/metrics.hpp"
#include "docrebench/reconstruct.hpp"
#include "docrebench/unicode.hpp"

namespace docrebench {

using nlohmann::json;

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::next_int(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<std::int64_t>(next() %
                                          static_cast<std::uint64_t>(hi - lo + 1));
}

bool Rng::bernoulli(double p) {
    return next_double() < p;
}

long Rng::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    double limit = std::exp(-lambda);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= next_double();
    } while (p > limit);
    return k - 1;
}

namespace {

const char* kDomains[] = {
    "Book",          "Book Cover",        "Government Document",
    "Magazine",      "Multi Column Book", "New Newspaper",
    "Old Newspaper", "Property Document", "Single Column Book",
};

std::vector<std::string> default_vocabulary() {
    std::vector<std::string> v = {
        "lorem", "ipsum",  "dolor", "sit",    "amet",  "consectetur",
        "elit",  "tempor", "magna", "labore", "23",    "407",
    };
    // Bengali tokens; several use decomposed vowel signs so normalization
    // paths get exercised (09C7+09BE composes to 09CB, 09C7+09D7 to 09CC,
    // while 09A1+09BC stays decomposed as a composition exclusion).
    const char32_t* bn[] = {
        U"আম", U"দেশ", U"বাংলা",
        U"লোক", U"শৌ", U"ড়াল",
        U"কথা", U"বই",
    };
    for (const char32_t* t : bn) v.push_back(encode_utf8(t));
    return v;
}

std::vector<Point> rect_polygon(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

double rect_iou(const BBox& a, const BBox& b) {
    return bbox_iou(a, b);
}

// Region/line/words strings assembled independently of the reconstruct
// module: bucket words per line, sort buckets vertically, words horizontally.
std::string bucket_text(const DocumentAnnotation& doc,
                        const std::vector<const WordInstance*>& words) {
    struct Bucket {
        double y = 0, x = 0;
        std::vector<const WordInstance*> ws;
    };
    std::vector<Bucket> buckets;
    std::unordered_map<std::string, std::size_t> index;
    Bucket trailing;

    for (const auto* w : words) {
        const LineInstance* line = w->line_id ? doc.find_line(*w->line_id) : nullptr;
        if (!line) {
            trailing.ws.push_back(w);
            continue;
        }
        auto [it, inserted] = index.try_emplace(line->id, buckets.size());
        if (inserted) buckets.push_back({line->bbox.y_min, line->bbox.x_min, {}});
        buckets[it->second].ws.push_back(w);
    }
    std::stable_sort(buckets.begin(), buckets.end(), [](const Bucket& a, const Bucket& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (!trailing.ws.empty()) buckets.push_back(trailing);

    std::string out;
    bool first = true;
    for (auto& b : buckets) {
        std::stable_sort(b.ws.begin(), b.ws.end(),
                         [](const WordInstance* a, const WordInstance* c) {
                             BBox ba = bbox_of(a->polygon), bc = bbox_of(c->polygon);
                             if (ba.x_min != bc.x_min) return ba.x_min < bc.x_min;
                             return ba.y_min < bc.y_min;
                         });
        if (b.ws.empty()) continue;
        if (!first) out += '\n';
        first = false;
        for (std::size_t i = 0; i < b.ws.size(); ++i) {
            if (i) out += ' ';
            out += b.ws[i]->text;
        }
    }
    return out;
}

// Plain full-matrix DP, kept separate from the metrics implementation.
std::size_t dp_distance(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    return d[a.size()][b.size()];
}

std::size_t dp_distance_tokens(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    return d[a.size()][b.size()];
}

std::string two_digit(int v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

}  // namespace

DocumentAnnotation generate_document(const SynthSpec& spec) {
    if (spec.regions < 1) throw SpecError("synth.regions: must be >= 1");
    if (spec.lines_per_region_min < 1 ||
        spec.lines_per_region_max < spec.lines_per_region_min)
        throw SpecError("synth.lines_per_region: invalid range");
    if (spec.words_per_line_min < 1 || spec.words_per_line_max < spec.words_per_line_min)
        throw SpecError("synth.words_per_line: invalid range");
    if (spec.image_regions < 0 || spec.table_regions < 0)
        throw SpecError("synth.image_regions/table_regions: must be >= 0");
    if (!(spec.page_width > 0) || !(spec.page_height > 0))
        throw SpecError("synth.page: dimensions must be positive");

    Rng rng(spec.seed ^ 0xD0C5EEDULL);
    std::vector<std::string> vocab =
        spec.vocabulary.empty() ? default_vocabulary() : spec.vocabulary;
    for (auto& t : vocab) {
        if (t.empty()) throw SpecError("synth.vocabulary: empty token");
    }

    DocumentAnnotation doc;
    doc.image_id =
        spec.image_id.empty() ? "synth_" + std::to_string(spec.seed) : spec.image_id;
    doc.domain = spec.domain.empty() ? kDomains[spec.seed % 9] : spec.domain;
    doc.width = spec.page_width;
    doc.height = spec.page_height;

    const int total = spec.regions + spec.image_regions + spec.table_regions;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total))));
    const int rows = (total + cols - 1) / cols;
    const double margin_x = 0.02 * spec.page_width;
    const double margin_y = 0.02 * spec.page_height;
    const double cell_w = (spec.page_width - 2 * margin_x) / cols;
    const double cell_h = (spec.page_height - 2 * margin_y) / rows;

    for (int r = 0; r < total; ++r) {
        const int gx = r % cols, gy = r / cols;
        const double rx = margin_x + gx * cell_w + 0.06 * cell_w;
        const double ry = margin_y + gy * cell_h + 0.06 * cell_h;
        const double rw = 0.88 * cell_w;
        const double rh = 0.88 * cell_h;
        if (rw < 16 || rh < 16)
            throw LayoutOverflowError("region cell below minimum size");

        std::string rid = "r" + two_digit(r);
        LayoutRegion region;
        region.id = rid;
        region.polygon = rect_polygon(rx, ry, rx + rw, ry + rh);

        if (r >= spec.regions) {
            region.cls = (r < spec.regions + spec.image_regions) ? RegionClass::image
                                                                 : RegionClass::table;
            doc.regions.push_back(std::move(region));
            continue;
        }
        region.cls = (r % 2 == 0) ? RegionClass::paragraph : RegionClass::text_box;
        doc.regions.push_back(std::move(region));

        const int n_lines = static_cast<int>(
            rng.next_int(spec.lines_per_region_min, spec.lines_per_region_max));
        // One spare bottom slot stays empty; perturbations place spurious
        // words there without disturbing real word boxes.
        const double slot_h = rh / (n_lines + 1);
        if (slot_h < 8) throw LayoutOverflowError("line slot below minimum height");

        for (int li = 0; li < n_lines; ++li) {
            const double sy = ry + li * slot_h;
            std::string lid = "l" + two_digit(r) + "_" + two_digit(li);
            LineInstance line;
            line.id = lid;
            line.region_id = rid;
            line.bbox = {rx, sy, rx + rw, sy + slot_h};
            doc.lines.push_back(line);

            const int n_words = static_cast<int>(
                rng.next_int(spec.words_per_line_min, spec.words_per_line_max));
            const double word_cell = rw / n_words;
            const double ww = 0.8 * word_cell;
            const double wh = 0.7 * slot_h;
            if (ww < 4 || wh < 4)
                throw LayoutOverflowError("word box below minimum size");
            for (int wi = 0; wi < n_words; ++wi) {
                const double wx = rx + wi * word_cell + 0.1 * word_cell;
                const double wy = sy + 0.15 * slot_h;
                WordInstance word;
                word.id = "w" + two_digit(r) + "_" + two_digit(li) + "_" + two_digit(wi);
                word.region_id = rid;
                word.line_id = lid;
                word.polygon = rect_polygon(wx, wy, wx + ww, wy + wh);
                word.text = nfc(vocab[rng.next_int(0, static_cast<std::int64_t>(
                                                          vocab.size() - 1))]);
                doc.words.push_back(std::move(word));
            }
        }
    }
    return doc;
}

std::pair<DocumentAnnotation, ExpectedOutcome> perturb(const DocumentAnnotation& gt,
                                                       const PerturbationSpec& spec) {
    if (spec.p_drop < 0 || spec.p_drop > 1 || spec.p_char_sub < 0 || spec.p_char_sub > 1 ||
        spec.region_split_prob < 0 || spec.region_split_prob > 1)
        throw SpecError("perturb: probabilities must lie in [0,1]");
    if (spec.p_spurious < 0) throw SpecError("perturb.p_spurious: must be >= 0");
    if (spec.box_jitter < 0 || spec.box_jitter >= 0.5)
        throw SpecError("perturb.box_jitter: must lie in [0, 0.5)");

    // Independent sub-streams: the split decisions must not shift the word
    // perturbation sequence, so split and unsplit controls with one seed get
    // identical drops, substitutions and jitter.
    Rng rng_split(spec.seed ^ 0x51C0FFEEULL);
    Rng rng_word(spec.seed ^ 0x0DD0B135ULL);
    Rng rng_jitter(spec.seed ^ 0x7EA90211ULL);
    Rng rng_spurious(spec.seed ^ 0x3D5A11EDULL);

    // Word geometry cache plus baseline sanity: perturbation bookkeeping
    // assumes distinct gt words never overlap above the matching threshold.
    std::vector<const WordInstance*> gt_words;
    std::vector<BBox> gt_word_boxes;
    for (const auto& w : gt.words) {
        gt_words.push_back(&w);
        gt_word_boxes.push_back(bbox_of(w.polygon));
    }
    for (std::size_t i = 0; i < gt_words.size(); ++i) {
        for (std::size_t j = i + 1; j < gt_words.size(); ++j) {
            if (rect_iou(gt_word_boxes[i], gt_word_boxes[j]) <= 0.5) continue;
            Polygon a(gt_words[i]->polygon), b(gt_words[j]->polygon);
            if (polygon_iou(a, b) > 0.5)
                throw SpecError("perturb: gt words " + gt_words[i]->id + " and " +
                                gt_words[j]->id + " overlap above threshold");
        }
    }

    DocumentAnnotation pred;
    pred.image_id = gt.image_id;
    pred.domain = gt.domain;
    pred.width = gt.width;
    pred.height = gt.height;

    ExpectedOutcome outcome;
    const std::u32string subs = U"QXZJKVWY";

    std::vector<LayoutRegion> gt_text_regions;
    for (const auto& r : gt.regions)
        if (is_text_class(r.cls)) gt_text_regions.push_back(r);
    for (std::size_t i = 0; i < gt_text_regions.size(); ++i) {
        for (std::size_t j = i + 1; j < gt_text_regions.size(); ++j) {
            Polygon a(gt_text_regions[i].polygon), b(gt_text_regions[j].polygon);
            if (polygon_iou(a, b) > 0.5)
                throw SpecError("perturb: gt regions " + gt_text_regions[i].id + " and " +
                                gt_text_regions[j].id + " overlap above threshold");
        }
    }

    // Region split decisions first: geometry of all halves is needed before
    // verifying that each half's best partner stays its own region.
    struct PredRegionPlan {
        std::string gt_id;
        std::vector<LayoutRegion> emitted;  // one, or two overlapping halves
    };
    std::vector<PredRegionPlan> plans;
    for (const auto& r : gt_text_regions) {
        PredRegionPlan plan;
        plan.gt_id = r.id;
        bool split = rng_split.bernoulli(spec.region_split_prob);
        if (split) {
            BBox b = bbox_of(r.polygon);
            LayoutRegion a_half{"p_" + r.id + "_a", r.cls,
                                rect_polygon(b.x_min, b.y_min,
                                             b.x_min + 0.76 * b.width(), b.y_max)};
            LayoutRegion b_half{"p_" + r.id + "_b", r.cls,
                                rect_polygon(b.x_min + 0.24 * b.width(), b.y_min,
                                             b.x_max, b.y_max)};
            Polygon gt_poly(r.polygon);
            bool ok = polygon_iou(Polygon(a_half.polygon), gt_poly) > 0.5 + 1e-9 &&
                      polygon_iou(Polygon(b_half.polygon), gt_poly) > 0.5 + 1e-9;
            for (const auto& other : gt_text_regions) {
                if (!ok) break;
                if (other.id == r.id) continue;
                Polygon op(other.polygon);
                if (polygon_iou(Polygon(a_half.polygon), op) >= 0.5 - 1e-9 ||
                    polygon_iou(Polygon(b_half.polygon), op) >= 0.5 - 1e-9)
                    ok = false;
            }
            if (ok) {
                plan.emitted = {a_half, b_half};
            } else {
                split = false;  // geometry refuses; fall back to a faithful copy
            }
        }
        if (!split) plan.emitted = {LayoutRegion{"p_" + r.id, r.cls, r.polygon}};
        plans.push_back(std::move(plan));
    }

    std::unordered_map<std::string, const PredRegionPlan*> plan_by_gt;
    for (const auto& p : plans) plan_by_gt.emplace(p.gt_id, &p);

    for (const auto& plan : plans)
        for (const auto& r : plan.emitted) pred.regions.push_back(r);
    for (const auto& r : gt.regions)
        if (!is_text_class(r.cls))
            pred.regions.push_back({"p_" + r.id, r.cls, r.polygon});

    // Lines: copied one-to-one; split regions park their lines in the first half.
    std::unordered_map<std::string, std::string> pred_line_of;
    for (const auto& l : gt.lines) {
        auto it = plan_by_gt.find(l.region_id);
        if (it == plan_by_gt.end()) continue;
        LineInstance pl;
        pl.id = "pl_" + l.id;
        pl.region_id = it->second->emitted.front().id;
        pl.bbox = l.bbox;
        pred.lines.push_back(pl);
        pred_line_of.emplace(l.id, pl.id);
    }

    const auto pick_half = [](const PredRegionPlan& plan, const BBox& box) {
        if (plan.emitted.size() == 1) return plan.emitted.front().id;
        BBox a = bbox_of(plan.emitted.front().polygon);
        double cx = 0.5 * (box.x_min + box.x_max);
        return cx <= a.x_max ? plan.emitted.front().id : plan.emitted.back().id;
    };

    // Survivor words, then spurious insertions per region.
    std::unordered_map<std::string, std::vector<const WordInstance*>> gt_words_by_region;
    for (const auto& w : gt.words) gt_words_by_region[w.region_id].push_back(&w);

    struct PerWord {
        const WordInstance* gt = nullptr;
        bool dropped = false;
        bool substituted = false;
    };
    std::vector<PerWord> ledger;

    for (const auto& region : gt_text_regions) {
        const auto& plan = *plan_by_gt.at(region.id);
        for (const auto* w : gt_words_by_region[region.id]) {
            PerWord entry;
            entry.gt = w;
            if (rng_word.bernoulli(spec.p_drop)) {
                entry.dropped = true;
                ++outcome.dropped;
                ledger.push_back(entry);
                continue;
            }

            // Character substitutions from an alphabet disjoint with any
            // sane vocabulary; mismatch is still recorded from the realized
            // NFC forms rather than assumed.
            std::u32string text = decode_utf8(w->text);
            for (auto& ch : text) {
                if (rng_word.bernoulli(spec.p_char_sub))
                    ch = subs[rng_word.next_int(
                        0, static_cast<std::int64_t>(subs.size() - 1))];
            }
            std::string new_text = nfc(encode_utf8(text));
            if (new_text != w->text) {
                entry.substituted = true;
                ++outcome.substituted;
            }

            // Sub-threshold jitter, constructively verified: the moved box
            // keeps IOU > 0.5 with its own word and stays below 0.5 against
            // every other word.
            std::vector<Point> poly = w->polygon;
            if (spec.box_jitter > 0) {
                BBox wb = bbox_of(w->polygon);
                for (int attempt = 0; attempt < 50; ++attempt) {
                    double dx =
                        (2 * rng_jitter.next_double() - 1) * spec.box_jitter * wb.width();
                    double dy = (2 * rng_jitter.next_double() - 1) * spec.box_jitter *
                                wb.height();
                    std::vector<Point> cand = w->polygon;
                    for (auto& p : cand) {
                        p.x = std::clamp(p.x + dx, 0.0, gt.width);
                        p.y = std::clamp(p.y + dy, 0.0, gt.height);
                    }
                    BBox cb = bbox_of(cand);
                    if (rect_iou(cb, wb) <= 0.5 + 1e-9) continue;
                    Polygon cand_poly(cand);
                    if (polygon_iou(cand_poly, Polygon(w->polygon)) <= 0.5 + 1e-9)
                        continue;
                    bool clear = true;
                    for (std::size_t oi = 0; oi < gt_words.size() && clear; ++oi) {
                        if (gt_words[oi] == w) continue;
                        if (rect_iou(cb, gt_word_boxes[oi]) < 0.25) continue;
                        if (polygon_iou(cand_poly, Polygon(gt_words[oi]->polygon)) >=
                            0.5 - 1e-9)
                            clear = false;
                    }
                    if (!clear) continue;
                    poly = cand;
                    break;
                }
            }

            WordInstance pw;
            pw.id = "pw_" + w->id;
            pw.region_id = pick_half(plan, bbox_of(poly));
            if (w->line_id) {
                auto lit = pred_line_of.find(*w->line_id);
                if (lit != pred_line_of.end()) pw.line_id = lit->second;
            }
            pw.polygon = std::move(poly);
            pw.text = new_text;
            pred.words.push_back(std::move(pw));
            ledger.push_back(entry);
        }

        // Spurious words: boxes chosen bbox-disjoint from every gt word, so
        // they can never align.
        long want = rng_spurious.poisson(spec.p_spurious);
        if (want > 0) {
            BBox rb = bbox_of(region.polygon);
            const double sw = std::max(4.0, 0.08 * rb.width());
            const double sh = std::max(4.0, 0.08 * rb.height());
            long placed = 0;
            const int grid = 12;
            for (int cy = grid - 1; cy >= 0 && placed < want; --cy) {
                for (int cx = 0; cx < grid && placed < want; ++cx) {
                    double x0 = rb.x_min + cx * (rb.width() / grid);
                    double y0 = rb.y_min + cy * (rb.height() / grid);
                    double x1 = std::min(x0 + sw, rb.x_max);
                    double y1 = std::min(y0 + sh, rb.y_max);
                    if (x1 - x0 < 2 || y1 - y0 < 2) continue;
                    BBox cand{x0, y0, x1, y1};
                    bool clear = true;
                    for (const auto& wb : gt_word_boxes) {
                        double ix = std::min(cand.x_max, wb.x_max) -
                                    std::max(cand.x_min, wb.x_min);
                        double iy = std::min(cand.y_max, wb.y_max) -
                                    std::max(cand.y_min, wb.y_min);
                        if (ix > 0 && iy > 0) {
                            clear = false;
                            break;
                        }
                    }
                    for (const auto& pw : pred.words) {
                        if (!clear) break;
                        BBox pb = bbox_of(pw.polygon);
                        double ix =
                            std::min(cand.x_max, pb.x_max) - std::max(cand.x_min, pb.x_min);
                        double iy =
                            std::min(cand.y_max, pb.y_max) - std::max(cand.y_min, pb.y_min);
                        if (ix > 0 && iy > 0) clear = false;
                    }
                    if (!clear) continue;
                    WordInstance sp;
                    sp.id = "sw_" + region.id + "_" + std::to_string(placed);
                    sp.region_id = pick_half(plan, cand);
                    sp.polygon = rect_polygon(x0, y0, x1, y1);
                    sp.text = nfc(default_vocabulary()[rng_spurious.next_int(0, 19)]);
                    pred.words.push_back(std::move(sp));
                    ++placed;
                }
            }
            outcome.spurious += placed;  // realized count, not the sample
        }
    }

    // Bookkeeping: expected strings and scores.
    long gt_total = 0;
    for (const auto& region : gt_text_regions) {
        RegionOutcome ro;
        ro.gt_region_id = region.id;
        for (const auto& r : plan_by_gt.at(region.id)->emitted)
            ro.expected_pred_regions.push_back(r.id);
        std::sort(ro.expected_pred_regions.begin(), ro.expected_pred_regions.end());

        std::vector<const WordInstance*> gws;
        for (const auto* w : gt_words_by_region[region.id]) gws.push_back(w);
        gt_total += static_cast<long>(gws.size());
        ro.gt_text = bucket_text(gt, gws);

        std::vector<const WordInstance*> pws;
        std::set<std::string> emitted_ids;
        for (const auto& r : plan_by_gt.at(region.id)->emitted) emitted_ids.insert(r.id);
        for (const auto& w : pred.words)
            if (emitted_ids.count(w.region_id)) pws.push_back(&w);
        ro.pred_text = bucket_text(pred, pws);

        outcome.regions.push_back(std::move(ro));
    }

    long survivors_unchanged = 0;
    for (const auto& e : ledger)
        if (!e.dropped && !e.substituted) ++survivors_unchanged;
    outcome.tp = survivors_unchanged;
    if (survivors_unchanged + outcome.dropped + outcome.substituted != gt_total)
        throw Error("perturb: internal bookkeeping mismatch");
    outcome.fp = outcome.substituted + outcome.spurious;
    outcome.fn = outcome.dropped + outcome.substituted;
    outcome.precision =
        (outcome.tp + outcome.fp) > 0
            ? static_cast<double>(outcome.tp) / static_cast<double>(outcome.tp + outcome.fp)
            : 0.0;
    outcome.recall =
        (outcome.tp + outcome.fn) > 0
            ? static_cast<double>(outcome.tp) / static_cast<double>(outcome.tp + outcome.fn)
            : 0.0;
    outcome.f = (outcome.precision + outcome.recall) > 0
                    ? 2 * outcome.precision * outcome.recall /
                          (outcome.precision + outcome.recall)
                    : 0.0;

    double cer_num = 0, char_total = 0, wer_num = 0, word_total = 0;
    for (const auto& ro : outcome.regions) {
        std::u32string g = decode_utf8(ro.gt_text);
        std::u32string p = decode_utf8(ro.pred_text);
        double chars = static_cast<double>(g.size());
        double region_cer = static_cast<double>(dp_distance(g, p)) /
                            std::max(1.0, static_cast<double>(g.size()));
        auto gtok = split_tokens(ro.gt_text);
        auto ptok = split_tokens(ro.pred_text);
        double tokens = static_cast<double>(gtok.size());
        double region_wer = static_cast<double>(dp_distance_tokens(gtok, ptok)) /
                            std::max(1.0, static_cast<double>(gtok.size()));
        cer_num += chars * region_cer;
        char_total += chars;
        wer_num += tokens * region_wer;
        word_total += tokens;
    }
    outcome.cer = char_total > 0 ? cer_num / char_total : 0.0;
    outcome.wer = word_total > 0 ? wer_num / word_total : 0.0;

    return {std::move(pred), std::move(outcome)};
}

std::vector<std::string> oracle_check(const DocumentAnnotation& gt,
                                      const DocumentAnnotation& pred,
                                      const ExpectedOutcome& expected) {
    std::vector<std::string> issues;
    MatchResult match = match_documents(gt, pred);

    for (const auto& ro : expected.regions) {
        auto it = match.region_mapping.entries.find(ro.gt_region_id);
        std::vector<std::string> got;
        if (it != match.region_mapping.entries.end()) got = it->second;
        std::sort(got.begin(), got.end());
        if (got != ro.expected_pred_regions) {
            std::string msg = "region " + ro.gt_region_id + ": expected preds [";
            for (const auto& s : ro.expected_pred_regions) msg += s + " ";
            msg += "] got [";
            for (const auto& s : got) msg += s + " ";
            msg += "]";
            issues.push_back(msg);
        }
        std::string gt_str = region_text(gt, ro.gt_region_id);
        if (gt_str != ro.gt_text)
            issues.push_back("region " + ro.gt_region_id + ": gt text mismatch");
    }

    WordLevelScore wl = word_level_scores(match, gt, pred);
    if (wl.tp != expected.tp)
        issues.push_back("tp: expected " + std::to_string(expected.tp) + " got " +
                         std::to_string(wl.tp));
    if (wl.fp != expected.fp)
        issues.push_back("fp: expected " + std::to_string(expected.fp) + " got " +
                         std::to_string(wl.fp));
    if (wl.fn != expected.fn)
        issues.push_back("fn: expected " + std::to_string(expected.fn) + " got " +
                         std::to_string(wl.fn));
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
    if (!close(wl.precision, expected.precision))
        issues.push_back("precision: expected " + std::to_string(expected.precision) +
                         " got " + std::to_string(wl.precision));
    if (!close(wl.recall, expected.recall))
        issues.push_back("recall: expected " + std::to_string(expected.recall) + " got " +
                         std::to_string(wl.recall));
    if (!close(wl.f, expected.f))
        issues.push_back("f: expected " + std::to_string(expected.f) + " got " +
                         std::to_string(wl.f));

    TextLevelScore tl = text_level_scores(match, gt, pred);
    if (!close(tl.cer, expected.cer))
        issues.push_back("cer: expected " + std::to_string(expected.cer) + " got " +
                         std::to_string(tl.cer));
    if (!close(tl.wer, expected.wer))
        issues.push_back("wer: expected " + std::to_string(expected.wer) + " got " +
                         std::to_string(tl.wer));
    return issues;
}

std::string expected_to_json(const ExpectedOutcome& o) {
    json j;
    j["dropped"] = o.dropped;
    j["spurious"] = o.spurious;
    j["substituted"] = o.substituted;
    j["tp"] = o.tp;
    j["fp"] = o.fp;
    j["fn"] = o.fn;
    j["precision"] = o.precision;
    j["recall"] = o.recall;
    j["f"] = o.f;
    j["cer"] = o.cer;
    j["wer"] = o.wer;
    json regions = json::array();
    for (const auto& ro : o.regions) {
        json r;
        r["gt_region_id"] = ro.gt_region_id;
        r["expected_pred_regions"] = ro.expected_pred_regions;
        r["gt_text"] = ro.gt_text;
        r["pred_text"] = ro.pred_text;
        regions.push_back(std::move(r));
    }
    j["regions"] = std::move(regions);
    return j.dump(2) + "\n";
}

ExpectedOutcome expected_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed expected JSON: ") + e.what());
    }
    ExpectedOutcome o;
    o.dropped = j.at("dropped").get<long>();
    o.spurious = j.at("spurious").get<long>();
    o.substituted = j.at("substituted").get<long>();
    o.tp = j.at("tp").get<long>();
    o.fp = j.at("fp").get<long>();
    o.fn = j.at("fn").get<long>();
    o.precision = j.at("precision").get<double>();
    o.recall = j.at("recall").get<double>();
    o.f = j.at("f").get<double>();
    o.cer = j.at("cer").get<double>();
    o.wer = j.at("wer").get<double>();
    for (const auto& r : j.at("regions")) {
        RegionOutcome ro;
        ro.gt_region_id = r.at("gt_region_id").get<std::string>();
        ro.expected_pred_regions =
            r.at("expected_pred_regions").get<std::vector<std::string>>();
        ro.gt_text = r.at("gt_text").get<std::string>();
        ro.pred_text = r.at("pred_text").get<std::string>();
        o.regions.push_back(std::move(ro));
    }
    return o;
}

}  // namespace docrebench
