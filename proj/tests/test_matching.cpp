#include <doctest.h>

#include <set>

#include "docrebench/matching.hpp"
#include "oracles.hpp"

using namespace docrebench;

namespace {

std::vector<Point> rect(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

LayoutRegion region(const std::string& id, double x0, double y0, double x1, double y1,
                    RegionClass cls = RegionClass::paragraph) {
    return {id, cls, rect(x0, y0, x1, y1)};
}

WordInstance word(const std::string& id, const std::string& region_id, double x0,
                  double y0, double x1, double y1, const std::string& text = "t") {
    WordInstance w;
    w.id = id;
    w.region_id = region_id;
    w.polygon = rect(x0, y0, x1, y1);
    w.text = text;
    return w;
}

}  // namespace

TEST_CASE("identical regions map one to one") {
    auto mapping = match_regions({region("g0", 0, 0, 10, 10)},
                                 {region("p0", 0, 0, 10, 10)});
    REQUIRE(mapping.entries.count("g0") == 1);
    CHECK(mapping.entries.at("g0") == std::vector<std::string>{"p0"});
    CHECK(mapping.unmatched_gt.empty());
    CHECK(mapping.unmatched_pred.empty());
}

TEST_CASE("below-threshold predictions stay unmatched") {
    // overlap 4x10 of 10x10: IOU = 40/160 = 0.25
    auto mapping = match_regions({region("g0", 0, 0, 10, 10)},
                                 {region("p0", 6, 0, 16, 10)});
    CHECK(mapping.entries.empty());
    CHECK(mapping.unmatched_pred == std::vector<std::string>{"p0"});
    CHECK(mapping.unmatched_gt == std::vector<std::string>{"g0"});
}

TEST_CASE("exactly 0.5 is not enough (strict threshold)") {
    // pred is the left half: IOU = 50/100 = 0.5 exactly
    auto mapping = match_regions({region("g0", 0, 0, 10, 10)},
                                 {region("p0", 0, 0, 5, 10)});
    CHECK(mapping.entries.empty());
    CHECK(mapping.unmatched_pred == std::vector<std::string>{"p0"});
}

TEST_CASE("two overlapping halves both map to one region") {
    // Two disjoint halves cannot both clear IOU 0.5 against one region, so
    // split detections necessarily overlap: [0,0.6] and [0.45,1] hit IOU 0.6
    // and 0.55.
    std::vector<LayoutRegion> gt = {region("g0", 0, 0, 100, 100)};
    std::vector<LayoutRegion> pred = {region("pa", 0, 0, 60, 100),
                                      region("pb", 45, 0, 100, 100)};
    auto mapping = match_regions(gt, pred);
    REQUIRE(mapping.entries.count("g0") == 1);
    CHECK(mapping.entries.at("g0") == std::vector<std::string>{"pa", "pb"});
    CHECK(mapping.unmatched_pred.empty());

    auto brute = oracle::brute_force_mapping(gt, pred);
    CHECK(brute.entries.at("g0") == mapping.entries.at("g0"));
}

TEST_CASE("random fixtures agree with exhaustive mapping") {
    oracle::TestRng rng(99);
    for (int it = 0; it < 300; ++it) {
        std::vector<LayoutRegion> gt, pred;
        int n_gt = static_cast<int>(rng.uniform_int(1, 5));
        int n_pred = static_cast<int>(rng.uniform_int(1, 5));
        for (int i = 0; i < n_gt; ++i) {
            double x = rng.uniform(0, 300), y = rng.uniform(0, 300);
            gt.push_back(region("g" + std::to_string(i), x, y, x + rng.uniform(20, 120),
                                y + rng.uniform(20, 120)));
        }
        for (int i = 0; i < n_pred; ++i) {
            double x = rng.uniform(0, 300), y = rng.uniform(0, 300);
            pred.push_back(region("p" + std::to_string(i), x, y, x + rng.uniform(20, 120),
                                  y + rng.uniform(20, 120)));
        }
        auto got = match_regions(gt, pred);
        auto brute = oracle::brute_force_mapping(gt, pred);
        CHECK(got.entries == brute.entries);
        CHECK(got.unmatched_gt == brute.unmatched_gt);
        CHECK(got.unmatched_pred == brute.unmatched_pred);
    }
}

TEST_CASE("pooling merges in (pred region id, word order)") {
    DocumentAnnotation pred;
    pred.image_id = "p";
    pred.width = pred.height = 1000;
    pred.regions = {region("pa", 0, 0, 100, 100), region("pb", 200, 0, 300, 100),
                    region("pu", 500, 0, 600, 100)};
    pred.words = {word("w1", "pa", 0, 0, 10, 10),   word("w2", "pb", 200, 0, 210, 10),
                  word("w3", "pa", 20, 0, 30, 10),  word("w4", "pb", 220, 0, 230, 10),
                  word("w5", "pa", 40, 0, 50, 10),  word("w6", "pu", 500, 0, 510, 10)};

    RegionMapping mapping;
    mapping.entries["g0"] = {"pa", "pb"};
    mapping.unmatched_pred = {"pu"};

    auto pools = pool_predicted_words(mapping, pred);
    REQUIRE(pools.count("g0") == 1);
    CHECK(pools.at("g0") ==
          std::vector<std::string>{"w1", "w3", "w5", "w2", "w4"});  // 3 + 2 words

    SUBCASE("unmatched predicted words never appear") {
        for (const auto& [k, pool] : pools)
            for (const auto& id : pool) CHECK(id != "w6");
    }
    SUBCASE("empty mapping -> empty pools") {
        CHECK(pool_predicted_words(RegionMapping{}, pred).empty());
    }
}

TEST_CASE("align_words pairs identical boxes") {
    std::vector<WordInstance> gt = {word("g0", "r", 0, 0, 10, 10),
                                    word("g1", "r", 20, 0, 30, 10)};
    std::vector<WordInstance> pr = {word("p0", "r", 0, 0, 10, 10),
                                    word("p1", "r", 20, 0, 30, 10)};
    std::vector<const WordInstance*> gtp{&gt[0], &gt[1]}, prp{&pr[0], &pr[1]};
    auto a = align_words(gtp, prp);
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0].iou == 1.0);
    CHECK(a.unmatched_gt_words.empty());
    CHECK(a.unmatched_pred_words.empty());
}

TEST_CASE("straddling prediction claims only its best word") {
    // pred covers gt0 with IOU 0.6 and gt1 with IOU well below threshold
    std::vector<WordInstance> gt = {word("g0", "r", 0, 0, 10, 10),
                                    word("g1", "r", 12, 0, 22, 10)};
    std::vector<WordInstance> pr = {word("p0", "r", 0, 0, 12.5, 10)};
    std::vector<const WordInstance*> gtp{&gt[0], &gt[1]}, prp{&pr[0]};
    auto a = align_words(gtp, prp);
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0].gt_word_id == "g0");
    CHECK(a.unmatched_gt_words == std::vector<std::string>{"g1"});

    // exhaustive assignment over the candidate graph agrees
    std::vector<std::pair<std::size_t, std::size_t>> cands;
    for (std::size_t gi = 0; gi < gtp.size(); ++gi)
        for (std::size_t pi = 0; pi < prp.size(); ++pi)
            if (polygon_iou(Polygon(gtp[gi]->polygon), Polygon(prp[pi]->polygon)) > 0.5)
                cands.push_back({gi, pi});
    CHECK(oracle::max_matching_cardinality(2, 1, cands) == a.pairs.size());
}

TEST_CASE("zero-overlap pool leaves everything unmatched") {
    std::vector<WordInstance> gt = {word("g0", "r", 0, 0, 10, 10)};
    std::vector<WordInstance> pr = {word("p0", "r", 500, 500, 510, 510)};
    std::vector<const WordInstance*> gtp{&gt[0]}, prp{&pr[0]};
    auto a = align_words(gtp, prp);
    CHECK(a.pairs.empty());
    CHECK(a.unmatched_gt_words.size() == 1);
    CHECK(a.unmatched_pred_words.size() == 1);
}

TEST_CASE("equal-IOU ties break by lowest gt index") {
    // two geometrically identical gt words, one prediction
    std::vector<WordInstance> gt = {word("g0", "r", 0, 0, 10, 10),
                                    word("g1", "r", 0, 0, 10, 10)};
    std::vector<WordInstance> pr = {word("p0", "r", 0, 0, 10, 10)};
    std::vector<const WordInstance*> gtp{&gt[0], &gt[1]}, prp{&pr[0]};
    auto a = align_words(gtp, prp);
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0].gt_word_id == "g0");
    CHECK(a.unmatched_gt_words == std::vector<std::string>{"g1"});
}

TEST_CASE("greedy alignment is injective and never beats brute force") {
    oracle::TestRng rng(123);
    for (int it = 0; it < 300; ++it) {
        std::vector<WordInstance> gt, pr;
        int n_gt = static_cast<int>(rng.uniform_int(1, 6));
        int n_pred = static_cast<int>(rng.uniform_int(1, 6));
        for (int i = 0; i < n_gt; ++i) {
            double x = rng.uniform(0, 80), y = rng.uniform(0, 80);
            gt.push_back(word("g" + std::to_string(i), "r", x, y, x + rng.uniform(8, 30),
                              y + rng.uniform(8, 30)));
        }
        for (int i = 0; i < n_pred; ++i) {
            double x = rng.uniform(0, 80), y = rng.uniform(0, 80);
            pr.push_back(word("p" + std::to_string(i), "r", x, y, x + rng.uniform(8, 30),
                              y + rng.uniform(8, 30)));
        }
        std::vector<const WordInstance*> gtp, prp;
        for (auto& w : gt) gtp.push_back(&w);
        for (auto& w : pr) prp.push_back(&w);

        auto a = align_words(gtp, prp);
        std::set<std::string> gt_seen, pred_seen;
        for (const auto& p : a.pairs) {
            CHECK(p.iou > 0.5);
            CHECK(gt_seen.insert(p.gt_word_id).second);
            CHECK(pred_seen.insert(p.pred_word_id).second);
        }
        CHECK(a.pairs.size() + a.unmatched_gt_words.size() == gt.size());
        CHECK(a.pairs.size() + a.unmatched_pred_words.size() == pr.size());

        std::vector<std::pair<std::size_t, std::size_t>> cands;
        for (std::size_t gi = 0; gi < gtp.size(); ++gi)
            for (std::size_t pi = 0; pi < prp.size(); ++pi)
                if (polygon_iou(Polygon(gtp[gi]->polygon), Polygon(prp[pi]->polygon)) >
                    0.5)
                    cands.push_back({gi, pi});
        CHECK(a.pairs.size() <= oracle::max_matching_cardinality(gt.size(), pr.size(),
                                                                 cands));
    }
}

TEST_CASE("match_documents only considers text regions") {
    DocumentAnnotation gt, pred;
    gt.image_id = pred.image_id = "d";
    gt.width = gt.height = pred.width = pred.height = 1000;
    gt.regions = {region("g0", 0, 0, 100, 100),
                  region("gimg", 200, 200, 300, 300, RegionClass::image)};
    pred.regions = {region("p0", 0, 0, 100, 100),
                    region("pimg", 200, 200, 300, 300, RegionClass::image)};
    auto match = match_documents(gt, pred);
    CHECK(match.region_mapping.entries.size() == 1);
    CHECK(match.region_mapping.entries.count("g0") == 1);
    CHECK(match.region_mapping.unmatched_pred.empty());  // image regions excluded
}
