#include <doctest.h>

#include <string>

#include "docrebench/errors.hpp"
#include "docrebench/metrics.hpp"
#include "docrebench/unicode.hpp"
#include "oracles.hpp"

using namespace docrebench;

namespace {

std::vector<Point> rect(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

WordInstance mkword(const std::string& id, const std::string& region_id, double x0,
                    double y0, double x1, double y1, const std::string& text) {
    WordInstance w;
    w.id = id;
    w.region_id = region_id;
    w.polygon = rect(x0, y0, x1, y1);
    w.text = text;
    return w;
}

std::u32string rand_u32(oracle::TestRng& rng, int max_len, const std::u32string& alphabet) {
    std::u32string s;
    int len = static_cast<int>(rng.uniform_int(0, max_len));
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[rng.uniform_int(0, alphabet.size() - 1)]);
    return s;
}

}  // namespace

TEST_CASE("edit distance examples") {
    CHECK(edit_distance(std::u32string_view(U""), std::u32string_view(U"")) == 0);
    CHECK(edit_distance_utf8("abc", "abd") == 1);
    CHECK(edit_distance_utf8("kitten", "sitting") == 3);
    CHECK(edit_distance_utf8("", "tata") == 4);
    // cross-checked against the independent DP oracle
    CHECK(oracle::dp_edit_distance(U"kitten", U"sitting") == 3);
    CHECK(oracle::dp_edit_distance(U"abc", U"abd") == 1);
}

TEST_CASE("edit distance is a metric") {
    oracle::TestRng rng(3);
    const std::u32string alphabet = U"abcd";
    for (int it = 0; it < 400; ++it) {
        auto a = rand_u32(rng, 8, alphabet);
        auto b = rand_u32(rng, 8, alphabet);
        auto c = rand_u32(rng, 8, alphabet);
        std::size_t dab = edit_distance(a, b);
        CHECK(dab == edit_distance(b, a));
        CHECK((dab == 0) == (a == b));
        CHECK(dab <= edit_distance(a, c) + edit_distance(c, b));
        CHECK(dab <= std::max(a.size(), b.size()));
        CHECK(dab == oracle::dp_edit_distance(a, b));
    }
    // disjoint alphabets force the maximum
    CHECK(edit_distance(std::u32string(U"aaaa"), std::u32string(U"bbb")) == 4);
}

TEST_CASE("cer") {
    CHECK(cer("abc", "abc") == 0.0);
    CHECK(cer("ab", "abcd") == doctest::Approx(1.0));  // 2 insertions / 2 chars
    CHECK(cer("abc", "") == doctest::Approx(1.0));
    CHECK(cer("", "xy") == doctest::Approx(2.0));  // not clipped
    // unicode scalars, not bytes
    CHECK(cer("কো", "কো") == 0.0);
    CHECK(cer("কো", "ক") == doctest::Approx(0.5));
}

TEST_CASE("wer") {
    CHECK(wer("a b c", "a b c") == 0.0);
    CHECK(wer("a b c", "a x c") == doctest::Approx(1.0 / 3.0));
    CHECK(wer("a", "a b c") == doctest::Approx(2.0));  // > 1 is legal
    CHECK(wer("a b", "") == doctest::Approx(1.0));
}

TEST_CASE("f_measure") {
    CHECK(f_measure(1, 1) == 1.0);
    CHECK(f_measure(0, 0.5) == 0.0);
    CHECK(f_measure(0, 0) == 0.0);
    // harmonic mean of the reported averages differs from the reported
    // average F, which is a per-image mean
    CHECK(f_measure(0.60, 0.41) == doctest::Approx(0.487).epsilon(1e-3));
}

namespace {

// 10 gt words, 12 predicted, 8 geometrically aligned, 6 with matching text.
void build_wl_fixture(DocumentAnnotation& gt, DocumentAnnotation& pred) {
    gt = {};
    pred = {};
    gt.image_id = pred.image_id = "wl";
    gt.domain = pred.domain = "Book";
    gt.width = pred.width = 2000;
    gt.height = pred.height = 2000;
    gt.regions = {{"g0", RegionClass::paragraph, rect(0, 0, 1900, 200)}};
    pred.regions = {{"p0", RegionClass::paragraph, rect(0, 0, 1900, 200)}};
    for (int i = 0; i < 10; ++i) {
        double x = 10 + i * 150;
        gt.words.push_back(
            mkword("g" + std::to_string(i), "g0", x, 10, x + 100, 60, "w" + std::to_string(i)));
    }
    for (int i = 0; i < 8; ++i) {  // aligned copies; 2 of them transcribed wrong
        double x = 10 + i * 150;
        std::string text = i < 6 ? "w" + std::to_string(i) : "bad";
        pred.words.push_back(
            mkword("q" + std::to_string(i), "p0", x, 10, x + 100, 60, text));
    }
    for (int i = 0; i < 4; ++i) {  // spurious detections in empty space
        double x = 10 + i * 150;
        pred.words.push_back(
            mkword("s" + std::to_string(i), "p0", x, 120, x + 100, 170, "noise"));
    }
}

}  // namespace

TEST_CASE("word level scores: worked example") {
    DocumentAnnotation gt, pred;
    build_wl_fixture(gt, pred);
    auto match = match_documents(gt, pred);
    auto wl = word_level_scores(match, gt, pred);
    CHECK(wl.tp == 6);
    CHECK(wl.fp == 6);  // 12 predicted - 6
    CHECK(wl.fn == 4);  // 10 gt - 6
    CHECK(wl.precision == doctest::Approx(0.5));
    CHECK(wl.recall == doctest::Approx(0.6));
    CHECK(wl.f == doctest::Approx(6.0 / 11.0));
    // bookkeeping identity
    CHECK(wl.tp + wl.fn == 10);
    CHECK(wl.tp + wl.fp == 12);
}

TEST_CASE("word level scores: perfect and all-wrong transcriptions") {
    DocumentAnnotation gt, pred;
    build_wl_fixture(gt, pred);
    pred.words.resize(8);  // drop spurious
    for (int i = 0; i < 8; ++i) pred.words[i].text = gt.words[i].text;
    pred.words.push_back(mkword("q8", "p0", 10 + 8 * 150, 10, 10 + 8 * 150 + 100, 60,
                                gt.words[8].text));
    pred.words.push_back(mkword("q9", "p0", 10 + 9 * 150, 10, 10 + 9 * 150 + 100, 60,
                                gt.words[9].text));
    auto match = match_documents(gt, pred);
    auto wl = word_level_scores(match, gt, pred);
    CHECK(wl.precision == 1.0);
    CHECK(wl.recall == 1.0);
    CHECK(wl.f == 1.0);

    for (auto& w : pred.words) w.text = "zzz";  // every transcription wrong
    match = match_documents(gt, pred);
    wl = word_level_scores(match, gt, pred);
    CHECK(wl.tp == 0);
    CHECK(wl.precision == 0.0);
    CHECK(wl.recall == 0.0);
    CHECK(wl.f == 0.0);
}

TEST_CASE("text level scores: weighted by gt lengths") {
    DocumentAnnotation gt, pred;
    gt.image_id = pred.image_id = "tl";
    gt.width = pred.width = 5000;
    gt.height = pred.height = 5000;
    gt.regions = {{"r1", RegionClass::paragraph, rect(0, 0, 2000, 100)},
                  {"r2", RegionClass::paragraph, rect(0, 200, 2000, 300)}};
    pred.regions = {{"q1", RegionClass::paragraph, rect(0, 0, 2000, 100)},
                    {"q2", RegionClass::paragraph, rect(0, 200, 2000, 300)}};
    // 100-char paragraph with cer 0.2 and 300-char paragraph with cer 0.6,
    // realized as single words whose texts differ by exact substitutions
    std::string gt1(100, 'a'), pred1 = std::string(20, 'b') + std::string(80, 'a');
    std::string gt2(300, 'a'), pred2 = std::string(180, 'b') + std::string(120, 'a');
    gt.words = {mkword("w1", "r1", 0, 0, 1500, 90, gt1),
                mkword("w2", "r2", 0, 200, 1500, 290, gt2)};
    pred.words = {mkword("v1", "q1", 0, 0, 1500, 90, pred1),
                  mkword("v2", "q2", 0, 200, 1500, 290, pred2)};

    auto match = match_documents(gt, pred);
    auto tl = text_level_scores(match, gt, pred);
    CHECK(tl.cer == doctest::Approx(0.5).epsilon(1e-12));  // (100*0.2+300*0.6)/400
    CHECK(tl.char_weight == doctest::Approx(400));
    CHECK(tl.word_weight == doctest::Approx(2));
}

TEST_CASE("text level scores: perfect prediction") {
    DocumentAnnotation gt, pred;
    gt.image_id = pred.image_id = "tl0";
    gt.width = pred.width = 1000;
    gt.height = pred.height = 1000;
    gt.regions = {{"r", RegionClass::paragraph, rect(0, 0, 900, 100)}};
    pred.regions = {{"q", RegionClass::paragraph, rect(0, 0, 900, 100)}};
    gt.words = {mkword("w", "r", 0, 0, 100, 50, "hello")};
    pred.words = {mkword("v", "q", 0, 0, 100, 50, "hello")};
    auto match = match_documents(gt, pred);
    auto tl = text_level_scores(match, gt, pred);
    CHECK(tl.cer == 0.0);
    CHECK(tl.wer == 0.0);
}

TEST_CASE("totally missed document scores cer = wer = 1") {
    DocumentAnnotation gt, pred;
    gt.image_id = pred.image_id = "miss";
    gt.width = pred.width = 1000;
    gt.height = pred.height = 1000;
    gt.regions = {{"r", RegionClass::paragraph, rect(0, 0, 400, 100)}};
    gt.words = {mkword("w", "r", 0, 0, 100, 50, "hello world")};
    // prediction found nothing anywhere near
    pred.regions = {{"q", RegionClass::paragraph, rect(600, 600, 900, 900)}};
    auto match = match_documents(gt, pred);
    auto tl = text_level_scores(match, gt, pred);
    CHECK(tl.cer == doctest::Approx(1.0));
    CHECK(tl.wer == doctest::Approx(1.0));
}

TEST_CASE("EmptyDocumentError when no gt text region exists") {
    DocumentAnnotation gt, pred;
    gt.image_id = pred.image_id = "empty";
    gt.width = pred.width = 100;
    gt.height = pred.height = 100;
    gt.regions = {{"img", RegionClass::image, rect(0, 0, 50, 50)}};
    auto match = match_documents(gt, pred);
    CHECK_THROWS_AS(text_level_scores(match, gt, pred), EmptyDocumentError);
}

TEST_CASE("evaluate_pair composes both score families") {
    DocumentAnnotation gt, pred;
    build_wl_fixture(gt, pred);
    auto score = evaluate_pair(gt, pred);
    CHECK(score.image_id == "wl");
    CHECK(score.domain == "Book");
    CHECK(score.word_level.tp == 6);
    CHECK(score.text_level.cer > 0.0);
}
