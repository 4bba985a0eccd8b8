#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "docrebench/errors.hpp"
#include "docrebench/reconstruct.hpp"
#include "docrebench/synth.hpp"
#include "docrebench/unicode.hpp"
#include "oracles.hpp"

using namespace docrebench;

namespace {

std::vector<Point> rect(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

LineInstance mkline(const std::string& id, const std::string& region, double x, double y) {
    LineInstance l;
    l.id = id;
    l.region_id = region;
    l.bbox = {x, y, x + 100, y + 10};
    return l;
}

WordInstance mkword(const std::string& id, const std::string& region,
                    const std::string& line, double x, double y, const std::string& text) {
    WordInstance w;
    w.id = id;
    w.region_id = region;
    if (!line.empty()) w.line_id = line;
    w.polygon = rect(x, y, x + 18, y + 8);
    w.text = text;
    return w;
}

}  // namespace

TEST_CASE("order_lines sorts vertically with horizontal tie-break") {
    LineInstance a = mkline("a", "r", 0, 10), b = mkline("b", "r", 0, 40),
                 c = mkline("c", "r", 0, 25);
    auto out = order_lines({&a, &b, &c});
    CHECK(out[0]->id == "a");
    CHECK(out[1]->id == "c");
    CHECK(out[2]->id == "b");

    LineInstance l = mkline("left", "r", 5, 10), r = mkline("right", "r", 50, 10);
    auto tie = order_lines({&r, &l});
    CHECK(tie[0]->id == "left");
    CHECK(tie[1]->id == "right");
}

TEST_CASE("order_words sorts horizontally") {
    WordInstance a = mkword("a", "r", "", 100, 0, "x"), b = mkword("b", "r", "", 5, 0, "y"),
                 c = mkword("c", "r", "", 60, 0, "z");
    auto out = order_words({&a, &b, &c});
    CHECK(out[0]->id == "b");
    CHECK(out[1]->id == "c");
    CHECK(out[2]->id == "a");
    auto single = order_words({&a});
    CHECK(single.size() == 1);
}

TEST_CASE("ordering matches a comparison-sort oracle on shuffled input") {
    oracle::TestRng rng(5);
    std::vector<LineInstance> lines;
    for (int i = 0; i < 30; ++i)
        lines.push_back(mkline("l" + std::to_string(i), "r", rng.uniform(0, 200),
                               rng.uniform(0, 900)));
    std::vector<const LineInstance*> ptrs;
    for (auto& l : lines) ptrs.push_back(&l);
    auto got = order_lines(ptrs);
    auto expected = ptrs;
    std::sort(expected.begin(), expected.end(), [](const LineInstance* a,
                                                   const LineInstance* b) {
        return std::make_pair(a->bbox.y_min, a->bbox.x_min) <
               std::make_pair(b->bbox.y_min, b->bbox.x_min);
    });
    CHECK(got == expected);
}

TEST_CASE("region_text joins words with spaces and lines with newlines") {
    DocumentAnnotation doc;
    doc.image_id = "t";
    doc.width = doc.height = 1000;
    doc.regions = {{"r", RegionClass::paragraph, rect(0, 0, 300, 100)}};
    doc.lines = {mkline("l0", "r", 0, 0), mkline("l1", "r", 0, 20)};
    doc.words = {mkword("w0", "r", "l0", 0, 0, "ab"), mkword("w1", "r", "l0", 30, 0, "cd"),
                 mkword("w2", "r", "l1", 0, 20, "ef"), mkword("w3", "r", "l1", 30, 20, "gh")};
    CHECK(region_text(doc, "r") == "ab cd\nef gh");

    SUBCASE("zero words") {
        doc.words.clear();
        CHECK(region_text(doc, "r") == "");
    }
    SUBCASE("words without line form a trailing synthetic line") {
        doc.words.push_back(mkword("w4", "r", "", 50, 50, "tail"));
        doc.words.push_back(mkword("w5", "r", "", 10, 60, "head"));
        CHECK(region_text(doc, "r") == "ab cd\nef gh\nhead tail");
    }
    SUBCASE("unknown region throws") {
        CHECK_THROWS_AS(region_text(doc, "nope"), UnknownRegionError);
    }
}

TEST_CASE("region_text equals a naive two-pass sorter on synthetic docs") {
    SynthSpec spec;
    spec.seed = 77;
    spec.regions = 4;
    auto doc = generate_document(spec);
    for (const auto& region : doc.regions) {
        if (!is_text_class(region.cls)) continue;
        // naive: collect (line y, word x, text), sort, group
        struct Entry {
            double ly, lx, wx, wy;
            std::string text;
        };
        std::vector<Entry> entries;
        for (const auto& w : doc.words) {
            if (w.region_id != region.id) continue;
            const LineInstance* line = doc.find_line(*w.line_id);
            BBox wb = bbox_of(w.polygon);
            entries.push_back({line->bbox.y_min, line->bbox.x_min, wb.x_min, wb.y_min,
                               w.text});
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.ly, a.lx, a.wx, a.wy) < std::tie(b.ly, b.lx, b.wx, b.wy);
        });
        std::string expected;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i > 0)
                expected += (entries[i].ly != entries[i - 1].ly ||
                             entries[i].lx != entries[i - 1].lx)
                                ? "\n"
                                : " ";
            expected += entries[i].text;
        }
        CHECK(region_text(doc, region.id) == expected);
    }
}

TEST_CASE("build_intermediate drops tables and orders components") {
    DocumentAnnotation doc;
    doc.image_id = "b";
    doc.width = doc.height = 1000;
    doc.regions = {{"tab", RegionClass::table, rect(0, 500, 200, 700)},
                   {"p1", RegionClass::paragraph, rect(0, 0, 200, 100)},
                   {"img", RegionClass::image, rect(300, 0, 500, 100)},
                   {"p2", RegionClass::text_box, rect(0, 200, 200, 300)}};
    doc.words = {mkword("w", "p1", "", 10, 10, "hi")};
    auto rd = build_intermediate(doc);
    REQUIRE(rd.components.size() == 3);  // table dropped
    CHECK(rd.components[0].region_id == "p1");
    CHECK(rd.components[1].region_id == "img");  // same y, larger x
    CHECK(rd.components[2].region_id == "p2");
    CHECK(rd.components[0].text.has_value());
    CHECK_FALSE(rd.components[0].image_src.has_value());
    CHECK(rd.components[1].image_src.has_value());
    CHECK_FALSE(rd.components[1].text.has_value());
    for (const auto& c : rd.components) CHECK(c.cls != RegionClass::table);
}

TEST_CASE("component order equals a bbox-sort oracle") {
    oracle::TestRng rng(9);
    for (int it = 0; it < 20; ++it) {
        DocumentAnnotation doc;
        doc.image_id = "o";
        doc.width = doc.height = 1000;
        for (int i = 0; i < 5; ++i) {
            double x = rng.uniform(0, 800), y = rng.uniform(0, 800);
            doc.regions.push_back({"r" + std::to_string(i), RegionClass::text_box,
                                   rect(x, y, x + 100, y + 50)});
        }
        auto rd = build_intermediate(doc);
        auto expected = rd.components;
        std::stable_sort(expected.begin(), expected.end(),
                         [](const IntermediateComponent& a, const IntermediateComponent& b) {
                             return std::make_pair(a.bbox.y_min, a.bbox.x_min) <
                                    std::make_pair(b.bbox.y_min, b.bbox.x_min);
                         });
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(rd.components[i].region_id == expected[i].region_id);
    }
}

namespace {

// Same wrap model as the implementation, written flat for the scan oracle.
long oracle_lines(const std::vector<std::size_t>& tokens, long cap) {
    if (cap < 1) return -1;
    long lines = 1, cur = 0;
    for (std::size_t t : tokens) {
        long tl = static_cast<long>(t);
        if (tl > cap) {
            if (cur > 0) ++lines;
            long full = tl / cap, rem = tl % cap;
            if (rem == 0) {
                lines += full - 1;
                cur = cap;
            } else {
                lines += full;
                cur = rem;
            }
        } else if (cur == 0) {
            cur = tl;
        } else if (cur + 1 + tl <= cap) {
            cur += 1 + tl;
        } else {
            ++lines;
            cur = tl;
        }
    }
    return lines;
}

int scan_fit(const std::string& text, const BBox& box) {
    std::vector<std::size_t> tokens;
    for (const auto& t : split_tokens(text)) tokens.push_back(char_count(t));
    if (tokens.empty()) return 16;
    for (int s = 72; s >= 6; --s) {
        long cap = static_cast<long>(std::floor(box.width() / (0.55 * s)));
        long lines = oracle_lines(tokens, cap);
        if (lines > 0 && static_cast<double>(lines) * 1.25 * s <= box.height()) return s;
    }
    return 6;
}

}  // namespace

TEST_CASE("fit_font_size") {
    CHECK(fit_font_size("", {0, 0, 100, 50}) == 16);  // empty text default
    CHECK(fit_font_size("hi", {0, 0, 5000, 5000}) == 72);  // cap

    BBox box{0, 0, 200, 100};
    std::string text;
    oracle::TestRng rng(21);
    for (int i = 0; i < 80; ++i) {
        if (i) text += ' ';
        int len = static_cast<int>(rng.uniform_int(1, 9));
        text += std::string(len, 'x');
    }
    CHECK(fit_font_size(text, box) == scan_fit(text, box));

    // exhaustive agreement across random boxes and texts
    for (int it = 0; it < 200; ++it) {
        BBox b{0, 0, rng.uniform(10, 600), rng.uniform(10, 400)};
        std::string t;
        int words = static_cast<int>(rng.uniform_int(1, 60));
        for (int i = 0; i < words; ++i) {
            if (i) t += ' ';
            t += std::string(rng.uniform_int(1, 14), 'a');
        }
        CHECK(fit_font_size(t, b) == scan_fit(t, b));
    }

    // overflow floor
    FontFit tight = fit_font(std::string(4000, 'x'), {0, 0, 20, 10});
    CHECK(tight.px == 6);
    CHECK(tight.overflow);
}

TEST_CASE("fit_font_size monotonicity") {
    BBox box{0, 0, 300, 150};
    int prev = 73;
    for (int words = 1; words <= 40; words += 3) {
        std::string t;
        for (int i = 0; i < words; ++i) t += (i ? " word" : "word");
        int s = fit_font_size(t, box);
        CHECK(s <= prev);
        prev = s;
    }
    std::string text = "some fixed paragraph of words that wraps";
    int small = fit_font_size(text, {0, 0, 100, 40});
    int big = fit_font_size(text, {0, 0, 400, 160});
    CHECK(big >= small);
}

TEST_CASE("render_html escapes and is deterministic") {
    DocumentAnnotation doc;
    doc.image_id = "esc<&>";
    doc.width = doc.height = 500;
    doc.regions = {{"r", RegionClass::paragraph, rect(0, 0, 400, 100)}};
    doc.words = {mkword("w", "r", "", 10, 10, "a<b & c>\"d'")};
    auto rd = build_intermediate(doc);
    std::string html = render_html(rd);
    CHECK(html == render_html(rd));  // byte deterministic
    CHECK(html.find("a<b") == std::string::npos);  // raw < never appears in text
    auto parsed = oracle::parse_html(html);
    REQUIRE(parsed.well_formed);
    std::vector<std::string> texts;
    for (const auto& el : parsed.elements)
        if (el.cls == "tx") texts.push_back(el.text);
    REQUIRE(texts.size() == 1);
    CHECK(texts[0] == "a<b & c>\"d'");
}

TEST_CASE("emit_html round-trips reading order through a strict parser") {
    SynthSpec spec;
    spec.seed = 31;
    spec.regions = 5;
    spec.table_regions = 1;
    spec.image_regions = 1;
    auto doc = generate_document(spec);
    auto rd = build_intermediate(doc);
    std::string html = render_html(rd);
    auto parsed = oracle::parse_html(html);
    REQUIRE(parsed.well_formed);

    std::vector<std::string> dom_texts;
    int images = 0;
    for (const auto& el : parsed.elements) {
        if (el.cls == "tx") dom_texts.push_back(el.text);
        if (el.cls == "im") ++images;
    }
    std::vector<std::string> expected;
    for (const auto& c : rd.components)
        if (c.text) expected.push_back(*c.text);
    CHECK(dom_texts == expected);
    CHECK(images == 1);

    // empty page is still a valid document
    ReconstructedDocument empty;
    empty.image_id = "empty";
    empty.page_width = 100;
    empty.page_height = 100;
    CHECK(oracle::parse_html(render_html(empty)).well_formed);
}
