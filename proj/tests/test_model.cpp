#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "docrebench/errors.hpp"
#include "docrebench/model.hpp"
#include "docrebench/synth.hpp"

using namespace docrebench;
namespace fs = std::filesystem;

namespace {

const char* kMinimalDoc = R"({
  "schema_version": 1,
  "image_id": "doc1",
  "width": 100, "height": 100, "domain": "Book",
  "regions": [{"id": "r0", "class": "paragraph", "polygon": [10,10,90,10,90,40,10,40]}],
  "lines": [{"id": "l0", "region_id": "r0", "bbox": [10,10,90,25]}],
  "words": [{"id": "w0", "region_id": "r0", "line_id": "l0",
             "polygon": [12,12,30,12,30,22,12,22], "text": "hi"}]
})";

std::string multi_region_fixture() {
    // 3 regions, 2 lines, 9 words
    std::string words;
    for (int i = 0; i < 9; ++i) {
        double x = 12 + 20 * (i % 4);
        double y = (i < 4) ? 12 : (i < 8 ? 32 : 112);
        const char* region = i < 8 ? "r0" : "r1";
        std::string line = i < 4 ? R"("line_id": "l0",)" : (i < 8 ? R"("line_id": "l1",)" : "");
        if (!words.empty()) words += ",";
        words += "{\"id\": \"w" + std::to_string(i) + "\", \"region_id\": \"" + region +
                 "\", " + line + "\"polygon\": [" + std::to_string(x) + "," +
                 std::to_string(y) + "," + std::to_string(x + 16) + "," +
                 std::to_string(y) + "," + std::to_string(x + 16) + "," +
                 std::to_string(y + 8) + "," + std::to_string(x) + "," +
                 std::to_string(y + 8) + "], \"text\": \"t" + std::to_string(i) + "\"}";
    }
    return std::string(R"({
  "schema_version": 1,
  "image_id": "page042",
  "width": 200, "height": 300, "domain": "Magazine",
  "regions": [
    {"id": "r0", "class": "paragraph", "polygon": [10,10,100,10,100,50,10,50]},
    {"id": "r1", "class": "text_box", "polygon": [10,110,100,110,100,130,10,130]},
    {"id": "r2", "class": "image", "polygon": [110,10,190,10,190,80,110,80]}
  ],
  "lines": [
    {"id": "l0", "region_id": "r0", "bbox": [10,10,100,25]},
    {"id": "l1", "region_id": "r0", "bbox": [10,30,100,45]}
  ],
  "words": [)") +
           words + "]}";
}

}  // namespace

TEST_CASE("minimal document loads") {
    auto doc = document_from_json(kMinimalDoc);
    CHECK(doc.regions.size() == 1);
    CHECK(doc.lines.size() == 1);
    CHECK(doc.words.size() == 1);
    CHECK(doc.words[0].text == "hi");
    CHECK(validate_document(doc).empty());
}

TEST_CASE("dangling word region id raises IntegrityError naming the id") {
    std::string text = kMinimalDoc;
    auto pos = text.find("\"region_id\": \"r0\", \"line_id\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 17, "\"region_id\": \"missing\"");
    try {
        document_from_json(text);
        FAIL("expected IntegrityError");
    } catch (const IntegrityError& e) {
        CHECK(std::string(e.what()).find("w0") != std::string::npos);
        CHECK(std::string(e.what()).find("word.region") != std::string::npos);
    }
}

TEST_CASE("schema errors carry the JSON path") {
    CHECK_THROWS_AS(document_from_json("{nope"), ParseError);
    CHECK_THROWS_AS(document_from_json("[]"), SchemaError);
    CHECK_THROWS_AS(document_from_json(R"({"schema_version": 2})"), SchemaError);
    try {
        document_from_json(R"({"schema_version": 1, "image_id": "x", "width": 10,
                               "height": 10, "domain": "d", "regions": [{"id": "r0"}],
                               "lines": [], "words": []})");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("$.regions[0].class") != std::string::npos);
    }
    // odd polygon coordinate count
    try {
        document_from_json(R"({"schema_version": 1, "image_id": "x", "width": 10,
                               "height": 10, "domain": "d",
                               "regions": [{"id": "r0", "class": "paragraph",
                                            "polygon": [0,0,5]}],
                               "lines": [], "words": []})");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("polygon") != std::string::npos);
    }
}

TEST_CASE("round trip is byte identical") {
    auto doc = document_from_json(multi_region_fixture());
    std::string once = document_to_json(doc);
    auto reloaded = document_from_json(once);
    std::string twice = document_to_json(reloaded);
    CHECK(once == twice);
    CHECK(reloaded.words.size() == 9);
    CHECK(reloaded.regions.size() == 3);
}

TEST_CASE("save then load preserves structure for synthetic documents") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        SynthSpec spec;
        spec.seed = seed;
        spec.regions = 3;
        auto doc = generate_document(spec);
        fs::path tmp = fs::temp_directory_path() / ("docrebench_rt_" +
                                                    std::to_string(seed) + ".json");
        save_document(doc, tmp);
        auto loaded = load_document(tmp);
        CHECK(document_to_json(loaded) == document_to_json(doc));
        fs::remove(tmp);
    }
}

TEST_CASE("non-NFC text is normalized on load and save") {
    std::string text = kMinimalDoc;
    auto pos = text.find("\"text\": \"hi\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"text\": \"é\"");  // e + combining acute
    auto doc = document_from_json(text);
    CHECK(doc.words[0].text == "é");
    std::string saved = document_to_json(doc);
    CHECK(saved.find("é") != std::string::npos);
}

TEST_CASE("validate_document reports violations as data") {
    auto doc = document_from_json(kMinimalDoc);

    SUBCASE("valid") {
        CHECK(validate_document(doc).empty());
    }
    SUBCASE("empty word polygon") {
        doc.words[0].polygon.clear();
        auto v = validate_document(doc);
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "polygon.min_vertices");
        CHECK(v[0].id == "w0");
    }
    SUBCASE("duplicate region ids") {
        doc.regions.push_back(doc.regions[0]);
        auto v = validate_document(doc);
        bool found = false;
        for (const auto& x : v) found = found || x.rule == "id.unique";
        CHECK(found);
    }
    SUBCASE("line in non-text region") {
        doc.regions[0].cls = RegionClass::image;
        auto v = validate_document(doc);
        bool found = false;
        for (const auto& x : v) found = found || x.rule == "line.region_class";
        CHECK(found);
    }
    SUBCASE("non-nfc text") {
        doc.words[0].text = "é";
        auto v = validate_document(doc);
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "text.nfc");
    }
}

TEST_CASE("out-of-bounds polygons are clamped with a warning") {
    std::string text = kMinimalDoc;
    auto pos = text.find("[12,12,30,12,30,22,12,22]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 25, "[12,12,130,12,130,22,12,22]");  // x beyond width=100
    std::vector<std::string> warnings;
    auto doc = document_from_json(text, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("w0") != std::string::npos);
    CHECK(bbox_of(doc.words[0].polygon).x_max == 100);
}

TEST_CASE("artifact kinds are ordered") {
    CHECK(kind_rank(ArtifactKind::raw_image) < kind_rank(ArtifactKind::geo_corrected));
    CHECK(kind_rank(ArtifactKind::words) < kind_rank(ArtifactKind::recognized));
    CHECK(is_structured(ArtifactKind::layout));
    CHECK(is_structured(ArtifactKind::recognized));
    CHECK_FALSE(is_structured(ArtifactKind::raw_image));
    CHECK_FALSE(is_structured(ArtifactKind::html));
    CHECK(artifact_kind_from_string("words") == ArtifactKind::words);
    CHECK_THROWS_AS(artifact_kind_from_string("nope"), SchemaError);
}
