#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "docrebench/cli.hpp"
#include "docrebench/model.hpp"
#include "docrebench/report.hpp"

using namespace docrebench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("docrebench_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// synth fixtures rearranged into evaluate's directory layout
void stage_eval_dirs(const fs::path& fixtures, const fs::path& base, int count) {
    fs::create_directories(base / "gt");
    fs::create_directories(base / "pred");
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "fixture_%04d", i);
        fs::copy_file(fixtures / name / "gt.json",
                      base / "gt" / (std::string(name) + ".json"));
        fs::copy_file(fixtures / name / "pred.json",
                      base / "pred" / (std::string(name) + ".json"));
    }
}

}  // namespace

TEST_CASE("identity fixtures evaluate to perfect scores with exit 0") {
    fs::path dir = fresh_dir("identity");
    spit(dir / "spec.json", R"({"count": 2, "seed": 7, "synth": {"regions": 3}})");

    std::ostringstream out, err;
    SynthOptions synth{dir / "spec.json", dir / "fx"};
    REQUIRE(cmd_synth(synth, out, err) == 0);
    CHECK(fs::exists(dir / "fx" / "run_manifest.json"));
    CHECK(fs::exists(dir / "fx" / "fixture_0001" / "expected.json"));

    stage_eval_dirs(dir / "fx", dir, 2);
    EvaluateOptions eval{dir / "gt", dir / "pred", dir / "eval", "md"};
    std::ostringstream out2, err2;
    CHECK(cmd_evaluate(eval, out2, err2) == 0);
    CHECK(err2.str().empty());

    auto rows = scores_from_csv(slurp(dir / "eval" / "scores.csv"));
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.cer == 0.0);
        CHECK(r.wer == 0.0);
    }
    CHECK(fs::exists(dir / "eval" / "report.md"));
    CHECK(fs::exists(dir / "eval" / "run_manifest.json"));
}

TEST_CASE("synth runs are byte-deterministic") {
    fs::path dir = fresh_dir("determinism");
    spit(dir / "spec.json",
         R"({"count": 1, "seed": 3, "perturb": {"p_drop": 0.3, "region_split_prob": 1.0}})");
    std::ostringstream sink;
    REQUIRE(cmd_synth({dir / "spec.json", dir / "fx1"}, sink, sink) == 0);
    REQUIRE(cmd_synth({dir / "spec.json", dir / "fx2"}, sink, sink) == 0);
    for (const char* name : {"gt.json", "pred.json", "expected.json"}) {
        CHECK(slurp(dir / "fx1" / "fixture_0000" / name) ==
              slurp(dir / "fx2" / "fixture_0000" / name));
    }
}

TEST_CASE("dropped words recover the drop rate within 3 sigma") {
    fs::path dir = fresh_dir("drop");
    spit(dir / "spec.json", R"({
      "count": 4, "seed": 1234,
      "synth": {"regions": 9, "lines_per_region": [6, 8], "words_per_line": [7, 9]},
      "perturb": {"p_drop": 0.2}
    })");
    std::ostringstream sink;
    REQUIRE(cmd_synth({dir / "spec.json", dir / "fx"}, sink, sink) == 0);
    stage_eval_dirs(dir / "fx", dir, 4);
    std::ostringstream out, err;
    REQUIRE(cmd_evaluate({dir / "gt", dir / "pred", dir / "eval", "csv"}, out, err) == 0);

    long tp = 0, fn = 0;
    for (const auto& r : scores_from_csv(slurp(dir / "eval" / "scores.csv"))) {
        tp += r.tp;
        fn += r.fn;
    }
    double n = static_cast<double>(tp + fn);
    REQUIRE(n > 1500);
    double recall = static_cast<double>(tp) / n;
    double sigma = std::sqrt(0.2 * 0.8 / n);
    CHECK(std::abs(recall - 0.8) <= 3 * sigma);
}

TEST_CASE("unpaired and invalid documents exit 2 with diagnostics") {
    fs::path dir = fresh_dir("unpaired");
    spit(dir / "spec.json", R"({"count": 2, "seed": 21})");
    std::ostringstream sink;
    REQUIRE(cmd_synth({dir / "spec.json", dir / "fx"}, sink, sink) == 0);
    stage_eval_dirs(dir / "fx", dir, 2);
    fs::remove(dir / "pred" / "fixture_0001.json");        // unpaired gt
    spit(dir / "gt" / "broken.json", "{not json");         // invalid file

    std::ostringstream out, err;
    CHECK(cmd_evaluate({dir / "gt", dir / "pred", dir / "eval", "md"}, out, err) == 2);
    CHECK(err.str().find("unpaired") != std::string::npos);
    CHECK(err.str().find("broken.json") != std::string::npos);
    // the valid pair still evaluated
    auto rows = scores_from_csv(slurp(dir / "eval" / "scores.csv"));
    CHECK(rows.size() == 1);
}

TEST_CASE("reconstruct writes index.html without tables") {
    fs::path dir = fresh_dir("rec");
    spit(dir / "spec.json",
         R"({"count": 1, "seed": 33, "synth": {"regions": 2, "table_regions": 1}})");
    std::ostringstream sink;
    REQUIRE(cmd_synth({dir / "spec.json", dir / "fx"}, sink, sink) == 0);

    std::ostringstream out, err;
    ReconstructOptions rec{dir / "fx" / "fixture_0000" / "pred.json", dir / "html"};
    CHECK(cmd_reconstruct(rec, out, err) == 0);
    REQUIRE(fs::exists(dir / "html" / "index.html"));
    REQUIRE(fs::exists(dir / "html" / "intermediate.json"));
    std::string html = slurp(dir / "html" / "index.html");
    CHECK(html.find("table") == std::string::npos);
    CHECK(slurp(dir / "html" / "intermediate.json").find("\"table\"") ==
          std::string::npos);

    std::ostringstream err2;
    CHECK(cmd_reconstruct({dir / "nope.json", dir / "html2"}, out, err2) == 2);
}

TEST_CASE("report surfaces malformed rows with exit 2") {
    fs::path dir = fresh_dir("report");
    spit(dir / "scores.csv",
         "image_id,domain,tp,fp,fn,precision,recall,f,cer,wer,char_weight,word_weight\n"
         "a,Book,1,0,0,1,1,1,0,0,5,1\n"
         "garbage line\n");
    std::ostringstream out, err;
    CHECK(cmd_report({dir / "scores.csv", "md", {}}, out, err) == 2);
    CHECK(err.str().find("line 3") != std::string::npos);
    CHECK(out.str().find("| Book | 1 |") != std::string::npos);

    std::ostringstream out2, err2;
    CHECK(cmd_report({dir / "scores.csv", "nope", {}}, out2, err2) == 2);
}

TEST_CASE("synth spec validation errors carry field paths") {
    fs::path dir = fresh_dir("badspec");
    spit(dir / "spec.json", R"({"count": 1, "synth": {"regions": 0}})");
    std::ostringstream out, err;
    CHECK(cmd_synth({dir / "spec.json", dir / "fx"}, out, err) == 2);
    CHECK(err.str().find("regions") != std::string::npos);

    spit(dir / "spec2.json", R"({"perturb": {"box_jitter": 0.9}})");
    std::ostringstream out2, err2;
    CHECK(cmd_synth({dir / "spec2.json", dir / "fx2"}, out2, err2) == 2);
    CHECK(err2.str().find("box_jitter") != std::string::npos);
}
