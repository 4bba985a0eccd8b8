#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "docrebench/errors.hpp"
#include "docrebench/model.hpp"
#include "docrebench/pipeline.hpp"
#include "docrebench/synth.hpp"

using namespace docrebench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("docrebench_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

StageConfig passthrough(const std::string& name, ArtifactKind in, ArtifactKind out) {
    StageConfig s;
    s.name = name;
    s.kind = StageKind::passthrough;
    s.input_kind = in;
    s.output_kind = out;
    return s;
}

}  // namespace

TEST_CASE("batch_items") {
    std::vector<int> items(320);
    for (int i = 0; i < 320; ++i) items[i] = i;
    auto batches = batch_items(items, 160);
    REQUIRE(batches.size() == 2);
    CHECK(batches[0].size() == 160);
    CHECK(batches[1].size() == 160);

    std::vector<int> five{1, 2, 3, 4, 5};
    auto small = batch_items(five, 160);
    REQUIRE(small.size() == 1);
    CHECK(small[0].size() == 5);

    CHECK(batch_items(std::vector<int>{}, 160).empty());

    // concat invariant over random shapes
    for (std::size_t n : {1u, 7u, 159u, 160u, 161u, 480u}) {
        std::vector<int> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<int>(i);
        for (std::size_t bs : {1u, 2u, 16u, 160u}) {
            std::vector<int> cat;
            for (const auto& b : batch_items(xs, bs)) cat.insert(cat.end(), b.begin(), b.end());
            CHECK(cat == xs);
        }
    }
}

TEST_CASE("parallel_map serial order and results") {
    std::vector<int> order;
    auto out = parallel_map<int>(5, 1, [&](std::size_t i) {
        order.push_back(static_cast<int>(i));
        return static_cast<int>(i) * 10;
    });
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
    for (int i = 0; i < 5; ++i) CHECK(*out.results[i] == i * 10);
    CHECK_FALSE(out.failed_index.has_value());
}

TEST_CASE("parallel_map bounds concurrency exactly") {
    std::atomic<int> active{0}, peak{0};
    auto out = parallel_map<int>(8, 2, [&](std::size_t i) {
        int now = ++active;
        int prev = peak.load();
        while (prev < now && !peak.compare_exchange_weak(prev, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(40));
        --active;
        return static_cast<int>(i);
    });
    CHECK_FALSE(out.failed_index.has_value());
    CHECK(peak.load() == 2);
}

TEST_CASE("parallel_map failure cancels remaining dispatch") {
    std::vector<int> ran;
    auto out = parallel_map<int>(8, 1, [&](std::size_t i) -> int {
        if (i == 3) throw Error("job 3 exploded");
        ran.push_back(static_cast<int>(i));
        return static_cast<int>(i);
    });
    REQUIRE(out.failed_index.has_value());
    CHECK(*out.failed_index == 3);
    CHECK(out.error == "job 3 exploded");
    CHECK(ran == std::vector<int>{0, 1, 2});
    CHECK(out.results[0].has_value());
    CHECK(out.results[2].has_value());
    CHECK_FALSE(out.results[3].has_value());
    CHECK_FALSE(out.results[7].has_value());
}

TEST_CASE("presets select their documented stage subsets") {
    std::vector<StageConfig> menu = {
        passthrough("geo", ArtifactKind::raw_image, ArtifactKind::geo_corrected),
        passthrough("illum", ArtifactKind::geo_corrected, ArtifactKind::illum_corrected),
        passthrough("layout", ArtifactKind::illum_corrected, ArtifactKind::layout),
        passthrough("line_seg", ArtifactKind::layout, ArtifactKind::lines),
        passthrough("word_seg", ArtifactKind::lines, ArtifactKind::words),
        passthrough("recog", ArtifactKind::words, ArtifactKind::recognized),
    };
    auto names = [](const std::vector<StageConfig>& stages) {
        std::vector<std::string> out;
        for (const auto& s : stages) out.push_back(s.name);
        return out;
    };
    auto sys1 = apply_preset(PipelinePreset::sys1, menu);
    CHECK(names(sys1) ==
          std::vector<std::string>{"layout", "line_seg", "word_seg", "recog"});
    CHECK(sys1.front().input_kind == ArtifactKind::raw_image);
    validate_chain(sys1);

    auto sys2 = apply_preset(PipelinePreset::sys2, menu);
    CHECK(names(sys2) ==
          std::vector<std::string>{"geo", "layout", "line_seg", "word_seg", "recog"});
    validate_chain(sys2);

    auto sys3 = apply_preset(PipelinePreset::sys3, menu);
    CHECK(names(sys3) == std::vector<std::string>{"geo", "illum", "layout", "line_seg",
                                                  "word_seg", "recog"});
    validate_chain(sys3);
}

TEST_CASE("validate_chain rejects broken chains") {
    auto a = passthrough("a", ArtifactKind::raw_image, ArtifactKind::layout);
    auto b = passthrough("b", ArtifactKind::lines, ArtifactKind::words);
    CHECK_THROWS_AS(validate_chain({a, b}), ConfigError);  // gap layout->lines
    auto bad = passthrough("bad", ArtifactKind::words, ArtifactKind::layout);
    CHECK_THROWS_AS(validate_chain({bad}), ConfigError);  // backwards
    CHECK_THROWS_AS(validate_chain({}), ConfigError);
}

TEST_CASE("config defaults: 2 workers, batch 160 on recognition") {
    std::string config_json = R"({
      "preset": "custom",
      "stages": [
        {"name": "word_seg", "kind": "passthrough", "input_kind": "layout",
         "output_kind": "words"},
        {"name": "recog", "kind": "external_command", "command": "cp {input} {output}",
         "input_kind": "words", "output_kind": "recognized"}
      ]
    })";
    auto config = pipeline_config_from_json(config_json);
    REQUIRE(config.stages.size() == 2);
    CHECK(config.stages[0].workers == 2);
    CHECK(config.stages[0].batch_size == 0);
    CHECK(config.stages[1].batch_size == 160);
    CHECK(config.stages[1].timeout_sec == 300.0);
}

TEST_CASE("passthrough pipeline is the identity on artifact contents") {
    fs::path dir = fresh_dir("pass");
    std::vector<StageArtifact> inputs;
    for (int i = 0; i < 2; ++i) {
        fs::path p = dir / ("doc" + std::to_string(i) + ".bin");
        std::ofstream(p) << "payload-" << i;
        inputs.push_back({ArtifactKind::raw_image, p, "test"});
    }
    PipelineConfig config;
    config.preset = PipelinePreset::custom;
    config.work_dir = dir / "work";
    config.stages = {passthrough("s1", ArtifactKind::raw_image, ArtifactKind::geo_corrected),
                     passthrough("s2", ArtifactKind::geo_corrected,
                                 ArtifactKind::illum_corrected),
                     passthrough("s3", ArtifactKind::illum_corrected, ArtifactKind::layout)};
    // layout output is structured; passthrough of a .bin would fail JSON checks,
    // so make the final hop unstructured instead
    config.stages[2] = passthrough("s3", ArtifactKind::illum_corrected, ArtifactKind::html);

    auto result = run_pipeline(config, inputs);
    CHECK(result.failures.empty());
    REQUIRE(result.timings.size() == 2);
    for (const auto& t : result.timings) CHECK(t.stages.size() == 3);
    for (int i = 0; i < 2; ++i) {
        REQUIRE(result.outputs[i].has_value());
        CHECK(slurp(result.outputs[i]->path) == slurp(inputs[i].path));
    }
}

TEST_CASE("external stages run, log, and validate structured output") {
    fs::path dir = fresh_dir("ext");
    SynthSpec spec;
    spec.seed = 5;
    auto doc = generate_document(spec);
    fs::path in = dir / "doc0.json";
    save_document(doc, in);

    PipelineConfig config;
    config.work_dir = dir / "work";
    StageConfig stage;
    stage.name = "recog";
    stage.kind = StageKind::external_command;
    stage.command = "cp {input} {output} && echo ran-recog";
    stage.input_kind = ArtifactKind::words;
    stage.output_kind = ArtifactKind::recognized;
    stage.batch_size = 0;
    config.stages = {stage};

    auto result = run_pipeline(config, {{ArtifactKind::words, in, "test"}});
    CHECK(result.failures.empty());
    REQUIRE(result.outputs[0].has_value());
    CHECK(load_document(result.outputs[0]->path).words.size() == doc.words.size());
    CHECK(slurp(dir / "work" / "logs" / "doc0.log").find("ran-recog") !=
          std::string::npos);
    CHECK(result.timings[0].domain == doc.domain);
}

TEST_CASE("invalid stage output isolates the document") {
    fs::path dir = fresh_dir("bad");
    SynthSpec spec;
    spec.seed = 6;
    auto doc = generate_document(spec);
    fs::path good = dir / "doc_good.json";
    fs::path poison = dir / "doc_poison.json";
    save_document(doc, good);
    save_document(doc, poison);

    PipelineConfig config;
    config.work_dir = dir / "work";
    StageConfig stage;
    stage.name = "flaky";
    stage.kind = StageKind::external_command;
    // poison document gets garbage output; the other is copied intact
    stage.command =
        "case {input} in (*poison*) echo not-json > {output} ;; (*) cp {input} "
        "{output} ;; esac";
    stage.input_kind = ArtifactKind::words;
    stage.output_kind = ArtifactKind::recognized;
    config.stages = {stage};

    auto result = run_pipeline(config, {{ArtifactKind::words, good, "t"},
                                        {ArtifactKind::words, poison, "t"}});
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].doc_id == "doc_poison");
    CHECK(result.failures[0].stage == "flaky");
    CHECK(result.outputs[0].has_value());
    CHECK_FALSE(result.outputs[1].has_value());
}

TEST_CASE("word batching splits, runs, and merges in order") {
    fs::path dir = fresh_dir("batch");
    SynthSpec spec;
    spec.seed = 8;
    spec.regions = 1;
    spec.lines_per_region_min = spec.lines_per_region_max = 2;
    spec.words_per_line_min = spec.words_per_line_max = 4;  // 8 words total
    auto doc = generate_document(spec);
    fs::path in = dir / "doc0.json";
    save_document(doc, in);

    PipelineConfig config;
    config.work_dir = dir / "work";
    StageConfig stage;
    stage.name = "recog";
    stage.kind = StageKind::external_command;
    stage.command = "cp {input} {output}";
    stage.input_kind = ArtifactKind::words;
    stage.output_kind = ArtifactKind::recognized;
    stage.batch_size = 3;
    stage.workers = 2;
    config.stages = {stage};

    auto result = run_pipeline(config, {{ArtifactKind::words, in, "t"}});
    CHECK(result.failures.empty());
    REQUIRE(result.outputs[0].has_value());
    auto merged = load_document(result.outputs[0]->path);
    REQUIRE(merged.words.size() == doc.words.size());
    for (std::size_t i = 0; i < merged.words.size(); ++i)
        CHECK(merged.words[i].id == doc.words[i].id);

    // batch input files exist with sizes 3, 3, 2
    fs::path batches = dir / "work" / "recog" / "batches";
    std::vector<std::size_t> sizes;
    for (int b = 0; b < 3; ++b) {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_b%04d", b);
        sizes.push_back(
            load_document(batches / ("doc0" + std::string(suffix) + ".in.json")).words.size());
    }
    CHECK(sizes == std::vector<std::size_t>{3, 3, 2});
}

TEST_CASE("stage timeouts are enforced") {
    fs::path dir = fresh_dir("timeout");
    std::ofstream(dir / "doc0.bin") << "x";

    PipelineConfig config;
    config.work_dir = dir / "work";
    StageConfig stage;
    stage.name = "slow";
    stage.kind = StageKind::external_command;
    stage.command = "sleep 5 && cp {input} {output}";
    stage.input_kind = ArtifactKind::raw_image;
    stage.output_kind = ArtifactKind::geo_corrected;
    stage.timeout_sec = 0.2;
    config.stages = {stage};

    auto t0 = std::chrono::steady_clock::now();
    auto result =
        run_pipeline(config, {{ArtifactKind::raw_image, dir / "doc0.bin", "t"}});
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].message.find("exceeded") != std::string::npos);
    CHECK(elapsed.count() < 3.0);
}

TEST_CASE("DOCREBENCH_WORKERS must be a positive integer") {
    fs::path dir = fresh_dir("env");
    std::ofstream(dir / "doc0.bin") << "x";
    PipelineConfig config;
    config.work_dir = dir / "work";
    config.stages = {passthrough("s", ArtifactKind::raw_image, ArtifactKind::html)};
    std::vector<StageArtifact> inputs{{ArtifactKind::raw_image, dir / "doc0.bin", "t"}};

    setenv("DOCREBENCH_WORKERS", "abc", 1);
    CHECK_THROWS_AS(run_pipeline(config, inputs), ConfigError);
    setenv("DOCREBENCH_WORKERS", "1", 1);
    CHECK(run_pipeline(config, inputs).failures.empty());
    unsetenv("DOCREBENCH_WORKERS");
}

TEST_CASE("timing report averages per (domain, preset)") {
    std::vector<DocumentTimings> timings;
    DocumentTimings a;
    a.doc_id = "d1";
    a.domain = "Book";
    a.preset = "sys1";
    a.total_seconds = 1.0;
    DocumentTimings b = a;
    b.doc_id = "d2";
    b.total_seconds = 3.0;
    DocumentTimings c;
    c.doc_id = "d3";
    c.domain = "Book";
    c.preset = "sys3";
    c.total_seconds = 72.40;
    timings = {a, b, c};

    auto table = timing_report(timings);
    CHECK(table.rows.at("Book").at("sys1").mean() == doctest::Approx(2.0));
    CHECK(table.rows.at("Book").at("sys3").mean() == doctest::Approx(72.40));

    std::string md = timing_table_markdown(table);
    CHECK(md.find("| Domain Name | Sys-1 | Sys-3 |") != std::string::npos);
    CHECK(md.find("| Book | 2.00 | 72.40 |") != std::string::npos);

    CHECK_THROWS_AS(timing_report({}), Error);
}
