#include "docrebench/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "docrebench/errors.hpp"
#include "docrebench/metrics.hpp"
#include "docrebench/model.hpp"
#include "docrebench/pipeline.hpp"
#include "docrebench/reconstruct.hpp"
#include "docrebench/report.hpp"
#include "docrebench/synth.hpp"

namespace docrebench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("I/O failure writing " + path.string());
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Every output directory gets a manifest pinning inputs and configuration;
// no timestamps, so identical runs stay byte-identical.
void write_manifest(const fs::path& out_dir, const std::string& subcommand, json extra) {
    json m;
    m["tool"] = "docrebench";
    m["version"] = kToolVersion;
    m["schema_version"] = 1;
    m["subcommand"] = subcommand;
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_file(out_dir / "run_manifest.json", m.dump(2) + "\n");
}

std::vector<fs::path> sorted_files(const fs::path& dir, const char* ext) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (ext && entry.path().extension() != ext) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string report_extension(const std::string& format) {
    if (format == "md") return ".md";
    if (format == "csv") return ".csv";
    if (format == "json") return ".json";
    throw SpecError("unknown report format \"" + format + "\" (expected md|csv|json)");
}

std::string render_report(const ReportTable& table, const std::string& format) {
    if (format == "md") return render_markdown(table);
    if (format == "csv") return render_csv(table);
    return render_json(table);
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(opt.gt_dir)) {
        err << "evaluate: " << opt.gt_dir.string() << " is not a directory\n";
        return kExitData;
    }
    if (!fs::is_directory(opt.pred_dir)) {
        err << "evaluate: " << opt.pred_dir.string() << " is not a directory\n";
        return kExitData;
    }
    std::string ext;
    try {
        ext = report_extension(opt.format);
    } catch (const SpecError& e) {
        err << e.what() << "\n";
        return kExitData;
    }
    fs::create_directories(opt.out_dir);

    bool data_error = false;
    const auto load_dir = [&](const fs::path& dir) {
        std::map<std::string, DocumentAnnotation> docs;
        for (const auto& path : sorted_files(dir, ".json")) {
            try {
                DocumentAnnotation doc = load_document(path);
                auto [it, inserted] = docs.emplace(doc.image_id, std::move(doc));
                if (!inserted) {
                    err << path.string() << ": duplicate image_id \"" << it->first
                        << "\"\n";
                    data_error = true;
                }
            } catch (const Error& e) {
                err << path.string() << ": " << e.what() << "\n";
                data_error = true;
            }
        }
        return docs;
    };

    auto gt_docs = load_dir(opt.gt_dir);
    auto pred_docs = load_dir(opt.pred_dir);

    std::vector<ScoreRow> rows;
    for (const auto& [image_id, gt] : gt_docs) {
        auto it = pred_docs.find(image_id);
        if (it == pred_docs.end()) {
            err << "unpaired ground truth image_id \"" << image_id << "\"\n";
            data_error = true;
            continue;
        }
        try {
            rows.push_back(to_row(evaluate_pair(gt, it->second)));
        } catch (const Error& e) {
            err << "image \"" << image_id << "\": " << e.what() << "\n";
            data_error = true;
        }
    }
    for (const auto& [image_id, pred] : pred_docs) {
        if (gt_docs.find(image_id) == gt_docs.end()) {
            err << "unpaired prediction image_id \"" << image_id << "\"\n";
            data_error = true;
        }
    }

    write_file(opt.out_dir / "scores.csv", scores_to_csv(rows));
    json scores_json = json::array();
    for (const auto& r : rows) {
        json o;
        o["image_id"] = r.image_id;
        o["domain"] = r.domain;
        o["tp"] = r.tp;
        o["fp"] = r.fp;
        o["fn"] = r.fn;
        o["precision"] = r.precision;
        o["recall"] = r.recall;
        o["f"] = r.f;
        o["cer"] = r.cer;
        o["wer"] = r.wer;
        o["char_weight"] = r.char_weight;
        o["word_weight"] = r.word_weight;
        scores_json.push_back(std::move(o));
    }
    write_file(opt.out_dir / "scores.json", scores_json.dump(2) + "\n");
    ReportTable table = aggregate_scores(rows);
    write_file(opt.out_dir / ("report" + ext), render_report(table, opt.format));

    json extra;
    extra["inputs"] = {{"gt_dir", opt.gt_dir.string()}, {"pred_dir", opt.pred_dir.string()}};
    extra["format"] = opt.format;
    extra["n_pairs"] = rows.size();
    extra["config_hash"] =
        fnv1a_hex(opt.gt_dir.string() + "|" + opt.pred_dir.string() + "|" + opt.format);
    write_manifest(opt.out_dir, "evaluate", extra);

    out << "evaluated " << rows.size() << " document pair(s)\n";
    out << render_report(table, opt.format);
    return data_error ? kExitData : kExitOk;
}

int cmd_reconstruct(const ReconstructOptions& opt, std::ostream& out, std::ostream& err) {
    DocumentAnnotation doc;
    try {
        doc = load_document(opt.pred_file);
    } catch (const Error& e) {
        err << opt.pred_file.string() << ": " << e.what() << "\n";
        return kExitData;
    }
    ReconstructedDocument rd = build_intermediate(doc);
    fs::path index = emit_html(rd, opt.out_dir);

    json extra;
    extra["inputs"] = {{"pred_file", opt.pred_file.string()}};
    extra["config_hash"] = fnv1a_hex(read_file(opt.pred_file));
    write_manifest(opt.out_dir, "reconstruct", extra);

    out << index.string() << "\n";
    return kExitOk;
}

namespace {

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw SpecError(path + ": expected object");
}

int get_int(const json& j, const char* key, int fallback, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) throw SpecError(path + "." + key + ": expected integer");
    return it->get<int>();
}

double get_num(const json& j, const char* key, double fallback, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw SpecError(path + "." + key + ": expected number");
    return it->get<double>();
}

SynthSpec parse_synth_spec(const json& j, const std::string& path) {
    SynthSpec s;
    if (j.is_null()) return s;
    require_object(j, path);
    s.page_width = get_num(j, "page_width", s.page_width, path);
    s.page_height = get_num(j, "page_height", s.page_height, path);
    s.regions = get_int(j, "regions", s.regions, path);
    if (auto it = j.find("lines_per_region"); it != j.end()) {
        if (!it->is_array() || it->size() != 2)
            throw SpecError(path + ".lines_per_region: expected [min, max]");
        s.lines_per_region_min = (*it)[0].get<int>();
        s.lines_per_region_max = (*it)[1].get<int>();
    }
    if (auto it = j.find("words_per_line"); it != j.end()) {
        if (!it->is_array() || it->size() != 2)
            throw SpecError(path + ".words_per_line: expected [min, max]");
        s.words_per_line_min = (*it)[0].get<int>();
        s.words_per_line_max = (*it)[1].get<int>();
    }
    s.image_regions = get_int(j, "image_regions", 0, path);
    s.table_regions = get_int(j, "table_regions", 0, path);
    if (auto it = j.find("vocabulary"); it != j.end()) {
        if (!it->is_array()) throw SpecError(path + ".vocabulary: expected array");
        for (const auto& t : *it) s.vocabulary.push_back(t.get<std::string>());
    }
    if (auto it = j.find("domain"); it != j.end()) s.domain = it->get<std::string>();
    if (auto it = j.find("image_id"); it != j.end()) s.image_id = it->get<std::string>();
    return s;
}

PerturbationSpec parse_perturb_spec(const json& j, const std::string& path) {
    PerturbationSpec p;
    if (j.is_null()) return p;
    require_object(j, path);
    p.p_drop = get_num(j, "p_drop", 0, path);
    p.p_spurious = get_num(j, "p_spurious", 0, path);
    p.p_char_sub = get_num(j, "p_char_sub", 0, path);
    p.box_jitter = get_num(j, "box_jitter", 0, path);
    p.region_split_prob = get_num(j, "region_split_prob", 0, path);
    return p;
}

}  // namespace

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
    std::string spec_text;
    json j;
    try {
        spec_text = read_file(opt.spec_file);
        j = json::parse(spec_text);
    } catch (const json::parse_error& e) {
        err << opt.spec_file.string() << ": malformed JSON: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitData;
    }

    try {
        require_object(j, "$");
        int count = get_int(j, "count", 1, "$");
        if (count < 1) throw SpecError("$.count: must be >= 1");
        std::uint64_t seed =
            static_cast<std::uint64_t>(get_num(j, "seed", 0, "$"));
        SynthSpec base = parse_synth_spec(j.value("synth", json()), "$.synth");
        PerturbationSpec pbase = parse_perturb_spec(j.value("perturb", json()), "$.perturb");

        fs::create_directories(opt.out_dir);
        for (int i = 0; i < count; ++i) {
            SynthSpec spec = base;
            spec.seed = seed + static_cast<std::uint64_t>(i);
            if (spec.image_id.empty())
                spec.image_id = "synth_" + std::to_string(spec.seed);
            else if (count > 1)
                spec.image_id = base.image_id + "_" + std::to_string(i);
            PerturbationSpec pspec = pbase;
            pspec.seed = seed * 0x10001ULL + static_cast<std::uint64_t>(i);

            DocumentAnnotation gt = generate_document(spec);
            auto [pred, expected] = perturb(gt, pspec);

            char name[32];
            std::snprintf(name, sizeof name, "fixture_%04d", i);
            fs::path dir = opt.out_dir / name;
            fs::create_directories(dir);
            save_document(gt, dir / "gt.json");
            save_document(pred, dir / "pred.json");
            write_file(dir / "expected.json", expected_to_json(expected));
        }

        json extra;
        extra["inputs"] = {{"spec_file", opt.spec_file.string()}};
        extra["seeds"] = {{"base", seed}};
        extra["count"] = count;
        extra["config_hash"] = fnv1a_hex(spec_text);
        write_manifest(opt.out_dir, "synth", extra);

        out << "wrote " << count << " fixture(s) to " << opt.out_dir.string() << "\n";
        return kExitOk;
    } catch (const SpecError& e) {
        err << opt.spec_file.string() << ": " << e.what() << "\n";
        return kExitData;
    } catch (const LayoutOverflowError& e) {
        err << opt.spec_file.string() << ": " << e.what() << "\n";
        return kExitData;
    }
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    PipelineConfig config;
    try {
        config = load_pipeline_config(opt.config_file);
    } catch (const Error& e) {
        err << opt.config_file.string() << ": " << e.what() << "\n";
        return kExitData;
    }
    if (!fs::is_directory(opt.inputs_dir)) {
        err << "run: " << opt.inputs_dir.string() << " is not a directory\n";
        return kExitData;
    }
    fs::create_directories(opt.out_dir);
    if (config.work_dir.empty()) config.work_dir = opt.out_dir / "work";

    std::vector<StageArtifact> inputs;
    for (const auto& path : sorted_files(opt.inputs_dir, nullptr))
        inputs.push_back({config.stages.front().input_kind, path, "input"});
    if (inputs.empty()) {
        err << "run: no input files in " << opt.inputs_dir.string() << "\n";
        return kExitData;
    }

    PipelineRunResult result;
    try {
        result = run_pipeline(config, inputs);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kExitData;
    }

    // Output paths are recorded relative to the output directory so a
    // repeated run into a fresh directory stays byte-identical.
    const fs::path out_abs = fs::absolute(opt.out_dir).lexically_normal();
    const auto portable = [&](const fs::path& p) {
        fs::path rel = fs::absolute(p).lexically_normal().lexically_relative(out_abs);
        if (rel.empty() || rel.native().rfind("..", 0) == 0) return p.string();
        return rel.string();
    };
    json outputs = json::array();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        json o;
        o["input"] = inputs[i].path.string();
        if (result.outputs[i]) {
            o["output"] = portable(result.outputs[i]->path);
            o["kind"] = to_string(result.outputs[i]->kind);
        } else {
            o["output"] = nullptr;
        }
        outputs.push_back(std::move(o));
    }
    write_file(opt.out_dir / "outputs.json", outputs.dump(2) + "\n");

    // Timing files carry real wall-clock measurements; they are the one
    // output class excluded from the byte-identical re-run guarantee.
    write_file(opt.out_dir / "timings.json", timings_to_json(result.timings));
    if (!result.timings.empty())
        write_file(opt.out_dir / "timing_report.md",
                   timing_table_markdown(timing_report(result.timings)));

    json extra;
    extra["inputs"] = {{"config_file", opt.config_file.string()},
                       {"inputs_dir", opt.inputs_dir.string()}};
    extra["preset"] = to_string(config.preset);
    extra["n_documents"] = inputs.size();
    extra["config_hash"] = fnv1a_hex(read_file(opt.config_file));
    write_manifest(opt.out_dir, "run", extra);

    for (const auto& f : result.failures)
        err << "document \"" << f.doc_id << "\" failed at stage \"" << f.stage
            << "\": " << f.message << "\n";
    out << "processed " << inputs.size() << " document(s), " << result.failures.size()
        << " failure(s)\n";
    return result.failures.empty() ? kExitOk : kExitData;
}

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
    std::string ext;
    try {
        ext = report_extension(opt.format);
    } catch (const SpecError& e) {
        err << e.what() << "\n";
        return kExitData;
    }
    std::string text;
    try {
        text = read_file(opt.scores_file);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitData;
    }

    std::vector<std::string> row_errors;
    auto rows = scores_from_csv(text, &row_errors);
    for (const auto& msg : row_errors) err << opt.scores_file.string() << ": " << msg << "\n";

    ReportTable table = aggregate_scores(rows);
    std::string rendered = render_report(table, opt.format);
    out << rendered;

    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        write_file(opt.out_dir / ("report" + ext), rendered);
        json extra;
        extra["inputs"] = {{"scores_file", opt.scores_file.string()}};
        extra["format"] = opt.format;
        extra["config_hash"] = fnv1a_hex(text);
        write_manifest(opt.out_dir, "report", extra);
    }
    return row_errors.empty() ? kExitOk : kExitData;
}

}  // namespace docrebench
