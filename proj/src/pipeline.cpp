#include "docrebench/pipeline.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "docrebench/errors.hpp"
#include "numfmt.hpp"

namespace docrebench {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(PipelinePreset p) {
    switch (p) {
        case PipelinePreset::sys1: return "sys1";
        case PipelinePreset::sys2: return "sys2";
        case PipelinePreset::sys3: return "sys3";
        case PipelinePreset::custom: return "custom";
    }
    return "?";
}

PipelinePreset preset_from_string(const std::string& s) {
    if (s == "sys1") return PipelinePreset::sys1;
    if (s == "sys2") return PipelinePreset::sys2;
    if (s == "sys3") return PipelinePreset::sys3;
    if (s == "custom") return PipelinePreset::custom;
    throw ConfigError("unknown preset \"" + s + "\"");
}

std::vector<StageConfig> apply_preset(PipelinePreset preset,
                                      std::vector<StageConfig> stages) {
    if (preset == PipelinePreset::custom || preset == PipelinePreset::sys3) {
        // sys3 runs the full chain as configured
    } else {
        std::vector<StageConfig> kept;
        for (auto& s : stages) {
            bool is_geo = s.output_kind == ArtifactKind::geo_corrected;
            bool is_illum = s.output_kind == ArtifactKind::illum_corrected;
            if (preset == PipelinePreset::sys1 && (is_geo || is_illum)) continue;
            if (preset == PipelinePreset::sys2 && is_illum) continue;
            kept.push_back(std::move(s));
        }
        stages = std::move(kept);
    }
    // Rewire: every stage consumes exactly what its predecessor produced.
    for (std::size_t i = 1; i < stages.size(); ++i)
        stages[i].input_kind = stages[i - 1].output_kind;
    if (!stages.empty() && preset != PipelinePreset::custom)
        stages.front().input_kind = ArtifactKind::raw_image;
    return stages;
}

void validate_chain(const std::vector<StageConfig>& stages) {
    if (stages.empty()) throw ConfigError("pipeline has no stages");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto& s = stages[i];
        if (s.name.empty()) throw ConfigError("stage without a name");
        if (kind_rank(s.output_kind) <= kind_rank(s.input_kind))
            throw ConfigError("stage \"" + s.name + "\": output kind must come after input");
        if (s.kind == StageKind::external_command && s.command.empty())
            throw ConfigError("stage \"" + s.name + "\": external stage needs a command");
        if (s.workers < 1) throw ConfigError("stage \"" + s.name + "\": workers must be >= 1");
        if (s.batch_size < 0)
            throw ConfigError("stage \"" + s.name + "\": batch_size must be >= 0");
        if (i > 0 && stages[i].input_kind != stages[i - 1].output_kind)
            throw ConfigError("stage \"" + s.name + "\" breaks the artifact chain");
    }
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed pipeline config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("pipeline config: expected object");

    PipelineConfig config;
    if (auto it = j.find("preset"); it != j.end())
        config.preset = preset_from_string(it->get<std::string>());
    if (auto it = j.find("work_dir"); it != j.end())
        config.work_dir = it->get<std::string>();
    if (auto it = j.find("doc_workers"); it != j.end()) {
        config.doc_workers = it->get<int>();
        if (config.doc_workers < 1) throw ConfigError("doc_workers must be >= 1");
    }

    auto it = j.find("stages");
    if (it == j.end() || !it->is_array()) throw ConfigError("pipeline config: stages[] missing");
    for (const auto& s : *it) {
        StageConfig stage;
        stage.name = s.at("name").get<std::string>();
        std::string kind = s.value("kind", std::string("external_command"));
        if (kind == "external_command")
            stage.kind = StageKind::external_command;
        else if (kind == "passthrough")
            stage.kind = StageKind::passthrough;
        else
            throw ConfigError("stage \"" + stage.name + "\": unknown kind \"" + kind + "\"");
        stage.command = s.value("command", std::string());
        stage.input_kind = artifact_kind_from_string(s.at("input_kind").get<std::string>());
        stage.output_kind = artifact_kind_from_string(s.at("output_kind").get<std::string>());
        stage.workers = s.value("workers", 2);
        stage.batch_size =
            s.value("batch_size", stage.output_kind == ArtifactKind::recognized ? 160 : 0);
        stage.timeout_sec = s.value("timeout_sec", 300.0);
        config.stages.push_back(std::move(stage));
    }

    config.stages = apply_preset(config.preset, std::move(config.stages));
    validate_chain(config.stages);
    return config;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return pipeline_config_from_json(buf.str());
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::string expand_template(const std::string& tmpl, const fs::path& input,
                            const fs::path& output, std::size_t batch) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size();) {
        if (tmpl.compare(i, 7, "{input}") == 0) {
            out += shell_quote(input.string());
            i += 7;
        } else if (tmpl.compare(i, 8, "{output}") == 0) {
            out += shell_quote(output.string());
            i += 8;
        } else if (tmpl.compare(i, 7, "{batch}") == 0) {
            out += std::to_string(batch);
            i += 7;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

// Runs `cmd` under /bin/sh with stdout/stderr appended to `log_path`.
// Throws StageSpawnError / StageTimeoutError; returns the exit code.
int run_command(const std::string& cmd, const fs::path& log_path, double timeout_sec) {
    int log_fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (log_fd < 0) throw StageSpawnError("cannot open log " + log_path.string());

    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(log_fd);
        throw StageSpawnError("fork failed");
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(log_fd, 1);
        ::dup2(log_fd, 2);
        ::close(log_fd);
        ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    ::close(log_fd);

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
    for (;;) {
        int status = 0;
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            if (WIFEXITED(status)) return WEXITSTATUS(status);
            if (WIFSIGNALED(status))
                throw StageProtocolError("command killed by signal " +
                                         std::to_string(WTERMSIG(status)));
            return -1;
        }
        if (r < 0) throw StageSpawnError("waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
            throw StageTimeoutError("command exceeded " +
                                    detail::format_number(timeout_sec) + "s");
        }
        ::usleep(2000);
    }
}

void copy_bytes(const fs::path& from, const fs::path& to) {
    std::error_code ec;
    fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
    if (ec) throw Error("copy " + from.string() + " -> " + to.string() + ": " + ec.message());
}

fs::path stage_output_path(const fs::path& work_dir, const StageConfig& stage,
                           const fs::path& input) {
    std::string ext;
    if (is_structured(stage.output_kind))
        ext = ".json";
    else if (stage.output_kind == ArtifactKind::html)
        ext = ".html";
    else
        ext = input.extension().string();
    return work_dir / stage.name / (input.stem().string() + ext);
}

void check_output(const StageConfig& stage, const fs::path& out_path,
                  const std::string& doc_id) {
    if (!fs::exists(out_path))
        throw StageProtocolError("stage \"" + stage.name + "\" produced no output for " +
                                 doc_id);
    if (is_structured(stage.output_kind)) {
        try {
            load_document(out_path);
        } catch (const Error& e) {
            throw StageProtocolError("stage \"" + stage.name + "\" wrote invalid JSON for " +
                                     doc_id + ": " + e.what());
        }
    }
}

// Recognition-style stages: words travel in batches of stage.batch_size; each
// batch file is the document with only that word slice, the outputs must keep
// word counts, and the merged result preserves word order.
void run_batched_stage(const StageConfig& stage, const fs::path& work_dir,
                       const fs::path& in_path, const fs::path& out_path,
                       const fs::path& log_path, const std::string& doc_id) {
    DocumentAnnotation doc = load_document(in_path);
    auto batches = batch_items(doc.words, static_cast<std::size_t>(stage.batch_size));

    fs::path batch_dir = work_dir / stage.name / "batches";
    fs::create_directories(batch_dir);

    struct BatchOut {
        std::vector<WordInstance> words;
    };
    auto run_one = [&](std::size_t b) -> BatchOut {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_b%04zu", b);
        fs::path bin = batch_dir / (in_path.stem().string() + suffix + ".in.json");
        fs::path bout = batch_dir / (in_path.stem().string() + suffix + ".out.json");
        DocumentAnnotation slice = doc;
        slice.words = batches[b];
        save_document(slice, bin);
        int code = run_command(expand_template(stage.command, bin, bout, b), log_path,
                               stage.timeout_sec);
        if (code != 0)
            throw StageProtocolError("stage \"" + stage.name + "\" batch " +
                                     std::to_string(b) + " exited " + std::to_string(code));
        DocumentAnnotation result;
        try {
            result = load_document(bout);
        } catch (const Error& e) {
            throw StageProtocolError("stage \"" + stage.name + "\" batch " +
                                     std::to_string(b) + " wrote invalid JSON: " + e.what());
        }
        if (result.words.size() != batches[b].size())
            throw StageProtocolError("stage \"" + stage.name + "\" batch " +
                                     std::to_string(b) + " changed the word count");
        return {std::move(result.words)};
    };

    auto outcome = parallel_map<BatchOut>(batches.size(), stage.workers, run_one);
    if (outcome.failed_index)
        throw StageProtocolError(outcome.error);

    DocumentAnnotation merged = doc;
    merged.words.clear();
    for (auto& r : outcome.results)
        for (auto& w : r->words) merged.words.push_back(std::move(w));
    save_document(merged, out_path);
    (void)doc_id;
}

}  // namespace

PipelineRunResult run_pipeline(const PipelineConfig& config,
                               const std::vector<StageArtifact>& inputs) {
    validate_chain(config.stages);
    if (config.work_dir.empty()) throw ConfigError("pipeline config: work_dir not set");
    fs::create_directories(config.work_dir);
    for (const auto& s : config.stages) fs::create_directories(config.work_dir / s.name);
    fs::create_directories(config.work_dir / "logs");

    int doc_workers = config.doc_workers;
    if (const char* env = std::getenv("DOCREBENCH_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ConfigError("DOCREBENCH_WORKERS must be a positive integer");
        doc_workers = static_cast<int>(v);
    }

    struct JobOutcome {
        std::optional<StageArtifact> output;
        DocumentTimings timings;
        std::optional<DocumentFailure> failure;
    };

    auto job = [&](std::size_t i) -> JobOutcome {
        const StageArtifact& start = inputs[i];
        std::string doc_id = start.path.stem().string();
        JobOutcome out;
        out.timings.doc_id = doc_id;
        out.timings.preset = to_string(config.preset);
        fs::path log_path = config.work_dir / "logs" / (doc_id + ".log");

        const auto job_start = std::chrono::steady_clock::now();
        StageArtifact artifact = start;
        if (is_structured(artifact.kind)) {
            try {
                out.timings.domain = load_document(artifact.path).domain;
            } catch (const Error&) {
            }
        }
        for (const auto& stage : config.stages) {
            if (artifact.kind != stage.input_kind) {
                out.failure = DocumentFailure{
                    doc_id, stage.name,
                    "artifact kind " + std::string(to_string(artifact.kind)) +
                        " does not match stage input " + to_string(stage.input_kind)};
                return out;
            }
            fs::path out_path = stage_output_path(config.work_dir, stage, artifact.path);
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (stage.kind == StageKind::passthrough) {
                    copy_bytes(artifact.path, out_path);
                } else if (stage.batch_size > 0 && is_structured(stage.input_kind)) {
                    run_batched_stage(stage, config.work_dir, artifact.path, out_path,
                                      log_path, doc_id);
                } else {
                    int code =
                        run_command(expand_template(stage.command, artifact.path, out_path, 0),
                                    log_path, stage.timeout_sec);
                    if (code != 0)
                        throw StageProtocolError("stage \"" + stage.name + "\" exited " +
                                                 std::to_string(code) + " for " + doc_id);
                    check_output(stage, out_path, doc_id);
                }
            } catch (const std::exception& e) {
                out.failure = DocumentFailure{doc_id, stage.name, e.what()};
                return out;
            }
            const auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count();
            out.timings.stages.push_back({stage.name, secs});
            out.timings.total_seconds += secs;
            artifact = StageArtifact{stage.output_kind, out_path, stage.name};
            if (is_structured(artifact.kind) && out.timings.domain.empty()) {
                try {
                    out.timings.domain = load_document(artifact.path).domain;
                } catch (const Error&) {
                }
            }
        }
        const auto job_end = std::chrono::steady_clock::now();
        out.timings.overhead_seconds =
            std::chrono::duration<double>(job_end - job_start).count() -
            out.timings.total_seconds;
        out.output = artifact;
        return out;
    };

    auto outcome = parallel_map<JobOutcome>(inputs.size(), doc_workers, job);

    PipelineRunResult result;
    result.outputs.resize(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!outcome.results[i]) continue;  // only on internal job exceptions
        JobOutcome& jo = *outcome.results[i];
        result.outputs[i] = jo.output;
        result.timings.push_back(std::move(jo.timings));
        if (jo.failure) result.failures.push_back(std::move(*jo.failure));
    }
    if (outcome.failed_index)
        result.failures.push_back(
            {inputs[*outcome.failed_index].path.stem().string(), "<orchestrator>",
             outcome.error});
    return result;
}

TimingTable timing_report(const std::vector<DocumentTimings>& timings) {
    if (timings.empty()) throw Error("timing_report: no timings");
    TimingTable table;
    for (const auto& t : timings) {
        std::string domain = t.domain.empty() ? "(unknown)" : t.domain;
        auto& cell = table.rows[domain][t.preset];
        cell.total += t.total_seconds;
        cell.count += 1;
        if (std::find(table.presets.begin(), table.presets.end(), t.preset) ==
            table.presets.end())
            table.presets.push_back(t.preset);
    }
    std::sort(table.presets.begin(), table.presets.end());
    return table;
}

namespace {

std::string preset_display(const std::string& p) {
    if (p == "sys1") return "Sys-1";
    if (p == "sys2") return "Sys-2";
    if (p == "sys3") return "Sys-3";
    return p;
}

}  // namespace

std::string timing_table_markdown(const TimingTable& table) {
    std::string out = "| Domain Name |";
    for (const auto& p : table.presets) out += " " + preset_display(p) + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < table.presets.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& [domain, cells] : table.rows) {
        out += "| " + domain + " |";
        for (const auto& p : table.presets) {
            auto it = cells.find(p);
            out += " ";
            out += it != cells.end() ? detail::format_fixed(it->second.mean(), 2) : "-";
            out += " |";
        }
        out += "\n";
    }
    return out;
}

std::string timings_to_json(const std::vector<DocumentTimings>& timings) {
    json arr = json::array();
    for (const auto& t : timings) {
        json o;
        o["doc_id"] = t.doc_id;
        o["domain"] = t.domain;
        o["preset"] = t.preset;
        o["total_seconds"] = t.total_seconds;
        o["overhead_seconds"] = t.overhead_seconds;
        json stages = json::array();
        for (const auto& s : t.stages) {
            json e;
            e["stage"] = s.stage;
            e["seconds"] = s.seconds;
            stages.push_back(std::move(e));
        }
        o["stages"] = std::move(stages);
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

}  // namespace docrebench
