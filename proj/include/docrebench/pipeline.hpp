#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "docrebench/model.hpp"

namespace docrebench {

enum class StageKind { external_command, passthrough };

/// One pipeline stage. External commands are shell templates with {input},
/// {output} and {batch} placeholders (paths are substituted shell-quoted);
/// exit code 0 means success, stdout/stderr go to a per-document log file,
/// and the output artifact must exist — and parse, for structured kinds —
/// when the command returns.
struct StageConfig {
    std::string name;
    StageKind kind = StageKind::passthrough;
    std::string command;
    ArtifactKind input_kind = ArtifactKind::raw_image;
    ArtifactKind output_kind = ArtifactKind::raw_image;
    int workers = 2;       // intra-stage (batch) parallelism
    int batch_size = 0;    // > 0 splits words into batches (recognition)
    double timeout_sec = 300.0;
};

enum class PipelinePreset { sys1, sys2, sys3, custom };

const char* to_string(PipelinePreset p);
PipelinePreset preset_from_string(const std::string& s);

struct PipelineConfig {
    PipelinePreset preset = PipelinePreset::custom;
    std::vector<StageConfig> stages;  // resolved, contiguous chain
    std::filesystem::path work_dir;
    int doc_workers = 2;  // document-level parallelism; DOCREBENCH_WORKERS overrides
};

/// Drops the preprocessing stages a preset excludes (sys1: geometric and
/// illumination correction, sys2: illumination only) and rewires the chain.
std::vector<StageConfig> apply_preset(PipelinePreset preset,
                                      std::vector<StageConfig> stages);

/// Throws ConfigError unless stage kinds form a strictly forward, contiguous
/// chain.
void validate_chain(const std::vector<StageConfig>& stages);

PipelineConfig pipeline_config_from_json(const std::string& text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct DocumentTimings {
    std::string doc_id;
    std::string domain;
    std::string preset;
    std::vector<StageTiming> stages;
    double total_seconds = 0.0;     // sum of stage times
    double overhead_seconds = 0.0;  // scheduling overhead, recorded separately
};

struct DocumentFailure {
    std::string doc_id;
    std::string stage;
    std::string message;
};

struct PipelineRunResult {
    std::vector<std::optional<StageArtifact>> outputs;  // one slot per input
    std::vector<DocumentTimings> timings;
    std::vector<DocumentFailure> failures;
};

/// Runs every input document through the stage chain with bounded
/// parallelism. Failures are isolated per document: a failing stage records a
/// diagnostic and the remaining documents keep going.
PipelineRunResult run_pipeline(const PipelineConfig& config,
                               const std::vector<StageArtifact>& inputs);

/// Contiguous batches, all full except possibly the last;
/// concat(batch_items(x, n)) == x.
template <typename T>
std::vector<std::vector<T>> batch_items(const std::vector<T>& items,
                                        std::size_t batch_size) {
    std::vector<std::vector<T>> out;
    if (batch_size == 0) batch_size = 1;
    for (std::size_t i = 0; i < items.size(); i += batch_size) {
        std::size_t end = std::min(items.size(), i + batch_size);
        out.emplace_back(items.begin() + i, items.begin() + end);
    }
    return out;
}

template <typename R>
struct ParallelResult {
    std::vector<std::optional<R>> results;  // in input order
    std::optional<std::size_t> failed_index;
    std::string error;
};

/// Runs fn(0..n-1) on at most `workers` threads. Results keep input order.
/// The first failure (lowest index among failed jobs) cancels dispatch of
/// jobs not yet started; completed results are still returned.
template <typename R, typename Fn>
ParallelResult<R> parallel_map(std::size_t n, int workers, Fn&& fn) {
    ParallelResult<R> out;
    out.results.resize(n);
    if (n == 0) return out;
    workers = std::max(1, workers);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> cancelled{false};
    std::mutex mu;

    auto body = [&] {
        for (;;) {
            if (cancelled.load(std::memory_order_relaxed)) return;
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                R r = fn(i);
                std::lock_guard<std::mutex> lock(mu);
                out.results[i] = std::move(r);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (!out.failed_index || i < *out.failed_index) {
                    out.failed_index = i;
                    out.error = e.what();
                }
                cancelled.store(true, std::memory_order_relaxed);
            }
        }
    };

    if (workers == 1 || n == 1) {
        body();
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    return out;
}

struct TimingCell {
    double total = 0.0;
    int count = 0;
    double mean() const { return count > 0 ? total / count : 0.0; }
};

/// domain -> preset -> mean wall seconds.
struct TimingTable {
    std::map<std::string, std::map<std::string, TimingCell>> rows;
    std::vector<std::string> presets;  // column order
};

TimingTable timing_report(const std::vector<DocumentTimings>& timings);
std::string timing_table_markdown(const TimingTable& table);
std::string timings_to_json(const std::vector<DocumentTimings>& timings);

}  // namespace docrebench
