#pragma once

#include <string>
#include <vector>

#include "docrebench/metrics.hpp"

namespace docrebench {

/// Per-image score row; the CSV interchange format of `evaluate` and `report`.
struct ScoreRow {
    std::string image_id;
    std::string domain;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
    double cer = 0.0;
    double wer = 0.0;
    double char_weight = 0.0;
    double word_weight = 0.0;
};

ScoreRow to_row(const DocumentScore& score);

std::string scores_to_csv(const std::vector<ScoreRow>& rows);

/// Parses the CSV; malformed rows are skipped and reported with their line
/// numbers in `row_errors`.
std::vector<ScoreRow> scores_from_csv(const std::string& text,
                                      std::vector<std::string>* row_errors = nullptr);

struct DomainReport {
    std::string domain;
    int n_images = 0;
    double recall = 0.0;
    double precision = 0.0;
    double f = 0.0;
    double cer = 0.0;
    double wer = 0.0;
};

/// Per-domain means over images plus the cross-domain per-image average (all
/// images weighted equally, not domains).
struct ReportTable {
    std::vector<DomainReport> domains;  // sorted by domain name
    DomainReport per_image_average;     // domain = "Per Image Average"
};

ReportTable aggregate_scores(const std::vector<ScoreRow>& rows);

std::string render_markdown(const ReportTable& table);
std::string render_csv(const ReportTable& table);
std::string render_json(const ReportTable& table);

}  // namespace docrebench
