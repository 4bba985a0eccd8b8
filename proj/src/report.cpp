#include "docrebench/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "docrebench/errors.hpp"
#include "numfmt.hpp"

namespace docrebench {

using nlohmann::json;
using detail::format_fixed;
using detail::format_number;

ScoreRow to_row(const DocumentScore& s) {
    ScoreRow r;
    r.image_id = s.image_id;
    r.domain = s.domain;
    r.tp = s.word_level.tp;
    r.fp = s.word_level.fp;
    r.fn = s.word_level.fn;
    r.precision = s.word_level.precision;
    r.recall = s.word_level.recall;
    r.f = s.word_level.f;
    r.cer = s.text_level.cer;
    r.wer = s.text_level.wer;
    r.char_weight = s.text_level.char_weight;
    r.word_weight = s.text_level.word_weight;
    return r;
}

namespace {

constexpr const char* kHeader =
    "image_id,domain,tp,fp,fn,precision,recall,f,cer,wer,char_weight,word_weight";

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += "\"";
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

std::string scores_to_csv(const std::vector<ScoreRow>& rows) {
    std::string out = kHeader;
    out += "\n";
    for (const auto& r : rows) {
        out += csv_escape(r.image_id) + "," + csv_escape(r.domain) + "," +
               std::to_string(r.tp) + "," + std::to_string(r.fp) + "," +
               std::to_string(r.fn) + "," + format_number(r.precision) + "," +
               format_number(r.recall) + "," + format_number(r.f) + "," +
               format_number(r.cer) + "," + format_number(r.wer) + "," +
               format_number(r.char_weight) + "," + format_number(r.word_weight) + "\n";
    }
    return out;
}

std::vector<ScoreRow> scores_from_csv(const std::string& text,
                                      std::vector<std::string>* row_errors) {
    std::vector<ScoreRow> rows;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    bool saw_header = false;
    const auto report = [&](const std::string& msg) {
        if (row_errors)
            row_errors->push_back("line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            saw_header = true;
            if (line == kHeader) continue;
            report("missing or unexpected header; expected \"" + std::string(kHeader) +
                   "\"");
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 12) {
            report("expected 12 fields, got " + std::to_string(fields.size()));
            continue;
        }
        try {
            ScoreRow r;
            r.image_id = fields[0];
            r.domain = fields[1];
            r.tp = std::stol(fields[2]);
            r.fp = std::stol(fields[3]);
            r.fn = std::stol(fields[4]);
            r.precision = std::stod(fields[5]);
            r.recall = std::stod(fields[6]);
            r.f = std::stod(fields[7]);
            r.cer = std::stod(fields[8]);
            r.wer = std::stod(fields[9]);
            r.char_weight = std::stod(fields[10]);
            r.word_weight = std::stod(fields[11]);
            rows.push_back(std::move(r));
        } catch (const std::exception&) {
            report("non-numeric field");
        }
    }
    return rows;
}

ReportTable aggregate_scores(const std::vector<ScoreRow>& rows) {
    ReportTable table;
    std::map<std::string, std::vector<const ScoreRow*>> by_domain;
    for (const auto& r : rows) by_domain[r.domain].push_back(&r);

    const auto mean_of = [](const std::vector<const ScoreRow*>& group, auto member) {
        double sum = 0;
        for (const auto* r : group) sum += r->*member;
        return group.empty() ? 0.0 : sum / static_cast<double>(group.size());
    };
    const auto make_report = [&](const std::string& name,
                                 const std::vector<const ScoreRow*>& group) {
        DomainReport d;
        d.domain = name;
        d.n_images = static_cast<int>(group.size());
        d.recall = mean_of(group, &ScoreRow::recall);
        d.precision = mean_of(group, &ScoreRow::precision);
        d.f = mean_of(group, &ScoreRow::f);
        d.cer = mean_of(group, &ScoreRow::cer);
        d.wer = mean_of(group, &ScoreRow::wer);
        return d;
    };

    for (const auto& [domain, group] : by_domain)
        table.domains.push_back(make_report(domain, group));

    std::vector<const ScoreRow*> all;
    for (const auto& r : rows) all.push_back(&r);
    table.per_image_average = make_report("Per Image Average", all);
    return table;
}

std::string render_markdown(const ReportTable& table) {
    std::string out =
        "| Domain Name | Images | R | P | F | CER | WER |\n"
        "|---|---|---|---|---|---|---|\n";
    const auto row = [](const DomainReport& d) {
        return "| " + d.domain + " | " + std::to_string(d.n_images) + " | " +
               format_fixed(d.recall, 2) + " | " + format_fixed(d.precision, 2) + " | " +
               format_fixed(d.f, 2) + " | " + format_fixed(d.cer, 2) + " | " +
               format_fixed(d.wer, 2) + " |\n";
    };
    for (const auto& d : table.domains) out += row(d);
    out += row(table.per_image_average);
    return out;
}

std::string render_csv(const ReportTable& table) {
    std::string out = "domain,n_images,recall,precision,f,cer,wer\n";
    const auto row = [](const DomainReport& d) {
        return csv_escape(d.domain) + "," + std::to_string(d.n_images) + "," +
               format_fixed(d.recall, 2) + "," + format_fixed(d.precision, 2) + "," +
               format_fixed(d.f, 2) + "," + format_fixed(d.cer, 2) + "," +
               format_fixed(d.wer, 2) + "\n";
    };
    for (const auto& d : table.domains) out += row(d);
    out += row(table.per_image_average);
    return out;
}

std::string render_json(const ReportTable& table) {
    const auto to_json = [](const DomainReport& d) {
        json o;
        o["domain"] = d.domain;
        o["n_images"] = d.n_images;
        o["recall"] = d.recall;
        o["precision"] = d.precision;
        o["f"] = d.f;
        o["cer"] = d.cer;
        o["wer"] = d.wer;
        return o;
    };
    json j;
    json domains = json::array();
    for (const auto& d : table.domains) domains.push_back(to_json(d));
    j["domains"] = std::move(domains);
    j["per_image_average"] = to_json(table.per_image_average);
    return j.dump(2) + "\n";
}

}  // namespace docrebench
