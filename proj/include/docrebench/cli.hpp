#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace docrebench {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes shared by every subcommand: 0 success, 1 internal error,
// 2 input or data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitData = 2;

struct EvaluateOptions {
    std::filesystem::path gt_dir;
    std::filesystem::path pred_dir;
    std::filesystem::path out_dir;
    std::string format = "md";  // md | csv | json
};

struct ReconstructOptions {
    std::filesystem::path pred_file;
    std::filesystem::path out_dir;
};

struct SynthOptions {
    std::filesystem::path spec_file;
    std::filesystem::path out_dir;
};

struct RunOptions {
    std::filesystem::path config_file;
    std::filesystem::path inputs_dir;
    std::filesystem::path out_dir;
};

struct ReportOptions {
    std::filesystem::path scores_file;
    std::string format = "md";
    std::filesystem::path out_dir;  // optional; stdout only when empty
};

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const ReconstructOptions& opt, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace docrebench
