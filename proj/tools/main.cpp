#include <iostream>

#include <CLI11.hpp>

#include "docrebench/cli.hpp"
#include "docrebench/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"docrebench: document OCR pipeline evaluation and reconstruction"};
    app.set_version_flag("--version", docrebench::kToolVersion);
    app.require_subcommand(1);

    docrebench::EvaluateOptions eval_opt;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Score prediction documents against ground truth");
    evaluate->add_option("--gt", eval_opt.gt_dir, "Ground truth directory")->required();
    evaluate->add_option("--pred", eval_opt.pred_dir, "Prediction directory")->required();
    evaluate->add_option("--out", eval_opt.out_dir, "Output directory")->required();
    evaluate->add_option("--format", eval_opt.format, "Report format: md|csv|json");

    docrebench::ReconstructOptions rec_opt;
    auto* reconstruct =
        app.add_subcommand("reconstruct", "Emit index.html for a prediction document");
    reconstruct->add_option("--pred", rec_opt.pred_file, "Prediction document (JSON)")
        ->required();
    reconstruct->add_option("--out", rec_opt.out_dir, "Output directory")->required();

    docrebench::SynthOptions synth_opt;
    auto* synth =
        app.add_subcommand("synth", "Generate synthetic fixture triples with exact oracles");
    synth->add_option("--spec", synth_opt.spec_file, "Fixture spec (JSON)")->required();
    synth->add_option("--out", synth_opt.out_dir, "Output directory")->required();

    docrebench::RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run a stage pipeline over input documents");
    run->add_option("--config", run_opt.config_file, "Pipeline config (JSON)")->required();
    run->add_option("--inputs", run_opt.inputs_dir, "Input artifact directory")->required();
    run->add_option("--out", run_opt.out_dir, "Output directory")->required();

    docrebench::ReportOptions report_opt;
    auto* report = app.add_subcommand("report", "Aggregate per-image scores into a table");
    report->add_option("--scores", report_opt.scores_file, "Per-image scores CSV")
        ->required();
    report->add_option("--format", report_opt.format, "Table format: md|csv|json");
    report->add_option("--out", report_opt.out_dir, "Optional output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : docrebench::kExitData;
    }

    try {
        if (*evaluate) return docrebench::cmd_evaluate(eval_opt, std::cout, std::cerr);
        if (*reconstruct) return docrebench::cmd_reconstruct(rec_opt, std::cout, std::cerr);
        if (*synth) return docrebench::cmd_synth(synth_opt, std::cout, std::cerr);
        if (*run) return docrebench::cmd_run(run_opt, std::cout, std::cerr);
        if (*report) return docrebench::cmd_report(report_opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return docrebench::kExitInternal;
    }
    return docrebench::kExitInternal;
}
