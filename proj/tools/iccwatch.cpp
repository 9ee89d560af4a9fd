#include "iccwatch/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace iccwatch;

namespace {

void add_common(CLI::App& cmd, CommandOptions& opts) {
    cmd.add_option("--catalog", opts.catalog_path, "Tag/method catalog JSON (default: embedded)");
    cmd.add_flag("--test-mode", opts.test_mode, "Zero the header timestamp and timings");
}

void add_report_flags(CLI::App& cmd, CommandOptions& opts, std::string& format) {
    cmd.add_option("--format", format, "Report format")->check(CLI::IsMember({"table", "json"}));
    cmd.add_flag("--fail-on-threat", opts.fail_on_threat, "Exit with status 3 when any threat is reported");
    cmd.add_option("--focus", opts.focus, "Only analyze events of these pids (default: all apps)")->delimiter(',');
    cmd.add_flag("--ignore-sink-presence", opts.ignore_sink_presence,
                 "Degraded mode: flag every tainted intent as leaked");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulates Android ICC with taint tracking and classifies hijacking, spoofing and collusion"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::string format = "table";

    std::string scenario_path, log_path, meta_path, expected_path;

    auto* run = app.add_subcommand("run", "Simulate a scenario and write its taint log plus metadata");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("-o,--out", log_path, "Output log path")->required();
    run->add_option("--meta", meta_path, "Metadata output path (default: <log>.meta.json)");
    add_common(*run, opts);

    auto* analyze = app.add_subcommand("analyze", "Build ICC models from a log and classify threats");
    analyze->add_option("log", log_path, "Taint log")->required();
    analyze->add_option("--meta", meta_path, "App metadata (default: <log>.meta.json)");
    analyze->add_option("--expected", expected_path, "Ground truth: expect lines or a scenario file");
    add_common(*analyze, opts);
    add_report_flags(*analyze, opts, format);

    auto* e2e = app.add_subcommand("e2e", "Run and analyze a scenario, or the whole builtin corpus");
    bool whole_corpus = false;
    e2e->add_option("scenario", scenario_path, "Scenario file");
    e2e->add_flag("--corpus", whole_corpus, "Batch over the builtin corpus");
    add_common(*e2e, opts);
    add_report_flags(*e2e, opts, format);

    auto* corpus = app.add_subcommand("corpus", "Builtin scenarios (ICCWATCH_CORPUS_DIR overrides the set)");
    corpus->require_subcommand(1);
    corpus->add_subcommand("list", "List scenario names");
    std::string emit_name;
    auto* emit = corpus->add_subcommand("emit", "Print one scenario document");
    emit->add_option("name", emit_name, "Scenario name")->required();

    CLI11_PARSE(app, argc, argv);
    opts.format = format == "json" ? ReportFormat::Json : ReportFormat::Table;
    auto optional_of = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };

    if (run->parsed()) return cmd_run(scenario_path, log_path, optional_of(meta_path), opts, std::cout, std::cerr);
    if (analyze->parsed()) {
        return cmd_analyze(log_path, optional_of(meta_path), optional_of(expected_path), opts, std::cout, std::cerr);
    }
    if (e2e->parsed()) {
        if (whole_corpus == !scenario_path.empty()) {
            std::cerr << "iccwatch e2e: give either a scenario file or --corpus\n";
            return kExitError;
        }
        return cmd_e2e(optional_of(scenario_path), opts, std::cout, std::cerr);
    }
    if (emit->parsed()) return cmd_corpus_emit(emit_name, std::cout, std::cerr);
    return cmd_corpus_list(std::cout);
}
