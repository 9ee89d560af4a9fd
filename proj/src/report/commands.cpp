#include "iccwatch/commands.hpp"

#include "iccwatch/corpus.hpp"
#include "iccwatch/log_format.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace iccwatch {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::uint64_t now_seconds() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

AnalyzerOptions analyzer_options(const CommandOptions& options) {
    AnalyzerOptions a;
    a.ignore_sink_presence = options.ignore_sink_presence;
    return a;
}

bool any_threat(const Report& report) {
    for (const auto& r : report.records) {
        if (r.threat != ThreatType::None) return true;
    }
    return false;
}

int emit_report(const Report& report, const CommandOptions& options, std::ostream& out) {
    out << (options.format == ReportFormat::Json ? report_to_json(report) : report_to_table(report));
    return options.fail_on_threat && any_threat(report) ? kExitThreat : kExitOk;
}

std::vector<ExpectedVerdict> load_expectations(const std::string& path, const Catalog& catalog) {
    const std::string text = read_file(path);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        if (line.compare(start, kScenarioMagic.size(), kScenarioMagic) == 0) {
            return parse_scenario(text, catalog).expected_verdicts;
        }
        break;
    }
    return parse_expectations(text);
}

}  // namespace

Catalog load_catalog(const std::optional<std::string>& path) {
    if (!path) return Catalog::defaults();
    return Catalog::from_json(read_file(*path));
}

std::string default_meta_path(const std::string& log_path) { return log_path + ".meta.json"; }

EndToEnd run_and_analyze(const Scenario& scenario, const Catalog& catalog, const AnalyzerOptions& options,
                         bool test_mode, const std::set<std::uint32_t>& focus) {
    EndToEnd e;
    e.run = run_scenario(scenario, catalog);
    e.log_text = write_log(e.run.events, test_mode ? 0 : now_seconds());
    e.analysis = analyze(e.log_text, e.run.metadata, focus, catalog, options);
    return e;
}

Report corpus_report(const std::vector<Scenario>& scenarios, const Catalog& catalog, const AnalyzerOptions& options,
                     bool test_mode) {
    Report report;
    for (const auto& s : scenarios) {
        const EndToEnd e = run_and_analyze(s, catalog, options, test_mode);
        add_to_report(report, s.name, e.analysis, s.expected_verdicts, test_mode,
                      s.dataset.empty() ? std::string_view("misc") : std::string_view(s.dataset));
    }
    return report;
}

int cmd_run(const std::string& scenario_path, const std::string& log_path, const std::optional<std::string>& meta_path,
            const CommandOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const Catalog catalog = load_catalog(options.catalog_path);
        const Scenario scenario = parse_scenario(read_file(scenario_path), catalog);
        const RunResult run = run_scenario(scenario, catalog);
        const std::string meta_file = meta_path.value_or(default_meta_path(log_path));
        write_file(log_path, write_log(run.events, options.test_mode ? 0 : now_seconds()));
        write_file(meta_file, write_metadata(run.metadata));
        out << "wrote " << run.events.size() << " events to " << log_path << " and metadata to " << meta_file << '\n';
        return kExitOk;
    } catch (const ScenarioError& e) {
        err << "iccwatch run: " << scenario_path << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "iccwatch run: " << e.what() << '\n';
    }
    return kExitError;
}

int cmd_analyze(const std::string& log_path, const std::optional<std::string>& meta_path,
                const std::optional<std::string>& expected_path, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
    try {
        const Catalog catalog = load_catalog(options.catalog_path);
        const AppMetadata meta = parse_metadata(read_file(meta_path.value_or(default_meta_path(log_path))));
        std::optional<std::vector<ExpectedVerdict>> expected;
        if (expected_path) expected = load_expectations(*expected_path, catalog);
        const AnalysisResult result =
            analyze(read_file(log_path), meta, options.focus, catalog, analyzer_options(options));
        Report report;
        add_to_report(report, std::filesystem::path(log_path).filename().string(), result, expected, options.test_mode);
        return emit_report(report, options, out);
    } catch (const std::exception& e) {
        err << "iccwatch analyze: " << e.what() << '\n';
    }
    return kExitError;
}

int cmd_e2e(const std::optional<std::string>& scenario_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err) {
    try {
        const Catalog catalog = load_catalog(options.catalog_path);
        if (!scenario_path) {
            return emit_report(corpus_report(builtin_corpus(), catalog, analyzer_options(options), options.test_mode),
                               options, out);
        }
        const Scenario scenario = parse_scenario(read_file(*scenario_path), catalog);
        const EndToEnd e = run_and_analyze(scenario, catalog, analyzer_options(options), options.test_mode,
                                           options.focus);
        Report report;
        add_to_report(report, scenario.name, e.analysis, scenario.expected_verdicts, options.test_mode);
        return emit_report(report, options, out);
    } catch (const std::exception& e) {
        err << "iccwatch e2e: " << e.what() << '\n';
    }
    return kExitError;
}

int cmd_corpus_list(std::ostream& out) {
    for (const auto& name : corpus_names()) out << name << '\n';
    return kExitOk;
}

int cmd_corpus_emit(const std::string& name, std::ostream& out, std::ostream& err) {
    try {
        out << corpus_text(name);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "iccwatch corpus: " << e.what() << '\n';
    }
    return kExitError;
}

}  // namespace iccwatch
