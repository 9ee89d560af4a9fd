#pragma once

#include "iccwatch/analyzer.hpp"
#include "iccwatch/report.hpp"
#include "iccwatch/scenario.hpp"
#include "iccwatch/simulator.hpp"

#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace iccwatch {

enum class ReportFormat { Table, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitThreat = 3;

struct CommandOptions {
    ReportFormat format = ReportFormat::Table;
    bool fail_on_threat = false;
    bool test_mode = false;              // zero timestamps and timings
    std::set<std::uint32_t> focus;       // empty: every app in the metadata
    std::optional<std::string> catalog_path;
    bool ignore_sink_presence = false;
};

/// Default catalog, or the JSON file at `path`.
Catalog load_catalog(const std::optional<std::string>& path);

std::string default_meta_path(const std::string& log_path);

/// Simulation plus analysis of one scenario through the textual log.
struct EndToEnd {
    RunResult run;
    std::string log_text;
    AnalysisResult analysis;
};

EndToEnd run_and_analyze(const Scenario& scenario, const Catalog& catalog, const AnalyzerOptions& options,
                         bool test_mode, const std::set<std::uint32_t>& focus = {});

/// Batch over scenarios, scored against their expectations and grouped by dataset.
Report corpus_report(const std::vector<Scenario>& scenarios, const Catalog& catalog,
                     const AnalyzerOptions& options, bool test_mode);

int cmd_run(const std::string& scenario_path, const std::string& log_path,
            const std::optional<std::string>& meta_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err);

/// `expected_path` may hold `expect` lines or a whole scenario document.
int cmd_analyze(const std::string& log_path, const std::optional<std::string>& meta_path,
                const std::optional<std::string>& expected_path, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

/// Runs one scenario file, or the whole builtin corpus when `scenario_path` is empty.
int cmd_e2e(const std::optional<std::string>& scenario_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err);

int cmd_corpus_list(std::ostream& out);
int cmd_corpus_emit(const std::string& name, std::ostream& out, std::ostream& err);

}  // namespace iccwatch
