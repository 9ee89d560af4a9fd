#pragma once

#include "iccwatch/analyzer.hpp"
#include "iccwatch/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

struct ReportRecord {
    std::string log;
    ComponentId sender;
    ComponentId receiver;
    ThreatType threat = ThreatType::None;
    std::optional<int> matched_case;
    std::vector<Evidence> evidence;
    std::vector<std::string> provenance;  // "pkg/Name: what"
    std::vector<std::string> diagnostics;

    bool operator==(const ReportRecord&) const = default;
};

/// Precision = TP / (TP + FP), recall = TP / expected. Both are 1.0 when
/// their denominator is zero.
struct Score {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t expected = 0;
    double precision = 1.0;
    double recall = 1.0;

    bool operator==(const Score&) const = default;
};

/// Microseconds; all zero in test mode.
struct Timing {
    std::uint64_t parse_us = 0;
    std::uint64_t build_us = 0;
    std::uint64_t deflate_us = 0;
    std::uint64_t trace_us = 0;
    std::uint64_t classify_us = 0;
    std::uint64_t total_us = 0;
    std::uint64_t per_model_mean_us = 0;
    std::size_t models = 0;

    bool operator==(const Timing&) const = default;
};

struct Report {
    std::vector<ReportRecord> records;
    std::map<std::string, std::size_t> counts;   // threat name -> verdicts
    std::optional<Score> score;
    std::map<std::string, Score> dataset_scores;  // batch mode only
    Timing timing;

    bool operator==(const Report&) const = default;
};

Score score_verdicts(const std::vector<ReportRecord>& records, const std::vector<ExpectedVerdict>& expected);

/// Adds one analyzed log. `expected` switches on scoring for this log.
void add_to_report(Report& report, std::string_view log_name, const AnalysisResult& result,
                   const std::optional<std::vector<ExpectedVerdict>>& expected, bool test_mode,
                   std::string_view dataset = {});

std::string report_to_json(const Report& report);
/// Throws std::runtime_error on malformed input.
Report report_from_json(std::string_view text);
std::string report_to_table(const Report& report);

}  // namespace iccwatch
