#pragma once

#include "iccwatch/catalog.hpp"
#include "iccwatch/icc_model.hpp"
#include "iccwatch/log_event.hpp"
#include "iccwatch/metadata.hpp"

#include <chrono>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

/// Structural problem in the event stream or a failing stage, labelled with
/// the stage name ("parse", "build", ...).
class AnalysisError : public std::runtime_error {
public:
    AnalysisError(std::string stage, const std::string& message);
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct AnalyzerOptions {
    /// Test oracle: treat every tainted intent as leaked regardless of sinks.
    bool ignore_sink_presence = false;
    bool deflate = true;
    bool trace_bypass = true;
};

/// One raw model per delivered (intent, receiver) pair, plus one per intent
/// that reached nobody, in SEND_INTENT order.
std::vector<IccModel> build_models(const std::vector<LogEvent>& events, const AppMetadata& meta,
                                   const Catalog& catalog = Catalog::defaults(),
                                   const AnalyzerOptions& options = {});

/// Recomputes required/lacked permissions, taint_leak and start_compt.
void attribute_permissions(IccModel& model, const AppMetadata& meta, const Catalog& catalog,
                           const AnalyzerOptions& options = {});

/// Folds chooser hops and relay chains into end-to-end models.
std::vector<IccModel> deflate_models(std::vector<IccModel> models, const AppMetadata& meta,
                                     const Catalog& catalog = Catalog::defaults(),
                                     const AnalyzerOptions& options = {});

/// Resolves the original sender of labels that reached m's sinks without
/// travelling in m's intent (Shareference / Application object relays).
IccModel trace_bypass_sources(const IccModel& m, const std::vector<IccModel>& prior, const AppMetadata& meta,
                              const Catalog& catalog = Catalog::defaults(), const AnalyzerOptions& options = {});

/// First matching case wins; intra-app and undelivered models are None.
ThreatVerdict classify(const IccModel& model);

struct StageTimings {
    std::chrono::nanoseconds parse{0};
    std::chrono::nanoseconds build{0};
    std::chrono::nanoseconds deflate{0};
    std::chrono::nanoseconds trace{0};
    std::chrono::nanoseconds classify{0};

    std::chrono::nanoseconds total() const { return parse + build + deflate + trace + classify; }
};

struct AnalysisResult {
    std::vector<IccModel> raw_models;
    std::vector<IccModel> models;   // after deflation and bypass tracing
    std::vector<ThreatVerdict> verdicts;
    std::size_t skipped_records = 0;
    StageTimings timings;
};

AnalysisResult analyze_events(const std::vector<LogEvent>& events, const AppMetadata& meta,
                              const Catalog& catalog = Catalog::defaults(), const AnalyzerOptions& options = {});

/// parse -> build -> deflate -> trace -> classify. An empty focus set means
/// every pid listed in the metadata.
AnalysisResult analyze(std::string_view log_text, const AppMetadata& meta, std::set<std::uint32_t> focus = {},
                       const Catalog& catalog = Catalog::defaults(), const AnalyzerOptions& options = {});

}  // namespace iccwatch
