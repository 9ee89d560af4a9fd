#include "iccwatch/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

namespace iccwatch {

using json = nlohmann::ordered_json;

namespace {

void finish(Score& s) {
    const auto predicted = s.true_positives + s.false_positives;
    s.precision = predicted == 0 ? 1.0 : static_cast<double>(s.true_positives) / static_cast<double>(predicted);
    s.recall = s.expected == 0 ? 1.0 : static_cast<double>(s.true_positives) / static_cast<double>(s.expected);
}

void accumulate(Score& into, const Score& add) {
    into.true_positives += add.true_positives;
    into.false_positives += add.false_positives;
    into.expected += add.expected;
    finish(into);
}

std::uint64_t micros(std::chrono::nanoseconds ns) {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(ns).count());
}

json score_json(const Score& s) {
    return {{"true_positives", s.true_positives},
            {"false_positives", s.false_positives},
            {"expected", s.expected},
            {"precision", s.precision},
            {"recall", s.recall}};
}

Score score_from(const json& j) {
    Score s;
    s.true_positives = j.at("true_positives").get<std::size_t>();
    s.false_positives = j.at("false_positives").get<std::size_t>();
    s.expected = j.at("expected").get<std::size_t>();
    s.precision = j.at("precision").get<double>();
    s.recall = j.at("recall").get<double>();
    return s;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

Score score_verdicts(const std::vector<ReportRecord>& records, const std::vector<ExpectedVerdict>& expected) {
    std::set<ExpectedVerdict> truth(expected.begin(), expected.end());
    std::set<ExpectedVerdict> predicted;
    for (const auto& r : records) {
        if (r.threat != ThreatType::None) predicted.insert({r.sender, r.receiver, r.threat});
    }
    Score s;
    s.expected = truth.size();
    for (const auto& p : predicted) {
        if (truth.count(p) != 0) ++s.true_positives;
        else ++s.false_positives;
    }
    finish(s);
    return s;
}

void add_to_report(Report& report, std::string_view log_name, const AnalysisResult& result,
                   const std::optional<std::vector<ExpectedVerdict>>& expected, bool test_mode,
                   std::string_view dataset) {
    std::vector<ReportRecord> added;
    for (const auto& v : result.verdicts) {
        const IccModel& m = result.models.at(v.model);
        ReportRecord r;
        r.log = std::string(log_name);
        r.sender = m.sender.component;
        r.receiver = m.receiver.component;
        r.threat = v.threat;
        r.matched_case = v.matched_case;
        r.evidence = v.evidence;
        for (const auto& p : m.provenance) r.provenance.push_back(p.component.str() + ": " + p.what);
        r.diagnostics = m.diagnostics;
        ++report.counts[std::string(to_string(r.threat))];
        added.push_back(std::move(r));
    }
    if (expected) {
        const Score s = score_verdicts(added, *expected);
        if (!report.score) report.score = Score{};
        accumulate(*report.score, s);
        if (!dataset.empty()) accumulate(report.dataset_scores[std::string(dataset)], s);
    }
    report.records.insert(report.records.end(), added.begin(), added.end());

    auto& t = report.timing;
    t.models += result.models.size();
    if (!test_mode) {
        t.parse_us += micros(result.timings.parse);
        t.build_us += micros(result.timings.build);
        t.deflate_us += micros(result.timings.deflate);
        t.trace_us += micros(result.timings.trace);
        t.classify_us += micros(result.timings.classify);
        t.total_us += micros(result.timings.total());
        t.per_model_mean_us = t.models == 0 ? 0 : t.total_us / t.models;
    }
}

std::string report_to_json(const Report& report) {
    json records = json::array();
    for (const auto& r : report.records) {
        json evidence = json::array();
        for (const auto& e : r.evidence) evidence.push_back({{"field", e.field}, {"value", e.value}});
        records.push_back({{"log", r.log},
                           {"sender", r.sender.str()},
                           {"receiver", r.receiver.str()},
                           {"threat", to_string(r.threat)},
                           {"case", r.matched_case ? json(*r.matched_case) : json(nullptr)},
                           {"evidence", evidence},
                           {"provenance", r.provenance},
                           {"diagnostics", r.diagnostics}});
    }
    json doc{{"format", "iccwatch-report"}, {"version", 1}, {"records", records}, {"counts", report.counts}};
    doc["score"] = report.score ? score_json(*report.score) : json(nullptr);
    json datasets = json::object();
    for (const auto& [name, s] : report.dataset_scores) datasets[name] = score_json(s);
    doc["datasets"] = datasets;
    const auto& t = report.timing;
    doc["timing"] = {{"parse_us", t.parse_us},       {"build_us", t.build_us},
                     {"deflate_us", t.deflate_us},   {"trace_us", t.trace_us},
                     {"classify_us", t.classify_us}, {"total_us", t.total_us},
                     {"per_model_mean_us", t.per_model_mean_us}, {"models", t.models}};
    return doc.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
    Report report;
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != "iccwatch-report" || doc.at("version").get<int>() != 1) {
            throw std::runtime_error("not an iccwatch report (version 1)");
        }
        for (const auto& j : doc.at("records")) {
            ReportRecord r;
            r.log = j.at("log").get<std::string>();
            r.sender = ComponentId::parse(j.at("sender").get<std::string>());
            r.receiver = ComponentId::parse(j.at("receiver").get<std::string>());
            const auto threat = threat_from_string(j.at("threat").get<std::string>());
            if (!threat) throw std::runtime_error("unknown threat in report");
            r.threat = *threat;
            if (!j.at("case").is_null()) r.matched_case = j.at("case").get<int>();
            for (const auto& e : j.at("evidence")) {
                r.evidence.push_back({e.at("field").get<std::string>(), e.at("value").get<std::string>()});
            }
            r.provenance = j.at("provenance").get<std::vector<std::string>>();
            r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
            report.records.push_back(std::move(r));
        }
        report.counts = doc.at("counts").get<std::map<std::string, std::size_t>>();
        if (!doc.at("score").is_null()) report.score = score_from(doc.at("score"));
        for (const auto& [name, s] : doc.at("datasets").items()) report.dataset_scores[name] = score_from(s);
        const auto& t = doc.at("timing");
        report.timing.parse_us = t.at("parse_us").get<std::uint64_t>();
        report.timing.build_us = t.at("build_us").get<std::uint64_t>();
        report.timing.deflate_us = t.at("deflate_us").get<std::uint64_t>();
        report.timing.trace_us = t.at("trace_us").get<std::uint64_t>();
        report.timing.classify_us = t.at("classify_us").get<std::uint64_t>();
        report.timing.total_us = t.at("total_us").get<std::uint64_t>();
        report.timing.per_model_mean_us = t.at("per_model_mean_us").get<std::uint64_t>();
        report.timing.models = t.at("models").get<std::size_t>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed report: ") + e.what());
    }
    return report;
}

std::string report_to_table(const Report& report) {
    std::ostringstream out;
    std::size_t w_log = 3, w_sender = 6, w_receiver = 8;
    for (const auto& r : report.records) {
        w_log = std::max(w_log, r.log.size());
        w_sender = std::max(w_sender, r.sender.str().size());
        w_receiver = std::max(w_receiver, r.receiver.str().size());
    }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    out << pad("LOG", w_log) << "  " << pad("SENDER", w_sender) << "  " << pad("RECEIVER", w_receiver)
        << "  THREAT     CASE\n";
    for (const auto& r : report.records) {
        out << pad(r.log, w_log) << "  " << pad(r.sender.str(), w_sender) << "  "
            << pad(r.receiver.empty() ? "-" : r.receiver.str(), w_receiver) << "  "
            << pad(std::string(to_string(r.threat)), 9) << "  "
            << (r.matched_case ? std::to_string(*r.matched_case) : "-") << '\n';
        for (const auto& p : r.provenance) out << "    via " << p << '\n';
        for (const auto& d : r.diagnostics) out << "    note " << d << '\n';
    }
    out << "\nverdicts:";
    for (const auto& [name, n] : report.counts) out << ' ' << name << '=' << n;
    out << '\n';
    for (const auto& [name, s] : report.dataset_scores) {
        out << "dataset " << name << ": tp=" << s.true_positives << " fp=" << s.false_positives
            << " expected=" << s.expected << " p=" << fixed2(s.precision) << " r=" << fixed2(s.recall) << '\n';
    }
    if (report.score) {
        const auto& s = *report.score;
        out << "score: tp=" << s.true_positives << " fp=" << s.false_positives << " expected=" << s.expected
            << " precision=" << fixed2(s.precision) << " recall=" << fixed2(s.recall) << '\n';
    }
    const auto& t = report.timing;
    out << "timing: models=" << t.models << " total_us=" << t.total_us << " per_model_mean_us=" << t.per_model_mean_us
        << " (parse " << t.parse_us << ", build " << t.build_us << ", deflate " << t.deflate_us << ", trace "
        << t.trace_us << ", classify " << t.classify_us << ")\n";
    return out.str();
}

}  // namespace iccwatch
