#include "iccwatch/corpus.hpp"
#include "iccwatch/log_format.hpp"
#include "iccwatch/metadata.hpp"
#include "iccwatch/simulator.hpp"
#include "random_world.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace iccwatch;

namespace {

LogEvent sink_event(std::uint64_t seq, std::uint32_t pid) {
    LogEvent e;
    e.seq = seq;
    e.pid = pid;
    e.kind = EventKind::SinkCall;
    e.component = ComponentId::parse("a.b/C");
    e.method = "Log.v";
    e.labels = {{0x00010004, "getLatitude", ComponentId::parse("a.b/C")}};
    return e;
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_log(text);
    } catch (const LogParseError& e) {
        return e.line();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return 0;
}

}  // namespace

TEST(LogFormat, HeaderOnlyIsEmpty) {
    const auto parsed = parse_log(format_header(42) + "\n");
    EXPECT_TRUE(parsed.events.empty());
    EXPECT_EQ(parsed.timestamp, 42u);
    EXPECT_EQ(write_log({}, 7), format_header(7) + "\n");
}

TEST(LogFormat, SingleRecordText) {
    const std::string line = format_event(sink_event(3, 9));
    EXPECT_EQ(line, "3 9 SINK_CALL comp=a.b/C trigger=0 method=Log.v labels=0x00010004:getLatitude:a.b/C");
    EXPECT_EQ(parse_event(line), sink_event(3, 9));
}

TEST(LogFormat, EscapesSeparators) {
    LogEvent e;
    e.seq = 1;
    e.kind = EventKind::Diag;
    e.message = "a b,c;d:e=f|g/h\\i\n-";
    const std::string line = format_event(e);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(parse_event(line), e);
    LogEvent dash = e;
    dash.message = "-";
    EXPECT_EQ(parse_event(format_event(dash)), dash);
    dash.message.clear();
    EXPECT_EQ(parse_event(format_event(dash)), dash);
}

TEST(LogFormat, RoundTripsCorpusRuns) {
    for (const auto& name : corpus_names()) {
        const RunResult r = run_scenario(corpus_scenario(name));
        const auto parsed = parse_log(write_log(r.events, 5));
        EXPECT_EQ(parsed.events, r.events) << name;
    }
}

TEST(LogFormat, RoundTripsRandomEvents) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const auto events = iccwatch::testing::random_events(rng, 40);
        EXPECT_EQ(parse_log(write_log(events)).events, events);
    }
}

TEST(LogFormat, FocusFiltersByPid) {
    const std::string text = write_log({sink_event(1, 10), sink_event(2, 11), sink_event(3, 10)});
    const auto parsed = parse_log(text, {10});
    ASSERT_EQ(parsed.events.size(), 2u);
    EXPECT_EQ(parsed.filtered_out, 1u);
    EXPECT_EQ(parsed.events[1].seq, 3u);
}

TEST(LogFormat, TruncatedLastLineIsAnError) {
    std::string text = write_log({sink_event(1, 10), sink_event(2, 10)});
    text.resize(text.size() - 5);
    EXPECT_EQ(parse_error_line(text), 3u);
}

TEST(LogFormat, HeaderErrors) {
    EXPECT_EQ(parse_error_line("#ICCTAINT-LOG v2 time=0\n"), 1u);
    EXPECT_EQ(parse_error_line("hello\n"), 1u);
    EXPECT_EQ(parse_error_line(""), 1u);
}

TEST(LogFormat, SeqMustIncrease) {
    const std::string text = format_header(0) + "\n" + format_event(sink_event(2, 1)) + "\n" +
                             format_event(sink_event(2, 1)) + "\n";
    EXPECT_EQ(parse_error_line(text), 3u);
}

TEST(LogFormat, MalformedRecords) {
    const std::string head = format_header(0) + "\n";
    EXPECT_EQ(parse_error_line(head + "1 1 SINK_CALL comp=a.b/C\n"), 2u);
    EXPECT_EQ(parse_error_line(head + "x 1 LAUNCH comp=a.b/C\n"), 2u);
    EXPECT_EQ(parse_error_line(head + "1 1 LAUNCH comp=a.b/C bogus=1\n"), 2u);
    EXPECT_EQ(parse_error_line(head + "1 1 SINK_CALL comp=a.b/C trigger=0 method=m labels=zz\n"), 2u);
}

TEST(LogFormat, UnknownKindIsSkipped) {
    const std::string text = format_header(0) + "\n" + format_event(sink_event(1, 1)) +
                             "\n2 1 FUTURE_THING comp=a.b/C x=1\n" + format_event(sink_event(3, 1)) + "\n";
    const auto parsed = parse_log(text);
    EXPECT_EQ(parsed.events.size(), 2u);
    EXPECT_EQ(parsed.skipped_unknown, 1u);
}

TEST(LogFormat, StreamingReader) {
    std::ostringstream out;
    LogWriter w(out, 3);
    w.write(sink_event(1, 4));
    w.write(sink_event(2, 5));
    std::istringstream in(out.str());
    LogReader r(in, {5});
    const auto first = r.next();
    ASSERT_TRUE(first.has_value());
    EXPECT_EQ(first->seq, 2u);
    EXPECT_FALSE(r.next().has_value());
    EXPECT_EQ(r.timestamp(), 3u);
    EXPECT_EQ(r.filtered_out(), 1u);
}

TEST(Metadata, RoundTrip) {
    for (const auto& name : {"hijack_location", "chooser_resolver", "spoof_start_private"}) {
        const Scenario s = corpus_scenario(name);
        const AppMetadata meta = metadata_from_apps(s.apps);
        for (const auto& app : meta.apps) {
            for (const auto& c : app.components) EXPECT_TRUE(c.behaviors.empty());
        }
        EXPECT_EQ(parse_metadata(write_metadata(meta)), meta) << name;
        EXPECT_EQ(meta.pids().size(), s.apps.size());
    }
}

TEST(Metadata, RejectsBadDocuments) {
    EXPECT_THROW(parse_metadata("{"), MetadataError);
    EXPECT_THROW(parse_metadata(R"({"format":"iccwatch-meta","version":9,"apps":[]})"), MetadataError);
    EXPECT_THROW(parse_metadata(R"({"format":"other","version":1,"apps":[]})"), MetadataError);
}
