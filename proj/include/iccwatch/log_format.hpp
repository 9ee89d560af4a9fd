#pragma once

#include "iccwatch/log_event.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

inline constexpr std::string_view kLogMagic = "#ICCTAINT-LOG";
inline constexpr int kLogVersion = 1;

/// Corrupt record, truncated input or unsupported header. `line()` is 1-based.
class LogParseError : public std::runtime_error {
public:
    LogParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Text form of one record, without the trailing newline.
std::string format_event(const LogEvent& event);
/// Inverse of format_event. Returns nullopt for a kind this version does not know.
std::optional<LogEvent> parse_event(std::string_view line, std::size_t line_no = 0);

std::string format_header(std::uint64_t timestamp);

class LogWriter {
public:
    LogWriter(std::ostream& out, std::uint64_t timestamp = 0);
    void write(const LogEvent& event);

private:
    std::ostream& out_;
};

/// Single-pass reader. Only events whose pid is in `focus` are returned
/// (all events when `focus` is empty); seq numbers must strictly increase.
class LogReader {
public:
    explicit LogReader(std::istream& in, std::set<std::uint32_t> focus = {});

    std::optional<LogEvent> next();

    std::uint64_t timestamp() const noexcept { return timestamp_; }
    std::size_t skipped_unknown() const noexcept { return skipped_unknown_; }
    std::size_t filtered_out() const noexcept { return filtered_out_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    std::set<std::uint32_t> focus_;
    std::uint64_t timestamp_ = 0;
    std::size_t line_ = 0;
    std::size_t skipped_unknown_ = 0;
    std::size_t filtered_out_ = 0;
    std::optional<std::uint64_t> last_seq_;
    std::string buffer_;
};

std::string write_log(const std::vector<LogEvent>& events, std::uint64_t timestamp = 0);

struct ParsedLog {
    std::uint64_t timestamp = 0;
    std::vector<LogEvent> events;
    std::size_t skipped_unknown = 0;
    std::size_t filtered_out = 0;
};

ParsedLog parse_log(std::string_view text, const std::set<std::uint32_t>& focus = {});

}  // namespace iccwatch
