#include "iccwatch/log_format.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace iccwatch {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 13> kKindNames{{
    {EventKind::Launch, "LAUNCH"},
    {EventKind::SetTaint, "SET_TAINT"},
    {EventKind::CheckIntent, "CHECK_INTENT"},
    {EventKind::SendIntent, "SEND_INTENT"},
    {EventKind::Candidates, "CANDIDATES"},
    {EventKind::Deliver, "DELIVER"},
    {EventKind::SinkCall, "SINK_CALL"},
    {EventKind::StoreShared, "STORE_SHARED"},
    {EventKind::LoadShared, "LOAD_SHARED"},
    {EventKind::StoreAppObj, "STORE_APPOBJ"},
    {EventKind::LoadAppObj, "LOAD_APPOBJ"},
    {EventKind::StartComponent, "START_COMPONENT"},
    {EventKind::Diag, "DIAG"},
}};

bool must_escape(unsigned char c) {
    switch (c) {
    case '\\': case ' ': case ',': case ';': case ':': case '=': case '|': case '/':
        return true;
    default:
        return c < 0x20 || c == 0x7f;
    }
}

std::string escape(std::string_view text) {
    if (text.empty()) return "-";
    if (text == "-") return "\\x2d";
    std::string out;
    out.reserve(text.size());
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (must_escape(c)) {
            char buf[5];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        } else {
            out += ch;
        }
    }
    return out;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string unescape(std::string_view text) {
    if (text == "-") return {};
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (i + 3 >= text.size()) throw FieldError("truncated escape");
        if (text[i + 1] != 'x') throw FieldError("bad escape");
        const int hi = hex_digit(text[i + 2]);
        const int lo = hex_digit(text[i + 3]);
        if (hi < 0 || lo < 0) throw FieldError("bad escape");
        out += static_cast<char>(hi * 16 + lo);
        i += 3;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string component_text(const ComponentId& id) {
    if (id.empty()) return "-";
    return escape(id.package) + "/" + escape(id.name);
}

ComponentId parse_component(std::string_view text) {
    if (text == "-") return {};
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) throw FieldError("component without '/'");
    return ComponentId(unescape(text.substr(0, slash)), unescape(text.substr(slash + 1)));
}

std::string label_text(const TaintLabel& label) {
    char tag[11];
    std::snprintf(tag, sizeof tag, "0x%08x", label.tag);
    return std::string(tag) + ":" + escape(label.source_method) + ":" + component_text(label.origin_component);
}

std::string labels_text(const LabelSet& labels) {
    if (labels.empty()) return "-";
    std::string out;
    for (const auto& l : labels) {
        if (!out.empty()) out += ';';
        out += label_text(l);
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text, int base = 10) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value, base);
    if (text.empty() || ec != std::errc() || ptr != end) throw FieldError("bad number '" + std::string(text) + "'");
    return value;
}

LabelSet parse_labels(std::string_view text) {
    LabelSet out;
    if (text == "-") return out;
    for (const auto piece : split(text, ';')) {
        const auto parts = split(piece, ':');
        if (parts.size() != 3 || parts[0].size() != 10 || parts[0].substr(0, 2) != "0x") {
            throw FieldError("bad label '" + std::string(piece) + "'");
        }
        out.insert({parse_number<TaintTag>(parts[0].substr(2), 16), unescape(parts[1]), parse_component(parts[2])});
    }
    return out;
}

std::string list_text(const std::set<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ',';
        out += escape(item);
    }
    return out;
}

std::string components_text(const std::vector<ComponentId>& ids) {
    if (ids.empty()) return "-";
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ',';
        out += component_text(id);
    }
    return out;
}

std::vector<ComponentId> parse_components(std::string_view text) {
    std::vector<ComponentId> out;
    if (text == "-") return out;
    for (const auto piece : split(text, ',')) out.push_back(parse_component(piece));
    return out;
}

// Field schema per kind: name and whether it is required.
struct FieldSpec {
    std::string_view name;
    bool required;
};

std::vector<FieldSpec> schema(EventKind kind) {
    switch (kind) {
    case EventKind::Launch: return {{"comp", true}};
    case EventKind::SetTaint:
    case EventKind::SinkCall: return {{"comp", true}, {"trigger", true}, {"method", true}, {"labels", true}};
    case EventKind::CheckIntent: return {{"comp", true}, {"trigger", true}, {"key", true}, {"labels", true}};
    case EventKind::SendIntent:
        return {{"comp", true},    {"trigger", true}, {"intent", true}, {"ikind", true},
                {"target", false}, {"action", false}, {"cat", false},   {"mime", false},
                {"scheme", false}, {"extra", false}};
    case EventKind::Candidates: return {{"comp", true}, {"intent", true}, {"targets", true}};
    case EventKind::Deliver: return {{"comp", true}, {"intent", true}, {"to", true}};
    case EventKind::StoreShared:
    case EventKind::LoadShared:
        return {{"comp", true}, {"trigger", true}, {"store", true}, {"key", true}, {"labels", true}};
    case EventKind::StoreAppObj:
    case EventKind::LoadAppObj: return {{"comp", true}, {"trigger", true}, {"key", true}, {"labels", true}};
    case EventKind::StartComponent: return {{"comp", true}, {"trigger", true}, {"to", true}};
    case EventKind::Diag: return {{"comp", true}, {"trigger", true}, {"msg", true}};
    }
    return {};
}

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (name == text) return k;
    }
    return std::nullopt;
}

LogParseError::LogParseError(std::size_t line, const std::string& message)
    : std::runtime_error("log line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_event(const LogEvent& e) {
    std::string out = std::to_string(e.seq) + " " + std::to_string(e.pid) + " " + std::string(to_string(e.kind));
    auto field = [&out](std::string_view name, const std::string& value) {
        out += ' ';
        out += name;
        out += '=';
        out += value;
    };
    for (const auto& spec : schema(e.kind)) {
        const auto n = spec.name;
        if (n == "comp") field(n, component_text(e.component));
        else if (n == "trigger") field(n, std::to_string(e.trigger));
        else if (n == "intent") field(n, std::to_string(e.intent));
        else if (n == "method") field(n, escape(e.method));
        else if (n == "store") field(n, escape(e.store));
        else if (n == "key") field(n, escape(e.key));
        else if (n == "labels") field(n, labels_text(e.labels));
        else if (n == "ikind") field(n, std::string(to_string(e.intent_kind)));
        else if (n == "target") { if (e.target) field(n, component_text(*e.target)); }
        else if (n == "action") { if (e.action) field(n, escape(*e.action)); }
        else if (n == "cat") { if (!e.categories.empty()) field(n, list_text(e.categories)); }
        else if (n == "mime") { if (e.mime_type) field(n, escape(*e.mime_type)); }
        else if (n == "scheme") { if (e.scheme) field(n, escape(*e.scheme)); }
        else if (n == "extra") {
            for (const auto& x : e.extras) field(n, escape(x.key) + "|" + labels_text(x.labels));
        }
        else if (n == "targets") field(n, components_text(e.targets));
        else if (n == "to") field(n, component_text(e.targets.empty() ? ComponentId{} : e.targets.front()));
        else if (n == "msg") field(n, escape(e.message));
    }
    return out;
}

std::optional<LogEvent> parse_event(std::string_view line, std::size_t line_no) {
    const auto tokens = split(line, ' ');
    if (tokens.size() < 3) throw LogParseError(line_no, "record needs seq, pid and kind");
    LogEvent e;
    try {
        e.seq = parse_number<std::uint64_t>(tokens[0]);
        e.pid = parse_number<std::uint32_t>(tokens[1]);
    } catch (const FieldError& err) {
        throw LogParseError(line_no, err.what());
    }
    const auto kind = event_kind_from_string(tokens[2]);
    if (!kind) return std::nullopt;
    e.kind = *kind;

    const auto fields = schema(e.kind);
    std::set<std::string_view> seen;
    for (std::size_t i = 3; i < tokens.size(); ++i) {
        const auto tok = tokens[i];
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw LogParseError(line_no, "expected key=value, got '" + std::string(tok) + "'");
        const auto name = tok.substr(0, eq);
        const auto value = tok.substr(eq + 1);
        bool known = false;
        for (const auto& f : fields) known = known || f.name == name;
        if (!known) throw LogParseError(line_no, "field '" + std::string(name) + "' not allowed in " + std::string(tokens[2]));
        if (name != "extra" && !seen.insert(name).second) {
            throw LogParseError(line_no, "duplicate field '" + std::string(name) + "'");
        }
        seen.insert(name);
        try {
            if (name == "comp") e.component = parse_component(value);
            else if (name == "trigger") e.trigger = parse_number<IntentId>(value);
            else if (name == "intent") e.intent = parse_number<IntentId>(value);
            else if (name == "method") e.method = unescape(value);
            else if (name == "store") e.store = unescape(value);
            else if (name == "key") e.key = unescape(value);
            else if (name == "labels") e.labels = parse_labels(value);
            else if (name == "ikind") {
                const auto k = component_kind_from_string(value);
                if (!k) throw FieldError("bad intent kind");
                e.intent_kind = *k;
            }
            else if (name == "target") e.target = parse_component(value);
            else if (name == "action") e.action = unescape(value);
            else if (name == "cat") {
                for (const auto piece : split(value, ',')) e.categories.insert(unescape(piece));
            }
            else if (name == "mime") e.mime_type = unescape(value);
            else if (name == "scheme") e.scheme = unescape(value);
            else if (name == "extra") {
                const auto bar = value.find('|');
                if (bar == std::string_view::npos) throw FieldError("extra without '|'");
                e.extras.push_back({unescape(value.substr(0, bar)), parse_labels(value.substr(bar + 1))});
            }
            else if (name == "targets") e.targets = parse_components(value);
            else if (name == "to") e.targets = {parse_component(value)};
            else if (name == "msg") e.message = unescape(value);
        } catch (const FieldError& err) {
            throw LogParseError(line_no, "field '" + std::string(name) + "': " + err.what());
        }
    }
    for (const auto& f : fields) {
        if (f.required && seen.count(f.name) == 0) {
            throw LogParseError(line_no, "missing field '" + std::string(f.name) + "'");
        }
    }
    return e;
}

std::string format_header(std::uint64_t timestamp) {
    return std::string(kLogMagic) + " v" + std::to_string(kLogVersion) + " time=" + std::to_string(timestamp);
}

LogWriter::LogWriter(std::ostream& out, std::uint64_t timestamp) : out_(out) {
    out_ << format_header(timestamp) << '\n';
}

void LogWriter::write(const LogEvent& event) { out_ << format_event(event) << '\n'; }

LogReader::LogReader(std::istream& in, std::set<std::uint32_t> focus) : in_(in), focus_(std::move(focus)) {
    if (!std::getline(in_, buffer_)) throw LogParseError(1, "missing header");
    line_ = 1;
    if (in_.eof()) throw LogParseError(1, "truncated header");
    const auto tokens = split(buffer_, ' ');
    if (tokens.empty() || tokens[0] != kLogMagic) throw LogParseError(1, "not a taint log");
    if (tokens.size() != 3 || tokens[1].size() < 2 || tokens[1][0] != 'v' || tokens[2].substr(0, 5) != "time=") {
        throw LogParseError(1, "malformed header");
    }
    try {
        const auto version = parse_number<int>(tokens[1].substr(1));
        if (version != kLogVersion) {
            throw LogParseError(1, "unsupported log version " + std::to_string(version) + " (expected " +
                                       std::to_string(kLogVersion) + ")");
        }
        timestamp_ = parse_number<std::uint64_t>(tokens[2].substr(5));
    } catch (const FieldError& err) {
        throw LogParseError(1, err.what());
    }
}

std::optional<LogEvent> LogReader::next() {
    while (std::getline(in_, buffer_)) {
        ++line_;
        if (in_.eof()) throw LogParseError(line_, "truncated record (no line terminator)");
        if (buffer_.empty() || buffer_[0] == '#') continue;
        auto event = parse_event(buffer_, line_);
        std::uint64_t seq = 0;
        if (event) {
            seq = event->seq;
        } else {
            seq = parse_number<std::uint64_t>(std::string_view(buffer_).substr(0, buffer_.find(' ')));
        }
        if (last_seq_ && seq <= *last_seq_) throw LogParseError(line_, "sequence number does not increase");
        last_seq_ = seq;
        if (!event) {
            ++skipped_unknown_;
            continue;
        }
        if (!focus_.empty() && focus_.count(event->pid) == 0) {
            ++filtered_out_;
            continue;
        }
        return event;
    }
    return std::nullopt;
}

std::string write_log(const std::vector<LogEvent>& events, std::uint64_t timestamp) {
    std::ostringstream out;
    LogWriter writer(out, timestamp);
    for (const auto& e : events) writer.write(e);
    return out.str();
}

ParsedLog parse_log(std::string_view text, const std::set<std::uint32_t>& focus) {
    std::istringstream in{std::string(text)};
    LogReader reader(in, focus);
    ParsedLog out;
    out.timestamp = reader.timestamp();
    while (auto e = reader.next()) out.events.push_back(std::move(*e));
    out.skipped_unknown = reader.skipped_unknown();
    out.filtered_out = reader.filtered_out();
    return out;
}

}  // namespace iccwatch
