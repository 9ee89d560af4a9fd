#include "iccwatch/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace iccwatch {

ScenarioError::ScenarioError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + (field.empty() ? "" : " [" + field + "]") +
                         ": " + message),
      line_(line),
      field_(std::move(field)) {}

const AppSpec* Scenario::app(std::string_view package) const {
    for (const auto& a : apps) {
        if (a.package == package) return &a;
    }
    return nullptr;
}

const AppSpec* Scenario::app_by_pid(std::uint32_t pid) const {
    for (const auto& a : apps) {
        if (a.process_id == pid) return &a;
    }
    return nullptr;
}

const ComponentSpec* Scenario::component(const ComponentId& id) const {
    const AppSpec* a = app(id.package);
    return a == nullptr ? nullptr : a->component(id.name);
}

namespace {

struct Token {
    std::string text;
    bool quoted = false;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        if (line[i] == '#') break;
        Token tok;
        tok.quoted = line[i] == '"';
        bool in_quotes = false;
        while (i < line.size()) {
            const char c = line[i];
            if (!in_quotes && (c == ' ' || c == '\t' || c == '\r')) break;
            if (c == '"') {
                in_quotes = !in_quotes;
                ++i;
                continue;
            }
            if (in_quotes && c == '\\') {
                if (i + 1 >= line.size()) throw ScenarioError(line_no, "", "dangling escape");
                const char e = line[i + 1];
                switch (e) {
                case 'n': tok.text += '\n'; break;
                case 't': tok.text += '\t'; break;
                case '"': tok.text += '"'; break;
                case '\\': tok.text += '\\'; break;
                default: throw ScenarioError(line_no, "", std::string("unknown escape \\") + e);
                }
                i += 2;
                continue;
            }
            tok.text += c;
            ++i;
        }
        if (in_quotes) throw ScenarioError(line_no, "", "unterminated quoted string");
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

bool needs_quotes(std::string_view text) {
    if (text.empty() || text.front() == '$') return true;
    return std::any_of(text.begin(), text.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '"' || c == '\\' || c == '#' ||
               c == '=';
    });
}

std::string quote(std::string_view text) {
    std::string out = "\"";
    for (const char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string atom(std::string_view text) { return needs_quotes(text) ? quote(text) : std::string(text); }

std::set<std::string> split_list(std::string_view text) {
    std::set<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start);
        if (!piece.empty()) out.emplace(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join_list(const std::set<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ',';
        out += item;
    }
    return out;
}

struct PendingRef {
    std::size_t line;
    std::string field;
    ComponentId id;
};

class Parser {
public:
    Parser(std::string_view text, const Catalog& catalog) : text_(text), catalog_(catalog) {}

    Scenario run() {
        std::size_t pos = 0;
        bool header_seen = false;
        while (pos <= text_.size()) {
            const auto nl = text_.find('\n', pos);
            const std::string_view line =
                text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no_;
            auto tokens = tokenize(line, line_no_);
            if (!tokens.empty()) {
                if (!header_seen) {
                    parse_header(tokens);
                    header_seen = true;
                } else if (current_script_ != nullptr) {
                    parse_step(tokens);
                } else {
                    parse_directive(tokens);
                }
            }
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        if (!header_seen) throw ScenarioError(1, "header", "missing 'iccscenario 1' header");
        if (current_script_ != nullptr) {
            throw ScenarioError(script_line_, "end", "script block is not closed with 'end'");
        }
        if (scenario_.name.empty()) throw ScenarioError(line_no_, "name", "scenario has no name");
        resolve();
        return std::move(scenario_);
    }

private:
    [[noreturn]] void fail(const std::string& field, const std::string& message) const {
        throw ScenarioError(line_no_, field, message);
    }

    void parse_header(const std::vector<Token>& tokens) {
        if (tokens[0].text != kScenarioMagic) fail("header", "expected '" + std::string(kScenarioMagic) + " 1'");
        if (tokens.size() != 2 || tokens[1].text != std::to_string(kScenarioVersion)) {
            fail("header", "unsupported scenario version");
        }
    }

    std::map<std::string, std::string> options(const std::vector<Token>& tokens, std::size_t first,
                                               std::initializer_list<std::string_view> allowed) const {
        std::map<std::string, std::string> out;
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const auto& t = tokens[i].text;
            const auto eq = t.find('=');
            if (tokens[i].quoted || eq == std::string::npos) fail(t, "expected key=value");
            const std::string key = t.substr(0, eq);
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(key, "unknown option");
            if (out.count(key) != 0) fail(key, "option given twice");
            out.emplace(key, t.substr(eq + 1));
        }
        return out;
    }

    ComponentId component_ref(const std::string& text, const std::string& field) const {
        try {
            auto id = ComponentId::parse(text);
            if (id.empty()) fail(field, "empty component reference");
            return id;
        } catch (const std::invalid_argument& e) {
            fail(field, e.what());
        }
    }

    long long integer(const std::string& text, const std::string& field) const {
        long long value = 0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc() || ptr != end) fail(field, "expected an integer, got '" + text + "'");
        return value;
    }

    bool boolean(const std::string& text, const std::string& field) const {
        if (text == "true") return true;
        if (text == "false") return false;
        fail(field, "expected true or false");
    }

    void expect_arity(const std::vector<Token>& tokens, std::size_t n, const std::string& field) const {
        if (tokens.size() != n) {
            fail(field, "expected " + std::to_string(n - 1) + " argument(s), got " +
                            std::to_string(tokens.size() - 1));
        }
    }

    void parse_directive(const std::vector<Token>& tokens) {
        const std::string& d = tokens[0].text;
        if (d == "name") {
            expect_arity(tokens, 2, d);
            if (!is_identifier(tokens[1].text)) fail(d, "scenario name must be an identifier");
            scenario_.name = tokens[1].text;
        } else if (d == "dataset") {
            expect_arity(tokens, 2, d);
            scenario_.dataset = tokens[1].text;
        } else if (d == "description") {
            expect_arity(tokens, 2, d);
            scenario_.description = tokens[1].text;
        } else if (d == "app") {
            parse_app(tokens);
        } else if (d == "component") {
            parse_component(tokens);
        } else if (d == "filter") {
            parse_filter(tokens);
        } else if (d == "on_launch" || d == "on_receive") {
            expect_arity(tokens, 2, d);
            open_script(component_ref(tokens[1].text, d),
                        d == "on_launch" ? Trigger::OnLaunch : Trigger::OnReceiveIntent);
        } else if (d == "launch") {
            if (tokens.size() < 2) fail(d, "missing component");
            LaunchSpec launch;
            launch.component = component_ref(tokens[1].text, d);
            refs_.push_back({line_no_, "launch", launch.component});
            const auto opts = options(tokens, 2, {"chooser"});
            if (const auto it = opts.find("chooser"); it != opts.end()) {
                launch.chooser_selection = component_ref(it->second, "chooser");
                refs_.push_back({line_no_, "chooser", *launch.chooser_selection});
            }
            scenario_.launch_order.push_back(std::move(launch));
        } else if (d == "expect") {
            expect_arity(tokens, 4, d);
            ExpectedVerdict v;
            v.sender = component_ref(tokens[1].text, "expect.sender");
            v.receiver = component_ref(tokens[2].text, "expect.receiver");
            const auto threat = threat_from_string(tokens[3].text);
            if (!threat || *threat == ThreatType::None) fail("expect.threat", "unknown threat '" + tokens[3].text + "'");
            v.threat = *threat;
            refs_.push_back({line_no_, "expect.sender", v.sender});
            refs_.push_back({line_no_, "expect.receiver", v.receiver});
            scenario_.expected_verdicts.push_back(std::move(v));
        } else if (d == "end") {
            fail(d, "'end' outside of a script block");
        } else {
            fail(d, "unknown directive");
        }
    }

    void parse_app(const std::vector<Token>& tokens) {
        if (tokens.size() < 2 || !is_identifier(tokens[1].text)) fail("app", "missing package name");
        AppSpec app;
        app.package = tokens[1].text;
        if (scenario_.app(app.package) != nullptr) fail("app", "duplicate package " + app.package);
        const auto opts = options(tokens, 2, {"pid", "perms"});
        const auto pid = opts.find("pid");
        if (pid == opts.end()) fail("pid", "app needs pid=<n>");
        const long long value = integer(pid->second, "pid");
        if (value <= 0 || value > 0x7fffffff) fail("pid", "pid must be positive");
        app.process_id = static_cast<std::uint32_t>(value);
        if (scenario_.app_by_pid(app.process_id) != nullptr) fail("pid", "duplicate pid " + pid->second);
        if (const auto perms = opts.find("perms"); perms != opts.end()) {
            for (const auto& p : split_list(perms->second)) app.permissions.insert(normalize_permission(p));
        }
        scenario_.apps.push_back(std::move(app));
    }

    AppSpec& owning_app(const ComponentId& id, const std::string& field) {
        for (auto& a : scenario_.apps) {
            if (a.package == id.package) return a;
        }
        fail(field, "package " + id.package + " is not declared (declare the app first)");
    }

    ComponentSpec& declared_component(const ComponentId& id, const std::string& field) {
        AppSpec& app = owning_app(id, field);
        for (auto& c : app.components) {
            if (c.id == id) return c;
        }
        fail(field, "component " + id.str() + " is not declared");
    }

    void parse_component(const std::vector<Token>& tokens) {
        if (tokens.size() < 2) fail("component", "missing component id");
        ComponentSpec comp;
        comp.id = component_ref(tokens[1].text, "component");
        AppSpec& app = owning_app(comp.id, "component");
        if (app.component(comp.id.name) != nullptr) fail("component", "duplicate component " + comp.id.str());
        const auto opts = options(tokens, 2, {"kind", "exported"});
        const auto kind = opts.find("kind");
        if (kind == opts.end()) fail("kind", "component needs kind=activity|service|receiver");
        const auto parsed = component_kind_from_string(kind->second);
        if (!parsed) fail("kind", "unknown component kind '" + kind->second + "'");
        comp.kind = *parsed;
        if (const auto exp = opts.find("exported"); exp != opts.end()) comp.exported = boolean(exp->second, "exported");
        app.components.push_back(std::move(comp));
    }

    void parse_filter(const std::vector<Token>& tokens) {
        if (tokens.size() < 2) fail("filter", "missing component id");
        ComponentSpec& comp = declared_component(component_ref(tokens[1].text, "filter"), "filter");
        const auto opts = options(tokens, 2, {"actions", "categories", "schemes", "mimes", "priority"});
        FilterSpec f;
        if (const auto it = opts.find("actions"); it != opts.end()) f.actions = split_list(it->second);
        if (const auto it = opts.find("categories"); it != opts.end()) f.categories = split_list(it->second);
        if (const auto it = opts.find("schemes"); it != opts.end()) f.data_schemes = split_list(it->second);
        if (const auto it = opts.find("mimes"); it != opts.end()) f.mime_types = split_list(it->second);
        if (const auto it = opts.find("priority"); it != opts.end()) {
            f.priority = static_cast<int>(integer(it->second, "priority"));
        }
        comp.filters.push_back(std::move(f));
    }

    void open_script(const ComponentId& id, Trigger trigger) {
        ComponentSpec& comp = declared_component(id, "script");
        if (comp.script(trigger) != nullptr) fail("script", "duplicate script for " + id.str());
        comp.behaviors.push_back(BehaviorScript{trigger, {}});
        current_script_ = &comp.behaviors.back();
        script_line_ = line_no_;
        registers_.clear();
    }

    std::string define_register(const Token& tok, const std::string& field) {
        if (tok.quoted || tok.text.size() < 2 || tok.text.front() != '$' ||
            !is_identifier(std::string_view(tok.text).substr(1))) {
            fail(field, "expected a register like $name, got '" + tok.text + "'");
        }
        std::string name = tok.text.substr(1);
        if (!registers_.insert(name).second) fail(field, "register $" + name + " assigned twice");
        return name;
    }

    ValueRef value_ref(const Token& tok, const std::string& field) const {
        if (!tok.quoted && !tok.text.empty() && tok.text.front() == '$') {
            std::string name = tok.text.substr(1);
            if (registers_.count(name) == 0) fail(field, "register $" + name + " used before assignment");
            return ValueRef::reg(std::move(name));
        }
        return ValueRef::literal(tok.text);
    }

    void check_source(const std::string& method) const {
        if (catalog_.methods.source(method) == nullptr) fail("source", "unknown source method '" + method + "'");
    }

    void check_sink(const std::string& method) const {
        if (catalog_.methods.sink(method) == nullptr) fail("sink", "unknown sink method '" + method + "'");
    }

    void parse_step(const std::vector<Token>& tokens) {
        const std::string& s = tokens[0].text;
        if (s == "end") {
            expect_arity(tokens, 1, s);
            current_script_ = nullptr;
            return;
        }
        Step step;
        if (s == "source") {
            expect_arity(tokens, 3, s);
            step.kind = StepKind::AcquireSource;
            step.method = tokens[2].text;
            check_source(step.method);
            step.dest = define_register(tokens[1], s);
        } else if (s == "put_extra") {
            expect_arity(tokens, 3, s);
            step.kind = StepKind::PutExtra;
            step.key = tokens[1].text;
            step.args.push_back(value_ref(tokens[2], s));
        } else if (s == "get_extra") {
            expect_arity(tokens, 3, s);
            step.kind = StepKind::GetExtra;
            step.key = tokens[2].text;
            step.dest = define_register(tokens[1], s);
        } else if (s == "send_intent") {
            step.kind = StepKind::SendIntent;
            const auto opts = options(tokens, 1, {"kind", "target", "action", "categories", "mime", "scheme"});
            const auto kind = opts.find("kind");
            if (kind == opts.end()) fail("kind", "send_intent needs kind=activity|service|broadcast");
            const auto parsed = component_kind_from_string(kind->second);
            if (!parsed) fail("kind", "unknown target kind '" + kind->second + "'");
            step.intent.target_kind = *parsed;
            if (const auto it = opts.find("target"); it != opts.end()) {
                step.intent.explicit_target = component_ref(it->second, "target");
                refs_.push_back({line_no_, "target", *step.intent.explicit_target});
            }
            if (const auto it = opts.find("action"); it != opts.end()) step.intent.action = it->second;
            if (const auto it = opts.find("categories"); it != opts.end()) {
                step.intent.categories = split_list(it->second);
            }
            if (const auto it = opts.find("mime"); it != opts.end()) step.intent.mime_type = it->second;
            if (const auto it = opts.find("scheme"); it != opts.end()) step.intent.scheme = it->second;
            if (!step.intent.explicit_target && !step.intent.action) {
                fail(s, "implicit intent needs an action");
            }
        } else if (s == "sink") {
            if (tokens.size() < 3) fail(s, "sink needs a method and at least one value");
            step.kind = StepKind::CallSink;
            step.method = tokens[1].text;
            check_sink(step.method);
            for (std::size_t i = 2; i < tokens.size(); ++i) step.args.push_back(value_ref(tokens[i], s));
        } else if (s == "store_shared") {
            expect_arity(tokens, 4, s);
            step.kind = StepKind::StoreShared;
            step.store = tokens[1].text;
            step.key = tokens[2].text;
            step.args.push_back(value_ref(tokens[3], s));
        } else if (s == "load_shared") {
            expect_arity(tokens, 4, s);
            step.kind = StepKind::LoadShared;
            step.store = tokens[2].text;
            step.key = tokens[3].text;
            step.dest = define_register(tokens[1], s);
        } else if (s == "store_appobj") {
            expect_arity(tokens, 3, s);
            step.kind = StepKind::StoreAppObj;
            step.key = tokens[1].text;
            step.args.push_back(value_ref(tokens[2], s));
        } else if (s == "load_appobj") {
            expect_arity(tokens, 3, s);
            step.kind = StepKind::LoadAppObj;
            step.key = tokens[2].text;
            step.dest = define_register(tokens[1], s);
        } else if (s == "start") {
            expect_arity(tokens, 2, s);
            step.kind = StepKind::StartComponent;
            step.target = component_ref(tokens[1].text, s);
            refs_.push_back({line_no_, "start", step.target});
        } else if (s == "validate") {
            expect_arity(tokens, 3, s);
            step.kind = StepKind::Validate;
            step.key = tokens[1].text;
            step.pattern = tokens[2].text;
            try {
                std::regex re(step.pattern);
            } catch (const std::regex_error&) {
                fail(s, "invalid pattern '" + step.pattern + "'");
            }
        } else {
            fail(s, "unknown step");
        }
        current_script_->steps.push_back(std::move(step));
    }

    void resolve() {
        for (const auto& ref : refs_) {
            if (scenario_.component(ref.id) == nullptr) {
                throw ScenarioError(ref.line, ref.field, "dangling component reference " + ref.id.str());
            }
        }
    }

    std::string_view text_;
    const Catalog& catalog_;
    Scenario scenario_;
    std::size_t line_no_ = 0;
    BehaviorScript* current_script_ = nullptr;
    std::size_t script_line_ = 0;
    std::set<std::string> registers_;
    std::vector<PendingRef> refs_;
};

std::string value_text(const ValueRef& v) { return v.is_register ? "$" + v.text : quote(v.text); }

void write_step(std::ostream& out, const Step& step) {
    out << "  ";
    switch (step.kind) {
    case StepKind::AcquireSource: out << "source $" << step.dest << ' ' << step.method; break;
    case StepKind::PutExtra: out << "put_extra " << atom(step.key) << ' ' << value_text(step.args.at(0)); break;
    case StepKind::GetExtra: out << "get_extra $" << step.dest << ' ' << atom(step.key); break;
    case StepKind::SendIntent: {
        const auto& in = step.intent;
        out << "send_intent kind=" << to_string(in.target_kind);
        if (in.explicit_target) out << " target=" << in.explicit_target->str();
        if (in.action) out << " action=" << *in.action;
        if (!in.categories.empty()) out << " categories=" << join_list(in.categories);
        if (in.mime_type) out << " mime=" << *in.mime_type;
        if (in.scheme) out << " scheme=" << *in.scheme;
        break;
    }
    case StepKind::CallSink:
        out << "sink " << step.method;
        for (const auto& a : step.args) out << ' ' << value_text(a);
        break;
    case StepKind::StoreShared:
        out << "store_shared " << atom(step.store) << ' ' << atom(step.key) << ' ' << value_text(step.args.at(0));
        break;
    case StepKind::LoadShared:
        out << "load_shared $" << step.dest << ' ' << atom(step.store) << ' ' << atom(step.key);
        break;
    case StepKind::StoreAppObj: out << "store_appobj " << atom(step.key) << ' ' << value_text(step.args.at(0)); break;
    case StepKind::LoadAppObj: out << "load_appobj $" << step.dest << ' ' << atom(step.key); break;
    case StepKind::StartComponent: out << "start " << step.target.str(); break;
    case StepKind::Validate: out << "validate " << atom(step.key) << ' ' << quote(step.pattern); break;
    }
    out << '\n';
}

}  // namespace

Scenario parse_scenario(std::string_view text, const Catalog& catalog) { return Parser(text, catalog).run(); }

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << kScenarioMagic << ' ' << kScenarioVersion << '\n';
    out << "name " << s.name << '\n';
    if (!s.dataset.empty()) out << "dataset " << atom(s.dataset) << '\n';
    if (!s.description.empty()) out << "description " << quote(s.description) << '\n';
    for (const auto& app : s.apps) {
        out << "\napp " << app.package << " pid=" << app.process_id;
        if (!app.permissions.empty()) out << " perms=" << join_list(app.permissions);
        out << '\n';
        for (const auto& c : app.components) {
            out << "component " << c.id.str() << " kind=" << to_string(c.kind)
                << " exported=" << (c.exported ? "true" : "false") << '\n';
        }
        for (const auto& c : app.components) {
            for (const auto& f : c.filters) {
                out << "filter " << c.id.str();
                if (!f.actions.empty()) out << " actions=" << join_list(f.actions);
                if (!f.categories.empty()) out << " categories=" << join_list(f.categories);
                if (!f.data_schemes.empty()) out << " schemes=" << join_list(f.data_schemes);
                if (!f.mime_types.empty()) out << " mimes=" << join_list(f.mime_types);
                out << " priority=" << f.priority << '\n';
            }
        }
    }
    for (const auto& app : s.apps) {
        for (const auto& c : app.components) {
            for (const auto& b : c.behaviors) {
                out << '\n' << (b.trigger == Trigger::OnLaunch ? "on_launch " : "on_receive ") << c.id.str() << '\n';
                for (const auto& step : b.steps) write_step(out, step);
                out << "end\n";
            }
        }
    }
    if (!s.launch_order.empty()) out << '\n';
    for (const auto& l : s.launch_order) {
        out << "launch " << l.component.str();
        if (l.chooser_selection) out << " chooser=" << l.chooser_selection->str();
        out << '\n';
    }
    if (!s.expected_verdicts.empty()) out << '\n';
    for (const auto& v : s.expected_verdicts) {
        out << "expect " << v.sender.str() << ' ' << v.receiver.str() << ' ' << to_string(v.threat) << '\n';
    }
    return out.str();
}

std::vector<ExpectedVerdict> parse_expectations(std::string_view text) {
    std::vector<ExpectedVerdict> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        const auto tokens = tokenize(line, line_no);
        if (!tokens.empty()) {
            if (tokens[0].text != "expect" || tokens.size() != 4) {
                throw ScenarioError(line_no, "expect", "expected 'expect <sender> <receiver> <threat>'");
            }
            ExpectedVerdict v;
            try {
                v.sender = ComponentId::parse(tokens[1].text);
                v.receiver = ComponentId::parse(tokens[2].text);
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(line_no, "expect", e.what());
            }
            const auto threat = threat_from_string(tokens[3].text);
            if (!threat || *threat == ThreatType::None) throw ScenarioError(line_no, "expect.threat", "unknown threat");
            v.threat = *threat;
            out.push_back(std::move(v));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

}  // namespace iccwatch
