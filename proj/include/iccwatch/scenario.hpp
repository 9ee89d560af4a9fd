#pragma once

#include "iccwatch/catalog.hpp"
#include "iccwatch/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

struct LaunchSpec {
    ComponentId component;
    std::optional<ComponentId> chooser_selection;

    bool operator==(const LaunchSpec&) const = default;
};

struct ExpectedVerdict {
    ComponentId sender;
    ComponentId receiver;
    ThreatType threat = ThreatType::None;

    auto operator<=>(const ExpectedVerdict&) const = default;
    bool operator==(const ExpectedVerdict&) const = default;
};

/// A world description, per-component behaviour scripts, the launch order
/// and the ground-truth verdicts.
struct Scenario {
    std::string name;
    std::string dataset;      // grouping used by batch summaries
    std::string description;
    std::vector<AppSpec> apps;
    std::vector<LaunchSpec> launch_order;
    std::vector<ExpectedVerdict> expected_verdicts;

    const AppSpec* app(std::string_view package) const;
    const AppSpec* app_by_pid(std::uint32_t pid) const;
    const ComponentSpec* component(const ComponentId& id) const;

    bool operator==(const Scenario&) const = default;
};

/// Schema or reference error, positioned at a 1-based line.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::size_t line, std::string field, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

inline constexpr std::string_view kScenarioMagic = "iccscenario";
inline constexpr int kScenarioVersion = 1;

/// Parses and validates a scenario document. All component, method and
/// register references are resolved; any failure throws ScenarioError.
Scenario parse_scenario(std::string_view text, const Catalog& catalog = Catalog::defaults());

/// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

/// Parses a list of `expect <sender> <receiver> <threat>` lines (comments allowed).
std::vector<ExpectedVerdict> parse_expectations(std::string_view text);

}  // namespace iccwatch
