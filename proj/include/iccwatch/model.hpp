#pragma once

#include "iccwatch/behavior.hpp"
#include "iccwatch/ids.hpp"
#include "iccwatch/taint.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace iccwatch {

struct FilterSpec {
    std::set<std::string> actions;
    std::set<std::string> categories;
    std::set<std::string> data_schemes;
    std::set<std::string> mime_types;
    int priority = 0;

    bool operator==(const FilterSpec&) const = default;
};

struct ComponentSpec {
    ComponentId id;
    ComponentKind kind = ComponentKind::Activity;
    bool exported = false;
    std::vector<FilterSpec> filters;
    std::vector<BehaviorScript> behaviors;  // at most one per trigger

    const BehaviorScript* script(Trigger trigger) const;

    bool operator==(const ComponentSpec&) const = default;
};

struct AppSpec {
    std::string package;
    std::uint32_t process_id = 0;
    PermissionSet permissions;
    std::vector<ComponentSpec> components;

    const ComponentSpec* component(std::string_view name) const;
    bool holds(const std::string& permission) const { return permissions.count(permission) != 0; }

    bool operator==(const AppSpec&) const = default;
};

/// An opaque payload plus the labels it carries.
struct ExtraValue {
    std::string value;
    LabelSet labels;

    bool operator==(const ExtraValue&) const = default;
};

/// An intent in flight.
struct IntentRecord {
    IntentId intent_id = kNoIntent;
    ComponentKind target_kind = ComponentKind::Activity;
    std::optional<ComponentId> explicit_target;
    std::optional<std::string> action;
    std::set<std::string> categories;
    std::optional<std::string> mime_type;
    std::optional<std::string> scheme;
    std::map<std::string, ExtraValue> extras;

    LabelSet labels() const;

    bool operator==(const IntentRecord&) const = default;
};

/// Filter test used for implicit resolution: the action must be declared,
/// every intent category must be declared, and the data part must agree
/// (MIME and scheme are each either both absent or matching).
bool filter_matches(const FilterSpec& filter, const IntentRecord& intent);

}  // namespace iccwatch
