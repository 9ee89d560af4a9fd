#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iccwatch {

/// Identifies a component as "<package>/<name>".
struct ComponentId {
    std::string package;
    std::string name;

    ComponentId() = default;
    ComponentId(std::string pkg, std::string cls) : package(std::move(pkg)), name(std::move(cls)) {}

    bool empty() const noexcept { return package.empty() && name.empty(); }
    std::string str() const;

    /// Parses "<package>/<name>"; the empty string yields an empty id.
    static ComponentId parse(std::string_view text);

    auto operator<=>(const ComponentId&) const = default;
    bool operator==(const ComponentId&) const = default;
};

enum class ComponentKind { Activity, Service, BroadcastReceiver };

std::string_view to_string(ComponentKind kind);
std::optional<ComponentKind> component_kind_from_string(std::string_view text);

enum class ThreatType { None, Hijacking, Spoofing, Collusion };

std::string_view to_string(ThreatType threat);
std::optional<ThreatType> threat_from_string(std::string_view text);

/// Sequence number assigned to an intent when it is sent. Zero means "no intent".
using IntentId = std::uint64_t;
inline constexpr IntentId kNoIntent = 0;

using PermissionSet = std::set<std::string>;

/// Expands short permission names ("SEND_SMS") to "android.permission.SEND_SMS".
std::string normalize_permission(std::string_view name);

PermissionSet set_difference(const PermissionSet& lhs, const PermissionSet& rhs);

/// The system chooser that sits between a sender and the user-picked activity.
const ComponentId& resolver_activity();

/// Identifiers used for packages, component names, methods and registers.
bool is_identifier(std::string_view text);

}  // namespace iccwatch
