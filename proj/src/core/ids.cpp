#include "iccwatch/ids.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace iccwatch {

std::string ComponentId::str() const {
    if (empty()) return {};
    return package + "/" + name;
}

ComponentId ComponentId::parse(std::string_view text) {
    if (text.empty()) return {};
    const auto slash = text.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == text.size()) {
        throw std::invalid_argument("malformed component id '" + std::string(text) + "'");
    }
    ComponentId id{std::string(text.substr(0, slash)), std::string(text.substr(slash + 1))};
    if (!is_identifier(id.package) || !is_identifier(id.name)) {
        throw std::invalid_argument("malformed component id '" + std::string(text) + "'");
    }
    return id;
}

std::string_view to_string(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::Activity: return "activity";
    case ComponentKind::Service: return "service";
    case ComponentKind::BroadcastReceiver: return "receiver";
    }
    return "activity";
}

std::optional<ComponentKind> component_kind_from_string(std::string_view text) {
    if (text == "activity") return ComponentKind::Activity;
    if (text == "service") return ComponentKind::Service;
    if (text == "receiver" || text == "broadcast") return ComponentKind::BroadcastReceiver;
    return std::nullopt;
}

std::string_view to_string(ThreatType threat) {
    switch (threat) {
    case ThreatType::None: return "none";
    case ThreatType::Hijacking: return "hijacking";
    case ThreatType::Spoofing: return "spoofing";
    case ThreatType::Collusion: return "collusion";
    }
    return "none";
}

std::optional<ThreatType> threat_from_string(std::string_view text) {
    if (text == "none") return ThreatType::None;
    if (text == "hijacking") return ThreatType::Hijacking;
    if (text == "spoofing") return ThreatType::Spoofing;
    if (text == "collusion") return ThreatType::Collusion;
    return std::nullopt;
}

std::string normalize_permission(std::string_view name) {
    if (name.find('.') != std::string_view::npos) return std::string(name);
    return "android.permission." + std::string(name);
}

PermissionSet set_difference(const PermissionSet& lhs, const PermissionSet& rhs) {
    PermissionSet out;
    std::set_difference(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                        std::inserter(out, out.end()));
    return out;
}

const ComponentId& resolver_activity() {
    static const ComponentId id{"android", "com.android.internal.app.ResolverActivity"};
    return id;
}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_' || c == '.' || c == '$' || c == '-';
    });
}

}  // namespace iccwatch
