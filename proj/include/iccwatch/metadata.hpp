#pragma once

#include "iccwatch/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

class MetadataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Static app attributes: packages, pids, permissions, components and
/// filters. Behaviour scripts are not part of it.
struct AppMetadata {
    std::vector<AppSpec> apps;

    const AppSpec* app(std::string_view package) const;
    const AppSpec* app_by_pid(std::uint32_t pid) const;
    const ComponentSpec* component(const ComponentId& id) const;
    std::set<std::uint32_t> pids() const;

    bool operator==(const AppMetadata&) const = default;
};

inline constexpr std::string_view kMetadataFormat = "iccwatch-meta";
inline constexpr int kMetadataVersion = 1;

/// Strips behaviour scripts from the apps.
AppMetadata metadata_from_apps(const std::vector<AppSpec>& apps);

std::string write_metadata(const AppMetadata& meta);
/// Throws MetadataError on malformed documents or an unsupported version.
AppMetadata parse_metadata(std::string_view text);

}  // namespace iccwatch
