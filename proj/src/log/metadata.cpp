#include "iccwatch/metadata.hpp"

#include "json.hpp"

namespace iccwatch {

using json = nlohmann::ordered_json;

const AppSpec* AppMetadata::app(std::string_view package) const {
    for (const auto& a : apps) {
        if (a.package == package) return &a;
    }
    return nullptr;
}

const AppSpec* AppMetadata::app_by_pid(std::uint32_t pid) const {
    for (const auto& a : apps) {
        if (a.process_id == pid) return &a;
    }
    return nullptr;
}

const ComponentSpec* AppMetadata::component(const ComponentId& id) const {
    const AppSpec* a = app(id.package);
    return a == nullptr ? nullptr : a->component(id.name);
}

std::set<std::uint32_t> AppMetadata::pids() const {
    std::set<std::uint32_t> out;
    for (const auto& a : apps) out.insert(a.process_id);
    return out;
}

AppMetadata metadata_from_apps(const std::vector<AppSpec>& apps) {
    AppMetadata meta{apps};
    for (auto& a : meta.apps) {
        for (auto& c : a.components) c.behaviors.clear();
    }
    return meta;
}

std::string write_metadata(const AppMetadata& meta) {
    json apps = json::array();
    for (const auto& a : meta.apps) {
        json comps = json::array();
        for (const auto& c : a.components) {
            json filters = json::array();
            for (const auto& f : c.filters) {
                filters.push_back({{"actions", f.actions},
                                   {"categories", f.categories},
                                   {"schemes", f.data_schemes},
                                   {"mimes", f.mime_types},
                                   {"priority", f.priority}});
            }
            comps.push_back({{"name", c.id.name},
                             {"kind", to_string(c.kind)},
                             {"exported", c.exported},
                             {"filters", filters}});
        }
        apps.push_back({{"package", a.package},
                        {"pid", a.process_id},
                        {"permissions", a.permissions},
                        {"components", comps}});
    }
    json doc{{"format", kMetadataFormat}, {"version", kMetadataVersion}, {"apps", apps}};
    return doc.dump(2) + "\n";
}

AppMetadata parse_metadata(std::string_view text) {
    AppMetadata meta;
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != kMetadataFormat) throw MetadataError("not an app metadata file");
        const int version = doc.at("version").get<int>();
        if (version != kMetadataVersion) throw MetadataError("unsupported metadata version " + std::to_string(version));
        for (const auto& a : doc.at("apps")) {
            AppSpec app;
            app.package = a.at("package").get<std::string>();
            app.process_id = a.at("pid").get<std::uint32_t>();
            if (app.process_id == 0) throw MetadataError("app " + app.package + " has pid 0");
            if (meta.app_by_pid(app.process_id) != nullptr) throw MetadataError("duplicate pid in metadata");
            app.permissions = a.at("permissions").get<PermissionSet>();
            for (const auto& c : a.at("components")) {
                ComponentSpec comp;
                comp.id = ComponentId(app.package, c.at("name").get<std::string>());
                const auto kind = component_kind_from_string(c.at("kind").get<std::string>());
                if (!kind) throw MetadataError("unknown component kind in " + comp.id.str());
                comp.kind = *kind;
                comp.exported = c.at("exported").get<bool>();
                for (const auto& f : c.at("filters")) {
                    FilterSpec filter;
                    filter.actions = f.at("actions").get<std::set<std::string>>();
                    filter.categories = f.at("categories").get<std::set<std::string>>();
                    filter.data_schemes = f.at("schemes").get<std::set<std::string>>();
                    filter.mime_types = f.at("mimes").get<std::set<std::string>>();
                    filter.priority = f.at("priority").get<int>();
                    comp.filters.push_back(std::move(filter));
                }
                app.components.push_back(std::move(comp));
            }
            meta.apps.push_back(std::move(app));
        }
    } catch (const json::exception& e) {
        throw MetadataError(std::string("malformed metadata: ") + e.what());
    }
    return meta;
}

}  // namespace iccwatch
