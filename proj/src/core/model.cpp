#include "iccwatch/model.hpp"

#include <algorithm>

namespace iccwatch {

const BehaviorScript* ComponentSpec::script(Trigger trigger) const {
    for (const auto& b : behaviors) {
        if (b.trigger == trigger) return &b;
    }
    return nullptr;
}

const ComponentSpec* AppSpec::component(std::string_view name) const {
    for (const auto& c : components) {
        if (c.id.name == name) return &c;
    }
    return nullptr;
}

LabelSet IntentRecord::labels() const {
    LabelSet out;
    for (const auto& [key, extra] : extras) out.merge(extra.labels);
    return out;
}

namespace {

bool data_part_matches(const std::optional<std::string>& value, const std::set<std::string>& declared) {
    if (!value) return declared.empty();
    return declared.count(*value) != 0;
}

}  // namespace

bool filter_matches(const FilterSpec& filter, const IntentRecord& intent) {
    if (!intent.action || filter.actions.count(*intent.action) == 0) return false;
    if (!std::includes(filter.categories.begin(), filter.categories.end(),
                       intent.categories.begin(), intent.categories.end())) {
        return false;
    }
    return data_part_matches(intent.mime_type, filter.mime_types) &&
           data_part_matches(intent.scheme, filter.data_schemes);
}

}  // namespace iccwatch
