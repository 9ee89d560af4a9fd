#include "iccwatch/taint_engine.hpp"

#include <stdexcept>

namespace iccwatch {

TaintedValue add_taint_to_data(const TaintedValue& value, TaintTag tag, std::string source_method,
                               const ComponentId& component, const Catalog& catalog) {
    if (!catalog.tags.contains(tag)) {
        // name_of throws the formatted UnknownTagError
        (void)catalog.tags.name_of(tag);
    }
    TaintedValue out = value;
    out.labels.insert(TaintLabel{tag, std::move(source_method), component});
    return out;
}

TaintedValue add_taint_to_data(std::string value, TaintTag tag, std::string source_method,
                               const ComponentId& component, const Catalog& catalog) {
    return add_taint_to_data(TaintedValue{std::move(value), {}}, tag, std::move(source_method),
                             component, catalog);
}

LabelSet identify_taint_data(const TaintedValue& value) { return value.labels; }

TaintedValue propagate(PropagateOp op, std::span<const TaintedValue> inputs) {
    if (inputs.empty()) throw std::invalid_argument("propagate needs at least one input");
    TaintedValue out;
    out.value = inputs.front().value;
    if (op == PropagateOp::Concat) {
        for (std::size_t i = 1; i < inputs.size(); ++i) out.value += inputs[i].value;
    }
    for (const auto& in : inputs) out.labels.merge(in.labels);
    return out;
}

TaintedValue retaint_for_intent(const TaintedValue& value, const ComponentId& component,
                                const Catalog& catalog) {
    if (!value.tainted()) return value;
    return add_taint_to_data(value, catalog.intent_retaint_tag(), std::string(kIntentRetaintMethod),
                             component, catalog);
}

void TaintStore::put(const std::string& key, const TaintedValue& value) {
    const TaintedValue stored = propagate(PropagateOp::StoreShared, std::span(&value, 1));
    entries_.insert_or_assign(key, stored);
}

TaintedValue TaintStore::get(const std::string& key, std::string fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return TaintedValue{std::move(fallback), {}};
    return propagate(PropagateOp::LoadShared, std::span(&it->second, 1));
}

}  // namespace iccwatch
