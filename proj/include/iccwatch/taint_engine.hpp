#pragma once

#include "iccwatch/catalog.hpp"
#include "iccwatch/taint.hpp"

#include <map>
#include <span>
#include <string>

namespace iccwatch {

/// A payload together with its provenance labels ("T-data").
struct TaintedValue {
    std::string value;
    LabelSet labels;

    bool tainted() const noexcept { return !labels.empty(); }
    bool operator==(const TaintedValue&) const = default;
};

enum class PropagateOp {
    Copy,
    Concat,
    StoreExtra,
    LoadExtra,
    StoreShared,
    LoadShared,
    StoreAppObj,
    LoadAppObj,
};

/// Taints `value` at a source. Labels already on the value are kept.
/// Throws UnknownTagError when `tag` is not registered in `catalog`.
TaintedValue add_taint_to_data(const TaintedValue& value, TaintTag tag, std::string source_method,
                               const ComponentId& component,
                               const Catalog& catalog = Catalog::defaults());

TaintedValue add_taint_to_data(std::string value, TaintTag tag, std::string source_method,
                               const ComponentId& component,
                               const Catalog& catalog = Catalog::defaults());

/// Returns the exact label set; empty for untainted values.
LabelSet identify_taint_data(const TaintedValue& value);

/// Output labels are the union of all input labels. Concat joins payloads,
/// every other op forwards the first input's payload.
/// Throws std::invalid_argument on an empty input list.
TaintedValue propagate(PropagateOp op, std::span<const TaintedValue> inputs);

/// Retaint applied when a tainted value is put into an outgoing intent: the
/// original labels stay and an intent-insertion label naming the inserting
/// component is appended. Untainted values pass through unchanged.
TaintedValue retaint_for_intent(const TaintedValue& value, const ComponentId& component,
                                const Catalog& catalog = Catalog::defaults());

/// Key-value store whose reads return exactly what was written. Backs the
/// per-app SharedPreferences files and the Application object.
class TaintStore {
public:
    void put(const std::string& key, const TaintedValue& value);
    /// Missing keys yield an untainted `fallback`.
    TaintedValue get(const std::string& key, std::string fallback = "default") const;
    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, TaintedValue> entries_;
};

}  // namespace iccwatch
