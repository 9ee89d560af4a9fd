#pragma once

#include "iccwatch/ids.hpp"

#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>

namespace iccwatch {

using TaintTag = std::uint32_t;

/// Provenance of one sensitive value: which tag, which source method produced
/// it, and in which component.
struct TaintLabel {
    TaintTag tag = 0;
    std::string source_method;
    ComponentId origin_component;

    auto operator<=>(const TaintLabel&) const = default;
    bool operator==(const TaintLabel&) const = default;
};

/// Set of labels carried by a value. An empty set means untainted.
class LabelSet {
public:
    using Storage = std::set<TaintLabel>;
    using const_iterator = Storage::const_iterator;

    LabelSet() = default;
    LabelSet(std::initializer_list<TaintLabel> labels) : labels_(labels) {}

    bool empty() const noexcept { return labels_.empty(); }
    std::size_t size() const noexcept { return labels_.size(); }
    const_iterator begin() const noexcept { return labels_.begin(); }
    const_iterator end() const noexcept { return labels_.end(); }

    bool contains(const TaintLabel& label) const { return labels_.count(label) != 0; }
    bool intersects(const LabelSet& other) const;
    bool includes(const LabelSet& other) const;
    LabelSet intersection(const LabelSet& other) const;

    void insert(TaintLabel label) { labels_.insert(std::move(label)); }
    LabelSet& merge(const LabelSet& other);

    std::set<TaintTag> tags() const;

    bool operator==(const LabelSet&) const = default;

private:
    Storage labels_;
};

LabelSet union_labels(const LabelSet& a, const LabelSet& b);

}  // namespace iccwatch
