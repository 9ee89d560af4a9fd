#include "iccwatch/taint.hpp"

#include <algorithm>

namespace iccwatch {

bool LabelSet::intersects(const LabelSet& other) const {
    const auto& small = size() <= other.size() ? labels_ : other.labels_;
    const auto& large = size() <= other.size() ? other.labels_ : labels_;
    return std::any_of(small.begin(), small.end(),
                       [&](const TaintLabel& l) { return large.count(l) != 0; });
}

bool LabelSet::includes(const LabelSet& other) const {
    return std::includes(labels_.begin(), labels_.end(), other.labels_.begin(), other.labels_.end());
}

LabelSet LabelSet::intersection(const LabelSet& other) const {
    LabelSet out;
    for (const auto& l : labels_) {
        if (other.contains(l)) out.insert(l);
    }
    return out;
}

LabelSet& LabelSet::merge(const LabelSet& other) {
    labels_.insert(other.labels_.begin(), other.labels_.end());
    return *this;
}

std::set<TaintTag> LabelSet::tags() const {
    std::set<TaintTag> out;
    for (const auto& l : labels_) out.insert(l.tag);
    return out;
}

LabelSet union_labels(const LabelSet& a, const LabelSet& b) {
    LabelSet out = a;
    out.merge(b);
    return out;
}

}  // namespace iccwatch
