#pragma once

#include "iccwatch/taint.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

class UnknownTagError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Name <-> 32-bit tag registry. Names and values are both unique.
class TagCatalog {
public:
    void add(std::string name, TaintTag tag);

    TaintTag lookup(std::string_view name) const;  // throws UnknownTagError
    const std::string& name_of(TaintTag tag) const;  // throws UnknownTagError
    bool contains(TaintTag tag) const { return by_tag_.count(tag) != 0; }
    bool contains(std::string_view name) const;
    std::size_t size() const noexcept { return by_name_.size(); }

    const std::map<std::string, TaintTag, std::less<>>& entries() const noexcept { return by_name_; }

private:
    std::map<std::string, TaintTag, std::less<>> by_name_;
    std::map<TaintTag, std::string> by_tag_;
};

struct SourceMethod {
    TaintTag tag = 0;
    std::optional<std::string> permission;
};

struct SinkMethod {
    std::optional<std::string> permission;
    bool exfiltrating = true;
};

/// Source and sink methods the monitor watches.
struct MethodCatalog {
    std::map<std::string, SourceMethod, std::less<>> sources;
    std::map<std::string, SinkMethod, std::less<>> sinks;

    const SourceMethod* source(std::string_view method) const;
    const SinkMethod* sink(std::string_view method) const;
};

/// Tag table plus method table. `defaults()` is the embedded configuration;
/// `from_json` loads the same schema from a config file:
///
///   { "tags":    { "<NAME>": "0x00010004", ... },
///     "sources": { "<method>": { "tag": "<NAME>", "permission": "<perm>"|null } },
///     "sinks":   { "<method>": { "permission": "<perm>"|null, "exfiltrating": bool } } }
class Catalog {
public:
    TagCatalog tags;
    MethodCatalog methods;

    /// Tag attached to a value when it is inserted into an outgoing intent.
    TaintTag intent_retaint_tag() const;

    static const Catalog& defaults();
    static Catalog from_json(std::string_view text);
    std::string to_json() const;

    /// Checks that every source refers to a registered tag.
    void validate() const;
};

/// Looks up a tag in the default catalog.
TaintTag lookup_tag(std::string_view name);

inline constexpr std::string_view kIntentRetaintTagName = "TAINT_INTENT_EXTRA";
inline constexpr std::string_view kIntentRetaintMethod = "putExtra";

}  // namespace iccwatch
