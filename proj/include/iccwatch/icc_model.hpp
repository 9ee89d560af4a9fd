#pragma once

#include "iccwatch/ids.hpp"
#include "iccwatch/taint.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace iccwatch {

struct SenderView {
    std::uint32_t process_id = 0;
    std::string package;
    ComponentId component;                 // the component that sent the intent
    std::vector<ComponentId> components;   // every component of the sending app
    PermissionSet permissions;
    PermissionSet permissions_required;
    PermissionSet permissions_lacked;
    std::set<std::string> source_methods;
    std::vector<ComponentId> candidates;
};

struct IntentView {
    IntentId intent_id = kNoIntent;
    ComponentKind kind = ComponentKind::Activity;
    std::optional<ComponentId> explicit_target;
    std::optional<std::string> action;
    std::set<std::string> categories;
    std::optional<std::string> mime_type;
    std::optional<std::string> scheme;
    std::vector<std::pair<std::string, LabelSet>> taint_data;

    LabelSet labels() const;
};

struct SinkUse {
    std::string method;
    LabelSet labels;
};

struct StoreAccess {
    bool shared = true;  // Shareference when true, Application object otherwise
    bool write = true;
    std::string store;
    std::string key;
    LabelSet labels;
};

struct ReceiverView {
    std::uint32_t process_id = 0;
    std::string package;
    ComponentId component;
    std::vector<ComponentId> components;
    PermissionSet permissions;
    PermissionSet permissions_required;
    PermissionSet permissions_lacked;
    std::vector<SinkUse> sinks;
    std::vector<ComponentId> started;
    std::vector<StoreAccess> stores;
    bool start_compt = false;
    bool taint_leak = false;

    std::vector<std::string> sink_methods() const;
};

/// One hop of the path a label took from its source to a sink.
struct ProvenanceStep {
    ComponentId component;
    std::string what;
};

/// Sender / Intent / Receiver triple of one ICC.
struct IccModel {
    std::size_t index = 0;            // position in build order
    IntentId trigger = kNoIntent;     // intent whose delivery made the sender run
    SenderView sender;
    IntentView intent;
    ReceiverView receiver;            // empty component when nothing received the intent
    std::vector<IntentId> merged;     // intents folded in by deflation, oldest first
    LabelSet carried;                 // labels of every intent along the merged path
    std::vector<ProvenanceStep> provenance;
    std::vector<std::string> diagnostics;

    bool delivered() const { return !receiver.component.empty(); }
};

struct Evidence {
    std::string field;
    std::string value;

    bool operator==(const Evidence&) const = default;
};

struct ThreatVerdict {
    std::size_t model = 0;              // index into the analyzed model list
    ThreatType threat = ThreatType::None;
    std::optional<int> matched_case;    // 1..5
    std::vector<Evidence> evidence;
};

}  // namespace iccwatch
