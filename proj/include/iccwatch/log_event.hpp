#pragma once

#include "iccwatch/ids.hpp"
#include "iccwatch/taint.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace iccwatch {

enum class EventKind {
    Launch,
    SetTaint,
    CheckIntent,
    SendIntent,
    Candidates,
    Deliver,
    SinkCall,
    StoreShared,
    LoadShared,
    StoreAppObj,
    LoadAppObj,
    StartComponent,
    Diag,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view text);

/// Extras key of a sent intent with the labels of its value.
struct ExtraEntry {
    std::string key;
    LabelSet labels;

    bool operator==(const ExtraEntry&) const = default;
};

/// One monitor record. Which fields are meaningful depends on `kind`;
/// the others keep their default values.
///
///   LAUNCH           component
///   SET_TAINT        component trigger method labels
///   CHECK_INTENT     component trigger key labels
///   SEND_INTENT      component trigger intent intent_kind target? action?
///                    categories mime? scheme? extras
///   CANDIDATES       component intent targets
///   DELIVER          component intent targets[0]
///   SINK_CALL        component trigger method labels
///   STORE_SHARED     component trigger store key labels   (also LOAD_SHARED)
///   STORE_APPOBJ     component trigger key labels         (also LOAD_APPOBJ)
///   START_COMPONENT  component trigger targets[0]
///   DIAG             component trigger message
struct LogEvent {
    std::uint64_t seq = 0;
    std::uint32_t pid = 0;
    EventKind kind = EventKind::Diag;

    ComponentId component;
    IntentId trigger = kNoIntent;  // intent whose delivery started the activation
    IntentId intent = kNoIntent;

    std::string method;
    std::string store;
    std::string key;
    LabelSet labels;

    ComponentKind intent_kind = ComponentKind::Activity;
    std::optional<ComponentId> target;
    std::optional<std::string> action;
    std::set<std::string> categories;
    std::optional<std::string> mime_type;
    std::optional<std::string> scheme;
    std::vector<ExtraEntry> extras;

    std::vector<ComponentId> targets;
    std::string message;

    bool operator==(const LogEvent&) const = default;
};

}  // namespace iccwatch
