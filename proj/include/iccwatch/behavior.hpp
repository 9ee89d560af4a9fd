#pragma once

#include "iccwatch/ids.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace iccwatch {

/// Either a register reference ("$x") or a literal payload.
struct ValueRef {
    bool is_register = false;
    std::string text;  // register name without '$', or the literal

    static ValueRef reg(std::string name) { return {true, std::move(name)}; }
    static ValueRef literal(std::string value) { return {false, std::move(value)}; }

    bool operator==(const ValueRef&) const = default;
};

/// Attributes of an intent a script sends; extras come from preceding put_extra steps.
struct IntentTemplate {
    ComponentKind target_kind = ComponentKind::Activity;
    std::optional<ComponentId> explicit_target;
    std::optional<std::string> action;
    std::set<std::string> categories;
    std::optional<std::string> mime_type;
    std::optional<std::string> scheme;

    bool operator==(const IntentTemplate&) const = default;
};

enum class StepKind {
    AcquireSource,  // source $dest <method>
    PutExtra,       // put_extra <key> <value>
    SendIntent,     // send_intent kind=... [target=...] [action=...] ...
    CallSink,       // sink <method> <value>...
    StoreShared,    // store_shared <store> <key> <value>
    LoadShared,     // load_shared $dest <store> <key>
    StoreAppObj,    // store_appobj <field> <value>
    LoadAppObj,     // load_appobj $dest <field>
    StartComponent, // start <package/Name>
    GetExtra,       // get_extra $dest <key>
    Validate,       // validate <key> <regex>
};

struct Step {
    StepKind kind = StepKind::AcquireSource;
    std::string method;        // AcquireSource, CallSink
    std::string key;           // extras key, store key, app-object field
    std::string store;         // StoreShared / LoadShared
    std::string dest;          // destination register
    std::vector<ValueRef> args;
    ComponentId target;        // StartComponent
    IntentTemplate intent;     // SendIntent
    std::string pattern;       // Validate

    bool operator==(const Step&) const = default;
};

enum class Trigger { OnLaunch, OnReceiveIntent };

struct BehaviorScript {
    Trigger trigger = Trigger::OnLaunch;
    std::vector<Step> steps;

    bool operator==(const BehaviorScript&) const = default;
};

}  // namespace iccwatch
