#pragma once

#include "iccwatch/catalog.hpp"
#include "iccwatch/log_event.hpp"
#include "iccwatch/metadata.hpp"
#include "iccwatch/scenario.hpp"
#include "iccwatch/taint_engine.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace iccwatch {

struct SimOptions {
    std::size_t max_depth = 16;           // intent hops below one launch
    std::size_t max_activations = 4096;   // per run
};

/// Ground truth kept by the simulator alongside the log. Tests use it as an
/// oracle that does not depend on the log format or the analyzer.
struct SinkRecord {
    std::string method;
    LabelSet labels;
};

struct ActivationRecord {
    ComponentId component;
    IntentId trigger = kNoIntent;     // zero for launches and started components
    std::vector<SinkRecord> sinks;
    std::vector<ComponentId> started;
    std::size_t store_ops = 0;
    bool aborted = false;
};

struct SendRecord {
    IntentId intent_id = kNoIntent;
    ComponentId sender;
    IntentId sender_trigger = kNoIntent;
    IntentRecord intent;
    std::vector<ComponentId> candidates;
    std::vector<ComponentId> receivers;  // delivered targets, possibly the resolver
};

struct GroundTruth {
    std::vector<ActivationRecord> activations;
    std::vector<SendRecord> sends;
};

struct PendingActivation {
    ComponentId component;
    std::optional<IntentRecord> intent;  // absent for launches and starts
    std::size_t depth = 0;
};

/// Mutable world of one run. Not thread-safe; use one per run.
struct WorldState {
    std::vector<AppSpec> apps;
    std::map<std::string, std::map<std::pair<std::string, std::string>, TaintedValue>> shared_stores;
    std::map<std::string, TaintStore> app_objects;
    std::deque<PendingActivation> pending_queue;
    std::uint64_t event_seq = 0;
    IntentId next_intent = 1;

    const AppSpec* app(std::string_view package) const;
    const ComponentSpec* component(const ComponentId& id) const;
};

struct RunResult {
    std::vector<LogEvent> events;
    AppMetadata metadata;
    GroundTruth truth;
};

/// Explicit intents resolve to their target alone (empty when it does not
/// exist or has the wrong kind). Implicit intents match every component of
/// the requested kind with a matching filter that is exported or belongs to
/// the sender's app, ordered by priority (desc), package, name.
std::vector<ComponentId> find_all_candidates(const IntentRecord& intent, const WorldState& world,
                                             const ComponentId& sender);

/// Picks receivers from ordered candidates: activity -> the chooser
/// selection if given, else the first; service -> the first; broadcast -> all.
/// Throws std::invalid_argument on empty candidates or a chooser that is not
/// a candidate.
std::vector<ComponentId> find_receiver(const std::vector<ComponentId>& candidates, ComponentKind kind,
                                       const std::optional<ComponentId>& chooser_selection);

RunResult run_scenario(const Scenario& scenario, const Catalog& catalog = Catalog::defaults(),
                       const SimOptions& options = {});

}  // namespace iccwatch
