#include "flow_oracle.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace iccwatch::testing {

namespace {

struct Flow {
    ComponentId sender;
    IntentId sender_trigger = kNoIntent;
    std::vector<ComponentId> candidates;
    LabelSet labels;
    IntentId delivered_id = kNoIntent;  // id the receiver was activated with
    std::optional<ComponentId> receiver;
};

bool has(const PermissionSet& perms, const std::string& p) { return perms.find(p) != perms.end(); }

}  // namespace

std::vector<FlowVerdict> oracle_verdicts(const Scenario& scenario, const RunResult& run, const Catalog& catalog) {
    const auto& truth = run.truth;
    const ComponentId resolver = resolver_activity();

    std::vector<Flow> flows;
    for (const auto& s : truth.sends) {
        if (s.sender == resolver) continue;
        Flow base{s.sender, s.sender_trigger, s.candidates, s.intent.labels(), s.intent_id, std::nullopt};
        if (s.receivers.empty()) {
            flows.push_back(base);
            continue;
        }
        for (const auto& r : s.receivers) {
            Flow f = base;
            if (r == resolver) {
                const auto b = std::find_if(truth.sends.begin(), truth.sends.end(), [&](const SendRecord& x) {
                    return x.sender == resolver && x.sender_trigger == s.intent_id;
                });
                if (b == truth.sends.end()) continue;
                f.labels = union_labels(f.labels, b->intent.labels());
                f.delivered_id = b->intent_id;
                if (!b->receivers.empty()) f.receiver = b->receivers.front();
            } else {
                f.receiver = r;
            }
            flows.push_back(std::move(f));
        }
    }

    std::map<std::pair<IntentId, ComponentId>, const ActivationRecord*> activations;
    for (const auto& a : truth.activations) activations[{a.trigger, a.component}] = &a;
    auto activation_of = [&](const Flow& f) -> const ActivationRecord* {
        if (!f.receiver) return nullptr;
        const auto it = activations.find({f.delivered_id, *f.receiver});
        return it == activations.end() ? nullptr : it->second;
    };

    std::vector<std::optional<std::size_t>> pred(flows.size());
    std::vector<bool> successor(flows.size(), false);
    for (std::size_t j = 0; j < flows.size(); ++j) {
        for (std::size_t i = 0; i < flows.size(); ++i) {
            const Flow& g = flows[i];
            const Flow& f = flows[j];
            if (i != j && f.sender_trigger != kNoIntent && g.receiver && g.delivered_id == f.sender_trigger &&
                *g.receiver == f.sender && g.labels.intersects(f.labels)) {
                pred[j] = i;
                successor[i] = true;
            }
        }
    }

    std::vector<FlowVerdict> out;
    for (std::size_t j = 0; j < flows.size(); ++j) {
        const ActivationRecord* act = activation_of(flows[j]);
        const bool busy = act != nullptr && (!act->sinks.empty() || !act->started.empty() || act->store_ops > 0);
        if (successor[j] && !busy) continue;

        std::size_t h = j;
        while (pred[h]) h = *pred[h];
        const Flow& head = flows[h];
        const Flow& tail = flows[j];

        FlowVerdict v{head.sender, tail.receiver.value_or(ComponentId{}), ThreatType::None};
        if (!tail.receiver || head.sender.package == tail.receiver->package) {
            out.push_back(v);
            continue;
        }
        const AppSpec* s_app = scenario.app(head.sender.package);
        const AppSpec* r_app = scenario.app(tail.receiver->package);
        const PermissionSet s_perms = s_app ? s_app->permissions : PermissionSet{};
        const PermissionSet r_perms = r_app ? r_app->permissions : PermissionSet{};

        PermissionSet r_required, s_required;
        bool leak = false, start_private = false;
        if (act != nullptr) {
            for (const auto& sink : act->sinks) {
                const SinkMethod* spec = catalog.methods.sink(sink.method);
                if (spec->permission) r_required.insert(*spec->permission);
                if (spec->exfiltrating && sink.labels.intersects(head.labels)) leak = true;
            }
            for (const auto& started : act->started) {
                const ComponentSpec* c = scenario.component(started);
                if (started.package == tail.receiver->package && c != nullptr && !c->exported) start_private = true;
            }
        }
        for (const auto& l : head.labels) {
            const SourceMethod* src = catalog.methods.source(l.source_method);
            if (src != nullptr && src->permission) s_required.insert(*src->permission);
        }
        PermissionSet s_lacked, r_lacked;
        for (const auto& p : r_required) {
            if (!has(s_perms, p)) s_lacked.insert(p);
        }
        for (const auto& p : s_required) {
            if (!has(r_perms, p)) r_lacked.insert(p);
        }
        const bool own_candidate = std::any_of(head.candidates.begin(), head.candidates.end(),
                                               [&](const ComponentId& c) { return c.package == head.sender.package; });

        if (own_candidate) v.threat = ThreatType::Hijacking;
        else if (leak && s_lacked.empty()) v.threat = ThreatType::Hijacking;
        else if (!s_lacked.empty() && r_lacked.empty()) v.threat = ThreatType::Spoofing;
        else if (start_private && r_lacked.empty()) v.threat = ThreatType::Spoofing;
        else if (!s_lacked.empty() && !r_lacked.empty()) v.threat = ThreatType::Collusion;
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace iccwatch::testing
