#include "iccwatch/simulator.hpp"

#include <algorithm>
#include <regex>
#include <stdexcept>

namespace iccwatch {

const AppSpec* WorldState::app(std::string_view package) const {
    for (const auto& a : apps) {
        if (a.package == package) return &a;
    }
    return nullptr;
}

const ComponentSpec* WorldState::component(const ComponentId& id) const {
    const AppSpec* a = app(id.package);
    return a == nullptr ? nullptr : a->component(id.name);
}

std::vector<ComponentId> find_all_candidates(const IntentRecord& intent, const WorldState& world,
                                             const ComponentId& sender) {
    auto visible = [&sender](const ComponentSpec& c) { return c.exported || c.id.package == sender.package; };
    if (intent.explicit_target) {
        const ComponentSpec* target = world.component(*intent.explicit_target);
        if (target == nullptr || target->kind != intent.target_kind || !visible(*target)) return {};
        return {target->id};
    }
    std::vector<std::pair<int, ComponentId>> matches;
    for (const auto& app : world.apps) {
        for (const auto& c : app.components) {
            if (c.kind != intent.target_kind || !visible(c)) continue;
            std::optional<int> best;
            for (const auto& f : c.filters) {
                if (filter_matches(f, intent) && (!best || f.priority > *best)) best = f.priority;
            }
            if (best) matches.emplace_back(*best, c.id);
        }
    }
    std::sort(matches.begin(), matches.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<ComponentId> out;
    out.reserve(matches.size());
    for (auto& m : matches) out.push_back(std::move(m.second));
    return out;
}

std::vector<ComponentId> find_receiver(const std::vector<ComponentId>& candidates, ComponentKind kind,
                                       const std::optional<ComponentId>& chooser_selection) {
    if (candidates.empty()) throw std::invalid_argument("no candidates to choose from");
    switch (kind) {
    case ComponentKind::Activity:
        if (chooser_selection) {
            if (std::find(candidates.begin(), candidates.end(), *chooser_selection) == candidates.end()) {
                throw std::invalid_argument("chooser selection " + chooser_selection->str() + " is not a candidate");
            }
            return {*chooser_selection};
        }
        return {candidates.front()};
    case ComponentKind::Service: return {candidates.front()};
    case ComponentKind::BroadcastReceiver: return candidates;
    }
    return {};
}

namespace {

class Simulator {
public:
    Simulator(const Scenario& scenario, const Catalog& catalog, const SimOptions& options)
        : scenario_(scenario), catalog_(catalog), options_(options) {
        world_.apps = scenario.apps;
        result_.metadata = metadata_from_apps(scenario.apps);
    }

    RunResult run() {
        for (const auto& launch : scenario_.launch_order) {
            chooser_ = launch.chooser_selection;
            world_.pending_queue.push_back({launch.component, std::nullopt, 0});
            while (!world_.pending_queue.empty()) {
                PendingActivation next = std::move(world_.pending_queue.front());
                world_.pending_queue.pop_front();
                activate(next);
            }
        }
        return std::move(result_);
    }

private:
    std::uint32_t pid_of(const ComponentId& id) const {
        if (id == resolver_activity()) return 0;
        const AppSpec* a = world_.app(id.package);
        return a == nullptr ? 0 : a->process_id;
    }

    LogEvent& emit(EventKind kind, std::uint32_t pid, const ComponentId& comp, IntentId trigger = kNoIntent) {
        LogEvent e;
        e.seq = ++world_.event_seq;
        e.pid = pid;
        e.kind = kind;
        e.component = comp;
        e.trigger = trigger;
        result_.events.push_back(std::move(e));
        return result_.events.back();
    }

    void diag(const ComponentId& comp, IntentId trigger, std::string message, bool system = false) {
        emit(EventKind::Diag, system ? 0 : pid_of(comp), comp, trigger).message = std::move(message);
    }

    void activate(const PendingActivation& act) {
        if (activations_ >= options_.max_activations) {
            if (!budget_reported_) diag({}, kNoIntent, "activation budget exhausted", true);
            budget_reported_ = true;
            return;
        }
        ++activations_;
        const ComponentSpec* spec = world_.component(act.component);
        const IntentId trigger = act.intent ? act.intent->intent_id : kNoIntent;
        ActivationRecord rec{act.component, trigger, {}, {}, 0, false};
        if (!act.intent) emit(EventKind::Launch, pid_of(act.component), act.component);
        const BehaviorScript* script =
            spec == nullptr ? nullptr : spec->script(act.intent ? Trigger::OnReceiveIntent : Trigger::OnLaunch);
        if (script != nullptr) Activation(*this, act, rec).run(*script);
        result_.truth.activations.push_back(std::move(rec));
    }

    // Interprets one script over a private register file.
    class Activation {
    public:
        Activation(Simulator& sim, const PendingActivation& act, ActivationRecord& rec)
            : sim_(sim), act_(act), rec_(rec), comp_(act.component), pid_(sim.pid_of(act.component)) {}

        void run(const BehaviorScript& script) {
            for (const auto& step : script.steps) {
                if (!execute(step)) {
                    rec_.aborted = true;
                    return;
                }
            }
        }

    private:
        TaintedValue value(const ValueRef& ref) const {
            if (!ref.is_register) return {ref.text, {}};
            const auto it = registers_.find(ref.text);
            return it == registers_.end() ? TaintedValue{} : it->second;
        }

        LogEvent& emit(EventKind kind) { return sim_.emit(kind, pid_, comp_, rec_.trigger); }

        const ExtraValue* incoming_extra(const std::string& key) const {
            if (!act_.intent) return nullptr;
            const auto it = act_.intent->extras.find(key);
            return it == act_.intent->extras.end() ? nullptr : &it->second;
        }

        bool execute(const Step& step) {
            auto& world = sim_.world_;
            switch (step.kind) {
            case StepKind::AcquireSource: {
                const SourceMethod* src = sim_.catalog_.methods.source(step.method);
                if (src == nullptr) {
                    sim_.diag(comp_, rec_.trigger, "unknown source " + step.method);
                    return false;
                }
                auto v = add_taint_to_data(step.method + "@" + comp_.str(), src->tag, step.method, comp_,
                                           sim_.catalog_);
                auto& e = emit(EventKind::SetTaint);
                e.method = step.method;
                e.labels = v.labels;
                registers_[step.dest] = std::move(v);
                return true;
            }
            case StepKind::PutExtra: {
                const auto v = retaint_for_intent(value(step.args.at(0)), comp_, sim_.catalog_);
                auto& e = emit(EventKind::CheckIntent);
                e.key = step.key;
                e.labels = v.labels;
                outgoing_[step.key] = ExtraValue{v.value, v.labels};
                return true;
            }
            case StepKind::GetExtra: {
                const ExtraValue* x = incoming_extra(step.key);
                registers_[step.dest] = x == nullptr ? TaintedValue{} : TaintedValue{x->value, x->labels};
                return true;
            }
            case StepKind::SendIntent: send(step.intent); return true;
            case StepKind::CallSink: {
                std::vector<TaintedValue> inputs;
                for (const auto& a : step.args) inputs.push_back(value(a));
                const auto v = propagate(PropagateOp::Concat, inputs);
                auto& e = emit(EventKind::SinkCall);
                e.method = step.method;
                e.labels = v.labels;
                rec_.sinks.push_back({step.method, v.labels});
                return true;
            }
            case StepKind::StoreShared: {
                const auto v = value(step.args.at(0));
                world.shared_stores[comp_.package][{step.store, step.key}] = v;
                auto& e = emit(EventKind::StoreShared);
                e.store = step.store;
                e.key = step.key;
                e.labels = v.labels;
                ++rec_.store_ops;
                return true;
            }
            case StepKind::LoadShared: {
                const auto& store = world.shared_stores[comp_.package];
                const auto it = store.find({step.store, step.key});
                TaintedValue v = it == store.end() ? TaintedValue{"default", {}} : it->second;
                auto& e = emit(EventKind::LoadShared);
                e.store = step.store;
                e.key = step.key;
                e.labels = v.labels;
                registers_[step.dest] = std::move(v);
                ++rec_.store_ops;
                return true;
            }
            case StepKind::StoreAppObj: {
                const auto v = value(step.args.at(0));
                world.app_objects[comp_.package].put(step.key, v);
                auto& e = emit(EventKind::StoreAppObj);
                e.key = step.key;
                e.labels = v.labels;
                ++rec_.store_ops;
                return true;
            }
            case StepKind::LoadAppObj: {
                auto v = world.app_objects[comp_.package].get(step.key);
                auto& e = emit(EventKind::LoadAppObj);
                e.key = step.key;
                e.labels = v.labels;
                registers_[step.dest] = std::move(v);
                ++rec_.store_ops;
                return true;
            }
            case StepKind::StartComponent: start(step.target); return true;
            case StepKind::Validate: {
                const ExtraValue* x = incoming_extra(step.key);
                bool ok = false;
                if (x != nullptr) ok = std::regex_search(x->value, std::regex(step.pattern));
                if (!ok) {
                    sim_.diag(comp_, rec_.trigger, "validation of extra '" + step.key + "' failed; activation aborted");
                }
                return ok;
            }
            }
            return true;
        }

        void start(const ComponentId& target) {
            const ComponentSpec* spec = sim_.world_.component(target);
            if (spec == nullptr || (!spec->exported && target.package != comp_.package)) {
                sim_.diag(comp_, rec_.trigger, "cannot start " + target.str());
                return;
            }
            if (act_.depth + 1 > sim_.options_.max_depth) {
                sim_.diag(comp_, rec_.trigger, "hop budget exceeded starting " + target.str(), true);
                return;
            }
            emit(EventKind::StartComponent).targets = {target};
            rec_.started.push_back(target);
            sim_.world_.pending_queue.push_back({target, std::nullopt, act_.depth + 1});
        }

        void send(const IntentTemplate& tpl) {
            auto& world = sim_.world_;
            IntentRecord intent;
            intent.intent_id = world.next_intent++;
            intent.target_kind = tpl.target_kind;
            intent.explicit_target = tpl.explicit_target;
            intent.action = tpl.action;
            intent.categories = tpl.categories;
            intent.mime_type = tpl.mime_type;
            intent.scheme = tpl.scheme;
            intent.extras = std::move(outgoing_);
            outgoing_.clear();

            sim_.emit_send(intent, comp_, rec_.trigger, pid_);
            const auto candidates = find_all_candidates(intent, world, comp_);
            sim_.emit_candidates(intent.intent_id, comp_, pid_, candidates);
            SendRecord send_rec{intent.intent_id, comp_, rec_.trigger, intent, candidates, {}};

            if (candidates.empty()) {
                if (intent.explicit_target) {
                    sim_.diag(comp_, rec_.trigger,
                              "intent " + std::to_string(intent.intent_id) + ": cannot resolve explicit target " +
                                  intent.explicit_target->str(),
                              true);
                }
                sim_.result_.truth.sends.push_back(std::move(send_rec));
                return;
            }

            const bool chooser_hop = !intent.explicit_target && intent.target_kind == ComponentKind::Activity &&
                                     sim_.chooser_ && candidates.size() > 1;
            if (chooser_hop) {
                std::vector<ComponentId> picked;
                try {
                    picked = find_receiver(candidates, intent.target_kind, sim_.chooser_);
                } catch (const std::invalid_argument& e) {
                    sim_.diag(comp_, rec_.trigger, "intent " + std::to_string(intent.intent_id) + ": " + e.what(), true);
                    sim_.result_.truth.sends.push_back(std::move(send_rec));
                    return;
                }
                resolver_hop(std::move(intent), std::move(send_rec), picked.front());
                return;
            }

            for (const auto& receiver : find_receiver(candidates, intent.target_kind, std::nullopt)) {
                if (deliver(intent, comp_, receiver)) send_rec.receivers.push_back(receiver);
            }
            sim_.result_.truth.sends.push_back(std::move(send_rec));
        }

        // The chooser receives intent a, then forwards a copy b to the user's pick.
        void resolver_hop(IntentRecord a, SendRecord a_rec, const ComponentId& pick) {
            const ComponentId& resolver = resolver_activity();
            auto& deliver_a = sim_.emit(EventKind::Deliver, pid_, comp_);
            deliver_a.intent = a.intent_id;
            deliver_a.targets = {resolver};
            a_rec.receivers = {resolver};
            sim_.result_.truth.activations.push_back({resolver, a.intent_id, {}, {}, 0, false});

            IntentRecord b = a;
            b.intent_id = sim_.world_.next_intent++;
            b.explicit_target = pick;
            sim_.emit_send(b, resolver, a.intent_id, pid_);
            sim_.emit_candidates(b.intent_id, resolver, pid_, {pick});
            SendRecord b_rec{b.intent_id, resolver, a.intent_id, b, {pick}, {}};
            sim_.result_.truth.sends.push_back(std::move(a_rec));
            if (deliver(b, resolver, pick)) b_rec.receivers.push_back(pick);
            sim_.result_.truth.sends.push_back(std::move(b_rec));
        }

        bool deliver(const IntentRecord& intent, const ComponentId& sender, const ComponentId& receiver) {
            if (act_.depth + 1 > sim_.options_.max_depth) {
                sim_.diag(sender, rec_.trigger, "hop budget exceeded delivering intent " +
                                                    std::to_string(intent.intent_id), true);
                return false;
            }
            auto& e = sim_.emit(EventKind::Deliver, pid_, sender);
            e.intent = intent.intent_id;
            e.targets = {receiver};
            sim_.world_.pending_queue.push_back({receiver, intent, act_.depth + 1});
            return true;
        }

        Simulator& sim_;
        const PendingActivation& act_;
        ActivationRecord& rec_;
        ComponentId comp_;
        std::uint32_t pid_;
        std::map<std::string, TaintedValue> registers_;
        std::map<std::string, ExtraValue> outgoing_;
    };

    void emit_send(const IntentRecord& intent, const ComponentId& sender, IntentId trigger, std::uint32_t pid) {
        auto& e = emit(EventKind::SendIntent, pid, sender, trigger);
        e.intent = intent.intent_id;
        e.intent_kind = intent.target_kind;
        e.target = intent.explicit_target;
        e.action = intent.action;
        e.categories = intent.categories;
        e.mime_type = intent.mime_type;
        e.scheme = intent.scheme;
        for (const auto& [key, x] : intent.extras) e.extras.push_back({key, x.labels});
    }

    void emit_candidates(IntentId intent, const ComponentId& sender, std::uint32_t pid,
                         const std::vector<ComponentId>& candidates) {
        auto& e = emit(EventKind::Candidates, pid, sender);
        e.intent = intent;
        e.targets = candidates;
    }

    const Scenario& scenario_;
    const Catalog& catalog_;
    SimOptions options_;
    WorldState world_;
    RunResult result_;
    std::optional<ComponentId> chooser_;
    std::size_t activations_ = 0;
    bool budget_reported_ = false;
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const Catalog& catalog, const SimOptions& options) {
    return Simulator(scenario, catalog, options).run();
}

}  // namespace iccwatch
