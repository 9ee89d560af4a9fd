#include "iccwatch/analyzer.hpp"

#include "iccwatch/log_format.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace iccwatch {

AnalysisError::AnalysisError(std::string stage, const std::string& message)
    : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

LabelSet IntentView::labels() const {
    LabelSet out;
    for (const auto& [key, labels] : taint_data) out.merge(labels);
    return out;
}

std::vector<std::string> ReceiverView::sink_methods() const {
    std::vector<std::string> out;
    for (const auto& s : sinks) {
        if (std::find(out.begin(), out.end(), s.method) == out.end()) out.push_back(s.method);
    }
    return out;
}

namespace {

std::string tag_hex(TaintTag tag) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08x", tag);
    return buf;
}

std::string join(const PermissionSet& items) {
    if (items.empty()) return "{}";
    std::string out = "{";
    for (const auto& i : items) {
        if (out.size() > 1) out += ',';
        out += i;
    }
    return out + "}";
}

template <typename Party>
void fill_party(Party& party, const ComponentId& component, const AppMetadata& meta) {
    party.component = component;
    party.package = component.package;
    party.components.clear();
    party.permissions.clear();
    if (const AppSpec* app = meta.app(component.package)) {
        party.process_id = app->process_id;
        party.permissions = app->permissions;
        for (const auto& c : app->components) party.components.push_back(c.id);
    }
}

struct ActivationData {
    std::vector<SinkUse> sinks;
    std::vector<ComponentId> started;
    std::vector<StoreAccess> stores;
};

struct SendData {
    LogEvent send;
    std::vector<ComponentId> candidates;
    std::vector<ComponentId> receivers;
};

}  // namespace

void attribute_permissions(IccModel& m, const AppMetadata& meta, const Catalog& catalog,
                           const AnalyzerOptions& options) {
    const LabelSet intent_labels = m.intent.labels();

    m.sender.permissions_required.clear();
    m.sender.source_methods.clear();
    for (const auto& label : intent_labels) {
        if (const SourceMethod* src = catalog.methods.source(label.source_method)) {
            m.sender.source_methods.insert(label.source_method);
            if (src->permission) m.sender.permissions_required.insert(*src->permission);
        }
    }

    auto& r = m.receiver;
    r.permissions_required.clear();
    r.taint_leak = false;
    for (const auto& sink : r.sinks) {
        const SinkMethod* spec = catalog.methods.sink(sink.method);
        if (spec == nullptr) continue;
        if (spec->permission) r.permissions_required.insert(*spec->permission);
        if (spec->exfiltrating && sink.labels.intersects(intent_labels)) r.taint_leak = true;
    }
    if (options.ignore_sink_presence) r.taint_leak = !intent_labels.empty();

    r.start_compt = false;
    for (const auto& target : r.started) {
        const ComponentSpec* spec = meta.component(target);
        if (spec != nullptr && target.package == r.package && !spec->exported) r.start_compt = true;
    }

    m.sender.permissions_lacked = set_difference(r.permissions_required, m.sender.permissions);
    r.permissions_lacked = set_difference(m.sender.permissions_required, r.permissions);
}

std::vector<IccModel> build_models(const std::vector<LogEvent>& events, const AppMetadata& meta,
                                   const Catalog& catalog, const AnalyzerOptions& options) {
    std::vector<SendData> sends;
    std::map<IntentId, std::size_t> by_intent;
    std::map<std::pair<IntentId, ComponentId>, ActivationData> activations;

    auto known = [&](IntentId id, const LogEvent& e) -> SendData& {
        const auto it = by_intent.find(id);
        if (it == by_intent.end()) {
            throw AnalysisError("build", "event " + std::to_string(e.seq) + " (" + std::string(to_string(e.kind)) +
                                             ") references unknown intent " + std::to_string(id));
        }
        return sends[it->second];
    };

    for (const auto& e : events) {
        switch (e.kind) {
        case EventKind::SendIntent:
            if (!by_intent.emplace(e.intent, sends.size()).second) {
                throw AnalysisError("build", "intent " + std::to_string(e.intent) + " sent twice");
            }
            if (meta.app_by_pid(e.pid) == nullptr) {
                throw AnalysisError("build", "pid " + std::to_string(e.pid) + " of intent " + std::to_string(e.intent) +
                                                 " is not in the metadata");
            }
            sends.push_back({e, {}, {}});
            break;
        case EventKind::Candidates: known(e.intent, e).candidates = e.targets; break;
        case EventKind::Deliver:
            if (e.targets.empty()) throw AnalysisError("build", "DELIVER without target at seq " + std::to_string(e.seq));
            if (e.targets.front() != resolver_activity() && meta.app(e.targets.front().package) == nullptr) {
                throw AnalysisError("build", "receiver " + e.targets.front().str() + " at seq " + std::to_string(e.seq) +
                                                 " is not in the metadata");
            }
            known(e.intent, e).receivers.push_back(e.targets.front());
            break;
        case EventKind::SinkCall:
            if (e.trigger != kNoIntent) activations[{e.trigger, e.component}].sinks.push_back({e.method, e.labels});
            break;
        case EventKind::StartComponent:
            if (e.trigger != kNoIntent && !e.targets.empty()) {
                activations[{e.trigger, e.component}].started.push_back(e.targets.front());
            }
            break;
        case EventKind::StoreShared:
        case EventKind::LoadShared:
        case EventKind::StoreAppObj:
        case EventKind::LoadAppObj:
            if (e.trigger != kNoIntent) {
                const bool shared = e.kind == EventKind::StoreShared || e.kind == EventKind::LoadShared;
                const bool write = e.kind == EventKind::StoreShared || e.kind == EventKind::StoreAppObj;
                activations[{e.trigger, e.component}].stores.push_back({shared, write, e.store, e.key, e.labels});
            }
            break;
        default: break;
        }
    }

    std::vector<IccModel> models;
    for (const auto& s : sends) {
        IccModel base;
        base.trigger = s.send.trigger;
        fill_party(base.sender, s.send.component, meta);
        if (meta.app(s.send.component.package) == nullptr) base.sender.process_id = s.send.pid;
        base.sender.candidates = s.candidates;
        auto& in = base.intent;
        in.intent_id = s.send.intent;
        in.kind = s.send.intent_kind;
        in.explicit_target = s.send.target;
        in.action = s.send.action;
        in.categories = s.send.categories;
        in.mime_type = s.send.mime_type;
        in.scheme = s.send.scheme;
        for (const auto& x : s.send.extras) in.taint_data.emplace_back(x.key, x.labels);
        base.carried = in.labels();

        if (s.receivers.empty()) {
            base.index = models.size();
            attribute_permissions(base, meta, catalog, options);
            models.push_back(std::move(base));
            continue;
        }
        for (const auto& receiver : s.receivers) {
            IccModel m = base;
            m.index = models.size();
            fill_party(m.receiver, receiver, meta);
            if (const auto it = activations.find({s.send.intent, receiver}); it != activations.end()) {
                m.receiver.sinks = it->second.sinks;
                m.receiver.started = it->second.started;
                m.receiver.stores = it->second.stores;
            }
            attribute_permissions(m, meta, catalog, options);
            models.push_back(std::move(m));
        }
    }
    return models;
}

std::vector<IccModel> deflate_models(std::vector<IccModel> models, const AppMetadata& meta, const Catalog& catalog,
                                     const AnalyzerOptions& options) {
    // Chooser elision: a (sender -> ResolverActivity) followed by b (ResolverActivity -> pick).
    std::map<IntentId, std::size_t> to_resolver;
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i].receiver.component == resolver_activity()) to_resolver[models[i].intent.intent_id] = i;
    }
    std::vector<bool> dropped(models.size(), false);
    for (auto& b : models) {
        if (b.sender.component != resolver_activity()) continue;
        const auto it = to_resolver.find(b.trigger);
        if (it == to_resolver.end()) continue;
        const IccModel& a = models[it->second];
        b.sender = a.sender;
        b.trigger = a.trigger;
        std::vector<IntentId> merged = a.merged;
        merged.push_back(a.intent.intent_id);
        merged.insert(merged.end(), b.merged.begin(), b.merged.end());
        b.merged = std::move(merged);
        b.carried.merge(a.carried);
        b.provenance.push_back({resolver_activity(), "chooser forwarded intent " + std::to_string(a.intent.intent_id) +
                                                         " as " + std::to_string(b.intent.intent_id)});
        dropped[it->second] = true;
    }
    std::vector<IccModel> elided;
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (!dropped[i]) elided.push_back(std::move(models[i]));
    }

    // Chain condensation: j continues i when i's intent started j's sender
    // and the two intents share a label.
    std::map<std::pair<IntentId, ComponentId>, std::size_t> by_delivery;
    std::vector<std::optional<std::size_t>> pred(elided.size());
    std::vector<bool> has_successor(elided.size(), false);
    for (std::size_t j = 0; j < elided.size(); ++j) {
        const IccModel& m = elided[j];
        if (m.trigger != kNoIntent) {
            const auto it = by_delivery.find({m.trigger, m.sender.component});
            if (it != by_delivery.end() && elided[it->second].intent.labels().intersects(m.intent.labels())) {
                pred[j] = it->second;
                has_successor[it->second] = true;
            }
        }
        if (m.delivered()) by_delivery.emplace(std::make_pair(m.intent.intent_id, m.receiver.component), j);
    }

    std::vector<IccModel> condensed(elided.size());
    std::vector<IccModel> out;
    for (std::size_t j = 0; j < elided.size(); ++j) {
        IccModel m = elided[j];
        if (pred[j]) {
            const IccModel& head = condensed[*pred[j]];
            m.sender = head.sender;
            m.trigger = head.trigger;
            m.intent = head.intent;
            std::vector<IntentId> merged = head.merged;
            merged.push_back(head.intent.intent_id);
            merged.insert(merged.end(), elided[j].merged.begin(), elided[j].merged.end());
            m.merged = std::move(merged);
            m.carried.merge(head.carried);
            std::vector<ProvenanceStep> prov = head.provenance;
            prov.push_back({elided[j].sender.component, "relayed intent " + std::to_string(head.intent.intent_id) +
                                                            " as " + std::to_string(elided[j].intent.intent_id)});
            prov.insert(prov.end(), elided[j].provenance.begin(), elided[j].provenance.end());
            m.provenance = std::move(prov);
            attribute_permissions(m, meta, catalog, options);
        }
        condensed[j] = m;
        const auto& r = m.receiver;
        if (!has_successor[j] || !r.sinks.empty() || !r.started.empty() || !r.stores.empty()) {
            out.push_back(std::move(m));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
    return out;
}

IccModel trace_bypass_sources(const IccModel& m, const std::vector<IccModel>& prior, const AppMetadata& meta,
                              const Catalog& catalog, const AnalyzerOptions& options) {
    IccModel out = m;
    LabelSet direct = m.carried;
    direct.merge(m.intent.labels());

    auto carried_by = [](const IccModel& p, const TaintLabel& label) {
        return p.carried.contains(label) || p.intent.labels().contains(label);
    };

    const IccModel* resolved_from = nullptr;
    std::map<std::string, LabelSet> added;
    std::vector<ProvenanceStep> chain;

    for (const auto& sink : m.receiver.sinks) {
        // Labels from catalog sources first, so the chain names the real source.
        std::vector<TaintLabel> ordered(sink.labels.begin(), sink.labels.end());
        std::stable_partition(ordered.begin(), ordered.end(), [&catalog](const TaintLabel& l) {
            return catalog.methods.source(l.source_method) != nullptr;
        });
        for (const auto& label : ordered) {
            if (direct.contains(label) || label.origin_component.package == m.receiver.package) continue;

            const IccModel* source = nullptr;
            std::string via;
            std::vector<ProvenanceStep> hops;

            for (const auto& load : m.receiver.stores) {
                if (!load.shared || load.write || !load.labels.contains(label)) continue;
                for (auto p = prior.rbegin(); p != prior.rend() && source == nullptr; ++p) {
                    if (!carried_by(*p, label)) continue;
                    for (const auto& st : p->receiver.stores) {
                        if (st.shared && st.write && st.store == load.store && st.key == load.key &&
                            st.labels.contains(label)) {
                            source = &*p;
                            via = "shared " + load.store + ":" + load.key;
                            hops.push_back({p->receiver.component, "STORE_SHARED " + load.store + ":" + load.key});
                            hops.push_back({m.receiver.component, "LOAD_SHARED " + load.store + ":" + load.key});
                            break;
                        }
                    }
                }
                if (source != nullptr) break;
            }
            if (source == nullptr) {
                for (auto p = prior.rbegin(); p != prior.rend(); ++p) {
                    if (p->receiver.component == m.sender.component && carried_by(*p, label)) {
                        source = &*p;
                        break;
                    }
                }
                if (source != nullptr) {
                    std::string field;
                    for (const auto& st : source->receiver.stores) {
                        if (!st.shared && st.write && st.labels.contains(label)) field = st.key;
                    }
                    if (!field.empty()) {
                        via = "appobj " + field;
                        hops.push_back({source->receiver.component, "STORE_APPOBJ " + field});
                        hops.push_back({m.receiver.component, "LOAD_APPOBJ " + field});
                    } else {
                        via = "relay " + m.sender.component.str();
                        hops.push_back({m.sender.component, "relayed data received in intent " +
                                                                std::to_string(source->intent.intent_id)});
                    }
                }
            }
            if (source == nullptr) {
                for (auto p = prior.rbegin(); p != prior.rend(); ++p) {
                    if (carried_by(*p, label)) {
                        source = &*p;
                        via = "label match";
                        hops.push_back({p->receiver.component, "received label in intent " +
                                                                   std::to_string(p->intent.intent_id)});
                        break;
                    }
                }
            }
            if (source == nullptr) {
                out.diagnostics.push_back("unresolved source for label " + tag_hex(label.tag) + ":" +
                                          label.source_method + ":" + label.origin_component.str() + " at " +
                                          sink.method);
                continue;
            }
            added[via].insert(label);
            if (resolved_from == nullptr) {
                resolved_from = source;
                chain.push_back({source->sender.component, "sent intent " + std::to_string(source->intent.intent_id) +
                                                               " carrying " + tag_hex(label.tag) + " from " +
                                                               label.source_method});
                chain.insert(chain.end(), hops.begin(), hops.end());
                chain.push_back({m.receiver.component, "SINK_CALL " + sink.method});
            }
        }
    }

    if (resolved_from == nullptr) return out;
    out.sender = resolved_from->sender;
    for (auto& [via, labels] : added) {
        out.intent.taint_data.emplace_back("<" + via + ">", labels);
        out.carried.merge(labels);
    }
    out.provenance.insert(out.provenance.end(), chain.begin(), chain.end());
    attribute_permissions(out, meta, catalog, options);
    return out;
}

ThreatVerdict classify(const IccModel& m) {
    ThreatVerdict v;
    v.model = m.index;
    auto& ev = v.evidence;
    const auto& s = m.sender;
    const auto& r = m.receiver;
    if (!m.delivered()) {
        ev.push_back({"receiver", "none"});
        return v;
    }
    ev.push_back({"sender", s.component.str()});
    ev.push_back({"receiver", r.component.str()});
    if (s.package == r.package) {
        ev.push_back({"scope", "intra-app"});
        return v;
    }
    auto verdict = [&v](ThreatType t, int c) {
        v.threat = t;
        v.matched_case = c;
        return v;
    };
    for (const auto& c : s.candidates) {
        if (c.package == s.package) {
            ev.push_back({"candidates", c.str() + " belongs to the sender app"});
            return verdict(ThreatType::Hijacking, 1);
        }
    }
    ev.push_back({"sender.permissions_lacked", join(s.permissions_lacked)});
    ev.push_back({"receiver.permissions_lacked", join(r.permissions_lacked)});
    if (r.taint_leak && s.permissions_lacked.empty()) {
        ev.push_back({"receiver.taint_leak", "true"});
        return verdict(ThreatType::Hijacking, 2);
    }
    if (!s.permissions_lacked.empty() && r.permissions_lacked.empty()) return verdict(ThreatType::Spoofing, 3);
    if (r.start_compt && r.permissions_lacked.empty()) {
        ev.push_back({"receiver.start_compt", "true"});
        return verdict(ThreatType::Spoofing, 4);
    }
    if (!s.permissions_lacked.empty() && !r.permissions_lacked.empty()) return verdict(ThreatType::Collusion, 5);
    return v;
}

AnalysisResult analyze_events(const std::vector<LogEvent>& events, const AppMetadata& meta, const Catalog& catalog,
                              const AnalyzerOptions& options) {
    using clock = std::chrono::steady_clock;
    AnalysisResult result;
    auto t0 = clock::now();
    result.raw_models = build_models(events, meta, catalog, options);
    auto t1 = clock::now();
    std::vector<IccModel> deflated = options.deflate ? deflate_models(result.raw_models, meta, catalog, options)
                                                     : result.raw_models;
    auto t2 = clock::now();
    for (auto& m : deflated) {
        result.models.push_back(options.trace_bypass ? trace_bypass_sources(m, result.models, meta, catalog, options)
                                                     : std::move(m));
    }
    auto t3 = clock::now();
    for (const auto& m : result.models) result.verdicts.push_back(classify(m));
    auto t4 = clock::now();
    result.timings.build = t1 - t0;
    result.timings.deflate = t2 - t1;
    result.timings.trace = t3 - t2;
    result.timings.classify = t4 - t3;
    return result;
}

AnalysisResult analyze(std::string_view log_text, const AppMetadata& meta, std::set<std::uint32_t> focus,
                       const Catalog& catalog, const AnalyzerOptions& options) {
    if (focus.empty()) focus = meta.pids();
    const auto t0 = std::chrono::steady_clock::now();
    ParsedLog parsed;
    try {
        parsed = parse_log(log_text, focus);
    } catch (const LogParseError& e) {
        throw AnalysisError("parse", e.what());
    }
    const auto parse_time = std::chrono::steady_clock::now() - t0;
    AnalysisResult result = analyze_events(parsed.events, meta, catalog, options);
    result.skipped_records = parsed.skipped_unknown;
    result.timings.parse = parse_time;
    return result;
}

}  // namespace iccwatch
