#include "random_world.hpp"

#include <array>
#include <string>

namespace iccwatch::testing {

namespace {

constexpr std::array kPermissions{"android.permission.READ_PHONE_STATE", "android.permission.ACCESS_FINE_LOCATION",
                                  "android.permission.SEND_SMS", "android.permission.INTERNET",
                                  "android.permission.WRITE_EXTERNAL_STORAGE"};
constexpr std::array kSources{"getDeviceId", "getLatitude", "getLastKnownLocation", "getUserInput"};
constexpr std::array kSinks{"Log.d", "SmsManager.sendTextMessage", "FileOutputStream.write",
                            "URLConnection.openConnection", "Editor.putString"};
constexpr std::array kActions{"act.A", "act.B", "act.C"};
constexpr std::array kKeys{"k0", "k1"};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <typename C>
    const auto& pick(const C& c) {
        return c[static_cast<std::size_t>(uniform(0, static_cast<int>(c.size()) - 1))];
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

ComponentKind random_kind(Gen& g) { return static_cast<ComponentKind>(g.uniform(0, 2)); }

std::vector<Step> random_script(Gen& g, const std::vector<ComponentId>& all, const std::string& package,
                                bool receiving, const WorldLimits& limits) {
    std::vector<Step> steps;
    std::vector<std::string> regs;
    int sends = 0;
    const int length = g.uniform(1, 7);
    auto value = [&]() {
        if (!regs.empty() && g.chance(0.7)) return ValueRef::reg(g.pick(regs));
        return ValueRef::literal("lit" + std::to_string(g.uniform(0, 9)));
    };
    if (!receiving && g.chance(0.6)) {
        Step src;
        src.kind = StepKind::AcquireSource;
        src.method = g.pick(kSources);
        src.dest = "r0";
        regs.push_back(src.dest);
        Step put;
        put.kind = StepKind::PutExtra;
        put.key = g.pick(kKeys);
        put.args.push_back(ValueRef::reg("r0"));
        steps.push_back(std::move(src));
        steps.push_back(std::move(put));
    }
    if (receiving && g.chance(0.6)) {
        Step get;
        get.kind = StepKind::GetExtra;
        get.key = g.pick(kKeys);
        get.dest = "r0";
        regs.push_back(get.dest);
        steps.push_back(std::move(get));
        if (g.chance(0.6)) {
            Step sink;
            sink.kind = StepKind::CallSink;
            sink.method = g.pick(kSinks);
            sink.args.push_back(ValueRef::reg("r0"));
            steps.push_back(std::move(sink));
        }
    }
    for (int i = 0; i < length; ++i) {
        Step s;
        const int what = g.uniform(0, 9);
        if (what <= 1) {
            s.kind = StepKind::AcquireSource;
            s.method = g.pick(kSources);
            s.dest = "r" + std::to_string(regs.size());
            regs.push_back(s.dest);
        } else if (what == 2 && receiving) {
            s.kind = StepKind::GetExtra;
            s.key = g.pick(kKeys);
            s.dest = "r" + std::to_string(regs.size());
            regs.push_back(s.dest);
        } else if (what == 3) {
            s.kind = StepKind::PutExtra;
            s.key = g.pick(kKeys);
            s.args.push_back(value());
        } else if (what <= 5 && sends < limits.max_sends_per_script && (!receiving || g.chance(0.4))) {
            ++sends;
            s.kind = StepKind::SendIntent;
            s.intent.target_kind = random_kind(g);
            if (g.chance(0.4)) {
                const auto& target = g.pick(all);
                s.intent.explicit_target = target;
            } else {
                s.intent.action = g.pick(kActions);
                if (g.chance(0.2)) s.intent.categories.insert("cat.X");
                if (g.chance(0.15)) s.intent.scheme = "http";
            }
        } else if (what <= 7) {
            s.kind = StepKind::CallSink;
            s.method = g.pick(kSinks);
            s.args.push_back(value());
            if (g.chance(0.3)) s.args.push_back(value());
        } else if (what == 8) {
            s.kind = StepKind::StartComponent;
            std::vector<ComponentId> own;
            for (const auto& id : all) {
                if (id.package == package) own.push_back(id);
            }
            s.target = g.chance(0.6) ? g.pick(own) : g.pick(all);
        } else if (receiving) {
            s.kind = StepKind::Validate;
            s.key = g.pick(kKeys);
            s.pattern = g.chance(0.5) ? "lit" : "^get";
        } else {
            continue;
        }
        steps.push_back(std::move(s));
    }
    return steps;
}

std::string random_text(Gen& g) {
    static constexpr std::string_view alphabet = "ab-_/\\ ,;:=|\t\n%x0\x7f\xc3\xa9";
    std::string out;
    const int n = g.uniform(0, 6);
    for (int i = 0; i < n; ++i) out += alphabet[static_cast<std::size_t>(g.uniform(0, alphabet.size() - 1))];
    return out;
}

ComponentId random_id(Gen& g) {
    if (g.chance(0.1)) return {};
    return {random_text(g), random_text(g)};
}

ComponentId random_target(Gen& g) {
    ComponentId id = random_id(g);
    if (id.empty()) id.package = "p";
    return id;
}

LabelSet random_labels(Gen& g) {
    LabelSet out;
    const int n = g.uniform(0, 3);
    for (int i = 0; i < n; ++i) {
        out.insert({static_cast<TaintTag>(g.uniform(0, 0x7fffffff)), random_text(g), random_id(g)});
    }
    return out;
}

std::optional<std::string> maybe_text(Gen& g) {
    if (g.chance(0.5)) return std::nullopt;
    return random_text(g);
}

}  // namespace

Scenario random_world(std::uint64_t seed, const WorldLimits& limits) {
    Gen g(seed);
    Scenario s;
    s.name = "random_" + std::to_string(seed);
    const int apps = g.uniform(1, limits.max_apps);
    std::vector<ComponentId> all;
    for (int a = 0; a < apps; ++a) {
        AppSpec app;
        app.package = "app" + std::to_string(a);
        app.process_id = static_cast<std::uint32_t>(100 + a);
        for (const auto* p : kPermissions) {
            if (g.chance(0.4)) app.permissions.insert(p);
        }
        const int comps = g.uniform(1, limits.max_components);
        for (int c = 0; c < comps; ++c) {
            ComponentSpec comp;
            comp.id = {app.package, "C" + std::to_string(c)};
            comp.kind = random_kind(g);
            comp.exported = g.chance(0.7);
            const int filters = g.uniform(0, 2);
            for (int f = 0; f < filters; ++f) {
                FilterSpec spec;
                for (const auto* act : kActions) {
                    if (g.chance(0.4)) spec.actions.insert(act);
                }
                if (g.chance(0.3)) spec.categories.insert("cat.X");
                if (g.chance(0.2)) spec.data_schemes.insert("http");
                spec.priority = g.uniform(0, 3);
                comp.filters.push_back(std::move(spec));
            }
            all.push_back(comp.id);
            app.components.push_back(std::move(comp));
        }
        s.apps.push_back(std::move(app));
    }
    for (auto& app : s.apps) {
        for (auto& comp : app.components) {
            if (g.chance(0.6)) comp.behaviors.push_back({Trigger::OnLaunch, random_script(g, all, app.package, false, limits)});
            if (g.chance(0.8)) {
                comp.behaviors.push_back({Trigger::OnReceiveIntent, random_script(g, all, app.package, true, limits)});
            }
        }
    }
    const int launches = g.uniform(1, 3);
    for (int i = 0; i < launches; ++i) {
        LaunchSpec l;
        l.component = g.pick(all);
        if (g.chance(0.3)) l.chooser_selection = g.pick(all);
        s.launch_order.push_back(std::move(l));
    }
    return s;
}

std::vector<LogEvent> random_events(std::mt19937_64& rng, std::size_t count) {
    Gen g(rng());
    std::vector<LogEvent> out;
    std::uint64_t seq = static_cast<std::uint64_t>(g.uniform(0, 5));
    for (std::size_t i = 0; i < count; ++i) {
        LogEvent e;
        seq += static_cast<std::uint64_t>(g.uniform(1, 3));
        e.seq = seq;
        e.pid = static_cast<std::uint32_t>(g.uniform(0, 1000));
        e.kind = static_cast<EventKind>(g.uniform(0, 12));
        e.component = random_id(g);
        auto id = [&g]() { return static_cast<IntentId>(g.uniform(0, 100000)); };
        switch (e.kind) {
        case EventKind::Launch: break;
        case EventKind::SetTaint:
        case EventKind::SinkCall:
            e.trigger = id();
            e.method = random_text(g);
            e.labels = random_labels(g);
            break;
        case EventKind::CheckIntent:
        case EventKind::StoreAppObj:
        case EventKind::LoadAppObj:
            e.trigger = id();
            e.key = random_text(g);
            e.labels = random_labels(g);
            break;
        case EventKind::StoreShared:
        case EventKind::LoadShared:
            e.trigger = id();
            e.store = random_text(g);
            e.key = random_text(g);
            e.labels = random_labels(g);
            break;
        case EventKind::SendIntent: {
            e.trigger = id();
            e.intent = id();
            e.intent_kind = random_kind(g);
            if (g.chance(0.5)) e.target = random_id(g);
            e.action = maybe_text(g);
            const int cats = g.uniform(0, 2);
            for (int c = 0; c < cats; ++c) e.categories.insert(random_text(g));
            e.mime_type = maybe_text(g);
            e.scheme = maybe_text(g);
            const int extras = g.uniform(0, 3);
            for (int x = 0; x < extras; ++x) e.extras.push_back({random_text(g), random_labels(g)});
            break;
        }
        case EventKind::Candidates: {
            e.intent = id();
            const int n = g.uniform(0, 3);
            for (int t = 0; t < n; ++t) e.targets.push_back(random_target(g));
            break;
        }
        case EventKind::Deliver:
            e.intent = id();
            e.targets = {random_target(g)};
            break;
        case EventKind::StartComponent:
            e.trigger = id();
            e.targets = {random_target(g)};
            break;
        case EventKind::Diag:
            e.trigger = id();
            e.message = random_text(g);
            break;
        }
        out.push_back(std::move(e));
    }
    return out;
}

Scenario synthetic_load(std::size_t models, std::size_t senders) {
    Scenario s;
    s.name = "synthetic_" + std::to_string(models);
    std::vector<ComponentId> launchers;
    for (std::size_t i = 0; i < senders; ++i) {
        const std::string n = std::to_string(i);
        AppSpec sender{"load.sender" + n, static_cast<std::uint32_t>(1000 + 2 * i), {"android.permission.READ_PHONE_STATE"}, {}};
        AppSpec receiver{"load.receiver" + n, static_cast<std::uint32_t>(1001 + 2 * i), {"android.permission.SEND_SMS"}, {}};

        ComponentSpec main{{sender.package, "Main"}, ComponentKind::Activity, true, {}, {}};
        Step src;
        src.kind = StepKind::AcquireSource;
        src.method = "getDeviceId";
        src.dest = "id";
        Step put;
        put.kind = StepKind::PutExtra;
        put.key = "id";
        put.args = {ValueRef::reg("id")};
        Step send;
        send.kind = StepKind::SendIntent;
        send.intent.target_kind = ComponentKind::Service;
        send.intent.action = "load.ACTION" + n;
        main.behaviors.push_back({Trigger::OnLaunch, {src, put, send}});
        sender.components.push_back(main);

        ComponentSpec svc{{receiver.package, "Svc"}, ComponentKind::Service, true, {}, {}};
        FilterSpec f;
        f.actions.insert("load.ACTION" + n);
        svc.filters.push_back(f);
        Step get;
        get.kind = StepKind::GetExtra;
        get.key = "id";
        get.dest = "v";
        Step sink;
        sink.kind = StepKind::CallSink;
        sink.method = "SmsManager.sendTextMessage";
        sink.args = {ValueRef::reg("v")};
        svc.behaviors.push_back({Trigger::OnReceiveIntent, {get, sink}});
        receiver.components.push_back(svc);

        launchers.push_back(main.id);
        s.apps.push_back(std::move(sender));
        s.apps.push_back(std::move(receiver));
    }
    for (std::size_t i = 0; i < models; ++i) s.launch_order.push_back({launchers[i % launchers.size()], std::nullopt});
    return s;
}

}  // namespace iccwatch::testing
