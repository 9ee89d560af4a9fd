#include "iccwatch/corpus.hpp"
#include "iccwatch/simulator.hpp"
#include "random_world.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace iccwatch;

namespace {

std::vector<const LogEvent*> of_kind(const RunResult& r, EventKind k) {
    std::vector<const LogEvent*> out;
    for (const auto& e : r.events) {
        if (e.kind == k) out.push_back(&e);
    }
    return out;
}

// Straightforward matcher used to cross-check find_all_candidates.
std::vector<ComponentId> brute_candidates(const IntentRecord& in, const std::vector<AppSpec>& apps,
                                          const ComponentId& sender) {
    std::vector<std::pair<int, ComponentId>> hits;
    for (const auto& app : apps) {
        for (const auto& c : app.components) {
            if (c.kind != in.target_kind) continue;
            const bool visible = c.exported || c.id.package == sender.package;
            if (in.explicit_target) {
                if (c.id == *in.explicit_target && visible) hits.push_back({0, c.id});
                continue;
            }
            if (!visible) continue;
            int best = -1000000;
            bool any = false;
            for (const auto& f : c.filters) {
                if (filter_matches(f, in)) {
                    any = true;
                    best = std::max(best, f.priority);
                }
            }
            if (any) hits.push_back({-best, c.id});
        }
    }
    std::sort(hits.begin(), hits.end());
    std::vector<ComponentId> out;
    for (auto& [p, id] : hits) out.push_back(id);
    return out;
}

}  // namespace

TEST(FindReceiver, Examples) {
    const ComponentId a{"p", "A"}, b{"q", "B"};
    EXPECT_EQ(find_receiver({a, b}, ComponentKind::Activity, std::nullopt), std::vector<ComponentId>{a});
    EXPECT_EQ(find_receiver({a, b}, ComponentKind::Activity, b), std::vector<ComponentId>{b});
    EXPECT_EQ(find_receiver({a, b}, ComponentKind::Service, std::nullopt), std::vector<ComponentId>{a});
    EXPECT_EQ(find_receiver({a, b}, ComponentKind::BroadcastReceiver, std::nullopt), (std::vector<ComponentId>{a, b}));
    EXPECT_THROW(find_receiver({}, ComponentKind::Service, std::nullopt), std::invalid_argument);
    EXPECT_THROW(find_receiver({a}, ComponentKind::Activity, ComponentId{"z", "Z"}), std::invalid_argument);
}

TEST(FindAllCandidates, HijackLocationOrdersByPriority) {
    const Scenario s = corpus_scenario("hijack_location");
    WorldState w;
    w.apps = s.apps;
    IntentRecord in;
    in.target_kind = ComponentKind::Service;
    in.action = "com.victim.SHOW";
    const auto c = find_all_candidates(in, w, ComponentId::parse("com.victim/MainActivity"));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], ComponentId::parse("com.malware1/StealService"));
    EXPECT_EQ(c[1], ComponentId::parse("com.victim/ShowService"));
    // Outside the victim app, the private service is not visible.
    const auto other = find_all_candidates(in, w, ComponentId::parse("com.malware1/StealService"));
    EXPECT_EQ(other, std::vector<ComponentId>{ComponentId::parse("com.malware1/StealService")});
}

TEST(FindAllCandidates, AgreesWithBruteForceOnRandomWorlds) {
    std::mt19937 rng(11);
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const Scenario s = iccwatch::testing::random_world(seed);
        WorldState w;
        w.apps = s.apps;
        const RunResult run = run_scenario(s);
        for (const auto& send : run.truth.sends) {
            if (send.sender == resolver_activity()) continue;
            EXPECT_EQ(find_all_candidates(send.intent, w, send.sender),
                      brute_candidates(send.intent, s.apps, send.sender))
                << "seed " << seed;
        }
    }
}

TEST(RunScenario, IsDeterministic) {
    for (const auto& name : corpus_names()) {
        const Scenario s = corpus_scenario(name);
        const RunResult a = run_scenario(s), b = run_scenario(s);
        EXPECT_EQ(a.events, b.events) << name;
    }
}

TEST(RunScenario, HijackLocationEvents) {
    const RunResult r = run_scenario(corpus_scenario("hijack_location"));
    const auto sends = of_kind(r, EventKind::SendIntent);
    ASSERT_EQ(sends.size(), 1u);
    EXPECT_EQ(sends[0]->pid, 1001u);
    EXPECT_EQ(sends[0]->action, "com.victim.SHOW");
    ASSERT_EQ(sends[0]->extras.size(), 1u);
    EXPECT_EQ(sends[0]->extras[0].key, "location");
    const auto cands = of_kind(r, EventKind::Candidates);
    ASSERT_EQ(cands.size(), 1u);
    EXPECT_LT(sends[0]->seq, cands[0]->seq);
    const auto deliver = of_kind(r, EventKind::Deliver);
    ASSERT_EQ(deliver.size(), 1u);
    EXPECT_LT(cands[0]->seq, deliver[0]->seq);
    EXPECT_EQ(deliver[0]->targets.at(0), ComponentId::parse("com.malware1/StealService"));
    const auto sinks = of_kind(r, EventKind::SinkCall);
    ASSERT_EQ(sinks.size(), 1u);
    EXPECT_EQ(sinks[0]->pid, 1002u);
    EXPECT_EQ(sinks[0]->method, "Log.v");
    EXPECT_TRUE(sinks[0]->labels.contains({0x00010004, "getLatitude", ComponentId::parse("com.victim/MainActivity")}));
}

TEST(RunScenario, ChainProducesThreeSends) {
    const RunResult r = run_scenario(corpus_scenario("multihop_chain"));
    EXPECT_EQ(of_kind(r, EventKind::SendIntent).size(), 3u);
    EXPECT_EQ(of_kind(r, EventKind::StartComponent).size(), 1u);
    const auto sinks = of_kind(r, EventKind::SinkCall);
    ASSERT_EQ(sinks.size(), 1u);
    EXPECT_EQ(sinks[0]->component, ComponentId::parse("com.chain.four/C4"));
}

TEST(RunScenario, ChooserGoesThroughResolver) {
    const RunResult r = run_scenario(corpus_scenario("chooser_resolver"));
    const auto sends = of_kind(r, EventKind::SendIntent);
    ASSERT_EQ(sends.size(), 2u);
    EXPECT_EQ(sends[1]->component, resolver_activity());
    EXPECT_EQ(sends[1]->trigger, sends[0]->intent);
    const auto deliver = of_kind(r, EventKind::Deliver);
    ASSERT_EQ(deliver.size(), 2u);
    EXPECT_EQ(deliver[0]->targets.at(0), resolver_activity());
    EXPECT_EQ(deliver[1]->targets.at(0), ComponentId::parse("com.share.notes/NoteActivity"));
}

TEST(RunScenario, ValidateFailureAbortsActivation) {
    const RunResult r = run_scenario(corpus_scenario("coincidental_format"));
    EXPECT_TRUE(of_kind(r, EventKind::SinkCall).empty());
    ASSERT_EQ(r.truth.activations.size(), 2u);
    EXPECT_TRUE(r.truth.activations[1].aborted);
    EXPECT_FALSE(of_kind(r, EventKind::Diag).empty());
}

TEST(RunScenario, CandidatesPrecedeEveryDelivery) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const RunResult r = run_scenario(iccwatch::testing::random_world(seed));
        std::set<IntentId> announced;
        for (const auto& e : r.events) {
            if (e.kind == EventKind::Candidates) announced.insert(e.intent);
            if (e.kind == EventKind::Deliver) {
                EXPECT_TRUE(announced.count(e.intent) != 0) << "seed " << seed;
            }
        }
    }
}

TEST(RunScenario, SinkLabelsMatchGroundTruth) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const RunResult r = run_scenario(iccwatch::testing::random_world(seed));
        std::vector<LabelSet> from_log, from_truth;
        for (const auto& e : r.events) {
            if (e.kind == EventKind::SinkCall) from_log.push_back(e.labels);
        }
        for (const auto& a : r.truth.activations) {
            for (const auto& s : a.sinks) from_truth.push_back(s.labels);
        }
        EXPECT_EQ(from_log, from_truth) << "seed " << seed;
    }
}

TEST(RunScenario, SequenceNumbersIncrease) {
    const RunResult r = run_scenario(corpus_scenario("db_deviceid_orderedintent1"));
    for (std::size_t i = 1; i < r.events.size(); ++i) EXPECT_LT(r.events[i - 1].seq, r.events[i].seq);
}

TEST(RunScenario, ActivationBudgetStopsLoops) {
    const Scenario s = parse_scenario(R"(iccscenario 1
name ping_pong
app a.b pid=1
component a.b/Ping kind=service exported=true
filter a.b/Ping actions=PING
on_launch a.b/Ping
  send_intent kind=service action=PING
end
on_receive a.b/Ping
  send_intent kind=service action=PING
end
launch a.b/Ping
)");
    SimOptions opts;
    opts.max_depth = 5;
    const RunResult r = run_scenario(s, Catalog::defaults(), opts);
    EXPECT_LE(of_kind(r, EventKind::SendIntent).size(), 6u);
    EXPECT_FALSE(of_kind(r, EventKind::Diag).empty());
}
