#pragma once

#include "iccwatch/log_event.hpp"
#include "iccwatch/scenario.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace iccwatch::testing {

struct WorldLimits {
    int max_apps = 4;
    int max_components = 3;
    int max_sends_per_script = 2;
};

/// Small random world with behaviour scripts and launches. No Shareference
/// or Application-object steps.
Scenario random_world(std::uint64_t seed, const WorldLimits& limits = {});

/// Stream of well-formed events with every field drawn at random, including
/// separator and control characters.
std::vector<LogEvent> random_events(std::mt19937_64& rng, std::size_t count);

/// `senders` apps each launched repeatedly so the log holds `models` intents.
Scenario synthetic_load(std::size_t models, std::size_t senders = 10);

}  // namespace iccwatch::testing
