#pragma once

#include <cstdint>
#include <vector>

#include "bsmg/game.hpp"

namespace bsmg {

// Deterministic random instance: full-support transitions, type weights
// bounded away from zero, utilities uniform in [reward_lo, reward_hi].
// Action sets are shared across states. When n_terminal > 0 the last states
// become terminal self-loops and are removed from the start set.
// n_att_actions holds one count per type (or a single count for all types).
GameSpec generate_random_bsmg(int n_states, int n_types, int n_def_actions,
                              const std::vector<int>& n_att_actions,
                              double reward_lo, double reward_hi,
                              std::uint64_t seed, int n_terminal = 0);

}  // namespace bsmg
