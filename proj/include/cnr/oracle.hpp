#pragma once

#include "cnr/arena.hpp"
#include "cnr/game.hpp"
#include "cnr/solver.hpp"

namespace cnr {

/// Independent test oracle. Explores the state space itself through
/// legal_joint_moves/apply_joint_move and decides the game by naive
/// retrograde labelling (reachability/safety) or a naive nested fixpoint over
/// (state, round-robin counter) pairs (safe-zone liveness). Infinite plays
/// without capture go to the robbers. Throws CapExceeded past `bound` states.
Verdict brute_force_oracle(const Arena& arena, const GameConfig& cfg, const GameState& init,
                           std::size_t bound = 100'000);

}  // namespace cnr
