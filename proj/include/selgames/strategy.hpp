#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "selgames/game.hpp"

namespace selgames {

struct StrategyBuildContext {
  FamilySpec sigma;
  TestFunction f = TestFunction::thomae();
  GameVariant variant;
  std::uint64_t seed = 0;
};

// Player II: refine into the shrinking ball around the last point, then into
// a sub-member with small value diameter (one point per round games).
Strategy make_ii_hsop(const StrategyBuildContext& ctx);

// Player II for residual families: clip to the ball, shrink the diameter,
// and carve out the current schedule prefix.
Strategy make_ii_baire(const StrategyBuildContext& ctx);

// Player I with a sound oscillation witness: keeps consecutive value gaps at
// alpha/4 or better. Throws std::invalid_argument when no witness exists for
// (sigma, f).
Strategy make_i_gap(const StrategyBuildContext& ctx, const Rat& alpha);

// Baselines: "random", "sweep", "dbar_probe"; either role.
Strategy make_adversary(const StrategyBuildContext& ctx, Player role, const std::string& kind,
                        std::uint64_t seed);

// Plays a one-point-per-round game by selecting, from the block the wrapped
// finite-block strategy would have played, the dbar-farthest point from the
// previous selection (first element on the first round; ties to the lowest
// index).
Strategy make_transfer_i(const StrategyBuildContext& ctx, Strategy inner_gfin);

// Plays a finite-block game by compressing each block to its dbar-argmax
// representative and feeding those to the wrapped one-point strategy.
Strategy make_transfer_ii(const StrategyBuildContext& ctx, Strategy inner_g1);

// Strategy spec strings: "ii-hsop" | "ii-baire" | "i-gap alpha=1/2" |
// "adversary:random[:seed]" | "adversary:sweep[:seed]" |
// "adversary:dbar_probe[:seed]" | "transfer-i [inner]" | "transfer-ii [inner]".
std::optional<Strategy> make_strategy(std::string_view spec, Player role,
                                      const StrategyBuildContext& ctx, std::string* err);

}  // namespace selgames
