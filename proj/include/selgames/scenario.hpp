#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selgames/game.hpp"
#include "selgames/strategy.hpp"

namespace selgames {

// A playable configuration in the key = value scenario format.
struct Scenario {
  std::string name;
  std::string family = "clo";
  std::string function = "thomae";
  std::string variant = "g1";
  std::string player_i = "adversary:random";
  std::string player_ii = "ii-hsop";
  unsigned horizon = 32;
  std::uint64_t seed = 1;
  std::string expect;          // "convergence" | "divergence" | "" (none)
  std::optional<Rat> alpha;    // declared divergence level; derived from i-gap when absent

  static std::optional<Scenario> parse_text(const std::string& text, std::string* err);
  static std::optional<Scenario> parse_file(const std::string& path, std::string* err);
  std::string text() const;
};

struct ResolvedScenario {
  FamilySpec sigma;
  TestFunction f = TestFunction::thomae();
  GameVariant variant;
  Strategy player_i;
  Strategy player_ii;
  unsigned horizon = 32;
  std::uint64_t seed = 1;
  std::optional<Rat> alpha;
  std::string expect;
  std::string name;
};

std::optional<ResolvedScenario> resolve_scenario(const Scenario& sc,
                                                 std::optional<std::uint64_t> seed_override,
                                                 std::string* err);

PlayResult run_scenario(const ResolvedScenario& rs);

// Built-in presets named after the headline applications.
std::vector<std::string> preset_names();
std::optional<Scenario> preset_scenario(const std::string& name);

struct AnalyzeReport {
  bool supported = false;
  std::optional<bool> cliquish;
  std::string hsop;       // "yes" | "no (witness alpha=...)" | "undecided"
  std::string predicted;  // "I" | "II" | "unknown"
  std::string text;       // printable report
};
AnalyzeReport analyze_pair(const FamilySpec& sigma, const TestFunction& f);

// One tournament row: "name,seed,certificate,rounds,max_gap,final_radius".
std::string tournament_row(const ResolvedScenario& rs, const PlayResult& result);
inline constexpr const char* kTournamentHeader = "scenario,seed,certificate,rounds,max_gap,final_radius";

}  // namespace selgames
