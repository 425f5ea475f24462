#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selgames/family.hpp"
#include "selgames/test_function.hpp"

namespace selgames {

enum class Player { I, II };

inline const char* player_name(Player p) { return p == Player::I ? "I" : "II"; }

// G1: one point per round. Gfin: any non-empty block. Gm: blocks of size m.
// Glambda: cumulative point counts follow a named schedule (block n has
// lambda(n) - lambda(n-1) points).
struct GameVariant {
  enum class Kind { G1, Gfin, Gm, Glambda };
  Kind kind = Kind::G1;
  unsigned m = 1;             // Gm
  std::string lambda_name;    // "square": lambda(n) = n^2

  static std::optional<GameVariant> parse(std::string_view s);
  std::string str() const;
  // Required size of the n-th block (1-based); nullopt means any size >= 1.
  std::optional<unsigned> block_size(unsigned n) const;
  bool operator==(const GameVariant&) const = default;
};

struct Move {
  enum class Kind { InitialSet, Response, Points };
  Kind kind = Kind::InitialSet;
  std::optional<Member> member;   // InitialSet / Response
  std::vector<EpPoint> points;    // Points
};

struct Violation {
  std::string rule;
  std::size_t move_index = 0;
};

// Referee-checked facts for one response. For residual members the schedule
// avoidance and the diameter shrink are extra obligations; elsewhere they
// hold vacuously.
struct RoundFacts {
  unsigned round = 0;
  bool nested = false;
  bool in_ball = false;
  bool value_bound = false;
  bool small_diam = false;
  bool schedule_avoided = false;
  bool all() const { return nested && in_ball && value_bound && small_diam && schedule_avoided; }
  bool operator==(const RoundFacts&) const = default;
};

struct Certificate {
  enum class Kind { Convergence, Divergence, Undecided, Forfeit };
  Kind kind = Kind::Undecided;
  std::vector<RoundFacts> facts;       // convergence
  std::optional<Rat> alpha;            // divergence
  std::vector<Rat> gaps;               // divergence: consecutive |f(x_k)-f(x_{k-1})|
  std::optional<Rat> tail_max_gap;     // undecided statistics
  std::optional<Rat> tail_min_gap;
  std::optional<Rat> final_radius;
  std::optional<Player> forfeited_by;  // forfeit
  std::optional<std::size_t> violation_index;
  std::string violation_rule;

  std::string kind_str() const;
  bool operator==(const Certificate&) const = default;
};

struct Transcript {
  FamilySpec sigma;
  TestFunction f = TestFunction::thomae();
  GameVariant variant;
  std::uint64_t seed = 0;
  unsigned horizon = 0;
  std::string player_i;
  std::string player_ii;
  std::optional<Rat> declared_alpha;
  std::vector<Move> moves;

  std::size_t num_responses() const;
  std::size_t num_blocks() const;
  const Member* initial() const;
  const Member* response(std::size_t k) const;
  std::vector<std::vector<EpPoint>> blocks() const;
  std::vector<EpPoint> flat_points() const;
  // Per-block representatives: the first point of the first block, then the
  // dbar-argmax of each block against the previous representative.
  std::vector<EpPoint> representatives() const;
};

// Validates the next move against a legal prefix. Rule names are stable:
// "alternation", "non-empty-block", "block-size", "x-not-in-P",
// "P-not-in-Sigma", "P-not-subset".
std::optional<Violation> check_legal(const Transcript& prefix, const Move& mv);

// Recomputes the certificate from the recorded moves alone.
Certificate certify(const Transcript& t);

struct VerifyResult {
  std::optional<Violation> violation;
  Certificate certificate;
};
VerifyResult verify_transcript(const Transcript& t);

// Derived soundness checks used by the tests (one-point-per-round games):
// d(x_N, x_k) < 2^(1-N) for N < k, and |f(x_i)-f(x_j)| <= 2/k for i,j > k
// over points belonging to the denoted sets.
bool check_cauchy_pairs(const Transcript& t);
bool check_value_pairs(const Transcript& t);

// A strategy is a pure function of the transcript prefix (plus its build
// seed); throwing from next() forfeits the game.
struct Strategy {
  std::string spec;
  Player role = Player::I;
  std::function<Move(const Transcript&)> next;
};

struct PlayResult {
  Transcript transcript;
  Certificate certificate;
};

PlayResult play(const FamilySpec& sigma, const TestFunction& f, const GameVariant& variant,
                const Strategy& player_i, const Strategy& player_ii, unsigned horizon,
                std::uint64_t seed, std::optional<Rat> declared_alpha = std::nullopt);

inline constexpr int kTranscriptSchemaVersion = 1;

std::vector<std::string> transcript_to_jsonl(const Transcript& t, const Certificate& cert);

struct LoadedTranscript {
  Transcript transcript;
  Certificate stored_certificate;
  int schema_version = kTranscriptSchemaVersion;
};
// Returns nullopt and fills err on malformed input. A wrong schema version
// loads with its version recorded so callers can reject it.
std::optional<LoadedTranscript> transcript_from_jsonl(const std::vector<std::string>& lines,
                                                      std::string* err);

}  // namespace selgames
