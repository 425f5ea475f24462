#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "selgames/interval_set.hpp"
#include "selgames/test_function.hpp"
#include "selgames/tree_automaton.hpp"

namespace selgames {

// The four set families the games run over:
//  clo      - finite unions of closed dyadic intervals (closed sets with interior)
//  measure  - same carrier, tracked as positive-measure perfect sets
//  tree     - perfect tree automata
//  residual - interval carrier minus a scheduled meager exception set
enum class FamilyKind { Clo, Measure, Tree, Residual };

struct FamilySpec {
  FamilyKind kind = FamilyKind::Clo;
  std::string schedule;  // residual families only

  static std::optional<FamilySpec> parse(std::string_view s);
  std::string str() const;
  bool operator==(const FamilySpec&) const = default;
};

// A residual-family member denotes interior(carrier) minus the union of the
// scheduled finite exception sets. Legality checks only ever consult the
// finite schedule prefix of the current round.
struct ResidualMember {
  IntervalSet carrier;
  std::string schedule;
};

using Member = std::variant<IntervalSet, TreeAutomaton, ResidualMember>;

// The n-th finite exception set F_n of a named schedule; empty for n = 0,
// increasing in n. "dyadics": both endpoints of [0,1] plus the first n
// canonical dyadics.
std::vector<EpPoint> schedule_points(const std::string& name, unsigned n);

Member full_member(const FamilySpec& spec);
bool member_valid(const FamilySpec& spec, const Member& m);
// Point membership; response_index selects the schedule prefix for residual
// members (points landing in P_n are checked against F_n).
bool member_contains(const FamilySpec& spec, const Member& m, const EpPoint& x,
                     unsigned response_index);
bool member_subset(const FamilySpec& spec, const Member& a, const Member& b);

// Diameter of f over the denoted set (exact for the decided catalog).
Rat member_value_diam(const FamilySpec& spec, const TestFunction& f, const Member& m);
std::pair<Rat, Rat> member_hull(const Member& m);
Rat member_diameter(const Member& m);

std::string member_str(const Member& m);

// A legal member inside P intersected with the open ball around x; nullopt
// when x lies outside P.
std::optional<Member> refine_dense(const FamilySpec& spec, const Member& P, const EpPoint& x,
                                   const Rat& r);

struct HsopWitness {
  Member P;
  Rat alpha;
};

struct HsopOutcome {
  std::optional<Member> refined;          // Q with value_diam(f, Q) < alpha
  std::optional<HsopWitness> witness;     // exact witness (decided cases only)
  bool depth_cap_reached = false;         // inconclusive search
};

// Either a sub-member on which f has value diameter below alpha, or a sound
// witness that no such refinement exists below P. Searches breadth-first
// over dyadic cells of increasing depth; witnesses are only issued for the
// symbolically decided cases, never from exhausting the cap.
HsopOutcome hsop_refine(const FamilySpec& spec, const TestFunction& f, const Member& P,
                        const Rat& alpha, unsigned depth_cap = 14);

// true / false for the decided catalog, nullopt for indicator functions.
std::optional<bool> cliquish_decide(const TestFunction& f);

struct FusionResult {
  TreeAutomaton fused;
  std::vector<TreeAutomaton> pieces;  // final generation, pairwise disjoint
};

// Generation-n fusion approximation: 2^n pairwise disjoint perfect pieces,
// each with interval hull diameter and value diameter below 1/n, unioned.
FusionResult fuse_perfect(const TestFunction& f, const TreeAutomaton& P, unsigned generations,
                          unsigned depth_cap = 20);

// Chain S_1 >= ... >= S_n with measure loss below lebesgue(P)/2^(k+1) at
// step k and every component of S_k carrying value diameter below 1/k.
std::vector<IntervalSet> measure_exhaust(const TestFunction& f, const IntervalSet& P, unsigned n);

}  // namespace selgames
