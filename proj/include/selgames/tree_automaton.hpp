#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selgames/ep_point.hpp"
#include "selgames/interval_set.hpp"
#include "selgames/rational.hpp"

namespace selgames {

// Deterministic safety automaton over {0,1}. The denoted set [[A]] is the
// set of reals in [0,1] having some binary expansion that is an infinite run
// from the start state; it is closed. A dyadic rational belongs to the set
// if either of its two expansions runs.
//
// Instances are always canonical: trimmed (every state reachable and on some
// infinite run), merged by language equivalence, states numbered by BFS from
// the start, start = 0. Operations that can empty the set return nullopt.
class TreeAutomaton {
 public:
  struct PerfectnessReport {
    bool perfect = false;
    // When not perfect: a reachable cycle lying entirely in out-degree-1
    // states, plus the point trapped by it.
    std::vector<int> witness_cycle;
    std::optional<EpPoint> witness_point;
  };

  // Canonicalizing constructor; delta[q][b] = -1 means undefined.
  static std::optional<TreeAutomaton> make(int start, std::vector<std::array<int, 2>> delta);
  static TreeAutomaton full();  // denotes [0,1]
  // Canonical word automaton for a closed dyadic interval [l, r]: accepts the
  // words between the all-zeros-tail expansion of l and the all-ones-tail
  // expansion of r.
  static TreeAutomaton interval(const Rat& l, const Rat& r);

  int num_states() const { return static_cast<int>(delta_.size()); }
  int next(int q, int bit) const { return delta_[q][bit]; }

  bool same_graph(const TreeAutomaton& o) const { return delta_ == o.delta_; }

  bool member(const EpPoint& p) const;
  // Set inclusion [[this]] subseteq [[b]], dual expansions identified.
  bool subset_of(const TreeAutomaton& b) const;
  // A concrete point of [[this]] \ [[b]] when not a subset.
  std::optional<EpPoint> subset_counterexample(const TreeAutomaton& b) const;
  bool set_equal(const TreeAutomaton& b) const { return subset_of(b) && b.subset_of(*this); }
  bool set_intersects(const TreeAutomaton& b) const;

  std::optional<TreeAutomaton> intersect_interval(const DyadicInterval& iv) const;

  // (number of admissible words of length n) / 2^n; a non-increasing upper
  // bound on the Lebesgue measure of the denoted set.
  Rat measure_upper(unsigned n) const;

  bool is_dyadic_free() const;
  bool has_nondyadic_point() const;

  EpPoint min_point() const;
  EpPoint max_point() const;
  std::pair<Rat, Rat> hull() const;

  // Largest subautomaton whose set is perfect; denotes the perfect kernel of
  // [[this]] (isolated points drop out, points kept alive by a dual branch
  // survive). nullopt when the kernel is empty.
  std::optional<TreeAutomaton> perfect_kernel() const;
  PerfectnessReport is_perfect() const;

  // Perfect subautomaton avoiding every point of pts; requires a perfect
  // input. Smallest separating cylinder depth per expansion, capped at
  // preperiod + 2*period + ceil(log2 states) + 4.
  std::optional<TreeAutomaton> avoid_points(const std::vector<EpPoint>& pts) const;

  // Perfect dyadic-free subautomaton (no eventually-constant branch), built
  // by bounding constant runs; nullopt if every attempt empties the kernel.
  std::optional<TreeAutomaton> dyadic_free_kernel() const;

  // Union of denoted sets.
  static TreeAutomaton unite(const std::vector<TreeAutomaton>& parts);

  // All runs of an automaton with finitely many branches.
  bool is_finite_set() const;
  std::vector<EpPoint> enumerate_finite() const;

  // Textual form: "start 0" then one "state bit state" line per transition.
  std::vector<std::string> to_lines() const;
  static std::optional<TreeAutomaton> from_lines(const std::vector<std::string>& lines);

 private:
  explicit TreeAutomaton(std::vector<std::array<int, 2>> delta) : delta_(std::move(delta)) {}

  bool run_simulates(const std::string& pre, const std::string& per) const;
  bool constant_run_from(int q, int bit) const;

  std::vector<std::array<int, 2>> delta_;  // start is state 0
};

}  // namespace selgames
