#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selgames/ep_point.hpp"
#include "selgames/interval_set.hpp"
#include "selgames/rational.hpp"
#include "selgames/tree_automaton.hpp"

namespace selgames {

struct StepPiece {
  DyadicInterval interval;
  Rat value;
};

// Catalog of test functions [0,1] -> Q with exact evaluation.
class TestFunction {
 public:
  enum class Kind { Constant, Step, ThomaeLike, DirichletLike, IndicatorOfTree };

  static TestFunction constant(const Rat& c);
  // pieces must partition [0,1]; a shared endpoint belongs to the left piece.
  static TestFunction step(std::vector<StepPiece> pieces);
  static TestFunction thomae();
  static TestFunction dirichlet(const Rat& a, const Rat& b);  // a != b
  static TestFunction indicator(TreeAutomaton t);

  // "constant c" | "thomae" | "dirichlet a b" | "step [(l,r,v),...]" |
  // "indicator <name>" resolved through load_tree.
  static std::optional<TestFunction> parse(
      std::string_view s,
      const std::function<std::optional<TreeAutomaton>(const std::string&)>& load_tree = {});

  Kind kind() const { return kind_; }
  Rat eval(const EpPoint& p) const;
  std::string spec_string() const;

  const Rat& dirichlet_on() const { return a_; }
  const Rat& dirichlet_off() const { return b_; }
  const std::vector<StepPiece>& pieces() const { return pieces_; }
  const TreeAutomaton& tree() const;

 private:
  TestFunction() = default;
  Kind kind_ = Kind::Constant;
  Rat a_ = 0, b_ = 0;  // constant value / dirichlet pair
  std::vector<StepPiece> pieces_;
  std::optional<TreeAutomaton> tree_;
};

// Canonical enumeration of the dyadic rationals of (0,1):
// n = 2^(d-1) + j  ->  (2j+1)/2^d.
EpPoint enum_dyadic(const BigInt& n);
// Inverse on interior dyadics; nullopt for 0, 1 and non-dyadics.
std::optional<BigInt> dyadic_index(const EpPoint& p);

struct OscBound {
  Rat lower;
  std::optional<Rat> upper;  // nullopt = unbounded/unknown
  bool exact() const { return upper && *upper == lower; }
};

// Oscillation of f restricted to A at x (x must lie in A). Exact for
// Constant, Step, ThomaeLike and DirichletLike; probe bounds for indicators.
OscBound osc_at(const TestFunction& f, const IntervalSet& A, const EpPoint& x,
                unsigned probe_depth = 12);

// Independent brute-force bracketing used by the tests: the lower bound is
// the value spread over the eventually periodic points of A inside the ball
// of radius 2^-depth around x (preperiod <= depth, period length <= 3); the
// upper bound is the symbolic value diameter over the clipped set.
OscBound osc_brute(const TestFunction& f, const IntervalSet& A, const EpPoint& x, unsigned depth);

// Exact diameter of f over the closed set A.
Rat value_diam(const TestFunction& f, const IntervalSet& A);

// Exact diameter of f over a denoted tree set (catalog functions only).
Rat value_diam_tree(const TestFunction& f, const TreeAutomaton& a);

// max{ f(q) : q dyadic in A (clipped to [lo,hi] if given) } for ThomaeLike.
Rat thomae_max(const IntervalSet& A, const std::optional<std::pair<Rat, Rat>>& clip = std::nullopt);

// d(x,y) + |f(x) - f(y)|: the displacement metric used by strategy transfer.
Rat dbar(const EpPoint& x, const EpPoint& y, const TestFunction& f);

}  // namespace selgames
