#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selgames/ep_point.hpp"
#include "selgames/rational.hpp"

namespace selgames {

// Closed interval [left, right] with dyadic endpoints, 0 <= left < right <= 1.
// Non-degenerate by construction, so it always has interior.
struct DyadicInterval {
  Rat left;
  Rat right;
  bool operator==(const DyadicInterval&) const = default;
};

// Finite union of non-degenerate closed dyadic intervals: the concrete
// carrier for the closed-sets-with-interior and positive-measure families.
// Components are sorted, pairwise disjoint with positive gaps, never empty.
class IntervalSet {
 public:
  static IntervalSet full();  // [0,1]

  // Normalizes (sorts, merges overlapping/touching parts). Returns nullopt
  // for an empty collection; throws on invalid endpoints.
  static std::optional<IntervalSet> make(std::vector<DyadicInterval> parts);
  static IntervalSet single(const Rat& l, const Rat& r);

  const std::vector<DyadicInterval>& components() const { return comps_; }

  bool contains_rat(const Rat& x) const;
  bool contains(const EpPoint& p) const { return contains_rat(p.to_rat()); }
  // Membership in the interior relative to [0,1] (0 and 1 count as interior
  // points of components that reach them).
  bool interior_contains_rat(const Rat& x) const;

  bool subset_of(const IntervalSet& other) const;

  Rat min() const { return comps_.front().left; }
  Rat max() const { return comps_.back().right; }
  Rat diameter() const { return max() - min(); }
  Rat lebesgue() const;

  IntervalSet union_with(const IntervalSet& other) const;
  std::optional<IntervalSet> intersect(const IntervalSet& other) const;

  // A non-degenerate dyadic interval strictly inside this set intersected
  // with the open ball (x-r, x+r); nullopt when that intersection has empty
  // interior. Always succeeds when x belongs to the set. Deterministic:
  // leftmost overlapping component, endpoints snapped inward on the coarsest
  // grid that leaves at least three quarters of the overlap.
  std::optional<IntervalSet> clip_ball(const EpPoint& x, const Rat& r) const;
  std::optional<IntervalSet> clip_ball_rat(const Rat& x, const Rat& r) const;

  // A subset whose closure avoids every point of pts, losing strictly less
  // than budget of measure (budget > 0). Each point gets an open dyadic
  // neighborhood carved out. Never empty for budget <= lebesgue().
  std::optional<IntervalSet> remove_point_nbhds(const std::vector<EpPoint>& pts,
                                                const Rat& budget) const;

  std::string str() const;  // "[l,r]u[l,r]..." with endpoints "p/q"
  static std::optional<IntervalSet> parse(std::string_view s);

  bool operator==(const IntervalSet&) const = default;

 private:
  explicit IntervalSet(std::vector<DyadicInterval> comps) : comps_(std::move(comps)) {}
  std::vector<DyadicInterval> comps_;
};

}  // namespace selgames
