#include "selgames/interval_set.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace selgames {

namespace {
constexpr const char* kCup = "\xe2\x88\xaa";  // the union sign used in encodings

void check_endpoint(const Rat& v) {
  if (v < 0 || v > 1) throw std::invalid_argument("interval endpoint outside [0,1]");
  if (!rat_is_dyadic(v)) throw std::invalid_argument("interval endpoint is not dyadic");
}
}  // namespace

IntervalSet IntervalSet::full() { return single(Rat(0), Rat(1)); }

IntervalSet IntervalSet::single(const Rat& l, const Rat& r) {
  auto s = make({DyadicInterval{l, r}});
  if (!s) throw std::invalid_argument("degenerate interval");
  return *s;
}

std::optional<IntervalSet> IntervalSet::make(std::vector<DyadicInterval> parts) {
  std::vector<DyadicInterval> kept;
  for (auto& p : parts) {
    check_endpoint(p.left);
    check_endpoint(p.right);
    if (p.left >= p.right) throw std::invalid_argument("interval with empty interior");
    kept.push_back(p);
  }
  if (kept.empty()) return std::nullopt;
  std::sort(kept.begin(), kept.end(),
            [](const DyadicInterval& a, const DyadicInterval& b) { return a.left < b.left; });
  std::vector<DyadicInterval> merged;
  for (const auto& p : kept) {
    if (!merged.empty() && p.left <= merged.back().right) {
      if (p.right > merged.back().right) merged.back().right = p.right;
    } else {
      merged.push_back(p);
    }
  }
  return IntervalSet(std::move(merged));
}

bool IntervalSet::contains_rat(const Rat& x) const {
  for (const auto& c : comps_) {
    if (x < c.left) return false;
    if (x <= c.right) return true;
  }
  return false;
}

bool IntervalSet::interior_contains_rat(const Rat& x) const {
  for (const auto& c : comps_) {
    if (x < c.left) return false;
    if (x <= c.right) {
      const bool left_ok = x > c.left || c.left == 0;
      const bool right_ok = x < c.right || c.right == 1;
      return left_ok && right_ok;
    }
  }
  return false;
}

bool IntervalSet::subset_of(const IntervalSet& other) const {
  for (const auto& c : comps_) {
    bool covered = false;
    for (const auto& o : other.comps_) {
      if (o.left <= c.left && c.right <= o.right) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

Rat IntervalSet::lebesgue() const {
  Rat total = 0;
  for (const auto& c : comps_) total += c.right - c.left;
  return total;
}

IntervalSet IntervalSet::union_with(const IntervalSet& other) const {
  std::vector<DyadicInterval> parts = comps_;
  parts.insert(parts.end(), other.comps_.begin(), other.comps_.end());
  return *make(std::move(parts));
}

std::optional<IntervalSet> IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<DyadicInterval> parts;
  for (const auto& a : comps_)
    for (const auto& b : other.comps_) {
      const Rat l = std::max(a.left, b.left), r = std::min(a.right, b.right);
      if (l < r) parts.push_back({l, r});
    }
  if (parts.empty()) return std::nullopt;
  return make(std::move(parts));
}

std::optional<IntervalSet> IntervalSet::clip_ball(const EpPoint& x, const Rat& r) const {
  return clip_ball_rat(x.to_rat(), r);
}

std::optional<IntervalSet> IntervalSet::clip_ball_rat(const Rat& x, const Rat& r) const {
  if (r <= 0) throw std::invalid_argument("clip_ball: radius must be positive");
  for (const auto& c : comps_) {
    const Rat lo = std::max(c.left, x - r), hi = std::min(c.right, x + r);
    if (lo >= hi) continue;
    // Coarsest grid with at most an eighth of the overlap per step; the
    // snapped endpoints land strictly inside (lo, hi).
    const Rat w = hi - lo;
    unsigned d = 0;
    while (rat_pow2_inv(d) > w / 8) ++d;
    const BigInt a = floor_scaled(lo, d) + 1;
    const BigInt b = ceil_scaled(hi, d) - 1;
    assert(a < b);
    return single(Rat(a, int_pow2(d)), Rat(b, int_pow2(d)));
  }
  return std::nullopt;
}

std::optional<IntervalSet> IntervalSet::remove_point_nbhds(const std::vector<EpPoint>& pts,
                                                           const Rat& budget) const {
  if (budget <= 0) throw std::invalid_argument("remove_point_nbhds: budget must be positive");
  std::set<Rat> values;
  for (const auto& p : pts) values.insert(p.to_rat());
  if (values.empty()) return *this;

  const Rat cap = std::min(budget, lebesgue()) / 2;
  const Rat allowance = cap / static_cast<int>(values.size());
  unsigned d = 0;
  while (Rat(3) * rat_pow2_inv(d) > allowance) ++d;

  std::vector<DyadicInterval> parts = comps_;
  for (const Rat& v : values) {
    // Open dyadic window ((k-1)/2^d, (k+2)/2^d) around v's grid cell.
    const BigInt k = floor_scaled(v, d);
    const Rat lo(k - 1, int_pow2(d));
    const Rat hi(k + 2, int_pow2(d));
    std::vector<DyadicInterval> next;
    for (const auto& c : parts) {
      if (hi <= c.left || c.right <= lo) {
        next.push_back(c);
        continue;
      }
      if (c.left < lo) next.push_back({c.left, lo});
      if (hi < c.right) next.push_back({hi, c.right});
    }
    parts = std::move(next);
  }
  if (parts.empty()) {
    assert(budget > lebesgue());  // cannot happen when the budget is within measure
    return std::nullopt;
  }
  return make(std::move(parts));
}

std::string IntervalSet::str() const {
  std::string out;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (i) out += kCup;
    out += "[" + format_rat(comps_[i].left) + "," + format_rat(comps_[i].right) + "]";
  }
  return out;
}

std::optional<IntervalSet> IntervalSet::parse(std::string_view s) {
  std::vector<DyadicInterval> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '[') return std::nullopt;
    const auto comma = s.find(',', i);
    const auto close = s.find(']', i);
    if (comma == std::string_view::npos || close == std::string_view::npos || comma > close)
      return std::nullopt;
    const auto l = parse_rat(s.substr(i + 1, comma - i - 1));
    const auto r = parse_rat(s.substr(comma + 1, close - comma - 1));
    if (!l || !r) return std::nullopt;
    try {
      parts.push_back({*l, *r});
      check_endpoint(*l);
      check_endpoint(*r);
      if (*l >= *r) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    i = close + 1;
    if (i < s.size()) {
      if (s.compare(i, 3, kCup) == 0)
        i += 3;
      else if (s[i] == 'u' || s[i] == 'U')
        i += 1;
      else
        return std::nullopt;
    }
  }
  if (parts.empty()) return std::nullopt;
  try {
    return make(std::move(parts));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace selgames
