#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "selgames/rational.hpp"

namespace selgames {

// A point of [0,1] given by an eventually periodic binary expansion
// 0.preperiod(period)^w. Covers exactly the rationals of [0,1].
//
// Canonical form: shortest preperiod, shortest (primitive) period, and the
// all-ones tail rewritten to the all-zeros form, so every rational has one
// representation. The single exception is 1 itself, whose only expansion is
// ":1"; 0 is ":0".
class EpPoint {
 public:
  // Canonicalizes; throws std::invalid_argument on characters other than 0/1.
  static EpPoint make(std::string preperiod, std::string period);

  // Exact conversion from a rational in [0,1]; throws if out of range.
  static EpPoint from_rat(const Rat& r);

  // "pre:period" syntax, e.g. "1:0" for 1/2, ":01" for 1/3. Also accepts a
  // plain rational "p/q". Returns nullopt on malformed input.
  static std::optional<EpPoint> parse(std::string_view s);

  static EpPoint zero() { return make("", "0"); }
  static EpPoint one() { return make("", "1"); }

  const std::string& preperiod() const { return pre_; }
  const std::string& period() const { return per_; }

  Rat to_rat() const;
  bool is_dyadic() const;
  std::string str() const { return pre_ + ":" + per_; }

  // The other binary expansion of the same real, as raw (pre, period) bits.
  // Exists only for dyadic points in (0,1): "u1:0" <-> "u0:1".
  std::optional<std::pair<std::string, std::string>> dual_expansion() const;

  bool operator==(const EpPoint& o) const { return pre_ == o.pre_ && per_ == o.per_; }
  bool operator!=(const EpPoint& o) const { return !(*this == o); }
  bool operator<(const EpPoint& o) const { return to_rat() < o.to_rat(); }

 private:
  EpPoint(std::string pre, std::string per) : pre_(std::move(pre)), per_(std::move(per)) {}
  std::string pre_;
  std::string per_;  // non-empty
};

Rat dist(const EpPoint& x, const EpPoint& y);

}  // namespace selgames
