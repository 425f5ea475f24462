#include "selgames/ep_point.hpp"

#include <map>
#include <stdexcept>

namespace selgames {

std::optional<Rat> parse_rat(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const auto slash = s.find('/');
  const auto digits = [](std::string_view t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  try {
    if (slash == std::string_view::npos) {
      if (!digits(s)) return std::nullopt;
      return Rat(BigInt(std::string(s)));
    }
    const std::string_view n = s.substr(0, slash), d = s.substr(slash + 1);
    if (!digits(n) || !digits(d)) return std::nullopt;
    const BigInt den{std::string(d)};
    if (den == 0) return std::nullopt;
    return Rat(BigInt(std::string(n)), den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

namespace {

bool all_bits(const std::string& s) {
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

// Shortest word w with per = w^k.
std::string primitive_root(const std::string& per) {
  const std::size_t n = per.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = per[i] == per[i % d];
    if (ok) return per.substr(0, d);
  }
  return per;
}

BigInt bits_value(const std::string& s) {
  BigInt v = 0;
  for (char c : s) v = (v << 1) + (c == '1' ? 1 : 0);
  return v;
}

}  // namespace

EpPoint EpPoint::make(std::string pre, std::string per) {
  if (!all_bits(pre) || !all_bits(per)) throw std::invalid_argument("EpPoint: bits must be 0/1");
  if (per.empty()) per = "0";
  per = primitive_root(per);

  if (per == "1") {
    // All-ones tail: 0.u(1)^w == 0.(u+1)(0)^w, except for the point 1.
    bool overflow = true;
    for (std::size_t i = pre.size(); i-- > 0;) {
      if (pre[i] == '0') {
        pre[i] = '1';
        overflow = false;
        break;
      }
      pre[i] = '0';
    }
    if (overflow) return EpPoint("", "1");
    per = "0";
  }

  // Absorb: 0.(u b)(v)^w == 0.u(b v')^w when b equals the last period bit.
  while (!pre.empty() && pre.back() == per.back()) {
    pre.pop_back();
    per = std::string(1, per.back()) + per.substr(0, per.size() - 1);
  }
  return EpPoint(std::move(pre), std::move(per));
}

Rat EpPoint::to_rat() const {
  const unsigned p = static_cast<unsigned>(per_.size());
  const BigInt cycle = int_pow2(p) - 1;  // per_ != "" always
  const BigInt num = bits_value(pre_) * cycle + bits_value(per_);
  const BigInt den = int_pow2(static_cast<unsigned>(pre_.size())) * cycle;
  return Rat(num, den);
}

EpPoint EpPoint::from_rat(const Rat& r) {
  if (r < 0 || r > 1) throw std::invalid_argument("EpPoint::from_rat: value outside [0,1]");
  if (r == 1) return EpPoint("", "1");
  // Long division, tracking remainders to find where the expansion cycles.
  const BigInt den = rat_den(r);
  BigInt rem = rat_num(r);
  std::string bits;
  std::map<BigInt, std::size_t> seen;  // remainder -> bit position
  std::size_t cycle_start = 0;
  for (;;) {
    auto it = seen.find(rem);
    if (it != seen.end()) {
      cycle_start = it->second;
      break;
    }
    seen.emplace(rem, bits.size());
    rem <<= 1;
    if (rem >= den) {
      bits += '1';
      rem -= den;
    } else {
      bits += '0';
    }
  }
  return make(bits.substr(0, cycle_start), bits.substr(cycle_start));
}

std::optional<EpPoint> EpPoint::parse(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    const auto r = parse_rat(s);
    if (!r || *r < 0 || *r > 1) return std::nullopt;
    return from_rat(*r);
  }
  const std::string pre(s.substr(0, colon)), per(s.substr(colon + 1));
  if (!all_bits(pre) || !all_bits(per)) return std::nullopt;
  return make(pre, per);
}

bool EpPoint::is_dyadic() const { return rat_is_dyadic(to_rat()); }

std::optional<std::pair<std::string, std::string>> EpPoint::dual_expansion() const {
  if (per_ != "0" || pre_.empty()) return std::nullopt;  // 0, 1 and non-dyadics
  // Canonical dyadic preperiod ends in 1; flip it and append the ones tail.
  std::string head = pre_;
  head.back() = '0';
  return std::make_pair(head, std::string("1"));
}

Rat dist(const EpPoint& x, const EpPoint& y) { return rat_abs(x.to_rat() - y.to_rat()); }

}  // namespace selgames
