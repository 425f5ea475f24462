#include "selgames/test_function.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

namespace selgames {

TestFunction TestFunction::constant(const Rat& c) {
  TestFunction f;
  f.kind_ = Kind::Constant;
  f.a_ = c;
  return f;
}

TestFunction TestFunction::step(std::vector<StepPiece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("step: no pieces");
  std::sort(pieces.begin(), pieces.end(),
            [](const StepPiece& a, const StepPiece& b) { return a.interval.left < b.interval.left; });
  if (pieces.front().interval.left != 0 || pieces.back().interval.right != 1)
    throw std::invalid_argument("step: pieces must cover [0,1]");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& iv = pieces[i].interval;
    if (!(iv.left < iv.right) || !rat_is_dyadic(iv.left) || !rat_is_dyadic(iv.right))
      throw std::invalid_argument("step: bad piece interval");
    if (i + 1 < pieces.size() && iv.right != pieces[i + 1].interval.left)
      throw std::invalid_argument("step: pieces must tile [0,1]");
  }
  TestFunction f;
  f.kind_ = Kind::Step;
  f.pieces_ = std::move(pieces);
  return f;
}

TestFunction TestFunction::thomae() {
  TestFunction f;
  f.kind_ = Kind::ThomaeLike;
  return f;
}

TestFunction TestFunction::dirichlet(const Rat& a, const Rat& b) {
  if (a == b) throw std::invalid_argument("dirichlet: values must differ");
  TestFunction f;
  f.kind_ = Kind::DirichletLike;
  f.a_ = a;
  f.b_ = b;
  return f;
}

TestFunction TestFunction::indicator(TreeAutomaton t) {
  TestFunction f;
  f.kind_ = Kind::IndicatorOfTree;
  f.tree_ = std::move(t);
  return f;
}

const TreeAutomaton& TestFunction::tree() const {
  if (!tree_) throw std::logic_error("not an indicator function");
  return *tree_;
}

EpPoint enum_dyadic(const BigInt& n) {
  if (n < 1) throw std::invalid_argument("enum_dyadic: index must be positive");
  const unsigned d = boost::multiprecision::msb(n) + 1;  // 2^(d-1) <= n < 2^d
  const BigInt j = n - int_pow2(d - 1);
  return EpPoint::from_rat(Rat(2 * j + 1, int_pow2(d)));
}

std::optional<BigInt> dyadic_index(const EpPoint& p) {
  const Rat r = p.to_rat();
  if (r == 0 || r == 1 || !rat_is_dyadic(r)) return std::nullopt;
  const unsigned d = dyadic_depth(r);
  return int_pow2(d - 1) + (rat_num(r) - 1) / 2;
}

Rat TestFunction::eval(const EpPoint& p) const {
  switch (kind_) {
    case Kind::Constant:
      return a_;
    case Kind::Step: {
      const Rat r = p.to_rat();
      for (const auto& piece : pieces_)
        if (r <= piece.interval.right) return piece.value;
      return pieces_.back().value;
    }
    case Kind::ThomaeLike: {
      const auto n = dyadic_index(p);
      return n ? Rat(BigInt(1), *n) : Rat(0);
    }
    case Kind::DirichletLike:
      return p.is_dyadic() ? a_ : b_;
    case Kind::IndicatorOfTree:
      return tree_->member(p) ? Rat(1) : Rat(0);
  }
  return Rat(0);
}

std::string TestFunction::spec_string() const {
  switch (kind_) {
    case Kind::Constant:
      return "constant " + format_rat(a_);
    case Kind::Step: {
      std::string s = "step [";
      for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (i) s += ",";
        s += "(" + format_rat(pieces_[i].interval.left) + "," + format_rat(pieces_[i].interval.right) +
             "," + format_rat(pieces_[i].value) + ")";
      }
      return s + "]";
    }
    case Kind::ThomaeLike:
      return "thomae";
    case Kind::DirichletLike:
      return "dirichlet " + format_rat(a_) + " " + format_rat(b_);
    case Kind::IndicatorOfTree:
      return "indicator";
  }
  return "";
}

std::optional<TestFunction> TestFunction::parse(
    std::string_view s,
    const std::function<std::optional<TreeAutomaton>(const std::string&)>& load_tree) {
  std::istringstream in{std::string(s)};
  std::string head;
  if (!(in >> head)) return std::nullopt;
  try {
    if (head == "thomae") return thomae();
    if (head == "constant") {
      std::string v;
      if (!(in >> v)) return std::nullopt;
      const auto c = parse_rat(v);
      if (!c) return std::nullopt;
      return constant(*c);
    }
    if (head == "dirichlet") {
      std::string va, vb;
      if (!(in >> va >> vb)) return std::nullopt;
      const auto a = parse_rat(va), b = parse_rat(vb);
      if (!a || !b || *a == *b) return std::nullopt;
      return dirichlet(*a, *b);
    }
    if (head == "step") {
      std::string rest;
      std::getline(in, rest);
      std::vector<StepPiece> pieces;
      std::size_t i = 0;
      auto skip = [&](char c) {
        while (i < rest.size() && (rest[i] == ' ' || rest[i] == c)) ++i;
      };
      skip('[');
      while (i < rest.size() && rest[i] == '(') {
        const auto close = rest.find(')', i);
        if (close == std::string::npos) return std::nullopt;
        std::string body = rest.substr(i + 1, close - i - 1);
        std::replace(body.begin(), body.end(), ',', ' ');
        std::istringstream pin(body);
        std::string l, r, v;
        if (!(pin >> l >> r >> v)) return std::nullopt;
        const auto lr = parse_rat(l), rr = parse_rat(r), vr = parse_rat(v);
        if (!lr || !rr || !vr) return std::nullopt;
        pieces.push_back({{*lr, *rr}, *vr});
        i = close + 1;
        skip(',');
      }
      if (pieces.empty()) return std::nullopt;
      return step(std::move(pieces));
    }
    if (head == "indicator") {
      std::string name;
      if (!(in >> name) || !load_tree) return std::nullopt;
      auto t = load_tree(name);
      if (!t) return std::nullopt;
      return indicator(std::move(*t));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

Rat thomae_max(const IntervalSet& A, const std::optional<std::pair<Rat, Rat>>& clip) {
  Rat best = 0;
  unsigned max_endpoint_depth = 0;
  for (const auto& c : A.components())
    max_endpoint_depth =
        std::max({max_endpoint_depth, dyadic_depth(c.left), dyadic_depth(c.right)});
  const unsigned cap = max_endpoint_depth + 200;
  for (unsigned d = 1; d <= cap; ++d) {
    if (best > 0 && Rat(2, int_pow2(d)) <= best) break;
    for (const auto& c : A.components()) {
      Rat lo = c.left, hi = c.right;
      if (clip) {
        lo = std::max(lo, clip->first);
        hi = std::min(hi, clip->second);
      }
      if (lo > hi) continue;
      BigInt k = ceil_scaled(lo, d);
      if ((k & 1) == 0) ++k;
      if (Rat(k, int_pow2(d)) > hi) continue;
      const BigInt index = int_pow2(d - 1) + (k - 1) / 2;
      best = std::max(best, Rat(BigInt(1), index));
    }
  }
  return best;
}

namespace {

// Values of step pieces attained somewhere on A (left piece owns shared
// endpoints), optionally clipped to [lo,hi].
std::vector<Rat> step_values_on(const TestFunction& f, const IntervalSet& A,
                                const std::optional<std::pair<Rat, Rat>>& clip) {
  std::vector<Rat> out;
  const auto& pieces = f.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Rat l = pieces[i].interval.left, r = pieces[i].interval.right;
    bool attained = false;
    for (const auto& c : A.components()) {
      Rat a = c.left, b = c.right;
      if (clip) {
        a = std::max(a, clip->first);
        b = std::min(b, clip->second);
      }
      if (a > b) continue;
      const Rat top = std::min(b, r);
      if (i == 0) {
        if (std::max(a, l) <= top) attained = true;   // closed ownership [l, r]
      } else {
        if (top > l && a <= top) attained = true;     // ownership (l, r]
      }
      if (attained) break;
    }
    if (attained) out.push_back(pieces[i].value);
  }
  return out;
}

Rat spread(const std::vector<Rat>& vals) {
  if (vals.empty()) return Rat(0);
  return *std::max_element(vals.begin(), vals.end()) -
         *std::min_element(vals.begin(), vals.end());
}

}  // namespace

Rat value_diam(const TestFunction& f, const IntervalSet& A) {
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
      return Rat(0);
    case TestFunction::Kind::DirichletLike:
      // Both dyadics and non-dyadics are dense in every component.
      return rat_abs(f.dirichlet_on() - f.dirichlet_off());
    case TestFunction::Kind::ThomaeLike:
      // Values approach 0 inside every component, so the diameter is the max.
      return thomae_max(A);
    case TestFunction::Kind::Step:
      return spread(step_values_on(f, A, std::nullopt));
    case TestFunction::Kind::IndicatorOfTree: {
      const auto& t = f.tree();
      bool ones = false, zeros = false;
      for (const auto& c : A.components()) {
        if (!ones && t.intersect_interval({c.left, c.right})) ones = true;
        if (!zeros && !TreeAutomaton::interval(c.left, c.right).subset_of(t)) zeros = true;
      }
      return ones && zeros ? Rat(1) : Rat(0);
    }
  }
  return Rat(0);
}

Rat value_diam_tree(const TestFunction& f, const TreeAutomaton& a) {
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
      return Rat(0);
    case TestFunction::Kind::DirichletLike: {
      const bool dy = !a.is_dyadic_free();
      const bool nondy = a.has_nondyadic_point();
      return dy && nondy ? rat_abs(f.dirichlet_on() - f.dirichlet_off()) : Rat(0);
    }
    case TestFunction::Kind::ThomaeLike: {
      if (a.is_dyadic_free()) return Rat(0);
      // Max over the dyadic points, found by deepening prefix enumeration:
      // anything at depth >= d is worth at most 2^(1-d).
      Rat best = 0;
      const unsigned cap = static_cast<unsigned>(a.num_states()) + 80;
      for (unsigned d = 0; d <= cap; ++d) {
        if (best > 0 && Rat(2, int_pow2(d)) <= best) break;
        std::vector<std::pair<int, std::string>> layer{{0, ""}};
        for (unsigned step = 0; step < d; ++step) {
          std::vector<std::pair<int, std::string>> next;
          for (const auto& [q, bits] : layer)
            for (int b = 0; b < 2; ++b)
              if (a.next(q, b) >= 0) next.emplace_back(a.next(q, b), bits + (b ? '1' : '0'));
          layer = std::move(next);
        }
        for (const auto& [q, bits] : layer) {
          // An all-zeros or all-ones continuation yields a dyadic member.
          for (int tail = 0; tail < 2; ++tail) {
            int s = q;
            std::set<int> seen;
            while (s >= 0 && seen.insert(s).second) s = a.next(s, tail);
            if (s < 0) continue;
            const auto n = dyadic_index(EpPoint::make(bits, tail ? "1" : "0"));
            if (n) best = std::max(best, Rat(BigInt(1), *n));
          }
        }
      }
      // The infimum: 0 unless the set is a finite set of interior dyadics.
      Rat low = 0;
      if (!a.has_nondyadic_point() && !a.member(EpPoint::zero()) && !a.member(EpPoint::one()) &&
          a.is_finite_set()) {
        const auto pts = a.enumerate_finite();
        low = f.eval(pts.front());
        for (const auto& p : pts) low = std::min(low, f.eval(p));
      }
      return best - low;
    }
    case TestFunction::Kind::Step: {
      std::vector<Rat> vals;
      const auto& pieces = f.pieces();
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Rat l = pieces[i].interval.left, r = pieces[i].interval.right;
        auto inter = a.intersect_interval({l, r});
        if (!inter) continue;
        if (i > 0) {
          const auto h = inter->hull();
          if (h.first == l && h.second == l) continue;  // only the left endpoint
        }
        vals.push_back(pieces[i].value);
      }
      return spread(vals);
    }
    case TestFunction::Kind::IndicatorOfTree:
      throw std::invalid_argument("value_diam_tree: indicator functions are not certified");
  }
  return Rat(0);
}

namespace {

std::optional<Rat> symbolic_clip_diam(const TestFunction& f, const IntervalSet& A, const Rat& lo,
                                      const Rat& hi) {
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
      return Rat(0);
    case TestFunction::Kind::DirichletLike:
      return rat_abs(f.dirichlet_on() - f.dirichlet_off());
    case TestFunction::Kind::ThomaeLike:
      return thomae_max(A, std::make_pair(lo, hi));
    case TestFunction::Kind::Step:
      return spread(step_values_on(f, A, std::make_pair(lo, hi)));
    case TestFunction::Kind::IndicatorOfTree:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

OscBound osc_brute(const TestFunction& f, const IntervalSet& A, const EpPoint& x, unsigned depth) {
  if (!A.contains(x)) throw std::invalid_argument("osc_brute: x not in A");
  const Rat xr = x.to_rat();
  const Rat r = rat_pow2_inv(depth);

  static const std::vector<std::string> kPeriods = {"0",   "1",   "01",  "10",  "001", "010", "011",
                                                    "100", "101", "110", "111", "000"};
  std::optional<Rat> vmin, vmax;
  const BigInt k_lo = floor_scaled(xr - r, depth);
  const BigInt k_hi = floor_scaled(xr + r, depth);
  for (BigInt k = k_lo; k <= k_hi; ++k) {
    if (k < 0 || k >= int_pow2(depth)) continue;
    std::string prefix;
    for (unsigned i = depth; i-- > 0;) prefix += ((k >> i) & 1) != 0 ? '1' : '0';
    for (const auto& per : kPeriods) {
      const EpPoint p = EpPoint::make(prefix, per);
      if (dist(p, x) >= r || !A.contains(p)) continue;
      const Rat v = f.eval(p);
      vmin = vmin ? std::min(*vmin, v) : v;
      vmax = vmax ? std::max(*vmax, v) : v;
    }
  }
  OscBound out;
  out.lower = (vmin && vmax) ? Rat(*vmax - *vmin) : Rat(0);
  out.upper = symbolic_clip_diam(f, A, xr - r, xr + r);
  return out;
}

OscBound osc_at(const TestFunction& f, const IntervalSet& A, const EpPoint& x,
                unsigned probe_depth) {
  if (!A.contains(x)) throw std::invalid_argument("osc_at: x not in A");
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
      return {Rat(0), Rat(0)};
    case TestFunction::Kind::DirichletLike: {
      // Every relative neighborhood of x in A has interior, which carries
      // both dyadic and non-dyadic points.
      const Rat d = rat_abs(f.dirichlet_on() - f.dirichlet_off());
      return {d, d};
    }
    case TestFunction::Kind::ThomaeLike: {
      // Small values accumulate at every point; the only surviving spread at
      // x is f(x) itself.
      const Rat v = f.eval(x);
      return {v, v};
    }
    case TestFunction::Kind::Step: {
      const Rat xr = x.to_rat();
      std::vector<Rat> vals;
      const auto& pieces = f.pieces();
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Rat l = pieces[i].interval.left, r = pieces[i].interval.right;
        bool near = false;
        for (const auto& c : A.components()) {
          // closure of ownership-intersect-component
          const Rat top = std::min(c.right, r);
          Rat bottom;
          if (i == 0) {
            bottom = std::max(c.left, l);
            if (bottom > top) continue;
          } else {
            if (top <= l) continue;
            bottom = std::max(c.left, l);  // closure adds l back when c.left <= l
          }
          if (bottom <= xr && xr <= top) near = true;
          if (near) break;
        }
        if (near) vals.push_back(pieces[i].value);
      }
      const Rat s = spread(vals);
      return {s, s};
    }
    case TestFunction::Kind::IndicatorOfTree: {
      // Probe bounds only: clip an outer dyadic window around x and measure
      // the symbolic diameter there.
      const Rat xr = x.to_rat();
      const unsigned d = probe_depth + 2;
      const BigInt lo_k = std::max(BigInt(0), floor_scaled(xr - rat_pow2_inv(probe_depth), d));
      const BigInt hi_k = std::min(int_pow2(d), ceil_scaled(xr + rat_pow2_inv(probe_depth), d));
      const auto window = IntervalSet::single(Rat(lo_k, int_pow2(d)), Rat(hi_k, int_pow2(d)));
      const auto clipped = A.intersect(window);
      OscBound out{Rat(0), Rat(1)};
      if (clipped) {
        const Rat diam = value_diam(f, *clipped);
        if (diam == 0) return {Rat(0), Rat(0)};
        out.upper = diam;
      }
      return out;
    }
  }
  return {Rat(0), Rat(0)};
}

Rat dbar(const EpPoint& x, const EpPoint& y, const TestFunction& f) {
  return dist(x, y) + rat_abs(f.eval(x) - f.eval(y));
}

}  // namespace selgames
