#include "selgames/family.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace selgames {

std::optional<FamilySpec> FamilySpec::parse(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::string head;
  if (!(in >> head)) return std::nullopt;
  FamilySpec spec;
  if (head == "clo") {
    spec.kind = FamilyKind::Clo;
  } else if (head == "measure") {
    spec.kind = FamilyKind::Measure;
  } else if (head == "tree") {
    spec.kind = FamilyKind::Tree;
  } else if (head == "residual") {
    spec.kind = FamilyKind::Residual;
    if (!(in >> spec.schedule)) spec.schedule = "dyadics";
    if (spec.schedule != "dyadics") return std::nullopt;
  } else {
    return std::nullopt;
  }
  std::string extra;
  if (in >> extra) return std::nullopt;
  return spec;
}

std::string FamilySpec::str() const {
  switch (kind) {
    case FamilyKind::Clo:
      return "clo";
    case FamilyKind::Measure:
      return "measure";
    case FamilyKind::Tree:
      return "tree";
    case FamilyKind::Residual:
      return "residual " + schedule;
  }
  return "";
}

std::vector<EpPoint> schedule_points(const std::string& name, unsigned n) {
  if (name != "dyadics") throw std::invalid_argument("unknown schedule: " + name);
  std::vector<EpPoint> pts;
  if (n == 0) return pts;
  // The function catalog is discontinuous at 0 and 1 relative to the interior
  // dyadics alone, so the endpoints are scheduled from the start.
  pts.push_back(EpPoint::zero());
  pts.push_back(EpPoint::one());
  for (unsigned i = 1; i <= n; ++i) pts.push_back(enum_dyadic(BigInt(i)));
  return pts;
}

Member full_member(const FamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::Clo:
    case FamilyKind::Measure:
      return IntervalSet::full();
    case FamilyKind::Tree:
      return TreeAutomaton::full();
    case FamilyKind::Residual:
      return ResidualMember{IntervalSet::full(), spec.schedule};
  }
  return IntervalSet::full();
}

bool member_valid(const FamilySpec& spec, const Member& m) {
  switch (spec.kind) {
    case FamilyKind::Clo:
    case FamilyKind::Measure:
      return std::holds_alternative<IntervalSet>(m);
    case FamilyKind::Tree: {
      const auto* t = std::get_if<TreeAutomaton>(&m);
      return t && t->is_perfect().perfect;
    }
    case FamilyKind::Residual: {
      const auto* r = std::get_if<ResidualMember>(&m);
      return r && r->schedule == spec.schedule;
    }
  }
  return false;
}

bool member_contains(const FamilySpec& spec, const Member& m, const EpPoint& x,
                     unsigned response_index) {
  switch (spec.kind) {
    case FamilyKind::Clo:
    case FamilyKind::Measure:
      return std::get<IntervalSet>(m).contains(x);
    case FamilyKind::Tree:
      return std::get<TreeAutomaton>(m).member(x);
    case FamilyKind::Residual: {
      const auto& r = std::get<ResidualMember>(m);
      if (!r.carrier.interior_contains_rat(x.to_rat())) return false;
      for (const auto& p : schedule_points(r.schedule, response_index))
        if (p == x) return false;
      return true;
    }
  }
  return false;
}

bool member_subset(const FamilySpec& spec, const Member& a, const Member& b) {
  switch (spec.kind) {
    case FamilyKind::Clo:
    case FamilyKind::Measure:
      return std::get<IntervalSet>(a).subset_of(std::get<IntervalSet>(b));
    case FamilyKind::Tree:
      return std::get<TreeAutomaton>(a).subset_of(std::get<TreeAutomaton>(b));
    case FamilyKind::Residual:
      return std::get<ResidualMember>(a).schedule == std::get<ResidualMember>(b).schedule &&
             std::get<ResidualMember>(a).carrier.subset_of(std::get<ResidualMember>(b).carrier);
  }
  return false;
}

namespace {

// Diameter of f over interior(carrier) minus all scheduled exceptions.
Rat residual_value_diam(const TestFunction& f, const ResidualMember& m) {
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
    case TestFunction::Kind::DirichletLike:  // only off-values remain
    case TestFunction::Kind::ThomaeLike:     // zero off the dyadics
      return Rat(0);
    case TestFunction::Kind::Step: {
      std::vector<Rat> vals;
      for (const auto& piece : f.pieces()) {
        bool attained = false;
        for (const auto& c : m.carrier.components())
          if (std::max(c.left, piece.interval.left) < std::min(c.right, piece.interval.right)) {
            attained = true;
            break;
          }
        if (attained) vals.push_back(piece.value);
      }
      if (vals.empty()) return Rat(0);
      return *std::max_element(vals.begin(), vals.end()) -
             *std::min_element(vals.begin(), vals.end());
    }
    case TestFunction::Kind::IndicatorOfTree:
      throw std::invalid_argument("residual value diameter: indicator functions are not certified");
  }
  return Rat(0);
}

}  // namespace

Rat member_value_diam(const FamilySpec& spec, const TestFunction& f, const Member& m) {
  switch (spec.kind) {
    case FamilyKind::Clo:
    case FamilyKind::Measure:
      return value_diam(f, std::get<IntervalSet>(m));
    case FamilyKind::Tree:
      return value_diam_tree(f, std::get<TreeAutomaton>(m));
    case FamilyKind::Residual:
      return residual_value_diam(f, std::get<ResidualMember>(m));
  }
  return Rat(0);
}

std::pair<Rat, Rat> member_hull(const Member& m) {
  if (const auto* s = std::get_if<IntervalSet>(&m)) return {s->min(), s->max()};
  if (const auto* t = std::get_if<TreeAutomaton>(&m)) return t->hull();
  const auto& r = std::get<ResidualMember>(m);
  return {r.carrier.min(), r.carrier.max()};
}

Rat member_diameter(const Member& m) {
  const auto h = member_hull(m);
  return h.second - h.first;
}

std::string member_str(const Member& m) {
  if (const auto* s = std::get_if<IntervalSet>(&m)) return s->str();
  if (const auto* t = std::get_if<TreeAutomaton>(&m)) {
    std::string out;
    for (const auto& line : t->to_lines()) {
      if (!out.empty()) out += "; ";
      out += line;
    }
    return out;
  }
  const auto& r = std::get<ResidualMember>(m);
  return r.carrier.str() + " \\ " + r.schedule;
}

std::optional<Member> refine_dense(const FamilySpec& spec, const Member& P, const EpPoint& x,
                                   const Rat& r) {
  if (r <= 0) throw std::invalid_argument("refine_dense: radius must be positive");
  switch (spec.kind) {
    case FamilyKind::Clo:
    case FamilyKind::Measure: {
      const auto& s = std::get<IntervalSet>(P);
      if (!s.contains(x)) return std::nullopt;
      auto clipped = s.clip_ball(x, r);
      assert(clipped);
      return Member{*clipped};
    }
    case FamilyKind::Tree: {
      const auto& t = std::get<TreeAutomaton>(P);
      if (!t.member(x)) return std::nullopt;
      // Dyadic window around x, strictly inside the ball.
      const Rat xr = x.to_rat();
      unsigned d = 0;
      while (rat_pow2_inv(d) > r / 4) ++d;
      const BigInt k = floor_scaled(xr, d);
      const Rat lo = std::max(Rat(0), Rat(k - 1, int_pow2(d)));
      const Rat hi = std::min(Rat(1), Rat(k + 2, int_pow2(d)));
      auto boxed = t.intersect_interval({lo, hi});
      assert(boxed);
      auto kernel = boxed->perfect_kernel();
      assert(kernel);  // x is a condensation point of a perfect member
      return Member{*kernel};
    }
    case FamilyKind::Residual: {
      const auto& m = std::get<ResidualMember>(P);
      if (!m.carrier.interior_contains_rat(x.to_rat())) return std::nullopt;
      auto clipped = m.carrier.clip_ball(x, r);
      assert(clipped);
      return Member{ResidualMember{*clipped, m.schedule}};
    }
  }
  return std::nullopt;
}

std::optional<bool> cliquish_decide(const TestFunction& f) {
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
    case TestFunction::Kind::Step:
    case TestFunction::Kind::ThomaeLike:
      return true;
    case TestFunction::Kind::DirichletLike:
      return false;
    case TestFunction::Kind::IndicatorOfTree:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// Depth-d grid cells inside an interval carrier, left to right.
std::vector<DyadicInterval> cells_inside(const IntervalSet& s, unsigned d) {
  std::vector<DyadicInterval> out;
  for (const auto& c : s.components()) {
    BigInt k = ceil_scaled(c.left, d);
    while (Rat(k + 1, int_pow2(d)) <= c.right) {
      out.push_back({Rat(k, int_pow2(d)), Rat(k + 1, int_pow2(d))});
      ++k;
    }
  }
  return out;
}

std::vector<DyadicInterval> cells_over_hull(const std::pair<Rat, Rat>& hull, unsigned d) {
  std::vector<DyadicInterval> out;
  BigInt k = floor_scaled(hull.first, d);
  if (k < 0) k = 0;
  while (k < int_pow2(d) && Rat(k, int_pow2(d)) <= hull.second) {
    out.push_back({Rat(k, int_pow2(d)), Rat(k + 1, int_pow2(d))});
    ++k;
  }
  return out;
}

}  // namespace

HsopOutcome hsop_refine(const FamilySpec& spec, const TestFunction& f, const Member& P,
                        const Rat& alpha, unsigned depth_cap) {
  if (alpha <= 0) throw std::invalid_argument("hsop_refine: alpha must be positive");
  HsopOutcome out;
  if (member_value_diam(spec, f, P) < alpha) {
    out.refined = P;
    return out;
  }
  const bool interval_family = spec.kind == FamilyKind::Clo || spec.kind == FamilyKind::Measure;

  if (f.kind() == TestFunction::Kind::DirichletLike) {
    const Rat gap = rat_abs(f.dirichlet_on() - f.dirichlet_off());
    if (interval_family || spec.kind == FamilyKind::Residual) {
      if (alpha <= gap && interval_family) {
        // Every sub-member carries both values, so the witness is exact.
        out.witness = HsopWitness{P, alpha};
        return out;
      }
      // Residual members already avoid the dyadics; the fast path above
      // handles them, so reaching here means something is inconsistent.
      out.depth_cap_reached = true;
      return out;
    }
    // Tree family: pass to a dyadic-free perfect subautomaton, where f is
    // constantly the off-value.
    auto free = std::get<TreeAutomaton>(P).dyadic_free_kernel();
    if (free) {
      out.refined = Member{*free};
      return out;
    }
    out.depth_cap_reached = true;
    return out;
  }

  // Breadth-first search over dyadic cells of increasing depth.
  for (unsigned d = 1; d <= depth_cap; ++d) {
    if (interval_family) {
      for (const auto& cell : cells_inside(std::get<IntervalSet>(P), d)) {
        const IntervalSet q = IntervalSet::single(cell.left, cell.right);
        if (value_diam(f, q) < alpha) {
          out.refined = Member{q};
          return out;
        }
      }
    } else if (spec.kind == FamilyKind::Tree) {
      const auto& t = std::get<TreeAutomaton>(P);
      if (f.kind() == TestFunction::Kind::IndicatorOfTree) break;  // undecided
      for (const auto& cell : cells_over_hull(t.hull(), d)) {
        auto boxed = t.intersect_interval(cell);
        if (!boxed) continue;
        auto kernel = boxed->perfect_kernel();
        if (!kernel) continue;
        if (value_diam_tree(f, *kernel) < alpha) {
          out.refined = Member{*kernel};
          return out;
        }
      }
    } else {
      const auto& m = std::get<ResidualMember>(P);
      if (f.kind() == TestFunction::Kind::IndicatorOfTree) break;
      for (const auto& cell : cells_inside(m.carrier, d)) {
        const ResidualMember q{IntervalSet::single(cell.left, cell.right), m.schedule};
        if (residual_value_diam(f, q) < alpha) {
          out.refined = Member{q};
          return out;
        }
      }
    }
  }
  out.depth_cap_reached = true;
  return out;
}

namespace {

// Two disjoint perfect sub-automata of Q, each with hull diameter and value
// diameter below the bound, scanning cells left to right by depth.
std::vector<TreeAutomaton> split_two(const TestFunction& f, const TreeAutomaton& Q,
                                     const Rat& bound, unsigned depth_cap) {
  unsigned d0 = 1;
  while (rat_pow2_inv(d0) >= bound) ++d0;
  for (unsigned d = d0; d <= depth_cap; ++d) {
    std::vector<TreeAutomaton> picked;
    for (const auto& cell : cells_over_hull(Q.hull(), d)) {
      auto boxed = Q.intersect_interval(cell);
      if (!boxed) continue;
      auto kernel = boxed->perfect_kernel();
      if (!kernel) continue;
      std::optional<TreeAutomaton> piece;
      if (value_diam_tree(f, *kernel) < bound) {
        piece = *kernel;
      } else if (f.kind() == TestFunction::Kind::DirichletLike) {
        auto free = kernel->dyadic_free_kernel();
        if (free) piece = *free;
      }
      if (!piece) continue;
      bool disjoint = true;
      for (const auto& other : picked)
        if (piece->set_intersects(other)) disjoint = false;
      if (!disjoint) continue;
      picked.push_back(std::move(*piece));
      if (picked.size() == 2) return picked;
    }
  }
  throw std::runtime_error("fuse_perfect: no disjoint refinement found within the depth cap");
}

}  // namespace

FusionResult fuse_perfect(const TestFunction& f, const TreeAutomaton& P, unsigned generations,
                          unsigned depth_cap) {
  std::vector<TreeAutomaton> pieces{P};
  for (unsigned g = 1; g <= generations; ++g) {
    std::vector<TreeAutomaton> next;
    for (const auto& piece : pieces) {
      auto halves = split_two(f, piece, Rat(1, static_cast<int>(g)), depth_cap);
      next.insert(next.end(), halves.begin(), halves.end());
    }
    pieces = std::move(next);
  }
  TreeAutomaton fused = pieces.size() == 1 ? pieces.front() : TreeAutomaton::unite(pieces);
  return {std::move(fused), std::move(pieces)};
}

std::vector<IntervalSet> measure_exhaust(const TestFunction& f, const IntervalSet& P, unsigned n) {
  std::vector<EpPoint> boundaries;
  switch (f.kind()) {
    case TestFunction::Kind::Constant:
    case TestFunction::Kind::ThomaeLike:
      break;
    case TestFunction::Kind::Step:
      for (std::size_t i = 0; i + 1 < f.pieces().size(); ++i)
        boundaries.push_back(EpPoint::from_rat(f.pieces()[i].interval.right));
      break;
    default:
      throw std::invalid_argument("measure_exhaust: unsupported function variant");
  }
  std::vector<IntervalSet> chain;
  IntervalSet s = P;
  const Rat total = P.lebesgue();
  for (unsigned g = 1; g <= n; ++g) {
    std::vector<EpPoint> pts = boundaries;
    if (f.kind() == TestFunction::Kind::ThomaeLike)
      for (unsigned m = 1; m <= g; ++m) pts.push_back(enum_dyadic(BigInt(m)));
    const Rat budget = total * rat_pow2_inv(g + 1);
    if (pts.empty()) {
      chain.push_back(s);
      continue;
    }
    auto next = s.remove_point_nbhds(pts, budget);
    assert(next);
    s = *next;
    chain.push_back(s);
  }
  return chain;
}

}  // namespace selgames
