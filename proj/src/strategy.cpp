#include "selgames/strategy.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "selgames/rng.hpp"

namespace selgames {

namespace {

const EpPoint& last_point(const Transcript& t) {
  for (auto it = t.moves.rbegin(); it != t.moves.rend(); ++it)
    if (it->kind == Move::Kind::Points) return it->points.back();
  throw std::logic_error("no point played yet");
}

unsigned block_count_for(const Transcript& t, std::uint64_t seed, unsigned n) {
  const auto required = t.variant.block_size(n);
  if (required) return *required;
  return 1 + static_cast<unsigned>(mix_seed(seed, 0x626c6f636bULL, n) % 3);  // gfin: 1..3
}

// Midpoint of the first component: always a dyadic interior point.
EpPoint probe_dyadic(const IntervalSet& s) {
  const auto& c = s.components().front();
  return EpPoint::from_rat((c.left + c.right) / 2);
}

// A non-dyadic point of the first component: one third into it.
EpPoint probe_non_dyadic(const IntervalSet& s) {
  const auto& c = s.components().front();
  return EpPoint::from_rat(c.left + (c.right - c.left) / 3);
}

const IntervalSet& member_intervals(const Member& m) {
  if (const auto* s = std::get_if<IntervalSet>(&m)) return *s;
  throw std::invalid_argument("strategy needs an interval carrier");
}

}  // namespace

Strategy make_ii_hsop(const StrategyBuildContext& ctx) {
  Strategy s;
  s.spec = "ii-hsop";
  s.role = Player::II;
  const FamilySpec sigma = ctx.sigma;
  const TestFunction f = ctx.f;
  s.next = [sigma, f](const Transcript& t) -> Move {
    const std::size_t k = t.num_responses();
    Move mv;
    mv.kind = Move::Kind::Response;
    if (k == 0) {
      const Member* P = t.initial();
      if (!P) throw std::logic_error("missing initial set");
      auto h = hsop_refine(sigma, f, *P, Rat(1));
      if (!h.refined) throw std::runtime_error("no small-oscillation refinement of the initial set");
      mv.member = std::move(*h.refined);
      return mv;
    }
    const auto blocks = t.blocks();
    if (blocks.empty() || blocks.back().size() != 1)
      throw std::runtime_error("ii-hsop expects one point per round; wrap it in transfer-ii");
    const EpPoint& x = blocks.back().front();
    const Member* prev = t.response(k - 1);
    auto refined = refine_dense(sigma, *prev, x, rat_pow2_inv(static_cast<unsigned>(k)));
    if (!refined) throw std::runtime_error("dense refinement failed");
    auto h = hsop_refine(sigma, f, *refined, Rat(1, static_cast<int>(k)));
    if (!h.refined) throw std::runtime_error("no small-oscillation refinement at this round");
    mv.member = std::move(*h.refined);
    return mv;
  };
  return s;
}

Strategy make_ii_baire(const StrategyBuildContext& ctx) {
  if (ctx.sigma.kind != FamilyKind::Residual)
    throw std::invalid_argument("ii-baire plays residual families only");
  switch (ctx.f.kind()) {
    case TestFunction::Kind::Constant:
    case TestFunction::Kind::Step:
    case TestFunction::Kind::ThomaeLike:
    case TestFunction::Kind::DirichletLike:
      break;  // continuous off the scheduled exceptions
    default:
      throw std::invalid_argument("ii-baire supports the decided catalog only");
  }
  Strategy s;
  s.spec = "ii-baire";
  s.role = Player::II;
  const FamilySpec sigma = ctx.sigma;
  s.next = [sigma](const Transcript& t) -> Move {
    const std::size_t k = t.num_responses();
    Move mv;
    mv.kind = Move::Kind::Response;
    if (k == 0) {
      const auto& P = std::get<ResidualMember>(*t.initial());
      auto carved = P.carrier.remove_point_nbhds(schedule_points(P.schedule, 1),
                                                 P.carrier.lebesgue() / 4);
      if (!carved) throw std::runtime_error("could not carve the first schedule set");
      mv.member = ResidualMember{*carved, P.schedule};
      return mv;
    }
    const auto& prev = std::get<ResidualMember>(*t.response(k - 1));
    const EpPoint& x = last_point(t);
    auto clipped = prev.carrier.clip_ball(x, rat_pow2_inv(static_cast<unsigned>(k + 1)));
    if (!clipped) throw std::runtime_error("ball refinement failed");
    auto carved = clipped->remove_point_nbhds(
        schedule_points(prev.schedule, static_cast<unsigned>(k)), clipped->lebesgue() / 2);
    if (!carved) throw std::runtime_error("schedule carving failed");
    mv.member = ResidualMember{*carved, prev.schedule};
    return mv;
  };
  return s;
}

Strategy make_i_gap(const StrategyBuildContext& ctx, const Rat& alpha) {
  auto outcome = hsop_refine(ctx.sigma, ctx.f, full_member(ctx.sigma), alpha);
  if (!outcome.witness)
    throw std::invalid_argument("i-gap: no oscillation witness for this family and function");
  Strategy s;
  s.spec = "i-gap alpha=" + format_rat(alpha);
  s.role = Player::I;
  const FamilySpec sigma = ctx.sigma;
  const TestFunction f = ctx.f;
  const Member start = outcome.witness->P;
  const Rat a = alpha;
  const std::uint64_t seed = ctx.seed;
  s.next = [sigma, f, start, a, seed](const Transcript& t) -> Move {
    Move mv;
    if (t.moves.empty()) {
      mv.kind = Move::Kind::InitialSet;
      mv.member = start;
      return mv;
    }
    mv.kind = Move::Kind::Points;
    const std::size_t n = t.num_blocks() + 1;
    const auto& current = member_intervals(*t.response(n - 1));
    EpPoint chosen = probe_dyadic(current);
    if (n > 1) {
      const EpPoint& prev = last_point(t);
      const Rat prev_val = f.eval(prev);
      if (rat_abs(f.eval(chosen) - prev_val) <= a / 4) {
        // The dyadic probe sits close in value; its counterpart differs by
        // the full witness gap, hence by at least alpha/4 from the previous.
        const EpPoint other = probe_non_dyadic(current);
        if (rat_abs(f.eval(chosen) - f.eval(other)) < a / 2)
          throw std::runtime_error("probe failed to realize the witness gap");
        chosen = other;
      }
    }
    const unsigned count = block_count_for(t, seed, static_cast<unsigned>(n));
    mv.points.assign(count, chosen);
    return mv;
  };
  return s;
}

namespace {

// Legal dyadic candidates of bounded depth inside the target member,
// deepening until some exist.
std::vector<EpPoint> interval_candidates(const FamilySpec& sigma, const Member& target,
                                         unsigned response_index) {
  const IntervalSet* carrier = std::get_if<IntervalSet>(&target);
  if (!carrier) carrier = &std::get<ResidualMember>(target).carrier;
  unsigned max_depth = 6;
  for (const auto& c : carrier->components())
    max_depth = std::max({max_depth, dyadic_depth(c.left) + 4, dyadic_depth(c.right) + 4});
  std::vector<EpPoint> out;
  for (unsigned d = 1; d <= max_depth; ++d) {
    for (BigInt k = 0; k <= int_pow2(d); ++k) {
      const Rat v(k, int_pow2(d));
      if (dyadic_depth(v) != d && !(d == 1 && (v == 0 || v == 1))) continue;  // skip duplicates
      const EpPoint p = EpPoint::from_rat(v);
      if (member_contains(sigma, target, p, response_index)) out.push_back(p);
    }
    if (d >= 6 && !out.empty()) break;
  }
  return out;
}

EpPoint tree_walk_point(const TreeAutomaton& t, std::uint64_t stream) {
  SplitMix64 rng(stream);
  std::vector<int> path{0};
  std::string bits;
  int q = 0;
  for (;;) {
    const bool has0 = t.next(q, 0) >= 0, has1 = t.next(q, 1) >= 0;
    int bit;
    if (has0 && has1)
      bit = static_cast<int>(rng.below(2));
    else
      bit = has0 ? 0 : 1;
    q = t.next(q, bit);
    bits += bit ? '1' : '0';
    auto it = std::find(path.begin(), path.end(), q);
    if (it != path.end()) {
      const std::size_t at = static_cast<std::size_t>(it - path.begin());
      return EpPoint::make(bits.substr(0, at), bits.substr(at));
    }
    path.push_back(q);
  }
}

}  // namespace

Strategy make_adversary(const StrategyBuildContext& ctx, Player role, const std::string& kind,
                        std::uint64_t seed) {
  if (kind != "random" && kind != "sweep" && kind != "dbar_probe")
    throw std::invalid_argument("unknown adversary kind: " + kind);
  Strategy s;
  s.spec = "adversary:" + kind;
  s.role = role;
  const FamilySpec sigma = ctx.sigma;
  const TestFunction f = ctx.f;

  if (role == Player::II) {
    s.next = [sigma, kind, seed](const Transcript& t) -> Move {
      Move mv;
      mv.kind = Move::Kind::Response;
      const std::size_t k = t.num_responses();
      if (k == 0) {
        mv.member = *t.initial();
        return mv;
      }
      const Member* prev = t.response(k - 1);
      if (kind == "sweep") {
        mv.member = *prev;  // stay put: always legal
        return mv;
      }
      const EpPoint& x = last_point(t);
      const unsigned shrink =
          kind == "random"
              ? 1 + static_cast<unsigned>(mix_seed(seed, 0x72657370ULL, k) % 5)
              : static_cast<unsigned>(k);
      auto refined = refine_dense(sigma, *prev, x, rat_pow2_inv(shrink));
      if (!refined) throw std::runtime_error("adversary refinement failed");
      mv.member = std::move(*refined);
      return mv;
    };
    return s;
  }

  s.next = [sigma, f, kind, seed](const Transcript& t) -> Move {
    Move mv;
    if (t.moves.empty()) {
      mv.kind = Move::Kind::InitialSet;
      mv.member = full_member(sigma);
      return mv;
    }
    mv.kind = Move::Kind::Points;
    const std::size_t n = t.num_blocks() + 1;
    const Member* target = t.response(n - 1);
    const auto required = t.variant.block_size(static_cast<unsigned>(n));
    const unsigned count =
        required ? *required : 1 + static_cast<unsigned>(mix_seed(seed, 0x626c6bULL, n) % 4);

    const bool tree = sigma.kind == FamilyKind::Tree;
    std::vector<EpPoint> pool;
    if (!tree) pool = interval_candidates(sigma, *target, static_cast<unsigned>(n - 1));

    for (unsigned slot = 0; slot < count; ++slot) {
      const std::uint64_t stream = mix_seed(seed, n, slot);
      if (tree) {
        const auto& automaton = std::get<TreeAutomaton>(*target);
        if (kind == "sweep") {
          mv.points.push_back(automaton.min_point());
        } else if (kind == "random") {
          mv.points.push_back(tree_walk_point(automaton, stream));
        } else {
          // dbar_probe: farthest of a handful of walks plus the extremes.
          std::vector<EpPoint> cands{automaton.min_point(), automaton.max_point()};
          for (int i = 0; i < 6; ++i) cands.push_back(tree_walk_point(automaton, mix_seed(stream, i)));
          const EpPoint* base = mv.points.empty() ? nullptr : &mv.points.back();
          EpPoint base_pt = base ? *base : (t.num_blocks() ? last_point(t) : cands.front());
          EpPoint best = cands.front();
          Rat best_val = dbar(base_pt, best, f);
          for (const auto& c : cands) {
            const Rat v = dbar(base_pt, c, f);
            if (v > best_val) {
              best_val = v;
              best = c;
            }
          }
          mv.points.push_back(best);
        }
        continue;
      }
      if (pool.empty()) throw std::runtime_error("no legal dyadic point found");
      if (kind == "sweep") {
        mv.points.push_back(pool.front());
      } else if (kind == "random") {
        SplitMix64 rng(stream);
        mv.points.push_back(pool[rng.below(pool.size())]);
      } else {
        EpPoint base_pt = !mv.points.empty()
                              ? mv.points.back()
                              : (t.num_blocks() ? last_point(t) : pool.front());
        EpPoint best = pool.front();
        Rat best_val = dbar(base_pt, best, f);
        for (const auto& c : pool) {
          const Rat v = dbar(base_pt, c, f);
          if (v > best_val) {
            best_val = v;
            best = c;
          }
        }
        mv.points.push_back(best);
      }
    }
    return mv;
  };
  return s;
}

namespace {

// Rebuild the finite-block game the wrapped strategy thinks it is playing:
// same sets, its own recomputed blocks.
Transcript simulate_gfin_view(const Transcript& real, const Strategy& inner) {
  Transcript sim;
  sim.sigma = real.sigma;
  sim.f = real.f;
  sim.variant = *GameVariant::parse("gfin");
  sim.seed = real.seed;
  sim.horizon = real.horizon;
  sim.player_i = inner.spec;
  sim.player_ii = real.player_ii;
  sim.declared_alpha = real.declared_alpha;
  std::size_t mi = 0;
  while (mi < real.moves.size()) {
    const Move& mv = real.moves[mi];
    if (mv.kind == Move::Kind::Points) {
      sim.moves.push_back(inner.next(sim));
    } else {
      sim.moves.push_back(mv);
    }
    ++mi;
  }
  return sim;
}

}  // namespace

Strategy make_transfer_i(const StrategyBuildContext& ctx, Strategy inner_gfin) {
  if (inner_gfin.role != Player::I)
    throw std::invalid_argument("transfer-i wraps a Player I strategy");
  Strategy s;
  s.spec = "transfer-i " + inner_gfin.spec;
  s.role = Player::I;
  const TestFunction f = ctx.f;
  s.next = [f, inner = std::move(inner_gfin)](const Transcript& t) -> Move {
    if (t.moves.empty()) return inner.next(t);
    // Ask the wrapped strategy for its block in the simulated game, then
    // select the dbar-farthest element from the previous selection.
    Transcript sim = simulate_gfin_view(t, inner);
    const Move block = inner.next(sim);
    if (block.kind != Move::Kind::Points || block.points.empty())
      throw std::runtime_error("wrapped strategy did not produce a block");
    Move mv;
    mv.kind = Move::Kind::Points;
    if (t.num_blocks() == 0) {
      mv.points.push_back(block.points.front());
      return mv;
    }
    const EpPoint& prev = last_point(t);
    EpPoint best = block.points.front();
    Rat best_val = dbar(prev, best, f);
    for (const auto& c : block.points) {
      const Rat v = dbar(prev, c, f);
      if (v > best_val) {
        best_val = v;
        best = c;
      }
    }
    mv.points.push_back(best);
    return mv;
  };
  return s;
}

Strategy make_transfer_ii(const StrategyBuildContext& ctx, Strategy inner_g1) {
  if (inner_g1.role != Player::II)
    throw std::invalid_argument("transfer-ii wraps a Player II strategy");
  Strategy s;
  s.spec = "transfer-ii " + inner_g1.spec;
  s.role = Player::II;
  (void)ctx;
  s.next = [inner = std::move(inner_g1)](const Transcript& t) -> Move {
    // Present the wrapped strategy with the one-point game over the block
    // representatives.
    Transcript sim;
    sim.sigma = t.sigma;
    sim.f = t.f;
    sim.variant = *GameVariant::parse("g1");
    sim.seed = t.seed;
    sim.horizon = t.horizon;
    sim.player_i = t.player_i;
    sim.player_ii = inner.spec;
    sim.declared_alpha = t.declared_alpha;
    const auto reps = t.representatives();
    std::size_t block_index = 0;
    for (const auto& mv : t.moves) {
      if (mv.kind == Move::Kind::Points) {
        ++block_index;
        Move single;
        single.kind = Move::Kind::Points;
        single.points.push_back(reps.at(block_index));
        sim.moves.push_back(std::move(single));
      } else {
        sim.moves.push_back(mv);
      }
    }
    return inner.next(sim);
  };
  return s;
}

std::optional<Strategy> make_strategy(std::string_view spec, Player role,
                                      const StrategyBuildContext& ctx, std::string* err) {
  const auto fail = [&](const std::string& what) -> std::optional<Strategy> {
    if (err) *err = what;
    return std::nullopt;
  };
  std::istringstream in{std::string(spec)};
  std::string head;
  if (!(in >> head)) return fail("empty strategy spec");
  try {
    if (head == "ii-hsop") {
      if (role != Player::II) return fail("ii-hsop plays as Player II");
      return make_ii_hsop(ctx);
    }
    if (head == "ii-baire") {
      if (role != Player::II) return fail("ii-baire plays as Player II");
      return make_ii_baire(ctx);
    }
    if (head == "i-gap") {
      if (role != Player::I) return fail("i-gap plays as Player I");
      std::string arg;
      Rat alpha(1, 2);
      if (in >> arg) {
        if (arg.rfind("alpha=", 0) == 0) arg = arg.substr(6);
        auto a = parse_rat(arg);
        if (!a || *a <= 0) return fail("bad i-gap alpha");
        alpha = *a;
      }
      return make_i_gap(ctx, alpha);
    }
    if (head.rfind("adversary:", 0) == 0) {
      std::string rest = head.substr(10);
      std::uint64_t seed = ctx.seed;
      const auto colon = rest.find(':');
      if (colon != std::string::npos) {
        seed = std::stoull(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      return make_adversary(ctx, role, rest, seed);
    }
    if (head == "transfer-i") {
      if (role != Player::I) return fail("transfer-i plays as Player I");
      std::string rest;
      std::getline(in, rest);
      if (rest.find_first_not_of(' ') == std::string::npos) rest = "i-gap alpha=1/2";
      StrategyBuildContext inner_ctx = ctx;
      inner_ctx.variant = *GameVariant::parse("gfin");
      auto inner = make_strategy(rest, Player::I, inner_ctx, err);
      if (!inner) return std::nullopt;
      return make_transfer_i(ctx, std::move(*inner));
    }
    if (head == "transfer-ii") {
      if (role != Player::II) return fail("transfer-ii plays as Player II");
      std::string rest;
      std::getline(in, rest);
      if (rest.find_first_not_of(' ') == std::string::npos) rest = "ii-hsop";
      StrategyBuildContext inner_ctx = ctx;
      inner_ctx.variant = *GameVariant::parse("g1");
      auto inner = make_strategy(rest, Player::II, inner_ctx, err);
      if (!inner) return std::nullopt;
      return make_transfer_ii(ctx, std::move(*inner));
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return fail("unknown strategy: " + std::string(spec));
}

}  // namespace selgames
