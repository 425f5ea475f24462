#include "selgames/game.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace selgames {

using nlohmann::json;

std::optional<GameVariant> GameVariant::parse(std::string_view s) {
  GameVariant v;
  if (s == "g1") {
    v.kind = Kind::G1;
    return v;
  }
  if (s == "gfin") {
    v.kind = Kind::Gfin;
    return v;
  }
  if (s.rfind("gm:", 0) == 0) {
    v.kind = Kind::Gm;
    try {
      const int m = std::stoi(std::string(s.substr(3)));
      if (m < 1) return std::nullopt;
      v.m = static_cast<unsigned>(m);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    return v;
  }
  if (s.rfind("glambda:", 0) == 0) {
    v.kind = Kind::Glambda;
    v.lambda_name = std::string(s.substr(8));
    if (v.lambda_name != "square") return std::nullopt;
    return v;
  }
  return std::nullopt;
}

std::string GameVariant::str() const {
  switch (kind) {
    case Kind::G1:
      return "g1";
    case Kind::Gfin:
      return "gfin";
    case Kind::Gm:
      return "gm:" + std::to_string(m);
    case Kind::Glambda:
      return "glambda:" + lambda_name;
  }
  return "";
}

std::optional<unsigned> GameVariant::block_size(unsigned n) const {
  switch (kind) {
    case Kind::G1:
      return 1;
    case Kind::Gfin:
      return std::nullopt;
    case Kind::Gm:
      return m;
    case Kind::Glambda:
      return 2 * n - 1;  // square: n^2 - (n-1)^2
  }
  return std::nullopt;
}

std::string Certificate::kind_str() const {
  switch (kind) {
    case Kind::Convergence:
      return "convergence";
    case Kind::Divergence:
      return "divergence";
    case Kind::Undecided:
      return "undecided";
    case Kind::Forfeit:
      return "forfeit";
  }
  return "";
}

std::size_t Transcript::num_responses() const {
  std::size_t n = 0;
  for (const auto& mv : moves)
    if (mv.kind == Move::Kind::Response) ++n;
  return n;
}

std::size_t Transcript::num_blocks() const {
  std::size_t n = 0;
  for (const auto& mv : moves)
    if (mv.kind == Move::Kind::Points) ++n;
  return n;
}

const Member* Transcript::initial() const {
  if (moves.empty() || moves[0].kind != Move::Kind::InitialSet || !moves[0].member) return nullptr;
  return &*moves[0].member;
}

const Member* Transcript::response(std::size_t k) const {
  std::size_t n = 0;
  for (const auto& mv : moves)
    if (mv.kind == Move::Kind::Response) {
      if (n == k) return mv.member ? &*mv.member : nullptr;
      ++n;
    }
  return nullptr;
}

std::vector<std::vector<EpPoint>> Transcript::blocks() const {
  std::vector<std::vector<EpPoint>> out;
  for (const auto& mv : moves)
    if (mv.kind == Move::Kind::Points) out.push_back(mv.points);
  return out;
}

std::vector<EpPoint> Transcript::flat_points() const {
  std::vector<EpPoint> out;
  for (const auto& mv : moves)
    if (mv.kind == Move::Kind::Points) out.insert(out.end(), mv.points.begin(), mv.points.end());
  return out;
}

std::vector<EpPoint> Transcript::representatives() const {
  std::vector<EpPoint> reps;
  const auto bls = blocks();
  if (bls.empty() || bls.front().empty()) return reps;
  reps.push_back(bls.front().front());
  for (const auto& block : bls) {
    const EpPoint& base = reps.back();
    std::size_t best = 0;
    Rat best_val = dbar(base, block[0], f);
    for (std::size_t i = 1; i < block.size(); ++i) {
      const Rat v = dbar(base, block[i], f);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    reps.push_back(block[best]);
  }
  return reps;
}

std::optional<Violation> check_legal(const Transcript& prefix, const Move& mv) {
  const std::size_t index = prefix.moves.size();
  const auto expected = [&]() -> Move::Kind {
    if (index == 0) return Move::Kind::InitialSet;
    if (index == 1) return Move::Kind::Response;
    return index % 2 == 0 ? Move::Kind::Points : Move::Kind::Response;
  }();
  if (mv.kind != expected) return Violation{"alternation", index};

  if (mv.kind == Move::Kind::InitialSet || mv.kind == Move::Kind::Response) {
    if (!mv.member || !member_valid(prefix.sigma, *mv.member))
      return Violation{"P-not-in-Sigma", index};
    if (mv.kind == Move::Kind::Response) {
      const Member* base = prefix.initial();
      if (!base || !member_subset(prefix.sigma, *mv.member, *base))
        return Violation{"P-not-subset", index};
    }
    return std::nullopt;
  }

  // Points block n lands in response n-1.
  const std::size_t n = prefix.num_blocks() + 1;
  if (mv.points.empty()) return Violation{"non-empty-block", index};
  const auto required = prefix.variant.block_size(static_cast<unsigned>(n));
  if (required && mv.points.size() != *required) return Violation{"block-size", index};
  const Member* target = prefix.response(n - 1);
  if (!target) return Violation{"alternation", index};
  for (const auto& p : mv.points)
    if (!member_contains(prefix.sigma, *target, p, static_cast<unsigned>(n - 1)))
      return Violation{"x-not-in-P", index};
  return std::nullopt;
}

namespace {

bool residual_avoids(const ResidualMember& m, unsigned k) {
  for (const auto& p : schedule_points(m.schedule, std::max(k, 1u)))
    if (m.carrier.contains(p)) return false;
  return true;
}

}  // namespace

Certificate certify(const Transcript& t) {
  Certificate cert;
  const Member* P = t.initial();
  const std::size_t responses = t.num_responses();
  const auto blocks = t.blocks();
  const std::size_t rounds = std::min(blocks.size(), responses > 0 ? responses - 1 : 0);

  if (P && responses > 0 && rounds > 0) {
    const auto reps = t.representatives();
    std::vector<RoundFacts> facts;
    bool all_ok = true;
    {
      RoundFacts f0;
      f0.round = 0;
      const Member* P0 = t.response(0);
      f0.nested = member_subset(t.sigma, *P0, *P);
      f0.in_ball = true;
      f0.small_diam = true;
      f0.value_bound = member_value_diam(t.sigma, t.f, *P0) <= 1;
      f0.schedule_avoided = true;
      if (const auto* rm = std::get_if<ResidualMember>(P0)) f0.schedule_avoided = residual_avoids(*rm, 1);
      facts.push_back(f0);
      all_ok = all_ok && f0.all();
    }
    for (std::size_t k = 1; k <= rounds; ++k) {
      RoundFacts fk;
      fk.round = static_cast<unsigned>(k);
      const Member* Pk = t.response(k);
      const Member* Pprev = t.response(k - 1);
      fk.nested = member_subset(t.sigma, *Pk, *Pprev);
      const Rat r = rat_pow2_inv(static_cast<unsigned>(k));
      const Rat xr = reps[k].to_rat();
      const auto hull = member_hull(*Pk);
      fk.in_ball = hull.first > xr - r && hull.second < xr + r;
      fk.value_bound = member_value_diam(t.sigma, t.f, *Pk) <= Rat(1, static_cast<int>(k));
      fk.small_diam = true;
      fk.schedule_avoided = true;
      if (const auto* rm = std::get_if<ResidualMember>(Pk)) {
        fk.small_diam = rm->carrier.diameter() < r;
        fk.schedule_avoided = residual_avoids(*rm, static_cast<unsigned>(k));
      }
      facts.push_back(fk);
      all_ok = all_ok && fk.all();
    }
    if (all_ok) {
      cert.kind = Certificate::Kind::Convergence;
      cert.facts = std::move(facts);
      return cert;
    }
  }

  const auto flat = t.flat_points();
  std::vector<Rat> gaps;
  for (std::size_t i = 1; i < flat.size(); ++i)
    gaps.push_back(rat_abs(t.f.eval(flat[i]) - t.f.eval(flat[i - 1])));
  if (t.declared_alpha && flat.size() >= 2) {
    const Rat threshold = *t.declared_alpha / 4;
    bool ok = true;
    for (const auto& g : gaps)
      if (g < threshold) ok = false;
    if (ok) {
      cert.kind = Certificate::Kind::Divergence;
      cert.alpha = t.declared_alpha;
      cert.gaps = std::move(gaps);
      return cert;
    }
  }

  cert.kind = Certificate::Kind::Undecided;
  if (!gaps.empty()) {
    const std::size_t tail = std::max<std::size_t>(1, gaps.size() / 4);
    Rat mx = gaps[gaps.size() - tail], mn = mx;
    for (std::size_t i = gaps.size() - tail; i < gaps.size(); ++i) {
      mx = std::max(mx, gaps[i]);
      mn = std::min(mn, gaps[i]);
    }
    cert.tail_max_gap = mx;
    cert.tail_min_gap = mn;
  }
  if (responses > 0) {
    const Member* last = t.response(responses - 1);
    if (last) cert.final_radius = member_diameter(*last);
  }
  return cert;
}

VerifyResult verify_transcript(const Transcript& t) {
  Transcript prefix = t;
  prefix.moves.clear();
  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    if (auto v = check_legal(prefix, t.moves[i])) {
      Certificate cert;
      cert.kind = Certificate::Kind::Forfeit;
      cert.forfeited_by = i % 2 == 0 ? Player::I : Player::II;
      cert.violation_index = v->move_index;
      cert.violation_rule = v->rule;
      return {v, cert};
    }
    prefix.moves.push_back(t.moves[i]);
  }
  return {std::nullopt, certify(t)};
}

bool check_cauchy_pairs(const Transcript& t) {
  const auto flat = t.flat_points();
  for (std::size_t i = 0; i < flat.size(); ++i)
    for (std::size_t j = i + 1; j < flat.size(); ++j) {
      const unsigned N = static_cast<unsigned>(i + 1);  // flat[i] is x_{i+1}
      if (dist(flat[i], flat[j]) >= Rat(2) * rat_pow2_inv(N)) return false;
    }
  return true;
}

bool check_value_pairs(const Transcript& t) {
  auto flat = t.flat_points();
  if (t.sigma.kind == FamilyKind::Residual) {
    // Only points of the denoted sets carry the bound; scheduled exceptions
    // (the dyadics) are outside every true member.
    std::vector<EpPoint> kept;
    for (auto& p : flat)
      if (!p.is_dyadic()) kept.push_back(p);
    flat = std::move(kept);
  }
  for (std::size_t k = 1; k < flat.size(); ++k)
    for (std::size_t i = k; i < flat.size(); ++i)
      for (std::size_t j = i; j < flat.size(); ++j)
        if (rat_abs(t.f.eval(flat[i]) - t.f.eval(flat[j])) > Rat(2, static_cast<int>(k)))
          return false;
  return true;
}

PlayResult play(const FamilySpec& sigma, const TestFunction& f, const GameVariant& variant,
                const Strategy& player_i, const Strategy& player_ii, unsigned horizon,
                std::uint64_t seed, std::optional<Rat> declared_alpha) {
  if (horizon < 1) throw std::invalid_argument("play: horizon must be at least 1");
  Transcript t;
  t.sigma = sigma;
  t.f = f;
  t.variant = variant;
  t.seed = seed;
  t.horizon = horizon;
  t.player_i = player_i.spec;
  t.player_ii = player_ii.spec;
  t.declared_alpha = declared_alpha;

  auto turn = [&](const Strategy& s) -> std::optional<Certificate> {
    Move mv;
    try {
      mv = s.next(t);
    } catch (const std::exception& e) {
      Certificate cert;
      cert.kind = Certificate::Kind::Forfeit;
      cert.forfeited_by = s.role;
      cert.violation_index = t.moves.size();
      cert.violation_rule = std::string("strategy-error: ") + e.what();
      return cert;
    }
    if (auto v = check_legal(t, mv)) {
      t.moves.push_back(std::move(mv));
      Certificate cert;
      cert.kind = Certificate::Kind::Forfeit;
      cert.forfeited_by = s.role;
      cert.violation_index = v->move_index;
      cert.violation_rule = v->rule;
      return cert;
    }
    t.moves.push_back(std::move(mv));
    return std::nullopt;
  };

  if (auto c = turn(player_i)) return {t, *c};
  if (auto c = turn(player_ii)) return {t, *c};
  for (unsigned round = 1; round <= horizon; ++round) {
    if (auto c = turn(player_i)) return {t, *c};
    if (auto c = turn(player_ii)) return {t, *c};
  }
  return {t, certify(t)};
}

namespace {

json member_to_json(const Member& m) {
  json j;
  if (const auto* s = std::get_if<IntervalSet>(&m)) {
    j["set"] = s->str();
  } else if (const auto* tr = std::get_if<TreeAutomaton>(&m)) {
    j["tree"] = tr->to_lines();
  } else {
    const auto& r = std::get<ResidualMember>(m);
    j["carrier"] = r.carrier.str();
    j["schedule"] = r.schedule;
  }
  return j;
}

std::optional<Member> member_from_json(const json& j) {
  if (j.contains("set")) {
    auto s = IntervalSet::parse(j["set"].get<std::string>());
    if (!s) return std::nullopt;
    return Member{*s};
  }
  if (j.contains("tree")) {
    auto t = TreeAutomaton::from_lines(j["tree"].get<std::vector<std::string>>());
    if (!t) return std::nullopt;
    return Member{*t};
  }
  if (j.contains("carrier")) {
    auto s = IntervalSet::parse(j["carrier"].get<std::string>());
    if (!s || !j.contains("schedule")) return std::nullopt;
    return Member{ResidualMember{*s, j["schedule"].get<std::string>()}};
  }
  return std::nullopt;
}

json certificate_to_json(const Certificate& c) {
  json j;
  j["type"] = "certificate";
  j["kind"] = c.kind_str();
  switch (c.kind) {
    case Certificate::Kind::Convergence: {
      json facts = json::array();
      for (const auto& f : c.facts)
        facts.push_back({{"round", f.round},
                         {"nested", f.nested},
                         {"in_ball", f.in_ball},
                         {"value_bound", f.value_bound},
                         {"small_diam", f.small_diam},
                         {"schedule_avoided", f.schedule_avoided}});
      j["facts"] = std::move(facts);
      break;
    }
    case Certificate::Kind::Divergence: {
      j["alpha"] = format_rat(*c.alpha);
      json gaps = json::array();
      for (const auto& g : c.gaps) gaps.push_back(format_rat(g));
      j["gaps"] = std::move(gaps);
      break;
    }
    case Certificate::Kind::Undecided:
      j["tail_max_gap"] = c.tail_max_gap ? json(format_rat(*c.tail_max_gap)) : json();
      j["tail_min_gap"] = c.tail_min_gap ? json(format_rat(*c.tail_min_gap)) : json();
      j["final_radius"] = c.final_radius ? json(format_rat(*c.final_radius)) : json();
      break;
    case Certificate::Kind::Forfeit:
      j["by"] = player_name(*c.forfeited_by);
      j["index"] = *c.violation_index;
      j["rule"] = c.violation_rule;
      break;
  }
  return j;
}

std::optional<Certificate> certificate_from_json(const json& j) {
  Certificate c;
  const std::string kind = j.value("kind", "");
  if (kind == "convergence") {
    c.kind = Certificate::Kind::Convergence;
    for (const auto& f : j.value("facts", json::array())) {
      RoundFacts rf;
      rf.round = f.value("round", 0u);
      rf.nested = f.value("nested", false);
      rf.in_ball = f.value("in_ball", false);
      rf.value_bound = f.value("value_bound", false);
      rf.small_diam = f.value("small_diam", false);
      rf.schedule_avoided = f.value("schedule_avoided", false);
      c.facts.push_back(rf);
    }
  } else if (kind == "divergence") {
    c.kind = Certificate::Kind::Divergence;
    auto a = parse_rat(j.value("alpha", ""));
    if (!a) return std::nullopt;
    c.alpha = *a;
    for (const auto& g : j.value("gaps", json::array())) {
      auto gr = parse_rat(g.get<std::string>());
      if (!gr) return std::nullopt;
      c.gaps.push_back(*gr);
    }
  } else if (kind == "undecided") {
    c.kind = Certificate::Kind::Undecided;
    if (j.contains("tail_max_gap") && !j["tail_max_gap"].is_null())
      c.tail_max_gap = parse_rat(j["tail_max_gap"].get<std::string>());
    if (j.contains("tail_min_gap") && !j["tail_min_gap"].is_null())
      c.tail_min_gap = parse_rat(j["tail_min_gap"].get<std::string>());
    if (j.contains("final_radius") && !j["final_radius"].is_null())
      c.final_radius = parse_rat(j["final_radius"].get<std::string>());
  } else if (kind == "forfeit") {
    c.kind = Certificate::Kind::Forfeit;
    c.forfeited_by = j.value("by", "I") == std::string("I") ? Player::I : Player::II;
    c.violation_index = j.value("index", std::size_t{0});
    c.violation_rule = j.value("rule", "");
  } else {
    return std::nullopt;
  }
  return c;
}

}  // namespace

std::vector<std::string> transcript_to_jsonl(const Transcript& t, const Certificate& cert) {
  std::vector<std::string> lines;
  json header;
  header["type"] = "header";
  header["schema_version"] = kTranscriptSchemaVersion;
  header["family"] = t.sigma.str();
  header["function"] = t.f.spec_string();
  header["variant"] = t.variant.str();
  header["player_i"] = t.player_i;
  header["player_ii"] = t.player_ii;
  header["horizon"] = t.horizon;
  header["seed"] = t.seed;
  header["declared_alpha"] = t.declared_alpha ? json(format_rat(*t.declared_alpha)) : json();
  lines.push_back(header.dump());

  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    const Move& mv = t.moves[i];
    json j;
    j["type"] = "move";
    j["index"] = i;
    j["player"] = i % 2 == 0 ? "I" : "II";
    std::string legality = "ok";
    if (cert.kind == Certificate::Kind::Forfeit && cert.violation_index &&
        *cert.violation_index == i && cert.violation_rule.rfind("strategy-error", 0) != 0)
      legality = cert.violation_rule;
    j["legality"] = legality;
    switch (mv.kind) {
      case Move::Kind::InitialSet:
        j["kind"] = "initial";
        j["payload"] = member_to_json(*mv.member);
        break;
      case Move::Kind::Response:
        j["kind"] = "response";
        j["payload"] = member_to_json(*mv.member);
        break;
      case Move::Kind::Points: {
        j["kind"] = "points";
        json pts = json::array();
        for (const auto& p : mv.points) pts.push_back(p.str());
        j["payload"] = std::move(pts);
        break;
      }
    }
    lines.push_back(j.dump());
  }
  lines.push_back(certificate_to_json(cert).dump());
  return lines;
}

std::optional<LoadedTranscript> transcript_from_jsonl(const std::vector<std::string>& lines,
                                                      std::string* err) {
  auto fail = [&](const std::string& what) -> std::optional<LoadedTranscript> {
    if (err) *err = what;
    return std::nullopt;
  };
  if (lines.empty()) return fail("empty transcript");
  LoadedTranscript out;
  try {
    const json header = json::parse(lines[0]);
    if (header.value("type", "") != "header") return fail("missing header record");
    out.schema_version = header.value("schema_version", 0);
    auto fam = FamilySpec::parse(header.value("family", ""));
    auto fn = TestFunction::parse(header.value("function", ""));
    auto var = GameVariant::parse(header.value("variant", ""));
    if (!fam || !fn || !var) return fail("bad header fields");
    out.transcript.sigma = *fam;
    out.transcript.f = *fn;
    out.transcript.variant = *var;
    out.transcript.player_i = header.value("player_i", "");
    out.transcript.player_ii = header.value("player_ii", "");
    out.transcript.horizon = header.value("horizon", 0u);
    out.transcript.seed = header.value("seed", std::uint64_t{0});
    if (header.contains("declared_alpha") && !header["declared_alpha"].is_null()) {
      auto a = parse_rat(header["declared_alpha"].get<std::string>());
      if (!a) return fail("bad declared_alpha");
      out.transcript.declared_alpha = *a;
    }
    bool saw_certificate = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const json j = json::parse(lines[i]);
      const std::string type = j.value("type", "");
      if (type == "move") {
        Move mv;
        const std::string kind = j.value("kind", "");
        if (kind == "initial" || kind == "response") {
          mv.kind = kind == "initial" ? Move::Kind::InitialSet : Move::Kind::Response;
          auto m = member_from_json(j["payload"]);
          if (!m) return fail("bad member payload at line " + std::to_string(i));
          mv.member = std::move(*m);
        } else if (kind == "points") {
          mv.kind = Move::Kind::Points;
          for (const auto& p : j["payload"]) {
            auto ep = EpPoint::parse(p.get<std::string>());
            if (!ep) return fail("bad point at line " + std::to_string(i));
            mv.points.push_back(*ep);
          }
        } else {
          return fail("bad move kind at line " + std::to_string(i));
        }
        out.transcript.moves.push_back(std::move(mv));
      } else if (type == "certificate") {
        auto c = certificate_from_json(j);
        if (!c) return fail("bad certificate record");
        out.stored_certificate = *c;
        saw_certificate = true;
      } else {
        return fail("unknown record type at line " + std::to_string(i));
      }
    }
    if (!saw_certificate) return fail("missing certificate record");
  } catch (const std::exception& e) {
    return fail(std::string("json parse error: ") + e.what());
  }
  return out;
}

}  // namespace selgames
