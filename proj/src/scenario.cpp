#include "selgames/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace selgames {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::optional<Scenario> Scenario::parse_text(const std::string& text, std::string* err) {
  Scenario sc;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (err) *err = "expected key = value: " + line;
      return std::nullopt;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "family")
        sc.family = value;
      else if (key == "function")
        sc.function = value;
      else if (key == "variant")
        sc.variant = value;
      else if (key == "player_i")
        sc.player_i = value;
      else if (key == "player_ii")
        sc.player_ii = value;
      else if (key == "horizon")
        sc.horizon = static_cast<unsigned>(std::stoul(value));
      else if (key == "seed")
        sc.seed = std::stoull(value);
      else if (key == "expect")
        sc.expect = value;
      else if (key == "alpha") {
        auto a = parse_rat(value);
        if (!a) throw std::invalid_argument("bad alpha");
        sc.alpha = *a;
      } else if (key == "name")
        sc.name = value;
      else {
        if (err) *err = "unknown key: " + key;
        return std::nullopt;
      }
    } catch (const std::exception& e) {
      if (err) *err = "bad value for " + key + ": " + e.what();
      return std::nullopt;
    }
  }
  return sc;
}

std::optional<Scenario> Scenario::parse_file(const std::string& path, std::string* err) {
  std::ifstream in(path);
  if (!in) {
    if (err) *err = "cannot open " + path;
    return std::nullopt;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto sc = parse_text(buffer.str(), err);
  if (sc && sc->name.empty()) {
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    sc->name = stem;
  }
  return sc;
}

std::string Scenario::text() const {
  std::ostringstream out;
  if (!name.empty()) out << "name = " << name << "\n";
  out << "family = " << family << "\n";
  out << "function = " << function << "\n";
  out << "variant = " << variant << "\n";
  out << "player_i = " << player_i << "\n";
  out << "player_ii = " << player_ii << "\n";
  out << "horizon = " << horizon << "\n";
  out << "seed = " << seed << "\n";
  if (alpha) out << "alpha = " << format_rat(*alpha) << "\n";
  if (!expect.empty()) out << "expect = " << expect << "\n";
  return out.str();
}

namespace {

std::optional<TreeAutomaton> load_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return TreeAutomaton::from_lines(lines);
}

// "i-gap" or "transfer-i ... i-gap ..." declare a divergence level.
std::optional<Rat> derived_alpha(const std::string& player_i_spec) {
  const auto at = player_i_spec.find("i-gap");
  if (at == std::string::npos) return std::nullopt;
  const auto eq = player_i_spec.find("alpha=", at);
  if (eq == std::string::npos) return Rat(1, 2);
  std::string rest = player_i_spec.substr(eq + 6);
  const auto space = rest.find(' ');
  if (space != std::string::npos) rest = rest.substr(0, space);
  auto a = parse_rat(rest);
  return a ? *a : std::optional<Rat>(Rat(1, 2));
}

}  // namespace

std::optional<ResolvedScenario> resolve_scenario(const Scenario& sc,
                                                 std::optional<std::uint64_t> seed_override,
                                                 std::string* err) {
  ResolvedScenario rs;
  rs.name = sc.name.empty() ? "scenario" : sc.name;
  rs.horizon = sc.horizon;
  rs.seed = seed_override.value_or(sc.seed);
  rs.expect = sc.expect;
  auto fam = FamilySpec::parse(sc.family);
  if (!fam) {
    if (err) *err = "bad family: " + sc.family;
    return std::nullopt;
  }
  rs.sigma = *fam;
  auto fn = TestFunction::parse(sc.function, load_tree_file);
  if (!fn) {
    if (err) *err = "bad function: " + sc.function;
    return std::nullopt;
  }
  rs.f = *fn;
  auto var = GameVariant::parse(sc.variant);
  if (!var) {
    if (err) *err = "bad variant: " + sc.variant;
    return std::nullopt;
  }
  rs.variant = *var;
  rs.alpha = sc.alpha ? sc.alpha : derived_alpha(sc.player_i);

  StrategyBuildContext ctx{rs.sigma, rs.f, rs.variant, rs.seed};
  auto si = make_strategy(sc.player_i, Player::I, ctx, err);
  if (!si) return std::nullopt;
  auto sii = make_strategy(sc.player_ii, Player::II, ctx, err);
  if (!sii) return std::nullopt;
  rs.player_i = std::move(*si);
  rs.player_ii = std::move(*sii);
  return rs;
}

PlayResult run_scenario(const ResolvedScenario& rs) {
  return play(rs.sigma, rs.f, rs.variant, rs.player_i, rs.player_ii, rs.horizon, rs.seed, rs.alpha);
}

namespace {

Scenario built_in(const std::string& name, const std::string& family, const std::string& function,
                  const std::string& variant, const std::string& pi, const std::string& pii,
                  const std::string& expect) {
  Scenario sc;
  sc.name = name;
  sc.family = family;
  sc.function = function;
  sc.variant = variant;
  sc.player_i = pi;
  sc.player_ii = pii;
  sc.horizon = 32;
  sc.seed = 1;
  sc.expect = expect;
  return sc;
}

const std::vector<Scenario>& presets() {
  static const std::vector<Scenario> kPresets = {
      built_in("cliquish-thomae", "clo", "thomae", "g1", "adversary:random", "ii-hsop",
               "convergence"),
      built_in("non-cliquish-dirichlet", "clo", "dirichlet 1 0", "g1", "i-gap alpha=1/2",
               "adversary:random", "divergence"),
      built_in("measure-thomae", "measure", "thomae", "g1", "adversary:random", "ii-hsop",
               "convergence"),
      built_in("marczewski-dirichlet", "tree", "dirichlet 1 0", "g1", "adversary:random",
               "ii-hsop", "convergence"),
      built_in("baire-dirichlet", "residual dyadics", "dirichlet 1 0", "g1", "adversary:random",
               "ii-baire", "convergence"),
      built_in("blocks-thomae", "clo", "thomae", "gfin", "adversary:random",
               "transfer-ii ii-hsop", "convergence"),
  };
  return kPresets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::optional<Scenario> preset_scenario(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

AnalyzeReport analyze_pair(const FamilySpec& sigma, const TestFunction& f) {
  AnalyzeReport report;
  std::ostringstream out;
  out << "family: " << sigma.str() << "\n";
  out << "function: " << f.spec_string() << "\n";
  if (sigma.kind == FamilyKind::Clo) {
    const auto cq = cliquish_decide(f);
    report.cliquish = cq;
    out << "cliquish: " << (cq ? (*cq ? "yes" : "no") : "undecidable") << "\n";
  }
  const std::vector<Rat> alphas{Rat(1), Rat(1, 2), Rat(1, 4), Rat(1, 8)};
  bool witnessed = false, capped = false;
  Rat witness_alpha;
  for (const auto& a : alphas) {
    const auto outcome = hsop_refine(sigma, f, full_member(sigma), a);
    if (outcome.witness) {
      witnessed = true;
      witness_alpha = a;
      break;
    }
    if (outcome.depth_cap_reached) {
      capped = true;
      break;
    }
  }
  if (witnessed) {
    report.supported = true;
    report.hsop = "no (witness alpha=" + format_rat(witness_alpha) + ")";
    report.predicted = "I";
  } else if (capped) {
    report.hsop = "undecided";
    report.predicted = "unknown";
  } else {
    report.supported = true;
    report.hsop = "yes";
    report.predicted = "II";
  }
  out << "HSOP: " << report.hsop << "\n";
  out << "predicted winner: " << report.predicted << "\n";
  report.text = out.str();
  return report;
}

std::string tournament_row(const ResolvedScenario& rs, const PlayResult& result) {
  const auto& t = result.transcript;
  const std::size_t responses = t.num_responses();
  const std::size_t rounds = std::min(t.num_blocks(), responses > 0 ? responses - 1 : 0);
  Rat max_gap = 0;
  const auto flat = t.flat_points();
  for (std::size_t i = 1; i < flat.size(); ++i)
    max_gap = std::max(max_gap, rat_abs(t.f.eval(flat[i]) - t.f.eval(flat[i - 1])));
  std::string final_radius = "";
  if (responses > 0 && t.response(responses - 1))
    final_radius = format_rat(member_diameter(*t.response(responses - 1)));
  std::ostringstream out;
  out << rs.name << "," << rs.seed << "," << result.certificate.kind_str() << "," << rounds << ","
      << (flat.size() >= 2 ? format_rat(max_gap) : "") << "," << final_radius;
  return out.str();
}

}  // namespace selgames
