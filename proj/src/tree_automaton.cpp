#include "selgames/tree_automaton.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace selgames {

namespace {

using Delta = std::vector<std::array<int, 2>>;

// Keep only states that are reachable from start and admit an infinite run.
// Returns the surviving states mask; false if start dies.
bool trim_mask(int start, const Delta& delta, std::vector<bool>& alive) {
  const int n = static_cast<int>(delta.size());
  // Liveness: repeatedly drop states with no surviving out-edge.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < n; ++q) {
      if (!alive[q]) continue;
      bool any = false;
      for (int b = 0; b < 2; ++b) {
        const int t = delta[q][b];
        if (t >= 0 && alive[t]) any = true;
      }
      if (!any) {
        alive[q] = false;
        changed = true;
      }
    }
  }
  if (!alive[start]) return false;
  // Reachability.
  std::vector<bool> reach(n, false);
  std::deque<int> bfs{start};
  reach[start] = true;
  while (!bfs.empty()) {
    const int q = bfs.front();
    bfs.pop_front();
    for (int b = 0; b < 2; ++b) {
      const int t = delta[q][b];
      if (t >= 0 && alive[t] && !reach[t]) {
        reach[t] = true;
        bfs.push_back(t);
      }
    }
  }
  for (int q = 0; q < n; ++q) alive[q] = alive[q] && reach[q];
  return true;
}

// Moore partition refinement on a trimmed partial DFA; merges
// language-equivalent states (safety semantics, so no accepting split).
std::vector<int> minimize_classes(const Delta& delta) {
  const int n = static_cast<int>(delta.size());
  std::vector<int> cls(n, 0);
  auto renumber = [&](const std::vector<std::array<int, 3>>& sig) {
    std::map<std::array<int, 3>, int> ids;
    std::vector<int> out(n);
    for (int q = 0; q < n; ++q) {
      auto [it, inserted] = ids.emplace(sig[q], static_cast<int>(ids.size()));
      out[q] = it->second;
    }
    return out;
  };
  for (;;) {
    std::vector<std::array<int, 3>> sig(n);
    for (int q = 0; q < n; ++q)
      sig[q] = {cls[q], delta[q][0] < 0 ? -1 : cls[delta[q][0]],
                delta[q][1] < 0 ? -1 : cls[delta[q][1]]};
    std::vector<int> next = renumber(sig);
    if (next == cls) return cls;
    cls = std::move(next);
  }
}

struct RawNfa {
  // transitions[q][b] = successor list
  std::vector<std::array<std::vector<int>, 2>> trans;
  std::vector<int> starts;
};

int find_or_add(std::map<std::vector<int>, int>& ids, const std::vector<int>& key,
                std::deque<std::vector<int>>& todo) {
  auto it = ids.find(key);
  if (it != ids.end()) return it->second;
  const int id = static_cast<int>(ids.size());
  ids.emplace(key, id);
  todo.push_back(key);
  return id;
}

}  // namespace

std::optional<TreeAutomaton> TreeAutomaton::make(int start, Delta delta) {
  if (start < 0 || start >= static_cast<int>(delta.size())) return std::nullopt;
  std::vector<bool> alive(delta.size(), true);
  if (!trim_mask(start, delta, alive)) return std::nullopt;
  Delta cut(delta.size(), {-1, -1});
  for (std::size_t q = 0; q < delta.size(); ++q) {
    if (!alive[q]) continue;
    for (int b = 0; b < 2; ++b) {
      const int t = delta[q][b];
      cut[q][b] = (t >= 0 && alive[t]) ? t : -1;
    }
  }
  const std::vector<int> cls = minimize_classes(cut);
  // Quotient automaton on classes, then canonical BFS numbering from start.
  std::map<int, std::array<int, 2>> qdelta;
  for (std::size_t q = 0; q < cut.size(); ++q) {
    if (!alive[q]) continue;
    auto& row = qdelta[cls[q]];
    for (int b = 0; b < 2; ++b) row[b] = cut[q][b] < 0 ? -1 : cls[cut[q][b]];
  }
  std::map<int, int> order;
  std::deque<int> bfs{cls[start]};
  order.emplace(cls[start], 0);
  while (!bfs.empty()) {
    const int c = bfs.front();
    bfs.pop_front();
    for (int b = 0; b < 2; ++b) {
      const int t = qdelta[c][b];
      if (t >= 0 && !order.count(t)) {
        order.emplace(t, static_cast<int>(order.size()));
        bfs.push_back(t);
      }
    }
  }
  Delta out(order.size(), {-1, -1});
  for (const auto& [c, id] : order)
    for (int b = 0; b < 2; ++b) {
      const int t = qdelta[c][b];
      out[id][b] = t < 0 ? -1 : order.at(t);
    }
  return TreeAutomaton(std::move(out));
}

TreeAutomaton TreeAutomaton::full() {
  auto a = make(0, {{0, 0}});
  return *a;
}

namespace {
// Expansion of a dyadic rational as a bit function with a constant tail.
struct TailBits {
  std::string head;
  char tail;
  char at(std::size_t i) const { return i < head.size() ? head[i] : tail; }
};

TailBits zeros_tail_expansion(const Rat& v) {
  const EpPoint p = EpPoint::from_rat(v);
  if (v == 1) return {"", '1'};
  return {p.preperiod(), '0'};
}

TailBits ones_tail_expansion(const Rat& v) {
  if (v == 0) return {"", '0'};
  if (v == 1) return {"", '1'};
  const EpPoint p = EpPoint::from_rat(v);
  auto dual = p.dual_expansion();
  return {dual->first, '1'};
}
}  // namespace

TreeAutomaton TreeAutomaton::interval(const Rat& l, const Rat& r) {
  if (!(0 <= l && l < r && r <= 1) || !rat_is_dyadic(l) || !rat_is_dyadic(r))
    throw std::invalid_argument("TreeAutomaton::interval: need dyadic 0 <= l < r <= 1");
  const TailBits lo = zeros_tail_expansion(l);
  const TailBits hi = ones_tail_expansion(r);
  const std::size_t sat = std::max(lo.head.size(), hi.head.size());
  // State: (position capped at sat, still on the l-boundary, on the r-boundary).
  auto encode = [&](std::size_t i, bool onl, bool onr) {
    return static_cast<int>(std::min(i, sat) * 4 + onl * 2 + onr);
  };
  Delta delta((sat + 1) * 4, {-1, -1});
  for (std::size_t i = 0; i <= sat; ++i)
    for (int onl = 0; onl < 2; ++onl)
      for (int onr = 0; onr < 2; ++onr) {
        const int id = encode(i, onl, onr);
        for (int bit = 0; bit < 2; ++bit) {
          const char c = bit ? '1' : '0';
          bool nl = onl, nr = onr;
          if (onl) {
            if (c < lo.at(i)) continue;  // word would drop below l
            nl = (c == lo.at(i));
          }
          if (onr) {
            if (c > hi.at(i)) continue;  // word would rise above r
            nr = (c == hi.at(i));
          }
          delta[id][bit] = encode(i + 1, nl, nr);
        }
      }
  auto a = make(encode(0, true, true), std::move(delta));
  assert(a);
  return *a;
}

bool TreeAutomaton::run_simulates(const std::string& pre, const std::string& per) const {
  int q = 0;
  for (char c : pre) {
    q = delta_[q][c == '1'];
    if (q < 0) return false;
  }
  std::set<int> seen_at_phase0{q};
  for (int pass = 0; pass <= num_states(); ++pass) {
    for (char c : per) {
      q = delta_[q][c == '1'];
      if (q < 0) return false;
    }
    if (!seen_at_phase0.insert(q).second) return true;
  }
  return true;  // unreachable: a state must repeat within num_states passes
}

bool TreeAutomaton::member(const EpPoint& p) const {
  if (run_simulates(p.preperiod(), p.period())) return true;
  if (auto dual = p.dual_expansion()) return run_simulates(dual->first, dual->second);
  return false;
}

bool TreeAutomaton::constant_run_from(int q, int bit) const {
  std::set<int> seen;
  while (q >= 0) {
    if (!seen.insert(q).second) return true;
    q = delta_[q][bit];
  }
  return false;
}

namespace {
// NFA whose language is L(b) plus the dual expansions of the eventually
// constant words of L(b): exactly the words denoting points of [[b]].
RawNfa saturate_impl(const TreeAutomaton& b) {
  const int n = b.num_states();
  RawNfa nfa;
  nfa.trans.resize(n + 2);
  const int zero_sink = n, one_sink = n + 1;
  nfa.trans[zero_sink][0].push_back(zero_sink);
  nfa.trans[one_sink][1].push_back(one_sink);
  for (int q = 0; q < n; ++q)
    for (int bit = 0; bit < 2; ++bit) {
      const int t = b.next(q, bit);
      if (t >= 0) nfa.trans[q][bit].push_back(t);
    }
  for (int q = 0; q < n; ++q) {
    // u 1 0^w in L(b)  =>  add u 0 1^w ; and symmetrically.
    const int t1 = b.next(q, 1);
    if (t1 >= 0) {
      // does an all-zero run exist from t1?
      int s = t1;
      std::set<int> seen;
      bool zrun = false;
      while (s >= 0) {
        if (!seen.insert(s).second) {
          zrun = true;
          break;
        }
        s = b.next(s, 0);
      }
      if (zrun) nfa.trans[q][0].push_back(one_sink);
    }
    const int t0 = b.next(q, 0);
    if (t0 >= 0) {
      int s = t0;
      std::set<int> seen;
      bool orun = false;
      while (s >= 0) {
        if (!seen.insert(s).second) {
          orun = true;
          break;
        }
        s = b.next(s, 1);
      }
      if (orun) nfa.trans[q][1].push_back(zero_sink);
    }
  }
  nfa.starts = {0};
  return nfa;
}

std::vector<int> nfa_step(const RawNfa& nfa, const std::vector<int>& set, int bit) {
  std::set<int> out;
  for (int q : set)
    for (int t : nfa.trans[q][bit]) out.insert(t);
  return std::vector<int>(out.begin(), out.end());
}
}  // namespace

std::optional<EpPoint> TreeAutomaton::subset_counterexample(const TreeAutomaton& b) const {
  const RawNfa nfa = saturate_impl(b);
  std::map<std::pair<int, std::vector<int>>, std::string> seen;
  std::deque<std::pair<int, std::vector<int>>> todo;
  const std::pair<int, std::vector<int>> start{0, nfa.starts};
  seen.emplace(start, "");
  todo.push_back(start);
  while (!todo.empty()) {
    auto [p, set] = todo.front();
    const std::string prefix = seen.at({p, set});
    todo.pop_front();
    for (int bit = 0; bit < 2; ++bit) {
      const int pn = delta_[p][bit];
      if (pn < 0) continue;
      std::vector<int> sn = nfa_step(nfa, set, bit);
      const std::string word = prefix + (bit ? '1' : '0');
      if (sn.empty()) {
        // Dead in b: extend greedily inside *this to a concrete lasso point.
        std::string bits = word;
        std::vector<int> path{pn};
        int q = pn;
        for (;;) {
          const int nb = delta_[q][0] >= 0 ? 0 : 1;
          q = delta_[q][nb];
          bits += nb ? '1' : '0';
          auto it = std::find(path.begin(), path.end(), q);
          if (it != path.end()) {
            const std::size_t at = static_cast<std::size_t>(it - path.begin());
            const std::size_t pre_len = word.size() + at + 1;
            return EpPoint::make(bits.substr(0, pre_len), bits.substr(pre_len));
          }
          path.push_back(q);
        }
      }
      std::pair<int, std::vector<int>> key{pn, std::move(sn)};
      if (!seen.count(key)) {
        seen.emplace(key, word);
        todo.push_back(key);
      }
    }
  }
  return std::nullopt;
}

bool TreeAutomaton::subset_of(const TreeAutomaton& b) const {
  return !subset_counterexample(b).has_value();
}

bool TreeAutomaton::set_intersects(const TreeAutomaton& b) const {
  const RawNfa nfa = saturate_impl(b);
  // Liveness of the product graph: does some infinite joint run exist?
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> states;
  std::deque<std::pair<int, int>> todo{{0, nfa.starts[0]}};
  ids.emplace(todo.front(), 0);
  states.push_back(todo.front());
  std::vector<std::vector<int>> succ;
  succ.emplace_back();
  while (!todo.empty()) {
    auto [p, q] = todo.front();
    todo.pop_front();
    const int id = ids.at({p, q});
    for (int bit = 0; bit < 2; ++bit) {
      const int pn = delta_[p][bit];
      if (pn < 0) continue;
      for (int qn : nfa.trans[q][bit]) {
        std::pair<int, int> key{pn, qn};
        auto it = ids.find(key);
        if (it == ids.end()) {
          it = ids.emplace(key, static_cast<int>(states.size())).first;
          states.push_back(key);
          succ.emplace_back();
          todo.push_back(key);
        }
        succ[id].push_back(it->second);
      }
    }
  }
  // Prune states without successors until stable; the start must survive.
  std::vector<bool> alive(states.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!alive[i]) continue;
      bool any = false;
      for (int t : succ[i])
        if (alive[t]) any = true;
      if (!any) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  return alive[0];
}

std::optional<TreeAutomaton> TreeAutomaton::intersect_interval(const DyadicInterval& iv) const {
  const TreeAutomaton box = interval(iv.left, iv.right);
  std::map<std::pair<int, int>, int> ids;
  std::deque<std::pair<int, int>> todo{{0, 0}};
  ids.emplace(todo.front(), 0);
  Delta delta;
  delta.push_back({-1, -1});
  while (!todo.empty()) {
    auto [p, q] = todo.front();
    todo.pop_front();
    const int id = ids.at({p, q});
    for (int bit = 0; bit < 2; ++bit) {
      const int pn = delta_[p][bit], qn = box.next(q, bit);
      if (pn < 0 || qn < 0) continue;
      std::pair<int, int> key{pn, qn};
      auto it = ids.find(key);
      if (it == ids.end()) {
        it = ids.emplace(key, static_cast<int>(delta.size())).first;
        delta.push_back({-1, -1});
        todo.push_back(key);
      }
      delta[id][bit] = it->second;
    }
  }
  return make(0, std::move(delta));
}

Rat TreeAutomaton::measure_upper(unsigned n) const {
  std::vector<BigInt> cnt(delta_.size(), 0);
  cnt[0] = 1;
  for (unsigned step = 0; step < n; ++step) {
    std::vector<BigInt> next(delta_.size(), 0);
    for (std::size_t q = 0; q < delta_.size(); ++q) {
      if (cnt[q] == 0) continue;
      for (int b = 0; b < 2; ++b)
        if (delta_[q][b] >= 0) next[delta_[q][b]] += cnt[q];
    }
    cnt = std::move(next);
  }
  BigInt total = 0;
  for (const auto& c : cnt) total += c;
  return Rat(total, int_pow2(n));
}

bool TreeAutomaton::is_dyadic_free() const {
  for (int q = 0; q < num_states(); ++q)
    if (constant_run_from(q, 0) || constant_run_from(q, 1)) return false;
  return true;
}

bool TreeAutomaton::has_nondyadic_point() const {
  // Some strongly connected component carries both a 0-edge and a 1-edge.
  const int n = num_states();
  std::vector<int> comp(n, -1), low(n, 0), idx(n, -1), stackmark(n, 0);
  std::vector<int> stk;
  int counter = 0, ncomp = 0;
  // Iterative Tarjan.
  struct Frame {
    int q, edge;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stk.push_back(root);
    stackmark[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge < 2) {
        const int t = delta_[f.q][f.edge++];
        if (t < 0) continue;
        if (idx[t] < 0) {
          idx[t] = low[t] = counter++;
          stk.push_back(t);
          stackmark[t] = 1;
          frames.push_back({t, 0});
        } else if (stackmark[t]) {
          low[f.q] = std::min(low[f.q], idx[t]);
        }
      } else {
        const int q = f.q;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().q] = std::min(low[frames.back().q], low[q]);
        if (low[q] == idx[q]) {
          for (;;) {
            const int s = stk.back();
            stk.pop_back();
            stackmark[s] = 0;
            comp[s] = ncomp;
            if (s == q) break;
          }
          ++ncomp;
        }
      }
    }
  }
  std::vector<std::array<bool, 2>> has_bit(ncomp, {false, false});
  for (int q = 0; q < n; ++q)
    for (int b = 0; b < 2; ++b) {
      const int t = delta_[q][b];
      if (t >= 0 && comp[t] == comp[q]) has_bit[comp[q]][b] = true;
    }
  for (int c = 0; c < ncomp; ++c)
    if (has_bit[c][0] && has_bit[c][1]) return true;
  return false;
}

namespace {
EpPoint greedy_walk(const TreeAutomaton& a, int prefer) {
  std::vector<int> path{0};
  std::string bits;
  int q = 0;
  for (;;) {
    const int nb = a.next(q, prefer) >= 0 ? prefer : 1 - prefer;
    q = a.next(q, nb);
    bits += nb ? '1' : '0';
    auto it = std::find(path.begin(), path.end(), q);
    if (it != path.end()) {
      const std::size_t at = static_cast<std::size_t>(it - path.begin());
      return EpPoint::make(bits.substr(0, at), bits.substr(at));
    }
    path.push_back(q);
  }
}
}  // namespace

EpPoint TreeAutomaton::min_point() const { return greedy_walk(*this, 0); }
EpPoint TreeAutomaton::max_point() const { return greedy_walk(*this, 1); }

std::pair<Rat, Rat> TreeAutomaton::hull() const {
  return {min_point().to_rat(), max_point().to_rat()};
}

namespace {
struct KernelInfo {
  std::optional<TreeAutomaton> kernel;
  struct Removed {
    std::vector<int> cycle;
    EpPoint point;
  };
  std::vector<Removed> removed;
};

KernelInfo kernel_with_info(const TreeAutomaton& a) {
  const int n = a.num_states();
  Delta delta(n);
  for (int q = 0; q < n; ++q) delta[q] = {a.next(q, 0), a.next(q, 1)};
  std::vector<bool> alive(n, true);
  KernelInfo info;
  for (;;) {
    if (!trim_mask(0, delta, alive)) {
      info.kernel = std::nullopt;
      return info;
    }
    for (int q = 0; q < n; ++q)
      if (!alive[q]) delta[q] = {-1, -1};
    for (int q = 0; q < n; ++q)
      for (int b = 0; b < 2; ++b)
        if (delta[q][b] >= 0 && !alive[delta[q][b]]) delta[q][b] = -1;
    // Out-degree-1 states and the functional graph they induce.
    std::vector<int> lone(n, -1), lone_bit(n, -1);
    for (int q = 0; q < n; ++q) {
      if (!alive[q]) continue;
      const bool d0 = delta[q][0] >= 0, d1 = delta[q][1] >= 0;
      if (d0 != d1) {
        lone[q] = d0 ? delta[q][0] : delta[q][1];
        lone_bit[q] = d0 ? 0 : 1;
      }
    }
    // Find a cycle within the induced subgraph, deterministically.
    std::vector<int> color(n, 0);  // 0 unseen, 1 on path, 2 done
    std::vector<int> cycle;
    for (int q0 = 0; q0 < n && cycle.empty(); ++q0) {
      if (lone[q0] < 0 || color[q0]) continue;
      std::vector<int> path;
      int q = q0;
      while (q >= 0 && lone[q] >= 0 && color[q] == 0) {
        color[q] = 1;
        path.push_back(q);
        q = lone[q];
      }
      if (q >= 0 && color[q] == 1 && lone[q] >= 0) {
        auto it = std::find(path.begin(), path.end(), q);
        cycle.assign(it, path.end());
      }
      for (int s : path) color[s] = 2;
    }
    if (cycle.empty()) break;
    // Trapped point: BFS path from the start to the cycle, then forced bits.
    std::vector<int> parent(n, -2), pbit(n, -1);
    std::deque<int> bfs{0};
    parent[0] = -1;
    while (!bfs.empty()) {
      const int q = bfs.front();
      bfs.pop_front();
      for (int b = 0; b < 2; ++b) {
        const int t = delta[q][b];
        if (t >= 0 && parent[t] == -2) {
          parent[t] = q;
          pbit[t] = b;
          bfs.push_back(t);
        }
      }
    }
    std::string pre;
    for (int q = cycle.front(); parent[q] != -1; q = parent[q]) pre += pbit[q] ? '1' : '0';
    std::reverse(pre.begin(), pre.end());
    std::string per;
    for (int q : cycle) per += lone_bit[q] ? '1' : '0';
    info.removed.push_back({cycle, EpPoint::make(pre, per)});
    for (int q : cycle) alive[q] = false;
  }
  Delta cut(n, {-1, -1});
  for (int q = 0; q < n; ++q)
    if (alive[q]) cut[q] = delta[q];
  info.kernel = TreeAutomaton::make(0, std::move(cut));
  return info;
}
}  // namespace

std::optional<TreeAutomaton> TreeAutomaton::perfect_kernel() const {
  return kernel_with_info(*this).kernel;
}

TreeAutomaton::PerfectnessReport TreeAutomaton::is_perfect() const {
  KernelInfo info = kernel_with_info(*this);
  PerfectnessReport report;
  if (info.kernel && subset_of(*info.kernel)) {
    report.perfect = true;
    return report;
  }
  report.perfect = false;
  for (const auto& rem : info.removed) {
    if (!info.kernel || !info.kernel->member(rem.point)) {
      report.witness_cycle = rem.cycle;
      report.witness_point = rem.point;
      return report;
    }
  }
  // Some branch was lost even though every recorded cycle point survived via
  // a dual branch; still report the first pruned cycle.
  assert(!info.removed.empty());
  report.witness_cycle = info.removed.front().cycle;
  report.witness_point = info.removed.front().point;
  return report;
}

namespace {
// Words that differ from the given expansion somewhere in the first depth
// bits. Removing this cylinder is how a single point gets separated.
Delta cylinder_complement(const std::string& pre, const std::string& per, unsigned depth,
                          int& start_out) {
  auto bit_at = [&](unsigned i) -> int {
    if (i < pre.size()) return pre[i] == '1';
    return per[(i - pre.size()) % per.size()] == '1';
  };
  // states: 0..depth-1 match positions, then FREE = depth.
  Delta delta(depth + 1, {-1, -1});
  const int free_state = static_cast<int>(depth);
  delta[free_state] = {free_state, free_state};
  for (unsigned i = 0; i < depth; ++i) {
    const int match = bit_at(i);
    if (i + 1 < depth) delta[i][match] = static_cast<int>(i + 1);
    delta[i][1 - match] = free_state;
  }
  start_out = 0;
  return delta;
}

std::optional<TreeAutomaton> product_raw(const TreeAutomaton& a, int bstart, const Delta& bdelta) {
  std::map<std::pair<int, int>, int> ids;
  std::deque<std::pair<int, int>> todo{{0, bstart}};
  ids.emplace(todo.front(), 0);
  Delta delta;
  delta.push_back({-1, -1});
  while (!todo.empty()) {
    auto [p, q] = todo.front();
    todo.pop_front();
    const int id = ids.at({p, q});
    for (int bit = 0; bit < 2; ++bit) {
      const int pn = a.next(p, bit), qn = bdelta[q][bit];
      if (pn < 0 || qn < 0) continue;
      std::pair<int, int> key{pn, qn};
      auto it = ids.find(key);
      if (it == ids.end()) {
        it = ids.emplace(key, static_cast<int>(delta.size())).first;
        delta.push_back({-1, -1});
        todo.push_back(key);
      }
      delta[id][bit] = it->second;
    }
  }
  return TreeAutomaton::make(0, std::move(delta));
}
}  // namespace

std::optional<TreeAutomaton> TreeAutomaton::avoid_points(const std::vector<EpPoint>& pts) const {
  TreeAutomaton current = *this;
  for (const EpPoint& p : pts) {
    std::vector<std::pair<std::string, std::string>> expansions{{p.preperiod(), p.period()}};
    if (auto dual = p.dual_expansion()) expansions.push_back(*dual);
    for (const auto& [pre, per] : expansions) {
      if (!current.run_simulates(pre, per)) continue;
      const unsigned cap = static_cast<unsigned>(pre.size() + 2 * per.size()) +
                           static_cast<unsigned>(boost::multiprecision::msb(
                               BigInt(std::max(2, current.num_states())))) +
                           5;
      bool done = false;
      for (unsigned depth = 1; depth <= cap && !done; ++depth) {
        int cstart = 0;
        const Delta comp = cylinder_complement(pre, per, depth, cstart);
        auto prod = product_raw(current, cstart, comp);
        if (!prod) continue;
        auto kern = prod->perfect_kernel();
        if (!kern) continue;
        current = *kern;
        done = true;
      }
      if (!done) return std::nullopt;  // separation failed within the cap
    }
    assert(!current.member(p));
  }
  return current;
}

std::optional<TreeAutomaton> TreeAutomaton::dyadic_free_kernel() const {
  for (unsigned limit = 4; limit <= 256; limit *= 2) {
    // "No constant run of length limit": states (last bit, run length).
    const int nstates = 1 + 2 * static_cast<int>(limit - 1);
    auto encode = [&](int bit, unsigned len) {
      return 1 + bit * static_cast<int>(limit - 1) + static_cast<int>(len - 1);
    };
    Delta delta(nstates, {-1, -1});
    for (int b = 0; b < 2; ++b) delta[0][b] = encode(b, 1);
    for (int b = 0; b < 2; ++b)
      for (unsigned len = 1; len + 1 <= limit; ++len) {
        const int id = encode(b, len);
        delta[id][1 - b] = encode(1 - b, 1);
        if (len + 1 < limit) delta[id][b] = encode(b, len + 1);
      }
    auto prod = product_raw(*this, 0, delta);
    if (!prod) continue;
    auto kern = prod->perfect_kernel();
    if (!kern) continue;
    assert(kern->is_dyadic_free());
    return kern;
  }
  return std::nullopt;
}

TreeAutomaton TreeAutomaton::unite(const std::vector<TreeAutomaton>& parts) {
  if (parts.empty()) throw std::invalid_argument("unite: empty union");
  // Subset construction over the disjoint union of the parts.
  std::vector<int> offsets;
  int total = 0;
  for (const auto& p : parts) {
    offsets.push_back(total);
    total += p.num_states();
  }
  auto step = [&](const std::vector<int>& set, int bit) {
    std::set<int> out;
    for (int global : set) {
      std::size_t which = 0;
      while (which + 1 < parts.size() && offsets[which + 1] <= global) ++which;
      const int t = parts[which].next(global - offsets[which], bit);
      if (t >= 0) out.insert(offsets[which] + t);
    }
    return std::vector<int>(out.begin(), out.end());
  };
  std::vector<int> start;
  for (std::size_t i = 0; i < parts.size(); ++i) start.push_back(offsets[i]);
  std::map<std::vector<int>, int> ids;
  std::deque<std::vector<int>> todo;
  find_or_add(ids, start, todo);
  Delta delta;
  delta.push_back({-1, -1});
  while (!todo.empty()) {
    const std::vector<int> set = todo.front();
    todo.pop_front();
    const int id = ids.at(set);
    while (static_cast<int>(delta.size()) <= id) delta.push_back({-1, -1});
    for (int bit = 0; bit < 2; ++bit) {
      std::vector<int> nxt = step(set, bit);
      if (nxt.empty()) continue;
      const int tid = find_or_add(ids, nxt, todo);
      while (static_cast<int>(delta.size()) <= tid) delta.push_back({-1, -1});
      delta[id][bit] = tid;
    }
  }
  auto a = make(0, std::move(delta));
  assert(a);
  return *a;
}

bool TreeAutomaton::is_finite_set() const {
  // Infinite iff some state on a cycle reaches a branching state.
  const int n = num_states();
  std::vector<bool> branching(n, false);
  for (int q = 0; q < n; ++q) branching[q] = delta_[q][0] >= 0 && delta_[q][1] >= 0;
  // reaches_branch by reverse closure.
  std::vector<bool> reaches(branching);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < n; ++q) {
      if (reaches[q]) continue;
      for (int b = 0; b < 2; ++b)
        if (delta_[q][b] >= 0 && reaches[delta_[q][b]]) {
          reaches[q] = true;
          changed = true;
        }
    }
  }
  // on_cycle: q lies on a cycle iff q is reachable from one of its successors.
  for (int q = 0; q < n; ++q) {
    if (!reaches[q]) continue;
    std::vector<bool> seen(n, false);
    std::deque<int> bfs;
    for (int b = 0; b < 2; ++b)
      if (delta_[q][b] >= 0) bfs.push_back(delta_[q][b]);
    bool on_cycle = false;
    while (!bfs.empty() && !on_cycle) {
      const int s = bfs.front();
      bfs.pop_front();
      if (seen[s]) continue;
      seen[s] = true;
      if (s == q) on_cycle = true;
      for (int b = 0; b < 2; ++b)
        if (delta_[s][b] >= 0 && !seen[delta_[s][b]]) bfs.push_back(delta_[s][b]);
    }
    if (on_cycle) return false;
  }
  return true;
}

std::vector<EpPoint> TreeAutomaton::enumerate_finite() const {
  if (!is_finite_set()) throw std::logic_error("enumerate_finite: set is infinite");
  std::vector<EpPoint> out;
  // DFS; each branch closes into a lasso within num_states steps.
  struct Item {
    int q;
    std::string bits;
    std::vector<int> path;
  };
  std::vector<Item> stack{{0, "", {0}}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    for (int b = 0; b < 2; ++b) {
      const int t = delta_[it.q][b];
      if (t < 0) continue;
      std::string bits = it.bits + (b ? '1' : '0');
      auto found = std::find(it.path.begin(), it.path.end(), t);
      if (found != it.path.end()) {
        const std::size_t at = static_cast<std::size_t>(found - it.path.begin());
        out.push_back(EpPoint::make(bits.substr(0, at), bits.substr(at)));
        continue;
      }
      std::vector<int> path = it.path;
      path.push_back(t);
      stack.push_back({t, std::move(bits), std::move(path)});
    }
  }
  std::sort(out.begin(), out.end(), [](const EpPoint& a, const EpPoint& b) { return a < b; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> TreeAutomaton::to_lines() const {
  std::vector<std::string> lines{"start 0"};
  for (int q = 0; q < num_states(); ++q)
    for (int b = 0; b < 2; ++b)
      if (delta_[q][b] >= 0)
        lines.push_back(std::to_string(q) + " " + std::to_string(b) + " " +
                        std::to_string(delta_[q][b]));
  return lines;
}

std::optional<TreeAutomaton> TreeAutomaton::from_lines(const std::vector<std::string>& lines) {
  int start = -1;
  std::vector<std::array<int, 3>> edges;
  int max_state = -1;
  for (const auto& raw : lines) {
    std::istringstream in(raw);
    std::string first;
    if (!(in >> first)) continue;
    if (first == "start") {
      if (!(in >> start)) return std::nullopt;
      max_state = std::max(max_state, start);
      continue;
    }
    int q, b, t;
    try {
      q = std::stoi(first);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (!(in >> b >> t) || (b != 0 && b != 1) || q < 0 || t < 0) return std::nullopt;
    edges.push_back({q, b, t});
    max_state = std::max({max_state, q, t});
  }
  if (start < 0 || max_state < 0) return std::nullopt;
  Delta delta(max_state + 1, {-1, -1});
  for (const auto& [q, b, t] : edges) {
    if (delta[q][b] >= 0 && delta[q][b] != t) return std::nullopt;  // nondeterministic
    delta[q][b] = t;
  }
  return make(start, std::move(delta));
}

}  // namespace selgames
