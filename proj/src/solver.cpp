#include "cubictsp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace cubictsp {

namespace {

EdgeId min_unforced_at(const Multigraph& g, VertexId v) {
  EdgeId best = kNone;
  for (EdgeId e : g.vertex(v).inc)
    if (g.edge_alive(e) && !g.edge(e).forced && e < best) best = e;
  return best;
}

struct NodeResult {
  std::optional<Solution> sol;
  bool quick_return = false;  // subtree resolved inside its own reduction
  std::int64_t s_fix = 0;     // measure at the node's reduction fixpoint
};

class TspSearch {
 public:
  TspSearch(Multigraph& g, const SolveOptions& opts)
      : g_(g),
        opts_(opts),
        eng_(g, EngineOptions{opts.check_invariants, false, opts.trace, opts.on_fire}) {
    weights_nonneg_ = true;
    for (EdgeId e : g.live_edges()) weights_nonneg_ = weights_nonneg_ && g.edge(e).weight >= 0;
  }

  SolveReport run() {
    eng_.stats().s0 = eng_.measure_s();
    eng_.stats().u0 = eng_.measure_u();
    TrailMark m0 = eng_.mark();
    NodeResult r = node(0);
    eng_.undo_to(m0);
    return {std::move(r.sol), eng_.stats()};
  }

 private:
  Solution materialize(const ReduceOutcome& out) const {
    Solution s;
    s.cost = out.cost;
    for (EdgeId e : out.terminal_edges) g_.collect_provenance(g_.edge(e).prov, s.tour);
    std::sort(s.tour.begin(), s.tour.end());
    return s;
  }

  NodeResult node(std::uint32_t depth) {
    SearchStats& st = eng_.stats();
    st.max_depth = std::max(st.max_depth, depth);
    if (opts_.prune && weights_nonneg_ && best_cost_ &&
        g_.forced_weight() > *best_cost_)
      return {std::nullopt, true, eng_.measure_s()};

    ReduceOutcome out = eng_.reduce(ReduceMode::Tsp);
    if (out.kind == ReduceOutcome::Kind::None_) return {std::nullopt, true, eng_.measure_s()};
    if (out.kind == ReduceOutcome::Kind::Cost) {
      NodeResult r{materialize(out), true, eng_.measure_s()};
      note_cost(r.sol->cost);
      return r;
    }

    std::int64_t s_fix = eng_.measure_s();
    if (covers_disjoint_four_cycles(eng_)) {
      NodeResult r{solve_four_cycles(eng_), false, s_fix};
      if (r.sol) note_cost(r.sol->cost);
      return r;
    }

    BranchRule rule;
    EdgeId yz = choose_branch_edge(eng_, ReduceMode::Tsp, &rule);
    ++st.branch_nodes;
    switch (rule) {
      case BranchRule::Quad: ++st.branch_quad; break;
      case BranchRule::Forced: ++st.branch_forced; break;
      case BranchRule::Seed: ++st.branch_seed; break;
    }

    TrailMark m1 = eng_.mark();
    eng_.force_edge(yz);
    NodeResult with = node(depth + 1);
    eng_.undo_to(m1);

    TrailMark m2 = eng_.mark();
    eng_.delete_edge(yz);
    NodeResult without = node(depth + 1);
    eng_.undo_to(m2);

    if (opts_.check_invariants && rule != BranchRule::Seed)
      check_branch_pair(s_fix, with, without);

    NodeResult r;
    r.quick_return = false;
    r.s_fix = s_fix;
    if (with.sol && (!without.sol || with.sol->cost <= without.sol->cost))
      r.sol = std::move(with.sol);
    else
      r.sol = std::move(without.sol);
    return r;
  }

  // Each branch pair must shrink the measure as the analysis prescribes,
  // unless a side was resolved inside its own reduction cascade.
  void check_branch_pair(std::int64_t s0, const NodeResult& a, const NodeResult& b) {
    bool ok;
    if (a.quick_return && b.quick_return) {
      ok = true;
    } else if (a.quick_return) {
      ok = b.s_fix <= s0 - 1;
    } else if (b.quick_return) {
      ok = a.s_fix <= s0 - 1;
    } else {
      std::int64_t lo = std::min(a.s_fix, b.s_fix);
      std::int64_t hi = std::max(a.s_fix, b.s_fix);
      ok = (hi <= s0 - 3) || (lo <= s0 - 5 && hi <= s0 - 2);
    }
    if (!ok) ++eng_.stats().measure_violations;
  }

  void note_cost(std::int64_t c) {
    if (!best_cost_ || c < *best_cost_) best_cost_ = c;
  }

  Multigraph& g_;
  const SolveOptions& opts_;
  Engine eng_;
  bool weights_nonneg_ = true;
  std::optional<std::int64_t> best_cost_;
};

}  // namespace

EdgeId choose_branch_edge(const Engine& eng, ReduceMode mode, BranchRule* rule) {
  const Multigraph& g = eng.graph();
  if (mode == ReduceMode::Tsp && !eng.matches().empty(MatchKind::QuadBranch)) {
    EdgeId best = kNone;
    for (const Match& m : eng.matches().set(MatchKind::QuadBranch)) {
      for (std::uint32_t t : m.touch) {
        if (t == kNone || g.forced_ends(t) != 0) continue;
        for (EdgeId e : g.vertex(t).inc) {
          if (!g.edge_alive(e) || g.edge(e).forced) continue;
          if (e == m.ids[0] || e == m.ids[1] || e == m.ids[2] || e == m.ids[3]) continue;
          best = std::min(best, e);
        }
      }
    }
    if (best != kNone) {
      if (rule) *rule = BranchRule::Quad;
      return best;
    }
    throw std::logic_error("branch: 4-cycle pattern without a free corner edge");
  }
  if (g.forced_edge_count() > 0) {
    EdgeId xy = *g.forced_set().begin();
    EdgeId best = std::min(min_unforced_at(g, g.edge(xy).u), min_unforced_at(g, g.edge(xy).v));
    if (best == kNone) throw std::logic_error("branch: no unforced edge next to a forced one");
    if (rule) *rule = BranchRule::Forced;
    return best;
  }
  EdgeId best = kNone;
  for (EdgeId e = 0; e < g.edge_capacity() && best == kNone; ++e)
    if (g.edge_alive(e)) best = e;
  if (best == kNone) throw std::logic_error("branch: no live edge");
  if (rule) *rule = BranchRule::Seed;
  return best;
}

SolveReport solve_tsp(Multigraph& g, const SolveOptions& opts) {
  if (g.max_degree() > 3)
    throw std::invalid_argument("solver requires maximum degree 3 (split degree-4 vertices first)");
  TspSearch search(g, opts);
  return search.run();
}

}  // namespace cubictsp
