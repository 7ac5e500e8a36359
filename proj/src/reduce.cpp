#include "cubictsp/reduce.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>

namespace cubictsp {

namespace {

// Cycle order of 3 or 4 edges on distinct vertices; fails on loops, parallel
// pairs inside the set, or anything that is not a single cycle.
struct CycleShape {
  int len = 0;
  std::array<VertexId, 4> verts{kNone, kNone, kNone, kNone};   // cycle order
  std::array<EdgeId, 4> edges{kNone, kNone, kNone, kNone};     // edges[i]: verts[i]-verts[i+1]
};

bool cycle_shape(const Multigraph& g, const std::uint32_t* ids, int len, CycleShape& out) {
  for (int i = 0; i < len; ++i) {
    if (!g.edge_alive(ids[i]) || g.is_loop(ids[i])) return false;
    for (int j = i + 1; j < len; ++j) {
      if (ids[i] == ids[j]) return false;
      const EdgeRecord& a = g.edge(ids[i]);
      const EdgeRecord& b = g.edge(ids[j]);
      if (std::minmax(a.u, a.v) == std::minmax(b.u, b.v)) return false;  // parallel
    }
  }
  // Each vertex must appear exactly twice.
  std::array<VertexId, 8> vs;
  for (int i = 0; i < len; ++i) {
    vs[2 * i] = g.edge(ids[i]).u;
    vs[2 * i + 1] = g.edge(ids[i]).v;
  }
  std::sort(vs.begin(), vs.begin() + 2 * len);
  for (int i = 0; i < len; ++i)
    if (vs[2 * i] != vs[2 * i + 1] || (i > 0 && vs[2 * i] == vs[2 * i - 1])) return false;
  // Walk the cycle.
  out.len = len;
  EdgeId cur = ids[0];
  VertexId at = g.edge(cur).u;
  VertexId from = g.edge(cur).v;
  for (int i = 0; i < len; ++i) {
    out.verts[i] = from;
    out.edges[i] = cur;
    // advance: at is the far end of cur seen from `from`
    VertexId next_from = at;
    EdgeId next = kNone;
    for (int j = 0; j < len; ++j) {
      if (ids[j] == cur) continue;
      const EdgeRecord& r = g.edge(ids[j]);
      if (r.u == at || r.v == at) {
        if (next != kNone && i < len - 1) return false;  // degree > 2 inside the set
        next = ids[j];
      }
    }
    if (i < len - 1) {
      if (next == kNone) return false;
      cur = next;
      from = next_from;
      at = g.other_end(next, next_from);
    }
  }
  return true;
}

bool has_forced_outside_edge(const Multigraph& g, VertexId x, const std::uint32_t* ids, int len) {
  for (EdgeId e : g.vertex(x).inc) {
    if (!g.edge_alive(e) || !g.edge(e).forced) continue;
    bool inside = false;
    for (int i = 0; i < len; ++i)
      if (ids[i] == e) inside = true;
    if (!inside) return true;
  }
  return false;
}

}  // namespace

void MatchSets::insert(const Match& m) {
  auto [it, ok] = sets_[std::size_t(m.kind)].insert(m);
  if (!ok) return;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t t = m.touch[i];
    if (t == kNone) continue;
    bool dup = false;
    for (int j = 0; j < i; ++j) dup = dup || m.touch[j] == t;
    if (dup) continue;
    ensure_vertex(t + 1);
    by_vertex_[t].push_back(m);
  }
}

void MatchSets::erase(const Match& m) {
  auto& s = sets_[std::size_t(m.kind)];
  auto it = s.find(m);
  if (it == s.end()) return;
  Match stored = *it;
  s.erase(it);
  MatchLess less;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t t = stored.touch[i];
    if (t == kNone || t >= by_vertex_.size()) continue;
    bool dup = false;
    for (int j = 0; j < i; ++j) dup = dup || stored.touch[j] == t;
    if (dup) continue;
    auto& lst = by_vertex_[t];
    for (std::size_t p = 0; p < lst.size(); ++p) {
      if (!less(lst[p], stored) && !less(stored, lst[p])) {
        lst[p] = lst.back();
        lst.pop_back();
        break;
      }
    }
  }
}

bool MatchSets::same_matches(const MatchSets& other) const {
  for (std::size_t k = 0; k < kMatchKinds; ++k) {
    if (sets_[k].size() != other.sets_[k].size()) return false;
    auto a = sets_[k].begin();
    auto b = other.sets_[k].begin();
    for (; a != sets_[k].end(); ++a, ++b)
      if (a->ids != b->ids) return false;
  }
  return true;
}

bool match_valid(const Multigraph& g, Match& m) {
  auto vertex_match = [&](VertexId v, bool pred) {
    if (v >= g.vertex_capacity() || !g.vertex_alive(v) || !pred) return false;
    m.touch = {v, kNone, kNone, kNone};
    return true;
  };
  switch (m.kind) {
    case MatchKind::DegLow: {
      VertexId v = m.ids[0];
      return vertex_match(v, g.vertex_alive(v) && g.degree(v) <= 1);
    }
    case MatchKind::Deg2: {
      VertexId v = m.ids[0];
      return vertex_match(v, g.vertex_alive(v) && g.degree(v) == 2 && g.unforced_degree(v) >= 1);
    }
    case MatchKind::Claw: {
      VertexId v = m.ids[0];
      return vertex_match(v, g.vertex_alive(v) && g.forced_ends(v) >= 3);
    }
    case MatchKind::ForcedPair: {
      VertexId v = m.ids[0];
      if (v >= g.vertex_capacity() || !g.vertex_alive(v) || g.forced_ends(v) != 2) return false;
      int forced_edges = 0;
      for (EdgeId e : g.vertex(v).inc)
        if (g.edge_alive(e) && g.edge(e).forced) {
          if (g.is_loop(e)) return false;
          ++forced_edges;
        }
      return vertex_match(v, forced_edges == 2);
    }
    case MatchKind::ForcedLoop:
    case MatchKind::UnforcedLoop: {
      EdgeId e = m.ids[0];
      if (!g.edge_alive(e) || !g.is_loop(e)) return false;
      if (g.edge(e).forced != (m.kind == MatchKind::ForcedLoop)) return false;
      m.touch = {g.edge(e).u, kNone, kNone, kNone};
      return true;
    }
    case MatchKind::ForcedTwoCycle:
    case MatchKind::ParallelPair: {
      EdgeId e1 = m.ids[0], e2 = m.ids[1];
      if (!g.edge_alive(e1) || !g.edge_alive(e2) || g.is_loop(e1) || g.is_loop(e2)) return false;
      const EdgeRecord& a = g.edge(e1);
      const EdgeRecord& b = g.edge(e2);
      if (std::minmax(a.u, a.v) != std::minmax(b.u, b.v)) return false;
      bool both_forced = a.forced && b.forced;
      if ((m.kind == MatchKind::ForcedTwoCycle) != both_forced) return false;
      m.touch = {a.u, a.v, kNone, kNone};
      return true;
    }
    case MatchKind::Triangle:
    case MatchKind::TriangleForcedOpp: {
      CycleShape s;
      if (!cycle_shape(g, m.ids.data(), 3, s)) return false;
      if (m.kind == MatchKind::TriangleForcedOpp) {
        bool fireable = false;
        for (int i = 0; i < 3 && !fireable; ++i) {
          // corner verts[i] sits opposite edge verts[i+1]-verts[i+2]
          EdgeId opp = s.edges[(i + 1) % 3];
          fireable = !g.edge(opp).forced && has_forced_outside_edge(g, s.verts[i], m.ids.data(), 3);
        }
        if (!fireable) return false;
      }
      m.touch = {s.verts[0], s.verts[1], s.verts[2], kNone};
      return true;
    }
    case MatchKind::QuadForce:
    case MatchKind::QuadBranch:
    case MatchKind::QuadComponent: {
      CycleShape s;
      if (!cycle_shape(g, m.ids.data(), 4, s)) return false;
      for (int i = 0; i < 4; ++i)
        if (g.edge(s.edges[i]).forced) return false;
      bool ok = false;
      if (m.kind == MatchKind::QuadComponent) {
        ok = true;
        for (int i = 0; i < 4; ++i) ok = ok && g.unforced_degree(s.verts[i]) == 2;
      } else if (m.kind == MatchKind::QuadForce) {
        bool opp = (g.forced_ends(s.verts[0]) >= 1 && g.forced_ends(s.verts[2]) >= 1) ||
                   (g.forced_ends(s.verts[1]) >= 1 && g.forced_ends(s.verts[3]) >= 1);
        bool rim = false;
        for (int i = 0; i < 4; ++i) rim = rim || g.unforced_degree(s.verts[i]) >= 3;
        ok = opp && rim;
      } else {
        int adj = 0;
        bool free_corner = false;
        for (int i = 0; i < 4; ++i) {
          if (g.forced_ends(s.verts[i]) >= 1) ++adj;
          if (g.forced_ends(s.verts[i]) == 0 && g.unforced_degree(s.verts[i]) >= 3)
            free_corner = true;
        }
        ok = adj >= 2 && free_corner;
      }
      if (!ok) return false;
      m.touch = {s.verts[0], s.verts[1], s.verts[2], s.verts[3]};
      return true;
    }
    default:
      return false;
  }
}

void discover_matches_at(const Multigraph& g, VertexId v, std::vector<Match>& out) {
  if (v >= g.vertex_capacity() || !g.vertex_alive(v)) return;
  auto try_push = [&](MatchKind kind, std::initializer_list<std::uint32_t> ids) {
    Match m;
    m.kind = kind;
    int i = 0;
    for (std::uint32_t id : ids) m.ids[i++] = id;
    std::sort(m.ids.begin(), m.ids.begin() + i);
    if (match_valid(g, m)) out.push_back(m);
  };

  try_push(MatchKind::DegLow, {v});
  try_push(MatchKind::Deg2, {v});
  try_push(MatchKind::Claw, {v});
  try_push(MatchKind::ForcedPair, {v});

  std::vector<EdgeId> inc;
  for (EdgeId e : g.vertex(v).inc)
    if (g.edge_alive(e)) inc.push_back(e);
  std::sort(inc.begin(), inc.end());
  inc.erase(std::unique(inc.begin(), inc.end()), inc.end());

  for (EdgeId e : inc) {
    if (g.is_loop(e)) {
      try_push(MatchKind::ForcedLoop, {e});
      try_push(MatchKind::UnforcedLoop, {e});
    }
  }
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (g.is_loop(inc[i])) continue;
    for (std::size_t j = i + 1; j < inc.size(); ++j) {
      if (g.is_loop(inc[j])) continue;
      VertexId a = g.other_end(inc[i], v);
      VertexId b = g.other_end(inc[j], v);
      if (a == b) {
        try_push(MatchKind::ForcedTwoCycle, {inc[i], inc[j]});
        try_push(MatchKind::ParallelPair, {inc[i], inc[j]});
      } else if (a != v && b != v) {
        for (EdgeId e3 : g.edges_between(a, b)) {
          try_push(MatchKind::Triangle, {inc[i], inc[j], e3});
          try_push(MatchKind::TriangleForcedOpp, {inc[i], inc[j], e3});
        }
      }
    }
  }
  // 4-cycles through v: paths v -e1- a -e2- b -e3- c with a closing edge c-v.
  for (EdgeId e1 : inc) {
    if (g.is_loop(e1)) continue;
    VertexId a = g.other_end(e1, v);
    for (EdgeId e2 : g.vertex(a).inc) {
      if (!g.edge_alive(e2) || e2 == e1 || g.is_loop(e2)) continue;
      VertexId b = g.other_end(e2, a);
      if (b == v || b == a) continue;
      for (EdgeId e3 : g.vertex(b).inc) {
        if (!g.edge_alive(e3) || e3 == e2 || e3 == e1 || g.is_loop(e3)) continue;
        VertexId c = g.other_end(e3, b);
        if (c == v || c == a || c == b) continue;
        for (EdgeId e4 : g.edges_between(c, v)) {
          if (e4 == e1 || e4 == e2 || e4 == e3) continue;
          try_push(MatchKind::QuadForce, {e1, e2, e3, e4});
          try_push(MatchKind::QuadBranch, {e1, e2, e3, e4});
          try_push(MatchKind::QuadComponent, {e1, e2, e3, e4});
        }
      }
    }
  }
}

MatchSets recompute_match_sets(const Multigraph& g) {
  MatchSets ms;
  ms.ensure_vertex(g.vertex_capacity());
  std::vector<Match> found;
  for (VertexId v : g.live_vertices()) {
    found.clear();
    discover_matches_at(g, v, found);
    for (const Match& m : found)
      if (!ms.contains(m)) ms.insert(m);
  }
  return ms;
}

const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::ReturnDegLow: return "deg01";
    case RuleId::ReturnClaw: return "claw";
    case RuleId::TerminalLoop: return "loop_cycle";
    case RuleId::TerminalTwoCycle: return "two_cycle";
    case RuleId::PathMerge: return "path_merge";
    case RuleId::ForceDeg2: return "deg2_force";
    case RuleId::PruneParallel: return "parallel_prune";
    case RuleId::PruneLoop: return "loop_prune";
    case RuleId::ContractTriangle: return "triangle_contract";
    case RuleId::ForceQuad: return "quad_force";
    case RuleId::ForceTriangleOpp: return "triangle_force";
    case RuleId::ListContract: return "list_contract";
    case RuleId::CycleClosure: return "cycle_closure";
    default: return "unknown";
  }
}

std::string SearchStats::to_kv() const {
  std::ostringstream out;
  out << "branch_nodes=" << branch_nodes << '\n';
  out << "max_depth=" << max_depth << '\n';
  out << "cycles_output=" << cycles_output << '\n';
  out << "branch_quad=" << branch_quad << '\n';
  out << "branch_forced=" << branch_forced << '\n';
  out << "branch_seed=" << branch_seed << '\n';
  out << "measure_violations=" << measure_violations << '\n';
  out << "s0=" << s0 << '\n';
  out << "u0=" << u0 << '\n';
  for (std::size_t r = 0; r < kRuleCount; ++r)
    out << "fires_" << rule_name(RuleId(r)) << '=' << rule_fires[r] << '\n';
  return out.str();
}

Engine::Engine(Multigraph& g, EngineOptions opts) : g_(g), opts_(std::move(opts)) {
  g_.drop_feeds();
  ms_.ensure_vertex(g_.vertex_capacity());
  std::vector<Match> found;
  for (VertexId v : g_.live_vertices()) {
    found.clear();
    discover_matches_at(g_, v, found);
    for (const Match& m : found)
      if (!ms_.contains(m)) ms_.insert(m);
  }
}

void Engine::sync() {
  dirty_.clear();
  g_.drain_dirty(dirty_);
  if (opts_.track_forced_events)
    g_.drain_forced_events(forced_events_);
  else
    g_.drop_forced_events();
  std::sort(dirty_.begin(), dirty_.end());
  dirty_.erase(std::unique(dirty_.begin(), dirty_.end()), dirty_.end());
  for (VertexId v : dirty_) rescan(v);
}

void Engine::rescan(VertexId v) {
  ms_.ensure_vertex(g_.vertex_capacity());
  scratch_ = ms_.touching(v);
  for (const Match& m : scratch_) {
    Match fresh = m;
    if (!match_valid(g_, fresh)) {
      ms_.erase(m);
    } else if (fresh.touch != m.touch) {
      ms_.erase(m);
      ms_.insert(fresh);
    }
  }
  scratch_.clear();
  discover_matches_at(g_, v, scratch_);
  for (const Match& m : scratch_)
    if (!ms_.contains(m)) ms_.insert(m);
  scratch_.clear();
}

void Engine::undo_to(TrailMark m) {
  g_.undo_to(m);
  sync();
}

void Engine::force_edge(EdgeId e) {
  g_.force_edge(e);
  sync();
}

void Engine::delete_edge(EdgeId e) {
  g_.delete_edge(e);
  sync();
}

std::optional<ReduceOutcome> Engine::detect_terminal(ReduceMode mode) const {
  auto make_none = [] {
    ReduceOutcome o;
    o.kind = ReduceOutcome::Kind::None_;
    return o;
  };
  if (!ms_.empty(MatchKind::DegLow)) return make_none();
  if (!ms_.empty(MatchKind::Claw)) return make_none();
  if (!ms_.empty(MatchKind::ForcedLoop)) {
    EdgeId e = ms_.first(MatchKind::ForcedLoop).ids[0];
    if (g_.live_vertex_count() != 1) return make_none();
    ReduceOutcome o;
    o.kind = mode == ReduceMode::Listing ? ReduceOutcome::Kind::Output
                                         : ReduceOutcome::Kind::Cost;
    o.cost = g_.edge(e).weight;
    o.terminal_edges = {e};
    return o;
  }
  if (!ms_.empty(MatchKind::ForcedTwoCycle)) {
    const Match& m = ms_.first(MatchKind::ForcedTwoCycle);
    if (g_.live_vertex_count() != 2) return make_none();
    ReduceOutcome o;
    o.kind = mode == ReduceMode::Listing ? ReduceOutcome::Kind::Output
                                         : ReduceOutcome::Kind::Cost;
    o.cost = g_.edge(m.ids[0]).weight + g_.edge(m.ids[1]).weight;
    o.terminal_edges = {m.ids[0], m.ids[1]};
    return o;
  }
  return std::nullopt;
}

void Engine::trace_fire(RuleId r, const Match& m) {
  if (!opts_.trace) return;
  *opts_.trace << rule_name(r);
  for (std::uint32_t id : m.ids)
    if (id != kNone) *opts_.trace << ' ' << id;
  *opts_.trace << '\n';
}

ReduceOutcome Engine::reduce(ReduceMode mode) {
  for (;;) {
    StepResult r = step(mode);
    if (r.kind == StepResult::Kind::Returned) return r.outcome;
    if (r.kind == StepResult::Kind::Exhausted) {
      ReduceOutcome o;
      o.kind = ReduceOutcome::Kind::Exhausted;
      return o;
    }
  }
}

StepResult Engine::step(ReduceMode mode) {
  if (auto t = detect_terminal(mode)) {
    RuleId r;
    if (!ms_.empty(MatchKind::DegLow))
      r = RuleId::ReturnDegLow;
    else if (!ms_.empty(MatchKind::Claw))
      r = RuleId::ReturnClaw;
    else if (!ms_.empty(MatchKind::ForcedLoop))
      r = RuleId::TerminalLoop;
    else
      r = RuleId::TerminalTwoCycle;
    ++stats_.rule_fires[std::size_t(r)];
    if (opts_.trace) *opts_.trace << rule_name(r) << " return\n";
    StepResult sr;
    sr.kind = StepResult::Kind::Returned;
    sr.rule = r;
    sr.outcome = std::move(*t);
    return sr;
  }

  const bool tsp = mode == ReduceMode::Tsp;
  if (tsp) {
    if (!ms_.empty(MatchKind::ForcedPair))
      return fire(mode, RuleId::PathMerge, ms_.first(MatchKind::ForcedPair));
    if (!ms_.empty(MatchKind::Deg2))
      return fire(mode, RuleId::ForceDeg2, ms_.first(MatchKind::Deg2));
    if (!ms_.empty(MatchKind::ParallelPair) && g_.live_vertex_count() > 2)
      return fire(mode, RuleId::PruneParallel, ms_.first(MatchKind::ParallelPair));
    if (!ms_.empty(MatchKind::UnforcedLoop) && g_.live_vertex_count() > 1)
      return fire(mode, RuleId::PruneLoop, ms_.first(MatchKind::UnforcedLoop));
    if (!ms_.empty(MatchKind::Triangle))
      return fire(mode, RuleId::ContractTriangle, ms_.first(MatchKind::Triangle));
    if (!ms_.empty(MatchKind::QuadForce))
      return fire(mode, RuleId::ForceQuad, ms_.first(MatchKind::QuadForce));
  } else {
    if (!ms_.empty(MatchKind::Deg2))
      return fire(mode, RuleId::ForceDeg2, ms_.first(MatchKind::Deg2));
    if (!ms_.empty(MatchKind::TriangleForcedOpp))
      return fire(mode, RuleId::ForceTriangleOpp, ms_.first(MatchKind::TriangleForcedOpp));
    if (!ms_.empty(MatchKind::ForcedPair))
      return fire(mode, RuleId::ListContract, ms_.first(MatchKind::ForcedPair));
  }
  StepResult sr;
  sr.kind = StepResult::Kind::Exhausted;
  return sr;
}

StepResult Engine::fire(ReduceMode mode, RuleId r, const Match& match) {
  Match m = match;  // the stored match may be erased during rescans
  std::int64_t s_before = 0, u_before = 0;
  if (opts_.check_invariants) {
    s_before = measure_s();
    u_before = measure_u();
  }
  if (opts_.on_fire) opts_.on_fire(r);

  StepResult sr;
  sr.kind = StepResult::Kind::Fired;
  sr.rule = r;
  switch (r) {
    case RuleId::PathMerge:
      trace_fire(r, m);
      fire_path_merge(m);
      break;
    case RuleId::ForceDeg2:
      trace_fire(r, m);
      fire_force_deg2(m);
      break;
    case RuleId::PruneParallel:
      trace_fire(r, m);
      fire_prune_parallel(m);
      break;
    case RuleId::PruneLoop:
      trace_fire(r, m);
      fire_prune_loop(m);
      break;
    case RuleId::ContractTriangle:
      trace_fire(r, m);
      fire_contract_triangle(m);
      break;
    case RuleId::ForceQuad:
      trace_fire(r, m);
      fire_force_quad(m);
      break;
    case RuleId::ForceTriangleOpp:
      trace_fire(r, m);
      fire_force_triangle_opp(m);
      break;
    case RuleId::ListContract: {
      if (auto closed = fire_list_contract(m)) {
        sr.kind = StepResult::Kind::Returned;
        sr.rule = RuleId::CycleClosure;
        sr.outcome = std::move(*closed);
        trace_fire(RuleId::CycleClosure, m);
        ++stats_.rule_fires[std::size_t(RuleId::CycleClosure)];
        sync();
        return sr;
      }
      trace_fire(r, m);
      break;
    }
    default:
      throw std::logic_error("fire: not a fireable rule");
  }
  sync();
  ++stats_.rule_fires[std::size_t(r)];
  if (opts_.check_invariants) {
    bool bad = mode == ReduceMode::Tsp ? measure_s() > s_before : measure_u() > u_before;
    if (bad) ++stats_.measure_violations;
  }
  return sr;
}

void Engine::fire_path_merge(const Match& m) {
  VertexId v = m.ids[0];
  EdgeId f1 = kNone, f2 = kNone;
  for (EdgeId e : g_.vertex(v).inc) {
    if (!g_.edge_alive(e) || !g_.edge(e).forced) continue;
    if (f1 == kNone)
      f1 = e;
    else if (e != f1 && f2 == kNone)
      f2 = e;
  }
  if (f1 == kNone || f2 == kNone) throw std::logic_error("path merge: forced pair vanished");
  if (f2 < f1) std::swap(f1, f2);
  g_.merge_path(v, f1, f2);
}

void Engine::fire_force_deg2(const Match& m) {
  VertexId v = m.ids[0];
  std::vector<EdgeId> inc(g_.vertex(v).inc);
  std::sort(inc.begin(), inc.end());
  inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
  int forced = 0;
  for (EdgeId e : inc)
    if (g_.edge_alive(e) && !g_.edge(e).forced) {
      g_.force_edge(e);
      ++forced;
    }
  if (forced == 0) throw std::logic_error("deg2 force: nothing to force");
}

void Engine::fire_prune_parallel(const Match& m) {
  EdgeId e1 = m.ids[0], e2 = m.ids[1];
  EdgeId victim;
  if (g_.edge(e1).forced)
    victim = e2;
  else if (g_.edge(e2).forced)
    victim = e1;
  else if (g_.edge(e1).weight != g_.edge(e2).weight)
    victim = g_.edge(e1).weight > g_.edge(e2).weight ? e1 : e2;
  else
    victim = e2;  // equal cost: drop the larger id (ids are sorted)
  g_.delete_edge(victim);
}

void Engine::fire_prune_loop(const Match& m) { g_.delete_edge(m.ids[0]); }

void Engine::fire_contract_triangle(const Match& m) {
  CycleShape s;
  if (!cycle_shape(g_, m.ids.data(), 3, s)) throw std::logic_error("triangle vanished");
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&s](int a, int b) { return s.verts[a] < s.verts[b]; });
  for (int i : order) {
    VertexId x = s.verts[i];
    if (g_.degree(x) != 3)
      throw std::logic_error("triangle contraction: corner degree is not 3");
    EdgeId opp = s.edges[(i + 1) % 3];  // side between the other two corners
    EdgeId out = kNone;
    for (EdgeId e : g_.vertex(x).inc) {
      if (!g_.edge_alive(e)) continue;
      if (e == m.ids[0] || e == m.ids[1] || e == m.ids[2]) continue;
      if (out != kNone) throw std::logic_error("triangle contraction: two outside edges");
      out = e;
    }
    if (out == kNone) throw std::logic_error("triangle contraction: no outside edge");
    g_.add_weight(out, g_.edge(opp).weight);
    if (g_.edge(opp).forced && !g_.edge(out).forced) g_.force_edge(out);
    g_.merge_provenance(out, opp);
  }
  g_.contract_triangle(s.verts[0], s.verts[1], s.verts[2]);
}

void Engine::fire_force_quad(const Match& m) {
  CycleShape s;
  if (!cycle_shape(g_, m.ids.data(), 4, s)) throw std::logic_error("quad vanished");
  std::array<VertexId, 4> corners = {s.verts[0], s.verts[1], s.verts[2], s.verts[3]};
  std::sort(corners.begin(), corners.end());
  int forced = 0;
  for (VertexId x : corners) {
    std::vector<EdgeId> inc(g_.vertex(x).inc);
    std::sort(inc.begin(), inc.end());
    inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
    for (EdgeId e : inc) {
      if (!g_.edge_alive(e) || g_.edge(e).forced) continue;
      if (e == m.ids[0] || e == m.ids[1] || e == m.ids[2] || e == m.ids[3]) continue;
      g_.force_edge(e);
      ++forced;
    }
  }
  if (forced == 0) throw std::logic_error("quad force: nothing to force");
}

void Engine::fire_force_triangle_opp(const Match& m) {
  CycleShape s;
  if (!cycle_shape(g_, m.ids.data(), 3, s)) throw std::logic_error("triangle vanished");
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&s](int a, int b) { return s.verts[a] < s.verts[b]; });
  for (int i : order) {
    EdgeId opp = s.edges[(i + 1) % 3];
    if (g_.edge(opp).forced) continue;
    if (!has_forced_outside_edge(g_, s.verts[i], m.ids.data(), 3)) continue;
    g_.force_edge(opp);
    return;
  }
  throw std::logic_error("triangle force: no fireable corner");
}

std::optional<ReduceOutcome> Engine::fire_list_contract(const Match& m) {
  VertexId v = m.ids[0];
  EdgeId f1 = kNone, f2 = kNone;
  for (EdgeId e : g_.vertex(v).inc) {
    if (!g_.edge_alive(e) || !g_.edge(e).forced) continue;
    if (f1 == kNone)
      f1 = e;
    else if (e != f1 && f2 == kNone)
      f2 = e;
  }
  if (f1 == kNone || f2 == kNone) throw std::logic_error("list contract: forced pair vanished");
  if (f2 < f1) std::swap(f1, f2);
  VertexId a = g_.other_end(f1, v);
  VertexId b = g_.other_end(f2, v);
  if (a == b) throw std::logic_error("list contract: input was not simple");
  std::vector<EdgeId> between = g_.edges_between(a, b);
  for (EdgeId e : between) {
    if (!g_.edge(e).forced) continue;
    // The forced edges close a cycle through v, a, b: it is the Hamiltonian
    // output exactly when nothing else is left.
    ReduceOutcome o;
    o.kind = g_.live_vertex_count() == 3 ? ReduceOutcome::Kind::Output
                                         : ReduceOutcome::Kind::None_;
    o.cost = g_.edge(f1).weight + g_.edge(f2).weight + g_.edge(e).weight;
    o.terminal_edges = {f1, f2, e};
    return o;
  }
  g_.merge_path(v, f1, f2);
  if (between.size() > 1) throw std::logic_error("list contract: parallel edges in input");
  for (EdgeId e : between) g_.delete_edge(e);
  return std::nullopt;
}

}  // namespace cubictsp
