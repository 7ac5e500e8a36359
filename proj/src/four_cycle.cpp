#include "cubictsp/four_cycle.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace cubictsp {

namespace {

struct Uf {
  std::vector<std::uint32_t> parent;
  explicit Uf(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::uint32_t find(std::uint32_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

bool covers_disjoint_four_cycles(const Engine& eng) {
  std::size_t n = eng.graph().live_vertex_count();
  return n > 0 && 4 * eng.four_cycle_components() == n;
}

std::optional<Solution> solve_four_cycles(const Engine& eng) {
  const Multigraph& g = eng.graph();

  struct Cycle {
    std::array<EdgeId, 4> ring;  // ring[i] joins ring vertices i, i+1
    std::array<EdgeId, 2> kept;  // cheaper opposite pair H_i
    std::array<EdgeId, 2> other;
    std::int64_t delta = 0;  // cost(other) - cost(kept), >= 0
  };
  std::vector<Cycle> cycles;
  for (const Match& m : eng.matches().set(MatchKind::QuadComponent)) {
    Cycle c;
    // Reconstruct the ring order from the stored edges.
    std::array<std::uint32_t, 4> ids = m.ids;
    std::array<EdgeId, 2> pair_a, pair_b;
    {
      // walk: start from ids[0]
      EdgeId e0 = ids[0];
      VertexId v0 = g.edge(e0).u, v1 = g.edge(e0).v;
      EdgeId e1 = kNone, e3 = kNone, e2 = kNone;
      for (EdgeId e : ids) {
        if (e == e0) continue;
        const EdgeRecord& r = g.edge(e);
        bool at_v1 = r.u == v1 || r.v == v1;
        bool at_v0 = r.u == v0 || r.v == v0;
        if (at_v1)
          e1 = e;
        else if (at_v0)
          e3 = e;
        else
          e2 = e;
      }
      if (e1 == kNone || e2 == kNone || e3 == kNone)
        throw std::logic_error("four-cycle component lost its shape");
      c.ring = {e0, e1, e2, e3};
      pair_a = {e0, e2};
      pair_b = {e1, e3};
    }
    std::int64_t wa = g.edge(pair_a[0]).weight + g.edge(pair_a[1]).weight;
    std::int64_t wb = g.edge(pair_b[0]).weight + g.edge(pair_b[1]).weight;
    bool keep_a;
    if (wa != wb)
      keep_a = wa < wb;
    else
      keep_a = std::min(pair_a[0], pair_a[1]) < std::min(pair_b[0], pair_b[1]);
    c.kept = keep_a ? pair_a : pair_b;
    c.other = keep_a ? pair_b : pair_a;
    c.delta = keep_a ? wb - wa : wa - wb;
    if (c.delta < 0) throw std::logic_error("negative pair-switch cost");
    cycles.push_back(c);
  }

  // Components of F ∪ H.
  Uf uf(g.vertex_capacity());
  std::int64_t base = 0;
  for (EdgeId e : g.forced_edge_ids()) {
    uf.unite(g.edge(e).u, g.edge(e).v);
    base += g.edge(e).weight;
  }
  for (const Cycle& c : cycles)
    for (EdgeId e : c.kept) {
      uf.unite(g.edge(e).u, g.edge(e).v);
      base += g.edge(e).weight;
    }

  // Candidate spanning edges: one per cycle whose kept pair spans two
  // components; Kruskal over (delta, cycle index).
  std::vector<std::size_t> order(cycles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&cycles](std::size_t a, std::size_t b) {
    if (cycles[a].delta != cycles[b].delta) return cycles[a].delta < cycles[b].delta;
    return cycles[a].ring[0] < cycles[b].ring[0];
  });
  std::vector<bool> switched(cycles.size(), false);
  std::int64_t mst = 0;
  for (std::size_t i : order) {
    std::uint32_t ra = uf.find(g.edge(cycles[i].kept[0]).u);
    std::uint32_t rb = uf.find(g.edge(cycles[i].kept[1]).u);
    if (ra != rb) {
      uf.unite(ra, rb);
      switched[i] = true;
      mst += cycles[i].delta;
    }
  }

  // Connectivity of the patched subgraph decides feasibility.
  std::uint32_t root = kNone;
  for (VertexId v : g.live_vertices()) {
    if (root == kNone) root = uf.find(v);
    if (uf.find(v) != root) return std::nullopt;
  }

  Solution sol;
  sol.cost = base + mst;
  std::vector<std::uint32_t> ids;
  for (EdgeId e : g.forced_edge_ids()) g.collect_provenance(g.edge(e).prov, ids);
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& pick = switched[i] ? cycles[i].other : cycles[i].kept;
    for (EdgeId e : pick) g.collect_provenance(g.edge(e).prov, ids);
  }
  std::sort(ids.begin(), ids.end());
  sol.tour = std::move(ids);
  return sol;
}

}  // namespace cubictsp
