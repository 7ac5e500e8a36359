#include "cubictsp/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cubictsp {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

struct Compact {
  std::size_t n = 0;
  std::vector<VertexId> to_orig;
  std::vector<std::uint32_t> remap;  // orig vertex -> compact index
};

Compact compact_vertices(const Multigraph& g) {
  Compact c;
  c.remap.assign(g.vertex_capacity(), kNone);
  for (VertexId v : g.live_vertices()) {
    c.remap[v] = std::uint32_t(c.to_orig.size());
    c.to_orig.push_back(v);
  }
  c.n = c.to_orig.size();
  return c;
}

}  // namespace

std::optional<std::int64_t> oracle_tsp(const Multigraph& g, std::size_t max_vertices) {
  Compact c = compact_vertices(g);
  std::size_t n = c.n;
  if (n == 0) return std::nullopt;

  std::vector<EdgeId> forced = g.forced_edge_ids();

  if (n == 1) {
    // A single vertex is covered by a self-loop.
    std::vector<EdgeId> loops;
    for (EdgeId e : g.live_edges())
      if (g.is_loop(e)) loops.push_back(e);
    std::size_t forced_loops = 0;
    for (EdgeId e : forced)
      if (g.is_loop(e)) ++forced_loops;
    if (forced.size() > 1 || forced.size() != forced_loops) return std::nullopt;
    if (forced.size() == 1) return g.edge(forced[0]).weight;
    std::optional<std::int64_t> best;
    for (EdgeId e : loops)
      if (!best || g.edge(e).weight < *best) best = g.edge(e).weight;
    return best;
  }

  for (EdgeId e : forced)
    if (g.is_loop(e)) return std::nullopt;

  if (n + forced.size() > max_vertices)
    throw std::invalid_argument("oracle_tsp: instance too large (" + std::to_string(n) + "+" +
                                std::to_string(forced.size()) + " vertices, limit " +
                                std::to_string(max_vertices) + ")");

  if (n == 2 && forced.empty()) {
    // Tour = two distinct parallel edges.
    std::vector<std::int64_t> ws;
    for (EdgeId e : g.live_edges())
      if (!g.is_loop(e)) ws.push_back(g.edge(e).weight);
    if (ws.size() < 2) return std::nullopt;
    std::sort(ws.begin(), ws.end());
    return ws[0] + ws[1];
  }

  // Subdivide each forced edge with a midpoint vertex; Hamiltonian cycles of
  // the subdivided graph correspond exactly to forced-respecting cycles here.
  std::size_t nn = n + forced.size();
  std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> adj(nn);
  auto add_arc = [&adj](std::uint32_t a, std::uint32_t b, std::int64_t w) {
    for (auto& [t, tw] : adj[a])
      if (t == b) {
        tw = std::min(tw, w);
        return;
      }
    adj[a].push_back({b, w});
  };
  auto add_und = [&](std::uint32_t a, std::uint32_t b, std::int64_t w) {
    add_arc(a, b, w);
    add_arc(b, a, w);
  };
  std::size_t next_mid = n;
  for (EdgeId e : g.live_edges()) {
    const EdgeRecord& r = g.edge(e);
    if (r.u == r.v) continue;
    std::uint32_t a = c.remap[r.u], b = c.remap[r.v];
    if (r.forced) {
      std::uint32_t mid = std::uint32_t(next_mid++);
      add_und(a, mid, r.weight);
      add_und(mid, b, 0);
    } else {
      add_und(a, b, r.weight);
    }
  }

  std::vector<std::int64_t> dp((std::size_t(1) << nn) * nn, kInf);
  dp[(std::size_t(1) << 0) * nn + 0] = 0;
  std::size_t full = (std::size_t(1) << nn) - 1;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    if (!(mask & 1)) continue;
    for (std::size_t v = 0; v < nn; ++v) {
      if (!(mask & (std::size_t(1) << v))) continue;
      std::int64_t cur = dp[mask * nn + v];
      if (cur >= kInf) continue;
      for (auto [u, w] : adj[v]) {
        std::size_t bit = std::size_t(1) << u;
        if (mask & bit) continue;
        std::int64_t& slot = dp[(mask | bit) * nn + u];
        if (cur + w < slot) slot = cur + w;
      }
    }
  }
  std::int64_t best = kInf;
  for (std::size_t v = 1; v < nn; ++v) {
    std::int64_t cur = dp[full * nn + v];
    if (cur >= kInf) continue;
    for (auto [u, w] : adj[v])
      if (u == 0) best = std::min(best, cur + w);
  }
  if (best >= kInf) return std::nullopt;
  return best;
}

std::vector<std::vector<std::uint32_t>> oracle_cycles(const Multigraph& g,
                                                      std::size_t max_vertices) {
  Compact c = compact_vertices(g);
  std::size_t n = c.n;
  if (n > max_vertices)
    throw std::invalid_argument("oracle_cycles: instance too large (" + std::to_string(n) +
                                " vertices, limit " + std::to_string(max_vertices) + ")");
  std::vector<EdgeId> forced = g.forced_edge_ids();
  std::set<std::vector<EdgeId>> live_cycles;

  if (n == 1) {
    for (EdgeId e : g.live_edges())
      if (g.is_loop(e)) live_cycles.insert({e});
  } else if (n == 2) {
    std::vector<EdgeId> par;
    for (EdgeId e : g.live_edges())
      if (!g.is_loop(e)) par.push_back(e);
    for (std::size_t i = 0; i < par.size(); ++i)
      for (std::size_t j = i + 1; j < par.size(); ++j) {
        std::vector<EdgeId> cyc{par[i], par[j]};
        std::sort(cyc.begin(), cyc.end());
        live_cycles.insert(cyc);
      }
  } else if (n >= 3) {
    // Naive path extension from the first vertex.
    VertexId start = c.to_orig[0];
    std::vector<bool> visited(g.vertex_capacity(), false);
    std::vector<EdgeId> path;
    std::size_t covered = 1;
    visited[start] = true;
    auto dfs = [&](auto&& self, VertexId at) -> void {
      std::vector<EdgeId> inc(g.vertex(at).inc);
      std::sort(inc.begin(), inc.end());
      for (EdgeId e : inc) {
        if (!g.edge_alive(e) || g.is_loop(e)) continue;
        VertexId to = g.other_end(e, at);
        if (to == start && covered == n) {
          std::vector<EdgeId> cyc(path);
          cyc.push_back(e);
          std::sort(cyc.begin(), cyc.end());
          live_cycles.insert(std::move(cyc));
          continue;
        }
        if (visited[to]) continue;
        visited[to] = true;
        ++covered;
        path.push_back(e);
        self(self, to);
        path.pop_back();
        --covered;
        visited[to] = false;
      }
    };
    dfs(dfs, start);
  }

  std::set<std::vector<std::uint32_t>> mapped;
  for (const auto& cyc : live_cycles) {
    bool has_forced = true;
    for (EdgeId f : forced)
      if (!std::binary_search(cyc.begin(), cyc.end(), f)) {
        has_forced = false;
        break;
      }
    if (!has_forced) continue;
    std::vector<std::uint32_t> ids;
    for (EdgeId e : cyc) g.collect_provenance(g.edge(e).prov, ids);
    std::sort(ids.begin(), ids.end());
    mapped.insert(std::move(ids));
  }
  return {mapped.begin(), mapped.end()};
}

std::vector<VertexId> canonical_cycle(std::vector<VertexId> seq) {
  if (seq.size() <= 1) return seq;
  std::vector<VertexId> best;
  for (int refl = 0; refl < 2; ++refl) {
    for (std::size_t r = 0; r < seq.size(); ++r) {
      std::vector<VertexId> rot(seq.begin() + r, seq.end());
      rot.insert(rot.end(), seq.begin(), seq.begin() + r);
      if (best.empty() || rot < best) best = rot;
    }
    std::reverse(seq.begin(), seq.end());
  }
  return best;
}

TourCheck check_tour(const Multigraph& g, const std::vector<std::uint32_t>& tour) {
  TourCheck res;
  std::set<std::uint32_t> ids(tour.begin(), tour.end());
  if (ids.size() != tour.size()) {
    res.error = "duplicate edge ids in tour";
    return res;
  }
  std::vector<int> deg(g.vertex_capacity(), 0);
  std::vector<VertexId> parent(g.vertex_capacity());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](VertexId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::uint32_t id : ids) {
    if (id >= g.edge_capacity() || !g.edge_alive(id)) {
      res.error = "tour references missing edge " + std::to_string(id);
      return res;
    }
    const EdgeRecord& r = g.edge(id);
    deg[r.u] += 1;
    deg[r.v] += 1;  // a loop contributes 2 to its vertex
    parent[find(r.u)] = find(r.v);
    res.cost += r.weight;
  }
  for (EdgeId e : g.forced_edge_ids())
    if (!ids.count(e)) {
      res.error = "tour misses forced edge " + std::to_string(e);
      return res;
    }
  VertexId root = kNone;
  for (VertexId v : g.live_vertices()) {
    if (deg[v] != 2) {
      res.error = "vertex " + std::to_string(v) + " has tour degree " + std::to_string(deg[v]);
      return res;
    }
    if (root == kNone) root = find(v);
    if (find(v) != root) {
      res.error = "tour is disconnected";
      return res;
    }
  }
  res.ok = true;
  return res;
}

}  // namespace cubictsp
