#include "cubictsp/graph.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <istream>
#include <sstream>

namespace cubictsp {

namespace {

std::int64_t parse_int64(const std::string& tok, int line, const char* what) {
  std::size_t pos = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  }
  if (pos != tok.size()) throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  return value;
}

}  // namespace

Multigraph Multigraph::load(std::istream& in) {
  std::string line;
  int line_no = 0;
  long long n = -1, m = -1;
  std::vector<InputEdge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;
    if (n < 0) {
      n = parse_int64(tok, line_no, "vertex count");
      std::string mt;
      if (!(ls >> mt)) throw ParseError(line_no, "expected 'n m' header");
      m = parse_int64(mt, line_no, "edge count");
      if (n < 0 || m < 0) throw ParseError(line_no, "negative count in header");
      if (ls >> tok) throw ParseError(line_no, "trailing token '" + tok + "' after header");
      continue;
    }
    InputEdge e;
    e.u = VertexId(parse_int64(tok, line_no, "vertex id"));
    std::string vt, wt;
    if (!(ls >> vt >> wt)) throw ParseError(line_no, "expected 'u v w [F]'");
    e.v = VertexId(parse_int64(vt, line_no, "vertex id"));
    e.weight = parse_int64(wt, line_no, "weight");
    if (e.u >= n || e.v >= n)
      throw ParseError(line_no, "vertex id out of range (n=" + std::to_string(n) + ")");
    if (ls >> tok) {
      if (tok != "F") throw ParseError(line_no, "unexpected token '" + tok + "'");
      e.forced = true;
      if (ls >> tok) throw ParseError(line_no, "trailing token '" + tok + "'");
    }
    edges.push_back(e);
    if ((long long)edges.size() > m) throw ParseError(line_no, "more edges than declared");
  }
  if (n < 0) throw ParseError(line_no ? line_no : 1, "missing 'n m' header");
  if ((long long)edges.size() != m)
    throw ParseError(line_no ? line_no : 1,
                     "declared " + std::to_string(m) + " edges, found " +
                         std::to_string(edges.size()));
  return from_input(std::size_t(n), edges);
}

Multigraph Multigraph::from_input(std::size_t vertices, const std::vector<InputEdge>& edges) {
  std::vector<BuildEdge> b;
  b.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    b.push_back({edges[i].u, edges[i].v, edges[i].weight, edges[i].forced, std::int32_t(i)});
  return build(vertices, b);
}

Multigraph Multigraph::build(std::size_t vertices, const std::vector<BuildEdge>& edges) {
  Multigraph g;
  g.verts_.reserve(vertices);
  for (std::size_t i = 0; i < vertices; ++i) g.add_vertex();
  std::int32_t max_input = -1;
  for (const BuildEdge& e : edges) {
    if (e.u >= vertices || e.v >= vertices)
      throw std::invalid_argument("edge endpoint out of range");
    std::uint32_t prov = e.input >= 0 ? g.prov_leaf(e.input) : kNone;
    g.add_edge(e.u, e.v, e.weight, e.forced, prov);
    max_input = std::max(max_input, e.input);
  }
  for (VertexId v = 0; v < vertices; ++v)
    if (g.degree(v) > 4)
      throw std::invalid_argument("vertex " + std::to_string(v) + " has degree " +
                                  std::to_string(g.degree(v)) + " (maximum is 4)");
  g.input_edges_ = std::size_t(max_input + 1);
  g.trail_.clear();  // the assembled graph is the baseline state
  g.drop_feeds();
  return g;
}

int Multigraph::max_degree() const {
  int d = 0;
  for (const VertexRecord& v : verts_)
    if (v.alive) d = std::max(d, int(v.inc.size()));
  return d;
}

bool Multigraph::is_simple() const {
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (!edges_[e].alive) continue;
    if (is_loop(e)) return false;
    for (EdgeId f : verts_[edges_[e].u].inc)
      if (f != e && edges_[f].alive && other_end(f, edges_[e].u) == edges_[e].v) return false;
  }
  return true;
}

std::vector<VertexId> Multigraph::live_vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < verts_.size(); ++v)
    if (verts_[v].alive) out.push_back(v);
  return out;
}

std::vector<EdgeId> Multigraph::live_edges() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < edges_.size(); ++e)
    if (edges_[e].alive) out.push_back(e);
  return out;
}

std::vector<EdgeId> Multigraph::forced_edge_ids() const {
  return {forced_set_.begin(), forced_set_.end()};
}

std::vector<EdgeId> Multigraph::edges_between(VertexId u, VertexId v) const {
  std::vector<EdgeId> out;
  for (EdgeId e : verts_[u].inc) {
    if (!edges_[e].alive) continue;
    if (u == v) {
      if (is_loop(e) && edges_[e].u == u) out.push_back(e);
    } else if (other_end(e, u) == v) {
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> Multigraph::provenance(EdgeId e) const {
  std::vector<std::uint32_t> out;
  collect_provenance(edges_[e].prov, out);
  std::sort(out.begin(), out.end());
  return out;
}

void Multigraph::collect_provenance(std::uint32_t node, std::vector<std::uint32_t>& out) const {
  if (node == kNone) return;
  // Iterative DFS; union trees can be deep after long contraction chains.
  std::vector<std::uint32_t> stack{node};
  while (!stack.empty()) {
    const ProvNode& p = prov_[stack.back()];
    stack.pop_back();
    if (p.input >= 0) {
      out.push_back(std::uint32_t(p.input));
    } else {
      stack.push_back(p.left);
      stack.push_back(p.right);
    }
  }
}

std::uint32_t Multigraph::prov_leaf(std::int32_t input) {
  prov_.push_back({input, kNone, kNone});
  return std::uint32_t(prov_.size() - 1);
}

std::uint32_t Multigraph::prov_union(std::uint32_t a, std::uint32_t b) {
  if (a == kNone) return b;
  if (b == kNone) return a;
  prov_.push_back({-1, a, b});
  return std::uint32_t(prov_.size() - 1);
}

void Multigraph::inc_insert(VertexId v, EdgeId e) { verts_[v].inc.push_back(e); }

void Multigraph::inc_remove(VertexId v, EdgeId e) {
  auto& inc = verts_[v].inc;
  auto it = std::find(inc.begin(), inc.end(), e);
  assert(it != inc.end());
  *it = inc.back();
  inc.pop_back();
}

VertexId Multigraph::add_vertex() {
  verts_.push_back({{}, 0, true});
  ++live_vertices_;
  VertexId v = VertexId(verts_.size() - 1);
  trail_.push_back({TrailRec::Op::VertexAdd, v, 0});
  touch(v);
  return v;
}

void Multigraph::attach_edge(EdgeId e) {
  EdgeRecord& r = edges_[e];
  r.alive = true;
  inc_insert(r.u, e);
  inc_insert(r.v, e);
  ++live_edges_;
  if (r.forced) {
    ++forced_edges_;
    forced_weight_ += r.weight;
    verts_[r.u].forced_ends += 1;
    verts_[r.v].forced_ends += 1;
    forced_set_.insert(e);
  }
  touch(r.u);
  touch(r.v);
}

void Multigraph::detach_edge(EdgeId e) {
  EdgeRecord& r = edges_[e];
  r.alive = false;
  inc_remove(r.u, e);
  inc_remove(r.v, e);
  --live_edges_;
  if (r.forced) {
    --forced_edges_;
    forced_weight_ -= r.weight;
    verts_[r.u].forced_ends -= 1;
    verts_[r.v].forced_ends -= 1;
    forced_set_.erase(e);
  }
  touch(r.u);
  touch(r.v);
}

EdgeId Multigraph::add_edge(VertexId u, VertexId v, std::int64_t w, bool forced,
                            std::uint32_t prov) {
  assert(verts_[u].alive && verts_[v].alive);
  edges_.push_back({u, v, w, prov, forced, false});
  EdgeId e = EdgeId(edges_.size() - 1);
  attach_edge(e);
  trail_.push_back({TrailRec::Op::EdgeAdd, e, 0});
  return e;
}

void Multigraph::delete_edge(EdgeId e) {
  assert(edges_[e].alive);
  detach_edge(e);
  trail_.push_back({TrailRec::Op::EdgeDel, e, 0});
}

void Multigraph::delete_vertex(VertexId v) {
  assert(verts_[v].alive);
  if (!verts_[v].inc.empty()) throw std::logic_error("delete_vertex: vertex not isolated");
  verts_[v].alive = false;
  --live_vertices_;
  trail_.push_back({TrailRec::Op::VertexDel, v, 0});
  touch(v);
}

void Multigraph::force_edge(EdgeId e) {
  EdgeRecord& r = edges_[e];
  assert(r.alive);
  if (r.forced) throw std::logic_error("force_edge: already forced");
  r.forced = true;
  ++forced_edges_;
  forced_weight_ += r.weight;
  verts_[r.u].forced_ends += 1;
  verts_[r.v].forced_ends += 1;
  forced_set_.insert(e);
  trail_.push_back({TrailRec::Op::Force, e, 0});
  forced_events_.push_back({e, true});
  touch(r.u);
  touch(r.v);
}

void Multigraph::add_weight(EdgeId e, std::int64_t delta) {
  EdgeRecord& r = edges_[e];
  assert(r.alive);
  trail_.push_back({TrailRec::Op::Weight, e, std::bit_cast<std::uint64_t>(r.weight)});
  r.weight += delta;
  if (r.forced) forced_weight_ += delta;
}

void Multigraph::merge_provenance(EdgeId e, EdgeId source) {
  EdgeRecord& r = edges_[e];
  assert(r.alive && edges_[source].alive);
  trail_.push_back({TrailRec::Op::Prov, e, r.prov});
  r.prov = prov_union(r.prov, edges_[source].prov);
}

EdgeId Multigraph::merge_path(VertexId via, EdgeId e1, EdgeId e2) {
  assert(edges_[e1].alive && edges_[e2].alive && e1 != e2);
  assert(edges_[e1].forced && edges_[e2].forced);
  assert(!is_loop(e1) && !is_loop(e2));
  VertexId a = other_end(e1, via);
  VertexId b = other_end(e2, via);
  // Clear any remaining edges at via (at most one in a degree-3 graph).
  for (std::vector<EdgeId> inc = verts_[via].inc; EdgeId e : inc) {
    if (e == e1 || e == e2 || !edges_[e].alive) continue;
    if (edges_[e].forced) throw std::logic_error("merge_path: extra forced edge at via");
    delete_edge(e);
  }
  std::int64_t w = edges_[e1].weight + edges_[e2].weight;
  std::uint32_t prov = prov_union(edges_[e1].prov, edges_[e2].prov);
  delete_edge(e1);
  delete_edge(e2);
  delete_vertex(via);
  return add_edge(a, b, w, true, prov);
}

VertexId Multigraph::contract_triangle(VertexId x, VertexId y, VertexId z) {
  const VertexId tri[3] = {x, y, z};
  EdgeId side[3];  // yz, xz, xy
  const std::pair<VertexId, VertexId> pairs[3] = {{y, z}, {x, z}, {x, y}};
  for (int i = 0; i < 3; ++i) {
    auto es = edges_between(pairs[i].first, pairs[i].second);
    if (es.size() != 1) throw std::logic_error("contract_triangle: side edge not unique");
    side[i] = es[0];
  }
  for (int i = 0; i < 3; ++i) delete_edge(side[i]);
  VertexId s = add_vertex();
  for (VertexId v : tri) {
    for (std::vector<EdgeId> inc = verts_[v].inc; EdgeId e : inc) {
      if (!edges_[e].alive) continue;
      VertexId far = other_end(e, v);
      if (far == x || far == y || far == z || is_loop(e))
        throw std::logic_error("contract_triangle: unexpected local structure");
      move_endpoint(e, v, s);
    }
  }
  for (VertexId v : tri) delete_vertex(v);
  return s;
}

void Multigraph::move_endpoint(EdgeId e, VertexId from, VertexId to) {
  EdgeRecord& r = edges_[e];
  assert(r.alive && (r.u == from || r.v == from) && r.u != r.v);
  int end = r.u == from ? 0 : 1;
  trail_.push_back(
      {TrailRec::Op::Endpoint, e, (std::uint64_t(end) << 32) | std::uint64_t(from)});
  inc_remove(from, e);
  inc_insert(to, e);
  if (end == 0)
    r.u = to;
  else
    r.v = to;
  if (r.forced) {
    verts_[from].forced_ends -= 1;
    verts_[to].forced_ends += 1;
  }
  touch(from);
  touch(to);
  touch(other_end(e, to));
}

void Multigraph::undo_to(TrailMark m) {
  if (m > trail_.size()) throw std::logic_error("undo_to: stale trail mark");
  while (trail_.size() > m) {
    TrailRec rec = trail_.back();
    trail_.pop_back();
    switch (rec.op) {
      case TrailRec::Op::EdgeAdd:
        detach_edge(rec.id);
        break;
      case TrailRec::Op::EdgeDel:
        attach_edge(rec.id);
        break;
      case TrailRec::Op::VertexAdd:
        assert(verts_[rec.id].inc.empty());
        verts_[rec.id].alive = false;
        --live_vertices_;
        touch(rec.id);
        break;
      case TrailRec::Op::VertexDel:
        verts_[rec.id].alive = true;
        ++live_vertices_;
        touch(rec.id);
        break;
      case TrailRec::Op::Force: {
        EdgeRecord& r = edges_[rec.id];
        r.forced = false;
        --forced_edges_;
        forced_weight_ -= r.weight;
        verts_[r.u].forced_ends -= 1;
        verts_[r.v].forced_ends -= 1;
        forced_set_.erase(rec.id);
        forced_events_.push_back({rec.id, false});
        touch(r.u);
        touch(r.v);
        break;
      }
      case TrailRec::Op::Weight: {
        EdgeRecord& r = edges_[rec.id];
        std::int64_t old = std::bit_cast<std::int64_t>(rec.payload);
        if (r.forced) forced_weight_ += old - r.weight;
        r.weight = old;
        break;
      }
      case TrailRec::Op::Prov:
        edges_[rec.id].prov = std::uint32_t(rec.payload);
        break;
      case TrailRec::Op::Endpoint: {
        EdgeRecord& r = edges_[rec.id];
        int end = int(rec.payload >> 32);
        VertexId old = VertexId(rec.payload & 0xffffffffu);
        VertexId cur = end == 0 ? r.u : r.v;
        inc_remove(cur, rec.id);
        inc_insert(old, rec.id);
        if (end == 0)
          r.u = old;
        else
          r.v = old;
        if (r.forced) {
          verts_[cur].forced_ends -= 1;
          verts_[old].forced_ends += 1;
        }
        touch(cur);
        touch(old);
        touch(other_end(rec.id, old));
        break;
      }
    }
  }
}

std::string Multigraph::canonical_text() const {
  std::vector<VertexId> live = live_vertices();
  std::vector<std::uint32_t> remap(verts_.size(), kNone);
  for (std::size_t i = 0; i < live.size(); ++i) remap[live[i]] = std::uint32_t(i);
  struct Line {
    std::uint32_t a, b;
    std::int64_t w;
    bool f;
    std::vector<std::uint32_t> prov;
    bool operator<(const Line& o) const {
      return std::tie(a, b, w, f, prov) < std::tie(o.a, o.b, o.w, o.f, o.prov);
    }
  };
  std::vector<Line> lines;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (!edges_[e].alive) continue;
    Line l;
    l.a = remap[edges_[e].u];
    l.b = remap[edges_[e].v];
    if (l.a > l.b) std::swap(l.a, l.b);
    l.w = edges_[e].weight;
    l.f = edges_[e].forced;
    l.prov = provenance(e);
    lines.push_back(std::move(l));
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream out;
  out << live.size() << ' ' << lines.size() << '\n';
  for (const Line& l : lines) {
    out << l.a << ' ' << l.b << ' ' << l.w << (l.f ? " F" : "") << " [";
    for (std::size_t i = 0; i < l.prov.size(); ++i) out << (i ? "," : "") << l.prov[i];
    out << "]\n";
  }
  return out.str();
}

}  // namespace cubictsp
