#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubictsp {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& msg)
      : std::runtime_error("parse error at line " + std::to_string(line) + ": " + msg),
        line_no(line) {}
  int line_no;
};

struct InputEdge {
  VertexId u = 0, v = 0;
  std::int64_t weight = 1;
  bool forced = false;
};

// Edge used when assembling a graph whose edges stand for edges of some
// earlier graph.  input < 0 means the edge is synthetic and carries empty
// provenance (it never appears in reported tours).
struct BuildEdge {
  VertexId u = 0, v = 0;
  std::int64_t weight = 1;
  bool forced = false;
  std::int32_t input = -1;
};

// Provenance nodes form an append-only forest over input edge ids: a node is
// a leaf (one input edge) or the union of two earlier nodes.  Nodes are never
// destroyed, so undoing a provenance change only restores a node index.
struct ProvNode {
  std::int32_t input = -1;
  std::uint32_t left = kNone;
  std::uint32_t right = kNone;
};

struct EdgeRecord {
  VertexId u = 0, v = 0;  // u == v for a self-loop
  std::int64_t weight = 0;
  std::uint32_t prov = kNone;
  bool forced = false;
  bool alive = false;
};

struct VertexRecord {
  std::vector<EdgeId> inc;       // incident edges; a self-loop appears twice
  std::uint8_t forced_ends = 0;  // forced edge endpoints here (a loop counts 2)
  bool alive = false;
};

using TrailMark = std::size_t;

// Mutable multigraph with exact integer weights, forced-edge flags,
// input-edge provenance, and an undo trail.  Ids are dense and never reused
// within one graph's lifetime.  Single-threaded per instance.
class Multigraph {
 public:
  Multigraph() = default;

  // Text format: first non-comment line "n m", then m lines "u v w [F]".
  // '#' starts a comment line; parallel edges and self-loops are allowed;
  // vertex degrees above 4 are rejected.
  static Multigraph load(std::istream& in);
  static Multigraph from_input(std::size_t vertices, const std::vector<InputEdge>& edges);
  static Multigraph build(std::size_t vertices, const std::vector<BuildEdge>& edges);

  std::size_t vertex_capacity() const { return verts_.size(); }
  std::size_t edge_capacity() const { return edges_.size(); }
  std::size_t live_vertex_count() const { return live_vertices_; }
  std::size_t live_edge_count() const { return live_edges_; }
  std::size_t forced_edge_count() const { return forced_edges_; }
  std::size_t unforced_edge_count() const { return live_edges_ - forced_edges_; }
  std::int64_t forced_weight() const { return forced_weight_; }
  std::size_t input_edge_count() const { return input_edges_; }

  bool vertex_alive(VertexId v) const { return verts_[v].alive; }
  bool edge_alive(EdgeId e) const { return edges_[e].alive; }
  const EdgeRecord& edge(EdgeId e) const { return edges_[e]; }
  const VertexRecord& vertex(VertexId v) const { return verts_[v]; }
  int degree(VertexId v) const { return int(verts_[v].inc.size()); }
  int forced_ends(VertexId v) const { return verts_[v].forced_ends; }
  int unforced_degree(VertexId v) const { return degree(v) - forced_ends(v); }
  bool is_loop(EdgeId e) const { return edges_[e].u == edges_[e].v; }
  VertexId other_end(EdgeId e, VertexId v) const {
    const EdgeRecord& r = edges_[e];
    return r.u == v ? r.v : r.u;
  }

  int max_degree() const;
  bool is_simple() const;  // no live parallel edges and no live self-loops
  std::vector<VertexId> live_vertices() const;
  std::vector<EdgeId> live_edges() const;
  std::vector<EdgeId> forced_edge_ids() const;
  const std::set<EdgeId>& forced_set() const { return forced_set_; }
  std::vector<EdgeId> edges_between(VertexId u, VertexId v) const;

  // Sorted input-edge ids this live edge stands for.
  std::vector<std::uint32_t> provenance(EdgeId e) const;
  void collect_provenance(std::uint32_t node, std::vector<std::uint32_t>& out) const;

  TrailMark mark() const { return trail_.size(); }
  // Restores graph state exactly as of the mark.  Throws on a stale mark.
  void undo_to(TrailMark m);

  // Primitive mutations.  All are recorded on the trail.
  VertexId add_vertex();
  EdgeId add_edge(VertexId u, VertexId v, std::int64_t w, bool forced, std::uint32_t prov);
  void delete_edge(EdgeId e);
  void delete_vertex(VertexId v);  // vertex must be isolated
  void force_edge(EdgeId e);       // unforced -> forced
  void add_weight(EdgeId e, std::int64_t delta);
  void merge_provenance(EdgeId e, EdgeId source);

  // Removes `via` together with any third edge there, replacing forced edges
  // e1, e2 by one forced edge joining their far endpoints; weight is the sum
  // and provenance the union.  Returns the replacement edge.
  EdgeId merge_path(VertexId via, EdgeId e1, EdgeId e2);

  // Deletes the three triangle edges and merges x, y, z into a fresh vertex,
  // rewiring their outside edges.  Weight/flag/provenance transfers to the
  // opposite outside edges are the caller's job and must happen first.
  VertexId contract_triangle(VertexId x, VertexId y, VertexId z);

  std::uint32_t prov_leaf(std::int32_t input);
  std::uint32_t prov_union(std::uint32_t a, std::uint32_t b);

  // Change feeds, drained by the reduction engine after every mutation batch
  // (undo included): vertices whose neighborhood changed, and forced-flag
  // transitions in order.
  void drain_dirty(std::vector<VertexId>& out) {
    out.insert(out.end(), dirty_.begin(), dirty_.end());
    dirty_.clear();
  }
  void drain_forced_events(std::vector<std::pair<EdgeId, bool>>& out) {
    out.insert(out.end(), forced_events_.begin(), forced_events_.end());
    forced_events_.clear();
  }
  void drop_forced_events() { forced_events_.clear(); }
  void drop_feeds() {
    dirty_.clear();
    forced_events_.clear();
  }

  // Canonical serialization: live vertices renumbered in id order, edges
  // sorted with weights, flags and resolved provenance.  Two graphs are
  // structurally identical iff their canonical texts match.
  std::string canonical_text() const;

 private:
  struct TrailRec {
    enum class Op : std::uint8_t {
      EdgeAdd,
      EdgeDel,
      VertexAdd,
      VertexDel,
      Force,
      Weight,
      Prov,
      Endpoint
    };
    Op op;
    std::uint32_t id = 0;
    std::uint64_t payload = 0;
  };

  void inc_insert(VertexId v, EdgeId e);
  void inc_remove(VertexId v, EdgeId e);
  void attach_edge(EdgeId e);  // shared by add_edge and EdgeDel undo
  void detach_edge(EdgeId e);  // shared by delete_edge and EdgeAdd undo
  void move_endpoint(EdgeId e, VertexId from, VertexId to);
  void touch(VertexId v) { dirty_.push_back(v); }

  std::vector<VertexRecord> verts_;
  std::vector<EdgeRecord> edges_;
  std::vector<ProvNode> prov_;
  std::set<EdgeId> forced_set_;  // live forced edges, ascending
  std::vector<TrailRec> trail_;
  std::vector<VertexId> dirty_;
  std::vector<std::pair<EdgeId, bool>> forced_events_;
  std::size_t live_vertices_ = 0;
  std::size_t live_edges_ = 0;
  std::size_t forced_edges_ = 0;
  std::int64_t forced_weight_ = 0;
  std::size_t input_edges_ = 0;
};

}  // namespace cubictsp
