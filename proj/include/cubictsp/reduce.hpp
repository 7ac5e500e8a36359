#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cubictsp/graph.hpp"

namespace cubictsp {

enum class ReduceMode { Tsp, Listing };

// Patterns whose match sets are maintained incrementally: a constant-radius
// rescan around every mutated vertex keeps each set equal to the set of all
// current matches, so picking the next applicable rule is constant time.
enum class MatchKind : std::uint8_t {
  DegLow,             // vertex of degree 0 or 1
  Deg2,               // degree-2 vertex with an unforced incident edge
  Claw,               // vertex with >= 3 forced edge endpoints
  ForcedLoop,         // forced self-loop
  ForcedTwoCycle,     // two parallel forced edges
  ForcedPair,         // vertex with exactly two incident forced edges
  ParallelPair,       // parallel pair, at least one edge unforced
  UnforcedLoop,       // unforced self-loop
  Triangle,           // three mutually adjacent vertices
  TriangleForcedOpp,  // triangle corner with forced outside edge, opposite side unforced
  QuadForce,          // unforced 4-cycle, forced-adjacent opposite corners, forceable rim
  QuadBranch,         // unforced 4-cycle, >= 2 forced-adjacent corners, branchable corner
  QuadComponent,      // unforced 4-cycle forming a whole component of the unforced subgraph
  kCount
};
inline constexpr std::size_t kMatchKinds = std::size_t(MatchKind::kCount);

// Identity is (kind, ids); `touch` caches the vertices the match currently
// occupies and is refreshed whenever endpoints move.
struct Match {
  MatchKind kind{};
  std::array<std::uint32_t, 4> ids{kNone, kNone, kNone, kNone};
  std::array<std::uint32_t, 4> touch{kNone, kNone, kNone, kNone};
};

struct MatchLess {
  bool operator()(const Match& a, const Match& b) const {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.ids < b.ids;
  }
};

class MatchSets {
 public:
  bool empty(MatchKind k) const { return sets_[std::size_t(k)].empty(); }
  std::size_t size(MatchKind k) const { return sets_[std::size_t(k)].size(); }
  const std::set<Match, MatchLess>& set(MatchKind k) const { return sets_[std::size_t(k)]; }
  const Match& first(MatchKind k) const { return *sets_[std::size_t(k)].begin(); }
  bool contains(const Match& m) const { return sets_[std::size_t(m.kind)].count(m) != 0; }
  const Match* find(const Match& m) const {
    auto it = sets_[std::size_t(m.kind)].find(m);
    return it == sets_[std::size_t(m.kind)].end() ? nullptr : &*it;
  }
  const std::vector<Match>& touching(VertexId v) const {
    static const std::vector<Match> empty_list;
    return v < by_vertex_.size() ? by_vertex_[v] : empty_list;
  }
  void ensure_vertex(std::size_t cap) {
    if (by_vertex_.size() < cap) by_vertex_.resize(cap);
  }
  void insert(const Match& m);
  void erase(const Match& m);  // uses the stored touch list
  bool same_matches(const MatchSets& other) const;

 private:
  std::array<std::set<Match, MatchLess>, kMatchKinds> sets_;
  std::vector<std::vector<Match>> by_vertex_;
};

// Match discovery/validation shared by the engine and the brute-force
// recomputation the tests compare against.
void discover_matches_at(const Multigraph& g, VertexId v, std::vector<Match>& out);
bool match_valid(const Multigraph& g, Match& m);  // refreshes m.touch when valid
MatchSets recompute_match_sets(const Multigraph& g);

enum class RuleId : std::uint8_t {
  ReturnDegLow,
  ReturnClaw,
  TerminalLoop,
  TerminalTwoCycle,
  PathMerge,
  ForceDeg2,
  PruneParallel,
  PruneLoop,
  ContractTriangle,
  ForceQuad,
  ForceTriangleOpp,
  ListContract,
  CycleClosure,
  kCount
};
inline constexpr std::size_t kRuleCount = std::size_t(RuleId::kCount);
const char* rule_name(RuleId r);

struct ReduceOutcome {
  enum class Kind { None_, Cost, Output, Exhausted };
  Kind kind = Kind::Exhausted;
  std::int64_t cost = 0;
  std::vector<EdgeId> terminal_edges;  // live edges forming the terminal cycle
};

struct StepResult {
  enum class Kind { Fired, Returned, Exhausted };
  Kind kind = Kind::Exhausted;
  RuleId rule = RuleId::kCount;
  ReduceOutcome outcome;
};

struct SearchStats {
  std::uint64_t branch_nodes = 0;
  std::uint32_t max_depth = 0;
  std::uint64_t measure_violations = 0;
  std::uint64_t cycles_output = 0;
  std::uint64_t branch_quad = 0;    // branch edge next to a forced-adjacent 4-cycle
  std::uint64_t branch_forced = 0;  // branch edge adjacent to a forced edge
  std::uint64_t branch_seed = 0;    // branch with no forced edges yet
  std::array<std::uint64_t, kRuleCount> rule_fires{};
  std::int64_t s0 = 0;
  std::int64_t u0 = 0;
  std::string to_kv() const;
};

struct EngineOptions {
  bool check_invariants = true;
  bool track_forced_events = false;         // keep a feed of forced-flag flips
  std::ostream* trace = nullptr;            // one line per fired rule
  std::function<void(RuleId)> on_fire;      // test hook, called before firing
};

// Drives the reduction rules over one graph, keeping match sets, statistics
// and the measure bookkeeping in sync with every mutation and undo.
class Engine {
 public:
  explicit Engine(Multigraph& g, EngineOptions opts = {});

  Multigraph& graph() { return g_; }
  const Multigraph& graph() const { return g_; }
  const MatchSets& matches() const { return ms_; }
  SearchStats& stats() { return stats_; }
  const EngineOptions& options() const { return opts_; }

  // Applies rules until one returns or none applies.
  ReduceOutcome reduce(ReduceMode mode);
  // Applies at most one rule; exposed for rule-soundness tests.
  StepResult step(ReduceMode mode);
  std::optional<ReduceOutcome> detect_terminal(ReduceMode mode) const;

  TrailMark mark() const { return g_.mark(); }
  void undo_to(TrailMark m);
  void force_edge(EdgeId e);
  void delete_edge(EdgeId e);

  std::int64_t measure_s() const {
    return std::int64_t(g_.live_vertex_count()) - std::int64_t(g_.forced_edge_count()) -
           std::int64_t(ms_.size(MatchKind::QuadComponent));
  }
  std::int64_t measure_u() const { return std::int64_t(g_.unforced_edge_count()); }
  std::size_t four_cycle_components() const { return ms_.size(MatchKind::QuadComponent); }

  void drain_forced_events(std::vector<std::pair<EdgeId, bool>>& out) {
    out.insert(out.end(), forced_events_.begin(), forced_events_.end());
    forced_events_.clear();
  }

 private:
  void sync();
  void rescan(VertexId v);
  void trace_fire(RuleId r, const Match& m);
  StepResult fire(ReduceMode mode, RuleId r, const Match& m);

  void fire_path_merge(const Match& m);
  void fire_force_deg2(const Match& m);
  void fire_prune_parallel(const Match& m);
  void fire_prune_loop(const Match& m);
  void fire_contract_triangle(const Match& m);
  void fire_force_quad(const Match& m);
  void fire_force_triangle_opp(const Match& m);
  std::optional<ReduceOutcome> fire_list_contract(const Match& m);  // outcome on cycle closure

  Multigraph& g_;
  MatchSets ms_;
  EngineOptions opts_;
  SearchStats stats_;
  std::vector<VertexId> dirty_;
  std::vector<Match> scratch_;
  std::vector<std::pair<EdgeId, bool>> forced_events_;
};

}  // namespace cubictsp
