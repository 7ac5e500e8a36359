#pragma once

#include <functional>
#include <optional>

#include "cubictsp/four_cycle.hpp"
#include "cubictsp/reduce.hpp"

namespace cubictsp {

enum class BranchRule { Quad, Forced, Seed };

// Branch edge selection: an unforced edge off a forced-adjacent 4-cycle if
// one exists, else an unforced edge next to a forced edge, else (only while
// no edge is forced) the smallest live edge.  Ties go to the smallest id.
EdgeId choose_branch_edge(const Engine& eng, ReduceMode mode, BranchRule* rule = nullptr);

struct SolveOptions {
  bool check_invariants = true;
  bool prune = false;  // cost-bound pruning; never changes the result
  std::ostream* trace = nullptr;
  std::function<void(RuleId)> on_fire;
};

struct SolveReport {
  std::optional<Solution> solution;
  SearchStats stats;
};

// Exact minimum-cost Hamiltonian cycle containing every forced edge of a
// degree-<=3 multigraph; nullopt when none exists.  The tour is reported
// over input edge ids.  The graph is left exactly as passed in.
SolveReport solve_tsp(Multigraph& g, const SolveOptions& opts = {});

}  // namespace cubictsp
