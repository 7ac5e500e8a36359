#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubictsp/graph.hpp"

namespace cubictsp {

// Brute-force ground truth, independent of the reduction-based solver:
// a subset dynamic program for the optimum and exhaustive path extension
// for cycle enumeration.  Test and verification use only.

// Exact minimum cost of a Hamiltonian cycle containing every forced edge,
// or nullopt if none exists.  Forced edges are honored by subdividing them,
// so nothing here shares logic with the reduction rules.  Refuses instances
// whose (subdivided) vertex count exceeds max_vertices.
std::optional<std::int64_t> oracle_tsp(const Multigraph& g, std::size_t max_vertices = 18);

// All Hamiltonian cycles containing every forced edge, as sorted input-edge
// id sets, deduplicated and sorted.  Parallel edges yield distinct cycles.
std::vector<std::vector<std::uint32_t>> oracle_cycles(const Multigraph& g,
                                                      std::size_t max_vertices = 14);

// Lexicographically least rotation/reflection of a closed vertex sequence.
std::vector<VertexId> canonical_cycle(std::vector<VertexId> seq);

// Checks that `tour` (input-edge ids) is a Hamiltonian cycle of g containing
// all forced edges; returns its cost, or an explanation of the violation.
struct TourCheck {
  bool ok = false;
  std::int64_t cost = 0;
  std::string error;
};
TourCheck check_tour(const Multigraph& g, const std::vector<std::uint32_t>& tour);

}  // namespace cubictsp
