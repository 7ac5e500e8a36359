#pragma once

#include <optional>
#include <vector>

#include "cubictsp/reduce.hpp"

namespace cubictsp {

struct Solution {
  std::int64_t cost = 0;
  std::vector<std::uint32_t> tour;  // sorted input edge ids
};

// True when every component of the unforced subgraph is a 4-cycle.
bool covers_disjoint_four_cycles(const Engine& eng);

// Exact optimum for that case: per 4-cycle keep the cheaper opposite pair H_i,
// then join the components of F∪H by a minimum spanning tree whose edge costs
// are the per-cycle costs of switching H_i for the other pair.  Returns
// nullopt when the component graph cannot be connected.
std::optional<Solution> solve_four_cycles(const Engine& eng);

}  // namespace cubictsp
