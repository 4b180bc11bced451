#pragma once

#include <stdexcept>

#include "tmpidan/planner.hpp"

namespace tmpidan {

class PackingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cluttered table-top retrieval: all arcs in OR, rearrangement strategies
// ordered by cost (closest-to-target, closest-to-arms, push).
DomainTemplate clutter_template();

// Tower of Hanoi single-move graph: 21 nodes, 33 hyper-arcs.
DomainTemplate hanoi_template();

// Unfolded meal-preparation sequence with non-geometric wash/cook actions.
DomainTemplate kitchen_template();

// Rejection-sampled non-overlapping discs; deterministic per seed.
Scenario generate_clutter(int n_objects, int n_robots, int n_targets, std::uint64_t seed);

Scenario hanoi_scenario(int n_disks);

Scenario kitchen_scenario();

// Rod occupancy helper shared with tests: disk ids bottom-to-top per rod.
std::map<std::string, std::vector<std::string>> hanoi_stacks(const WorkspaceSnapshot& ws);

}  // namespace tmpidan
