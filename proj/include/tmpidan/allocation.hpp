#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmpidan/obstacles.hpp"

namespace tmpidan {

class MissingRawSet : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class FewerTasksThanRobots : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class TooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raw rearrangement sets O_{r,t} plus the allocation history needed for
// intra-/inter-robot double-counting corrections.
struct ObstacleLedger {
    std::map<std::pair<std::string, std::string>, std::set<std::string>> raw_sets;
    std::vector<std::pair<std::string, std::string>> history;  // (robot, task), in allocation order

    const std::set<std::string>& raw(const std::string& robot, const std::string& task) const;
    // Union of the raw sets of every previously allotted (robot, task) pair.
    std::set<std::string> previously_credited() const;
};

// |O_{r,t}| minus every object already credited to a previously allotted
// task (own or other robots'), via the union rule; never negative.
int corrected_count(const ObstacleLedger& ledger, const std::string& robot,
                    const std::string& task);

inline double utility(int corrected) { return 1.0 / (1.0 + corrected); }

struct UtilityEntry {
    int corrected_count = 0;
    double utility = 1.0;
};

struct UtilityMatrix {
    std::map<std::pair<std::string, std::string>, UtilityEntry> entries;
};

struct Assignment {
    std::map<std::string, std::string> robot_of_task;
    std::map<std::string, std::vector<std::string>> queues;  // robot -> ordered tasks
    std::vector<std::pair<std::string, std::string>> order;  // allocation sequence
    double combined_utility = 0.0;
    UtilityMatrix utilities;  // entries at assignment time
};

// Greedy sequential assignment over a seeded random task order; ties prefer
// a robot with no task yet, then seeded random.
Assignment allocate_with_ledger(ObstacleLedger ledger, const std::vector<std::string>& robots,
                                const std::vector<std::string>& tasks, std::uint64_t seed);

// Exhaustive maximization of the combined utility over every task order and
// robot choice; oracle-sized instances only (R <= 3, T <= 6).
Assignment exhaustive_allocate_with_ledger(const ObstacleLedger& ledger,
                                           const std::vector<std::string>& robots,
                                           const std::vector<std::string>& tasks);

// Raw sets computed offline from the snapshot via the triangle heuristic;
// a robot that cannot reach a target at any angle is charged every movable
// object so its utility stays positive but minimal.
ObstacleLedger compute_raw_sets(const WorkspaceSnapshot& ws, const std::vector<std::string>& robots,
                                const std::vector<std::string>& tasks, MotionPlanner& planner,
                                const ObstacleHeuristicParams& params = {});

Assignment allocate(const std::vector<std::string>& robots, const std::vector<std::string>& tasks,
                    const WorkspaceSnapshot& ws, std::uint64_t seed, MotionPlanner& planner,
                    const ObstacleHeuristicParams& params = {});

Assignment exhaustive_allocate(const std::vector<std::string>& robots,
                               const std::vector<std::string>& tasks, const WorkspaceSnapshot& ws,
                               MotionPlanner& planner, const ObstacleHeuristicParams& params = {});

}  // namespace tmpidan
