#include "tmpidan/allocation.hpp"

#include <algorithm>
#include <random>

namespace tmpidan {

const std::set<std::string>& ObstacleLedger::raw(const std::string& robot,
                                                 const std::string& task) const {
    const auto it = raw_sets.find({robot, task});
    if (it == raw_sets.end()) throw MissingRawSet("no raw set for (" + robot + ", " + task + ")");
    return it->second;
}

std::set<std::string> ObstacleLedger::previously_credited() const {
    std::set<std::string> out;
    for (const auto& [robot, task] : history) {
        const auto& s = raw(robot, task);
        out.insert(s.begin(), s.end());
    }
    return out;
}

int corrected_count(const ObstacleLedger& ledger, const std::string& robot,
                    const std::string& task) {
    const auto& raw = ledger.raw(robot, task);
    const auto credited = ledger.previously_credited();
    int count = 0;
    for (const auto& obj : raw) {
        if (!credited.count(obj)) ++count;
    }
    return count;
}

namespace {

void validate_inputs(const std::vector<std::string>& robots, const std::vector<std::string>& tasks) {
    if (robots.empty()) throw std::invalid_argument("at least one robot required");
    if (tasks.size() < robots.size())
        throw FewerTasksThanRobots("need at least as many tasks as robots");
}

struct StepResult {
    std::string robot;
    UtilityEntry entry;
};

// One greedy step: max-utility robot for `task`, ties broken toward an
// unallocated robot, then by seeded random draw.
StepResult greedy_step(const ObstacleLedger& ledger, const std::vector<std::string>& robots,
                       const std::map<std::string, std::vector<std::string>>& queues,
                       const std::string& task, std::mt19937_64& rng) {
    double best = -1.0;
    std::vector<std::string> tied;
    std::map<std::string, UtilityEntry> entries;
    for (const auto& r : robots) {
        const int c = corrected_count(ledger, r, task);
        const double u = utility(c);
        entries[r] = UtilityEntry{c, u};
        if (u > best + 1e-12) {
            best = u;
            tied = {r};
        } else if (std::abs(u - best) <= 1e-12) {
            tied.push_back(r);
        }
    }
    std::vector<std::string> unallocated;
    for (const auto& r : tied) {
        const auto it = queues.find(r);
        if (it == queues.end() || it->second.empty()) unallocated.push_back(r);
    }
    const auto& pool = unallocated.empty() ? tied : unallocated;
    std::string chosen = pool.front();
    if (pool.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        chosen = pool[pick(rng)];
    }
    return {chosen, entries[chosen]};
}

}  // namespace

Assignment allocate_with_ledger(ObstacleLedger ledger, const std::vector<std::string>& robots,
                                const std::vector<std::string>& tasks, std::uint64_t seed) {
    validate_inputs(robots, tasks);
    std::mt19937_64 rng(seed);
    std::vector<std::string> order = tasks;
    std::shuffle(order.begin(), order.end(), rng);

    Assignment out;
    for (const auto& task : order) {
        const StepResult step = greedy_step(ledger, robots, out.queues, task, rng);
        out.robot_of_task[task] = step.robot;
        out.queues[step.robot].push_back(task);
        out.order.emplace_back(step.robot, task);
        out.combined_utility += step.entry.utility;
        out.utilities.entries[{step.robot, task}] = step.entry;
        ledger.history.emplace_back(step.robot, task);
    }
    return out;
}

Assignment exhaustive_allocate_with_ledger(const ObstacleLedger& ledger,
                                           const std::vector<std::string>& robots,
                                           const std::vector<std::string>& tasks) {
    validate_inputs(robots, tasks);
    if (robots.size() > 3 || tasks.size() > 6)
        throw TooLarge("exhaustive allocation is bounded to R <= 3, T <= 6");

    std::vector<std::string> order = tasks;
    std::sort(order.begin(), order.end());

    Assignment best;
    best.combined_utility = -1.0;
    std::vector<std::size_t> choice(tasks.size(), 0);
    do {
        // Robot choice per position, odometer-style.
        std::fill(choice.begin(), choice.end(), 0);
        while (true) {
            ObstacleLedger scratch = ledger;
            scratch.history.clear();
            Assignment cand;
            for (std::size_t i = 0; i < order.size(); ++i) {
                const std::string& robot = robots[choice[i]];
                const std::string& task = order[i];
                const int c = corrected_count(scratch, robot, task);
                cand.robot_of_task[task] = robot;
                cand.queues[robot].push_back(task);
                cand.order.emplace_back(robot, task);
                cand.combined_utility += utility(c);
                cand.utilities.entries[{robot, task}] = UtilityEntry{c, utility(c)};
                scratch.history.emplace_back(robot, task);
            }
            if (cand.combined_utility > best.combined_utility) best = std::move(cand);

            std::size_t pos = 0;
            while (pos < choice.size() && ++choice[pos] == robots.size()) {
                choice[pos] = 0;
                ++pos;
            }
            if (pos == choice.size()) break;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

ObstacleLedger compute_raw_sets(const WorkspaceSnapshot& ws, const std::vector<std::string>& robots,
                                const std::vector<std::string>& tasks, MotionPlanner& planner,
                                const ObstacleHeuristicParams& params) {
    ObstacleLedger ledger;
    for (const auto& robot : robots) {
        for (const auto& task : tasks) {
            std::set<std::string> raw;
            try {
                raw = objects_to_rearrange(ws, robot, task, planner, params);
            } catch (const NoFeasibleAngle&) {
                for (const auto& o : ws.objects) {
                    if (o.movable() && o.id != task) raw.insert(o.id);
                }
            }
            ledger.raw_sets[{robot, task}] = std::move(raw);
        }
    }
    return ledger;
}

Assignment allocate(const std::vector<std::string>& robots, const std::vector<std::string>& tasks,
                    const WorkspaceSnapshot& ws, std::uint64_t seed, MotionPlanner& planner,
                    const ObstacleHeuristicParams& params) {
    validate_inputs(robots, tasks);
    return allocate_with_ledger(compute_raw_sets(ws, robots, tasks, planner, params), robots, tasks,
                                seed);
}

Assignment exhaustive_allocate(const std::vector<std::string>& robots,
                               const std::vector<std::string>& tasks, const WorkspaceSnapshot& ws,
                               MotionPlanner& planner, const ObstacleHeuristicParams& params) {
    validate_inputs(robots, tasks);
    return exhaustive_allocate_with_ledger(compute_raw_sets(ws, robots, tasks, planner, params),
                                           robots, tasks);
}

}  // namespace tmpidan
