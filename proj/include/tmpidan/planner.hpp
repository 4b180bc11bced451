#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmpidan/allocation.hpp"
#include "tmpidan/graph.hpp"
#include "tmpidan/motion.hpp"

namespace tmpidan {

struct PlannerConfig {
    std::size_t depth_limit = 256;
    double motion_budget_ms = 1000.0;
    double fail_prob = 0.0;
    std::uint64_t seed = 0;
    int angle_count = 19;
    int max_grasp_angles = 5;  // pre-checked angles simulated per arm and grasp
    bool ideal_motion = false;
    RrtParams rrt;
};

// One concrete realization of an action: the motion goal to plan for (when
// geometric) and the world effect committed on success.
struct MotionGoalSpec {
    GoalRegion region;
    std::vector<std::string> exclude_objects;
};

struct GroundedStep {
    ActionSpec action;
    std::string agent;  // arm id executing this step
    std::optional<MotionGoalSpec> motion;
    std::optional<ActionEffect> effect;
    bool rearranges = false;
};

struct Grounding {
    std::string primary_agent;
    std::vector<GroundedStep> steps;
};

// What a binding sees when grounding an arc.
struct RunContext {
    const WorkspaceSnapshot& world;
    const AugmentedGraph& graph;
    std::string robot;
    std::string task;
    const PlannerConfig& config;
    MotionPlanner& planner;
    std::uint64_t seed;
};

using StatePredicate = std::function<bool(const WorkspaceSnapshot&, const std::string& task)>;
using GroundingFn = std::function<std::vector<Grounding>(const HyperArc&,
                                                         const std::string& parent_label,
                                                         const RunContext&)>;

// phi maps node labels to snapshot predicates, xi maps arc actions to
// motion-goal constructors.
struct Binding {
    std::map<std::string, StatePredicate> state_predicates;
    GroundingFn ground;
};

struct DomainTemplate {
    std::string name;
    AndOrGraph graph;
    std::vector<AugmentedArcSpec> augment_spec;
    Binding binding;
    std::vector<std::string> agents;
};

struct RunMetrics {
    std::size_t depth = 0;
    double tp_s = 0.0;
    double mp_s = 0.0;
    std::uint64_t mp_attempts = 0;
    std::uint64_t executions = 0;
    std::size_t objects_rearranged = 0;
    bool solved = false;
    WorkCounters work;
    std::size_t graph_nodes = 0;  // per augmented graph, for the work bound
    std::size_t graph_arcs = 0;

    RunMetrics& operator+=(const RunMetrics& o);
};

struct MultiRunMetrics {
    std::map<std::string, RunMetrics> per_robot;
    Assignment assignment;
    double combined_utility = 0.0;
};

// All minimum-cost candidates, ordered by arc id; throws EmptyFeasibleSet.
std::vector<std::pair<ArcId, NodeId>> find_next_optimal(
    const std::vector<std::pair<ArcId, NodeId>>& fts, const AugmentedGraph& graph);

// One robot working one task against a (possibly shared) knowledge base.
// step() performs one arc-firing attempt or one network expansion.
class TaskRunner {
public:
    enum class Status { Running, Solved, Failed };

    TaskRunner(const DomainTemplate& tmpl, KnowledgeBase& kb, std::string robot, std::string task,
               const PlannerConfig& config);

    Status step();
    Status run();  // steps until Solved or Failed
    Status status() const { return status_; }

    const GraphNetwork& network() const { return net_; }
    RunMetrics metrics() const;

    // Executes one candidate: simulates every grounding, picks the cheapest,
    // executes with failure injection and retry over the remaining ones.
    std::optional<WorkspaceSnapshot> execute_candidate(ArcId arc);

private:
    void try_expand(TransitionReason reason);
    std::uint64_t next_seed();
    MotionDomain make_domain(const WorkspaceSnapshot& world, const std::string& arm,
                             const MotionGoalSpec& goal) const;

    struct SimulatedGrounding;
    std::optional<SimulatedGrounding> simulate(const Grounding& g);

    const DomainTemplate* tmpl_;
    KnowledgeBase* kb_;
    std::string robot_;
    std::string task_;
    PlannerConfig config_;
    GraphNetwork net_;
    MotionPlanner planner_;
    FailureModel failures_;
    std::set<ArcId> exhausted_;
    Status status_ = Status::Running;
    std::uint64_t seed_counter_ = 0;
    std::uint64_t seed_base_ = 0;
    std::uint64_t executions_ = 0;
    std::size_t rearranged_ = 0;
    double tp_s_ = 0.0;
};

RunMetrics run_single(const DomainTemplate& tmpl, const WorkspaceSnapshot& world,
                      const std::string& robot, const std::string& task,
                      const PlannerConfig& config);

// Allocation followed by per-robot sequential task queues, interleaved one
// arc-firing at a time in round-robin over a shared knowledge base.
MultiRunMetrics run_multi(const DomainTemplate& tmpl, const WorkspaceSnapshot& world,
                          const std::vector<std::string>& targets, const PlannerConfig& config);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace tmpidan
