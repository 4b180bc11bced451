#include "tmpidan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>

namespace tmpidan {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_str(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

RunMetrics& RunMetrics::operator+=(const RunMetrics& o) {
    depth += o.depth;
    tp_s += o.tp_s;
    mp_s += o.mp_s;
    mp_attempts += o.mp_attempts;
    executions += o.executions;
    objects_rearranged += o.objects_rearranged;
    solved = solved && o.solved;
    work += o.work;
    graph_nodes = std::max(graph_nodes, o.graph_nodes);
    graph_arcs = std::max(graph_arcs, o.graph_arcs);
    return *this;
}

std::vector<std::pair<ArcId, NodeId>> find_next_optimal(
    const std::vector<std::pair<ArcId, NodeId>>& fts, const AugmentedGraph& graph) {
    if (fts.empty()) throw EmptyFeasibleSet("no feasible transitions");
    std::vector<std::pair<ArcId, NodeId>> sorted = fts;
    std::sort(sorted.begin(), sorted.end(), [&graph](const auto& l, const auto& r) {
        const double cl = graph.graph().arc(l.first).cost;
        const double cr = graph.graph().arc(r.first).cost;
        if (cl != cr) return cl < cr;
        return l.first < r.first;
    });
    const double best = graph.graph().arc(sorted.front().first).cost;
    std::vector<std::pair<ArcId, NodeId>> out;
    for (const auto& p : sorted) {
        if (graph.graph().arc(p.first).cost > best) break;
        out.push_back(p);
    }
    return out;
}

TaskRunner::TaskRunner(const DomainTemplate& tmpl, KnowledgeBase& kb, std::string robot,
                       std::string task, const PlannerConfig& config)
    : tmpl_(&tmpl),
      kb_(&kb),
      robot_(std::move(robot)),
      task_(std::move(task)),
      config_(config),
      net_(config.depth_limit),
      planner_(config.rrt),
      failures_(config.fail_prob,
                mix_seed(config.seed, hash_str(robot_ + "#exec#" + task_))) {
    planner_.ideal = config_.ideal_motion;
    seed_base_ = mix_seed(config_.seed, hash_str(robot_ + "#" + task_ + "#" + tmpl.name));
}

std::uint64_t TaskRunner::next_seed() { return mix_seed(seed_base_, ++seed_counter_); }

MotionDomain TaskRunner::make_domain(const WorkspaceSnapshot& world, const std::string& arm,
                                     const MotionGoalSpec& goal) const {
    MotionDomain domain;
    domain.workspace = world;
    domain.robot = robot_;
    domain.acting_arm = arm;
    const RobotModel* r = world.find_robot(robot_);
    const ArmModel* a = world.find_arm(robot_, arm);
    if (!r || !a) throw std::runtime_error("grounding references unknown robot/arm");
    domain.moving_radius = r->gripper_radius;
    if (a->holding) {
        if (const ObjectModel* held = world.find_object(*a->holding))
            domain.moving_radius += shape_bounding_radius(held->shape);
    }
    domain.goal = goal.region;
    domain.exclude_objects = goal.exclude_objects;
    domain.use_reach = !config_.ideal_motion;
    return domain;
}

struct TaskRunner::SimulatedGrounding {
    const Grounding* grounding = nullptr;
    std::vector<std::optional<Trajectory>> trajectories;  // one slot per step
    double cost = 0.0;
};

std::optional<TaskRunner::SimulatedGrounding> TaskRunner::simulate(const Grounding& g) {
    WorkspaceSnapshot sim = kb_->sense();
    SimulatedGrounding out;
    out.grounding = &g;
    for (const auto& step : g.steps) {
        std::optional<Trajectory> traj;
        if (step.motion) {
            const MotionDomain domain = make_domain(sim, step.agent, *step.motion);
            const RobotModel& r = domain.acting_robot();
            const Vec2 start = sim.arm_ee_world(r, domain.arm());
            if (!planner_.ideal && !collision_free(start, domain)) {
                if (std::getenv("TMPIDAN_DEBUG"))
                    std::cerr << "[sim] start in collision for " << effect_name(step.effect ? *step.effect : ActionEffect{SenseEffect{}}) << " agent " << step.agent << "\n";
                return std::nullopt;
            }
            traj = planner_.plan(domain, start, config_.motion_budget_ms, next_seed());
            if (!traj) {
                if (std::getenv("TMPIDAN_DEBUG"))
                    std::cerr << "[sim] plan failed agent " << step.agent << "\n";
                return std::nullopt;
            }
            out.cost += traj->cost;
            if (ArmModel* a = sim.find_arm(robot_, step.agent)) a->ee = traj->end();
        }
        if (step.effect) {
            try {
                sim = apply_effect(std::move(sim), *step.effect);
            } catch (const InconsistentEffect& e) {
                if (std::getenv("TMPIDAN_DEBUG")) std::cerr << "[sim] " << e.what() << "\n";
                return std::nullopt;
            }
        }
        out.trajectories.push_back(std::move(traj));
    }
    return out;
}

std::optional<WorkspaceSnapshot> TaskRunner::execute_candidate(ArcId arc) {
    const AugmentedGraph& g = net_.active();
    const HyperArc& a = g.graph().arc(arc);
    const std::string parent_label = g.graph().node(a.parent).label;
    const RunContext ctx{kb_->sense(), g, robot_, task_, config_, planner_, next_seed()};
    const std::vector<Grounding> groundings = tmpl_->binding.ground(a, parent_label, ctx);
    if (std::getenv("TMPIDAN_DEBUG"))
        std::cerr << "[cand] arc " << arc << " -> " << parent_label << " groundings "
                  << groundings.size() << "\n";
    if (groundings.empty()) return std::nullopt;

    std::vector<bool> alive(groundings.size(), true);
    while (true) {
        // In-the-loop simulation of every remaining grounding, then the
        // cheapest plan is executed (FBT); a failed execution discards that
        // plan and the next one is selected.
        std::optional<SimulatedGrounding> best;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < groundings.size(); ++i) {
            if (!alive[i]) continue;
            auto sim = simulate(groundings[i]);
            if (!sim) {
                alive[i] = false;
                continue;
            }
            if (!best || sim->cost < best->cost) {
                best = std::move(sim);
                best_index = i;
            }
        }
        if (!best) return std::nullopt;

        bool ok = true;
        for (std::size_t k = 0; k < best->grounding->steps.size(); ++k) {
            const GroundedStep& step = best->grounding->steps[k];
            if (step.motion) {
                ++executions_;
                if (!simulate_execute(*best->trajectories[k], failures_)) {
                    ok = false;
                    break;
                }
            }
            try {
                // Commit the arm motion first so effects observe the same
                // end-effector state the simulation did.
                if (step.motion)
                    kb_->apply(ArmMoveEffect{robot_, step.agent, best->trajectories[k]->end()});
                if (step.effect) kb_->apply(*step.effect);
            } catch (const InconsistentEffect&) {
                ok = false;
                break;
            }
            if (step.rearranges) ++rearranged_;
        }
        if (ok) return kb_->sense();
        alive[best_index] = false;
    }
}

void TaskRunner::try_expand(TransitionReason reason) {
    if (net_.depth() >= net_.depth_limit()) {
        status_ = Status::Failed;  // DepthLimitReached, recorded as unsolved
        return;
    }
    net_.expand(tmpl_->graph, kb_->sense(), tmpl_->augment_spec, reason);
    exhausted_.clear();
}

TaskRunner::Status TaskRunner::step() {
    if (status_ != Status::Running) return status_;
    const auto t0 = std::chrono::steady_clock::now();
    const double mp_before = planner_.planning_seconds();

    if (net_.empty()) {
        net_.expand(tmpl_->graph, kb_->sense(), tmpl_->augment_spec);
    } else {
        AugmentedGraph& g = net_.active();
        if (g.is_solved()) {
            status_ = Status::Solved;
        } else if (g.has_failure_terminal_achieved()) {
            try_expand(TransitionReason::FailureTerminal);
        } else {
            std::vector<std::pair<ArcId, NodeId>> fts;
            for (const auto& p : g.feasible_transitions()) {
                if (!exhausted_.count(p.first)) fts.push_back(p);
            }
            if (fts.empty()) {
                // All remaining candidates returned NULL: retry by expanding
                // with the current (possibly identical) configuration.
                try_expand(TransitionReason::Exhausted);
            } else {
                for (const auto& [arc, node] : find_next_optimal(fts, g)) {
                    const auto nc = execute_candidate(arc);
                    if (nc) {
                        g.fire(arc);
                        if (g.is_solved()) status_ = Status::Solved;
                        break;
                    }
                    exhausted_.insert(arc);
                }
            }
        }
    }

    tp_s_ += std::max(0.0, seconds_since(t0) - (planner_.planning_seconds() - mp_before));
    return status_;
}

TaskRunner::Status TaskRunner::run() {
    while (step() == Status::Running) {
    }
    return status_;
}

RunMetrics TaskRunner::metrics() const {
    RunMetrics m;
    m.depth = net_.depth();
    m.tp_s = tp_s_;
    m.mp_s = planner_.planning_seconds();
    m.mp_attempts = planner_.attempts();
    m.executions = executions_;
    m.objects_rearranged = rearranged_;
    m.solved = status_ == Status::Solved;
    m.work = net_.total_work();
    if (!net_.empty()) {
        m.graph_nodes = net_.graphs().front().graph().nodes().size();
        m.graph_arcs = net_.graphs().front().graph().arcs().size();
    }
    return m;
}

RunMetrics run_single(const DomainTemplate& tmpl, const WorkspaceSnapshot& world,
                      const std::string& robot, const std::string& task,
                      const PlannerConfig& config) {
    KnowledgeBase kb(world);
    TaskRunner runner(tmpl, kb, robot, task, config);
    runner.run();
    return runner.metrics();
}

MultiRunMetrics run_multi(const DomainTemplate& tmpl, const WorkspaceSnapshot& world,
                          const std::vector<std::string>& targets, const PlannerConfig& config) {
    std::vector<std::string> robots;
    for (const auto& r : world.robots) robots.push_back(r.id);

    MotionPlanner alloc_planner(config.rrt);
    alloc_planner.ideal = config.ideal_motion;
    ObstacleHeuristicParams heuristic{config.angle_count, 50.0, config.seed};
    MultiRunMetrics out;
    out.assignment = allocate(robots, targets, world, config.seed, alloc_planner, heuristic);
    out.combined_utility = out.assignment.combined_utility;

    KnowledgeBase kb(world);
    struct RobotState {
        std::vector<std::string> queue;
        std::size_t next = 0;
        std::unique_ptr<TaskRunner> runner;
        RunMetrics metrics;
        bool first = true;
    };
    std::map<std::string, RobotState> states;
    for (const auto& r : robots) {
        states[r].queue = out.assignment.queues.count(r) ? out.assignment.queues.at(r)
                                                         : std::vector<std::string>{};
        states[r].metrics.solved = true;
    }

    // Round-robin: one arc-firing (or expansion) per robot per turn, so
    // shared-workspace commits are totally ordered.
    bool any_active = true;
    while (any_active) {
        any_active = false;
        for (const auto& r : robots) {
            RobotState& st = states[r];
            if (!st.runner) {
                if (st.next >= st.queue.size()) continue;
                st.runner = std::make_unique<TaskRunner>(tmpl, kb, r, st.queue[st.next], config);
            }
            any_active = true;
            const auto status = st.runner->step();
            if (status != TaskRunner::Status::Running) {
                RunMetrics m = st.runner->metrics();
                if (st.first) {
                    const bool solved_all = st.metrics.solved && m.solved;
                    st.metrics = m;
                    st.metrics.solved = solved_all;
                    st.first = false;
                } else {
                    st.metrics += m;
                }
                st.runner.reset();
                ++st.next;
            }
        }
    }
    for (const auto& r : robots) out.per_robot[r] = states[r].metrics;
    return out;
}

}  // namespace tmpidan
