#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tmpidan/workspace.hpp"

namespace tmpidan {

class InvalidStart : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class OutOfRangeAngle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Configuration = Vec2;

struct PointGoal {
    Vec2 center;
    double tolerance = 0.01;  // > 0
};

// Side grasp: goal sits at `standoff` from the target center along the
// approach direction, angle measured in the base->target frame within
// [-pi/2, pi/2]; the final approach segment must be straight and clear.
struct GraspApproachGoal {
    std::string target;
    double angle = 0.0;
    double standoff = 0.08;
};

using GoalRegion = std::variant<PointGoal, GraspApproachGoal>;

struct MotionDomain {
    WorkspaceSnapshot workspace;
    std::string robot;
    std::string acting_arm;
    double moving_radius = 0.03;  // gripper radius plus held-object radius
    GoalRegion goal{PointGoal{}};
    // Removed from the collision set, e.g. the object being pushed or the
    // disks below a grasped stack top.  The grasp-approach target is always
    // excluded implicitly.
    std::vector<std::string> exclude_objects;
    bool use_reach = true;

    const RobotModel& acting_robot() const;
    const ArmModel& arm() const;
    bool excluded(const std::string& id) const;
};

// Discretized map from [0,1] into free space, parameterized by arc length.
struct Trajectory {
    std::vector<Configuration> waypoints;
    double cost = 0.0;

    Configuration at(double u) const;
    Configuration end() const { return waypoints.back(); }
};

class FailureModel {
public:
    FailureModel() : rng_(0) {}
    FailureModel(double p, std::uint64_t seed);
    double probability() const { return p_; }
    // Draws from the seeded stream; false with probability p.
    bool roll() { return dist_(rng_) >= p_; }

private:
    double p_ = 0.0;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

inline bool simulate_execute(const Trajectory&, FailureModel& fm) { return fm.roll(); }

bool collision_free(const Configuration& q, const MotionDomain& domain);

// Approach direction unit vector for a side grasp (from target center
// outward, toward the robot side).
Vec2 grasp_direction(const WorkspaceSnapshot& ws, const RobotModel& robot,
                     const std::string& target, double angle);
// Standoff scaled to the target footprint: bounding radius + gripper + margin.
double grasp_standoff(const ObjectModel& target, double gripper_radius);
GoalRegion grasp_goal(const std::string& target, double angle, const MotionDomain& domain);
Vec2 goal_point(const MotionDomain& domain);
bool grasp_approach_clear(const MotionDomain& domain);
// Point goals: within their tolerance.  Grasp goals: at the grasp contact.
bool in_goal_region(const Configuration& q, const MotionDomain& domain, double tolerance = 0.01);

struct RrtParams {
    double step = 0.03;
    double goal_bias = 0.1;
    double resolution = 0.005;    // segment validation pitch
    double iters_per_ms = 30.0;   // deterministic budget interpretation
    double goal_tolerance = 0.01;
};

class MotionPlanner {
public:
    explicit MotionPlanner(RrtParams params = {}) : params_(params) {}

    // Deterministic given (domain, start, budget, seed); absent result means
    // the iteration budget ran out (or the goal is locally unreachable).
    std::optional<Trajectory> plan(const MotionDomain& domain, const Configuration& start,
                                   double budget_ms, std::uint64_t seed);

    std::uint64_t attempts() const { return attempts_; }
    double planning_seconds() const { return planning_seconds_; }
    void reset_counters() {
        attempts_ = 0;
        planning_seconds_ = 0.0;
    }

    // Oracle mode: straight-line trajectories, no collision or reach checks.
    bool ideal = false;

    const RrtParams& params() const { return params_; }

private:
    RrtParams params_;
    std::uint64_t attempts_ = 0;
    double planning_seconds_ = 0.0;
};

// Independent post-hoc check used by tests and callers: rechecks every
// waypoint and interpolated point at `resolution` along the path.
bool validate_trajectory(const Trajectory& traj, const MotionDomain& domain, double resolution);

}  // namespace tmpidan
