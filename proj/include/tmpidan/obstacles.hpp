#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmpidan/motion.hpp"

namespace tmpidan {

class NoFeasibleAngle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DegenerateRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Extremal feasible grasp angles, both in [-pi/2, pi/2].
struct GraspAngleRange {
    double alpha = 0.0;  // maximum
    double beta = 0.0;   // minimum
};

// Triangle (or capsule when alpha == beta) spanned by the grasp rays,
// offset outward by `inflation` on all sides (Minkowski sum with a disc,
// so corners are rounded).
struct InflatedTriangle {
    Polygon vertices;  // 3 points, or 2 for the degenerate capsule
    double inflation = 0.0;
    bool degenerate = false;

    bool intersects(const Footprint& f) const;
};

struct ObstacleHeuristicParams {
    int angle_count = 19;
    double budget_ms = 50.0;  // per obstacle-free feasibility probe
    std::uint64_t seed = 0;
};

// The discretized grasp angles over [-pi/2, pi/2].
std::vector<double> discretized_angles(int count = 19);

// Angles at which a plan succeeds with every obstacle removed from the
// collision set; reach and table bounds still apply.  Throws
// NoFeasibleAngle when the set is empty.
std::vector<double> feasible_angles(const WorkspaceSnapshot& ws, const std::string& robot,
                                    const std::string& target, MotionPlanner& planner,
                                    const ObstacleHeuristicParams& params = {});

GraspAngleRange grasp_angle_range(const WorkspaceSnapshot& ws, const std::string& robot,
                                  const std::string& target, MotionPlanner& planner,
                                  const ObstacleHeuristicParams& params = {});

InflatedTriangle build_triangle(const WorkspaceSnapshot& ws, const std::string& robot,
                                const std::string& target, const GraspAngleRange& range);

// Movable, non-target objects whose footprint intersects the inflated
// triangle for this robot/target pair (the set O_{r,t}).
std::set<std::string> objects_to_rearrange(const WorkspaceSnapshot& ws, const std::string& robot,
                                           const std::string& target, MotionPlanner& planner,
                                           const ObstacleHeuristicParams& params = {});

std::set<std::string> objects_in_triangle(const WorkspaceSnapshot& ws, const std::string& target,
                                          const InflatedTriangle& tri);

}  // namespace tmpidan
