#include "tmpidan/obstacles.hpp"

#include <algorithm>
#include <cmath>

namespace tmpidan {

bool InflatedTriangle::intersects(const Footprint& f) const {
    if (degenerate) {
        if (vertices.size() < 2) return false;
        if (const auto* d = std::get_if<Disc>(&f.shape)) {
            return distance_point_segment(f.pose.xy(), vertices[0], vertices[1]) <
                   inflation + d->radius;
        }
        const auto poly = box_corners(std::get<BoxExtents>(f.shape), f.pose);
        return distance_segment_polygon(vertices[0], vertices[1], poly) < inflation;
    }
    return distance_polygon_footprint(vertices, f) < inflation;
}

std::vector<double> discretized_angles(int count) {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(0.0);
        return out;
    }
    for (int i = 0; i < count; ++i) {
        out.push_back(-M_PI_2 + M_PI * static_cast<double>(i) / (count - 1));
    }
    return out;
}

namespace {

// Movable objects are the re-arrangeable obstacles the probe ignores;
// fixtures are workspace structure and stay in the collision set, like the
// table bounds.
WorkspaceSnapshot without_obstacles(const WorkspaceSnapshot& ws, const std::string& target) {
    WorkspaceSnapshot bare = ws;
    bare.objects.clear();
    for (const auto& o : ws.objects) {
        if (o.id == target || o.category == ObjectCategory::Fixture) bare.objects.push_back(o);
    }
    return bare;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::vector<double> feasible_angles(const WorkspaceSnapshot& ws, const std::string& robot,
                                    const std::string& target, MotionPlanner& planner,
                                    const ObstacleHeuristicParams& params) {
    const RobotModel* r = ws.find_robot(robot);
    if (!r) throw std::runtime_error("unknown robot " + robot);
    if (!ws.find_object(target)) throw std::runtime_error("unknown target " + target);

    const WorkspaceSnapshot bare = without_obstacles(ws, target);
    std::vector<double> out;
    int index = 0;
    for (double angle : discretized_angles(params.angle_count)) {
        bool ok = false;
        for (const auto& arm : r->arms) {
            MotionDomain domain;
            domain.workspace = bare;
            domain.robot = robot;
            domain.acting_arm = arm.id;
            domain.moving_radius = r->gripper_radius;
            domain.goal = grasp_goal(target, angle, domain);
            const Vec2 start = bare.arm_ee_world(*r, arm);
            if (!collision_free(start, domain)) continue;
            const auto traj = planner.plan(domain, start, params.budget_ms,
                                           splitmix64(params.seed + 1000003ULL * index));
            if (traj) {
                ok = true;
                break;
            }
        }
        if (ok) out.push_back(angle);
        ++index;
    }
    if (out.empty()) throw NoFeasibleAngle("no feasible grasp angle for " + target + " by " + robot);
    return out;
}

GraspAngleRange grasp_angle_range(const WorkspaceSnapshot& ws, const std::string& robot,
                                  const std::string& target, MotionPlanner& planner,
                                  const ObstacleHeuristicParams& params) {
    const auto angles = feasible_angles(ws, robot, target, planner, params);
    return GraspAngleRange{*std::max_element(angles.begin(), angles.end()),
                           *std::min_element(angles.begin(), angles.end())};
}

InflatedTriangle build_triangle(const WorkspaceSnapshot& ws, const std::string& robot,
                                const std::string& target, const GraspAngleRange& range) {
    if (range.beta > range.alpha || range.alpha > M_PI_2 || range.beta < -M_PI_2)
        throw std::runtime_error("invalid grasp angle range");
    const RobotModel* r = ws.find_robot(robot);
    const ObjectModel* obj = ws.find_object(target);
    if (!r || !obj) throw std::runtime_error("unknown robot or target");

    const Vec2 origin = obj->pose.xy();
    const double cap = distance(origin, r->base_pose.xy());
    const double min_len = grasp_standoff(*obj, r->gripper_radius);

    const auto ray_end = [&](double angle) {
        const Vec2 dir = grasp_direction(ws, *r, target, angle);
        double t = min_len;
        for (const auto& o : ws.objects) {
            if (!o.on_table() || o.id == target) continue;
            // Farthest intersected obstacle wins; gaps along the ray are ignored.
            const auto exit = ray_exit_distance(origin, dir, o.footprint());
            if (exit) t = std::max(t, *exit + r->gripper_radius);
        }
        t = std::min(t, cap);
        return origin + dir * t;
    };

    InflatedTriangle tri;
    tri.inflation = r->gripper_radius;
    if (range.alpha == range.beta) {
        tri.degenerate = true;
        tri.vertices = {origin, ray_end(range.alpha)};
        return tri;
    }
    tri.vertices = {origin, ray_end(range.alpha), ray_end(range.beta)};
    return tri;
}

std::set<std::string> objects_in_triangle(const WorkspaceSnapshot& ws, const std::string& target,
                                          const InflatedTriangle& tri) {
    std::set<std::string> out;
    for (const auto& o : ws.objects) {
        if (o.id == target || !o.on_table() || !o.movable()) continue;
        if (tri.intersects(o.footprint())) out.insert(o.id);
    }
    return out;
}

std::set<std::string> objects_to_rearrange(const WorkspaceSnapshot& ws, const std::string& robot,
                                           const std::string& target, MotionPlanner& planner,
                                           const ObstacleHeuristicParams& params) {
    const auto range = grasp_angle_range(ws, robot, target, planner, params);
    const auto tri = build_triangle(ws, robot, target, range);
    return objects_in_triangle(ws, target, tri);
}

}  // namespace tmpidan
