#include "tmpidan/motion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tmpidan {

const RobotModel& MotionDomain::acting_robot() const {
    const RobotModel* r = workspace.find_robot(robot);
    if (!r) throw std::runtime_error("motion domain references unknown robot " + robot);
    return *r;
}

const ArmModel& MotionDomain::arm() const {
    const ArmModel* a = workspace.find_arm(robot, acting_arm);
    if (!a) throw std::runtime_error("motion domain references unknown arm " + acting_arm);
    return *a;
}

FailureModel::FailureModel(double p, std::uint64_t seed) : p_(p), rng_(seed) {
    if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("execution failure probability must be in [0,1)");
}

Configuration Trajectory::at(double u) const {
    if (waypoints.empty()) return {};
    if (waypoints.size() == 1 || cost <= 0.0) return waypoints.front();
    u = std::clamp(u, 0.0, 1.0);
    double remaining = u * cost;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const double seg = distance(waypoints[i], waypoints[i + 1]);
        if (remaining <= seg || i + 2 == waypoints.size()) {
            const double t = seg > 0.0 ? std::min(1.0, remaining / seg) : 0.0;
            return waypoints[i] + (waypoints[i + 1] - waypoints[i]) * t;
        }
        remaining -= seg;
    }
    return waypoints.back();
}

bool MotionDomain::excluded(const std::string& id) const {
    if (const auto* g = std::get_if<GraspApproachGoal>(&goal)) {
        if (g->target == id) return true;
    }
    for (const auto& e : exclude_objects)
        if (e == id) return true;
    return false;
}

bool collision_free(const Configuration& q, const MotionDomain& domain) {
    if (!std::isfinite(q.x) || !std::isfinite(q.y)) return false;
    if (!domain.workspace.in_workspace(q)) return false;
    if (domain.use_reach) {
        const RobotModel& r = domain.acting_robot();
        const ArmModel& a = domain.arm();
        if (distance(q, domain.workspace.arm_reach_center_world(r, a)) > a.reach_radius) return false;
    }
    for (const auto& o : domain.workspace.objects) {
        if (!o.on_table()) continue;
        if (domain.excluded(o.id)) continue;
        if (disc_intersects_footprint(q, domain.moving_radius, o.footprint())) return false;
    }
    return true;
}

Vec2 grasp_direction(const WorkspaceSnapshot& ws, const RobotModel& robot,
                     const std::string& target, double angle) {
    const ObjectModel* obj = ws.find_object(target);
    if (!obj) throw std::runtime_error("grasp target does not exist: " + target);
    const Vec2 to_base = (robot.base_pose.xy() - obj->pose.xy()).normalized();
    return to_base.rotated(angle);
}

double grasp_standoff(const ObjectModel& target, double gripper_radius) {
    return shape_bounding_radius(target.shape) + gripper_radius + 0.03;
}

GoalRegion grasp_goal(const std::string& target, double angle, const MotionDomain& domain) {
    if (angle < -M_PI_2 || angle > M_PI_2)
        throw OutOfRangeAngle("grasp angle outside [-pi/2, pi/2]");
    const ObjectModel* obj = domain.workspace.find_object(target);
    if (!obj) throw std::runtime_error("grasp target does not exist: " + target);
    return GraspApproachGoal{target, angle,
                             grasp_standoff(*obj, domain.acting_robot().gripper_radius)};
}

Vec2 goal_point(const MotionDomain& domain) {
    if (const auto* p = std::get_if<PointGoal>(&domain.goal)) return p->center;
    const auto& g = std::get<GraspApproachGoal>(domain.goal);
    const ObjectModel* obj = domain.workspace.find_object(g.target);
    if (!obj) throw std::runtime_error("grasp target does not exist: " + g.target);
    const Vec2 dir = grasp_direction(domain.workspace, domain.acting_robot(), g.target, g.angle);
    return obj->pose.xy() + dir * g.standoff;
}

bool grasp_approach_clear(const MotionDomain& domain) {
    const auto* g = std::get_if<GraspApproachGoal>(&domain.goal);
    if (!g) return true;
    const ObjectModel* obj = domain.workspace.find_object(g->target);
    if (!obj) return false;
    const Vec2 standoff_pt = goal_point(domain);
    const Vec2 contact = obj->pose.xy();
    for (const auto& o : domain.workspace.objects) {
        if (!o.on_table()) continue;
        if (domain.excluded(o.id)) continue;
        if (capsule_intersects_footprint(standoff_pt, contact, domain.moving_radius, o.footprint()))
            return false;
    }
    return true;
}

bool in_goal_region(const Configuration& q, const MotionDomain& domain, double tolerance) {
    if (const auto* p = std::get_if<PointGoal>(&domain.goal))
        return distance(q, p->center) <= p->tolerance;
    const auto& g = std::get<GraspApproachGoal>(domain.goal);
    const ObjectModel* obj = domain.workspace.find_object(g.target);
    return obj && distance(q, obj->pose.xy()) <= tolerance;
}

namespace {

bool segment_free(const Vec2& a, const Vec2& b, const MotionDomain& domain, double resolution) {
    const double len = distance(a, b);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int i = 1; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        if (!collision_free(a + (b - a) * t, domain)) return false;
    }
    return true;
}

double path_length(const std::vector<Vec2>& pts) {
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) c += distance(pts[i], pts[i + 1]);
    return c;
}

// Uniform-grid nearest neighbor index over the planning bounds.
class BucketIndex {
public:
    BucketIndex(const Rect& bounds, double cell) : bounds_(bounds), cell_(cell) {
        nx_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell)));
        ny_ = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell)));
        cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    }

    void insert(const Vec2& p, int idx) { cells_[cell_of(p)].push_back(idx); }

    int nearest(const Vec2& q, const std::vector<Vec2>& pts) const {
        const int cx = clamp_x(static_cast<int>((q.x - bounds_.min.x) / cell_));
        const int cy = clamp_y(static_cast<int>((q.y - bounds_.min.y) / cell_));
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nx_, ny_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            // Once a hit exists, rings beyond best distance cannot improve.
            if (best >= 0) {
                const double safe = (ring - 1) * cell_;
                if (safe > 0.0 && safe * safe > best_d2) break;
            }
            const int x0 = cx - ring, x1 = cx + ring, y0 = cy - ring, y1 = cy + ring;
            for (int y = y0; y <= y1; ++y) {
                if (y < 0 || y >= ny_) continue;
                for (int x = x0; x <= x1; ++x) {
                    if (x < 0 || x >= nx_) continue;
                    if (ring > 0 && x != x0 && x != x1 && y != y0 && y != y1) continue;
                    for (int idx : cells_[static_cast<std::size_t>(y) * nx_ + x]) {
                        const double d2 = (pts[idx] - q).squared_norm();
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = idx;
                        }
                    }
                }
            }
        }
        return best;
    }

private:
    std::size_t cell_of(const Vec2& p) const {
        const int x = clamp_x(static_cast<int>((p.x - bounds_.min.x) / cell_));
        const int y = clamp_y(static_cast<int>((p.y - bounds_.min.y) / cell_));
        return static_cast<std::size_t>(y) * nx_ + x;
    }
    int clamp_x(int x) const { return std::clamp(x, 0, nx_ - 1); }
    int clamp_y(int y) const { return std::clamp(y, 0, ny_ - 1); }

    Rect bounds_;
    double cell_;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> cells_;
};

Trajectory make_trajectory(std::vector<Vec2> waypoints) {
    Trajectory t;
    t.cost = path_length(waypoints);
    t.waypoints = std::move(waypoints);
    return t;
}

}  // namespace

std::optional<Trajectory> MotionPlanner::plan(const MotionDomain& domain, const Configuration& start,
                                              double budget_ms, std::uint64_t seed) {
    ++attempts_;
    const auto t0 = std::chrono::steady_clock::now();
    struct Stopwatch {
        std::chrono::steady_clock::time_point begin;
        double& sink;
        ~Stopwatch() { sink += std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count(); }
    } watch{t0, planning_seconds_};

    const auto* grasp = std::get_if<GraspApproachGoal>(&domain.goal);

    if (ideal) {
        const Vec2 gp = goal_point(domain);
        std::vector<Vec2> wps{start};
        if (distance(start, gp) > 0.0) wps.push_back(gp);
        if (grasp) wps.push_back(domain.workspace.find_object(grasp->target)->pose.xy());
        return make_trajectory(std::move(wps));
    }

    if (!collision_free(start, domain)) throw InvalidStart("start configuration in collision");

    const Vec2 gp = goal_point(domain);
    const double tol =
        grasp ? params_.goal_tolerance : std::get<PointGoal>(domain.goal).tolerance;

    // A grasp whose standoff point, contact point, or final approach is
    // blocked cannot succeed no matter how long the tree grows.  The full
    // segment check keeps the appended approach waypoints valid under the
    // same predicate the post-hoc validator uses.
    if (grasp) {
        if (!collision_free(gp, domain)) return std::nullopt;
        if (!collision_free(domain.workspace.find_object(grasp->target)->pose.xy(), domain))
            return std::nullopt;
        if (!grasp_approach_clear(domain)) return std::nullopt;
        if (!segment_free(gp, domain.workspace.find_object(grasp->target)->pose.xy(), domain,
                          params_.resolution))
            return std::nullopt;
    }

    const auto finish = [&](std::vector<Vec2> wps) {
        if (grasp) wps.push_back(domain.workspace.find_object(grasp->target)->pose.xy());
        return make_trajectory(std::move(wps));
    };

    if (distance(start, gp) <= tol) return finish({start});

    const Rect bounds = domain.workspace.planning_bounds();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(bounds.min.x, bounds.max.x);
    std::uniform_real_distribution<double> uy(bounds.min.y, bounds.max.y);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<Vec2> pts{start};
    std::vector<int> parent{-1};
    BucketIndex index(bounds, params_.step);
    index.insert(start, 0);

    const std::uint64_t max_iters =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(budget_ms * params_.iters_per_ms));

    for (std::uint64_t it = 0; it < max_iters; ++it) {
        const Vec2 sample = coin(rng) < params_.goal_bias ? gp : Vec2{ux(rng), uy(rng)};
        const int near = index.nearest(sample, pts);
        const Vec2 from = pts[near];
        const double d = distance(from, sample);
        if (d < 1e-9) continue;
        const Vec2 to = d <= params_.step ? sample : from + (sample - from) * (params_.step / d);
        if (!collision_free(to, domain)) continue;
        if (!segment_free(from, to, domain, params_.resolution)) continue;
        const int idx = static_cast<int>(pts.size());
        pts.push_back(to);
        parent.push_back(near);
        index.insert(to, idx);

        if (distance(to, gp) <= tol) {
            std::vector<Vec2> rev;
            for (int i = idx; i >= 0; i = parent[i]) rev.push_back(pts[i]);
            std::reverse(rev.begin(), rev.end());
            return finish(std::move(rev));
        }
    }
    return std::nullopt;
}

bool validate_trajectory(const Trajectory& traj, const MotionDomain& domain, double resolution) {
    if (traj.waypoints.empty()) return false;
    for (const auto& w : traj.waypoints) {
        if (!collision_free(w, domain)) return false;
    }
    for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
        const Vec2& a = traj.waypoints[i];
        const Vec2& b = traj.waypoints[i + 1];
        const double len = distance(a, b);
        const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
        for (int k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) / steps;
            if (!collision_free(a + (b - a) * t, domain)) return false;
        }
    }
    return true;
}

}  // namespace tmpidan
