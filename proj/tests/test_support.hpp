#pragma once

#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "tmpidan/domains.hpp"
#include "tmpidan/motion.hpp"
#include "tmpidan/obstacles.hpp"

namespace tmpidan::testsupport {

// Crafted slotted scene: two slim blockers queued inside a fixture-walled
// slot in front of the target.  The rear blocker blocks the front one's
// approach, so the planner needs exactly two rearrangement episodes.
inline WorkspaceSnapshot blocked_slot_world() {
    Scenario sc = generate_clutter(1, 1, 1, 999);
    WorkspaceSnapshot ws = sc.world;
    ws.objects.clear();
    ws.targets.clear();
    const auto add = [&ws](const std::string& id, const Shape& sh, const Pose& p,
                           ObjectCategory c) {
        ObjectModel o;
        o.id = id;
        o.shape = sh;
        o.pose = p;
        o.category = c;
        ws.objects.push_back(o);
    };
    add("target", Disc{0.03}, Pose{0.0, 0.62, 0.0}, ObjectCategory::Target);
    add("wall_e", BoxExtents{0.02, 0.21}, Pose{0.08, 0.48, 0.0}, ObjectCategory::Fixture);
    add("wall_w", BoxExtents{0.02, 0.21}, Pose{-0.08, 0.48, 0.0}, ObjectCategory::Fixture);
    add("blocker_near", Disc{0.025}, Pose{0.0, 0.515, 0.0}, ObjectCategory::Graspable);
    add("blocker_far", Disc{0.025}, Pose{0.0, 0.40, 0.0}, ObjectCategory::Graspable);
    ws.targets.push_back("target");
    return ws;
}

// Breadth-first grid oracle over the workspace at a fixed resolution.
// Proves reachability (or its absence, up to the grid pitch) independently
// of the RRT implementation.
class GridOracle {
public:
    GridOracle(const MotionDomain& domain, double resolution = 0.005)
        : domain_(domain), res_(resolution), bounds_(domain.workspace.planning_bounds()) {
        nx_ = static_cast<int>(bounds_.width() / res_) + 1;
        ny_ = static_cast<int>(bounds_.height() / res_) + 1;
    }

    bool path_exists(const Vec2& start, const Vec2& goal, double goal_tolerance) const {
        const auto id = [this](int x, int y) { return y * nx_ + x; };
        const int sx = std::clamp(static_cast<int>((start.x - bounds_.min.x) / res_), 0, nx_ - 1);
        const int sy = std::clamp(static_cast<int>((start.y - bounds_.min.y) / res_), 0, ny_ - 1);
        std::vector<char> seen(static_cast<std::size_t>(nx_) * ny_, 0);
        std::deque<std::pair<int, int>> queue;
        if (!free_cell(sx, sy)) return false;
        queue.emplace_back(sx, sy);
        seen[id(sx, sy)] = 1;
        while (!queue.empty()) {
            const auto [x, y] = queue.front();
            queue.pop_front();
            const Vec2 p = cell_center(x, y);
            if (distance(p, goal) <= goal_tolerance) return true;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int qx = x + dx, qy = y + dy;
                    if (qx < 0 || qx >= nx_ || qy < 0 || qy >= ny_) continue;
                    if (seen[id(qx, qy)]) continue;
                    if (!free_cell(qx, qy)) continue;
                    seen[id(qx, qy)] = 1;
                    queue.emplace_back(qx, qy);
                }
            }
        }
        return false;
    }

private:
    Vec2 cell_center(int x, int y) const {
        return {bounds_.min.x + (x + 0.5) * res_, bounds_.min.y + (y + 0.5) * res_};
    }
    bool free_cell(int x, int y) const { return collision_free(cell_center(x, y), domain_); }

    MotionDomain domain_;
    double res_;
    Rect bounds_;
    int nx_, ny_;
};

// Exhaustive truth-table evaluation of hyper-arc readiness used against
// the incremental implementation.
inline bool arc_ready_bruteforce(const AndOrGraph& g, const HyperArc& arc,
                                 const std::set<NodeId>& achieved) {
    if (achieved.count(arc.parent)) return false;
    for (NodeId c : arc.children) {
        if (!achieved.count(c)) return false;
    }
    return true;
}

// Dense-sampling membership oracle for the inflated triangle: distances
// measured by brute-force point sampling of the polygon boundary plus a
// containment test, never through the library's closed-form路徑.
inline bool footprint_in_triangle_bruteforce(const InflatedTriangle& tri, const Footprint& f,
                                             int samples_per_edge = 4000) {
    const auto boundary_points = [&]() {
        std::vector<Vec2> pts;
        const std::size_t n = tri.vertices.size();
        const std::size_t edges = tri.degenerate ? 1 : n;
        for (std::size_t i = 0; i < edges; ++i) {
            const Vec2 a = tri.vertices[i];
            const Vec2 b = tri.vertices[(i + 1) % n];
            for (int k = 0; k <= samples_per_edge; ++k) {
                const double t = static_cast<double>(k) / samples_per_edge;
                pts.push_back(a + (b - a) * t);
            }
        }
        return pts;
    }();

    const auto point_in_tri = [&](const Vec2& p) {
        if (tri.degenerate || tri.vertices.size() < 3) return false;
        const Vec2& a = tri.vertices[0];
        const Vec2& b = tri.vertices[1];
        const Vec2& c = tri.vertices[2];
        const double d1 = (b - a).cross(p - a);
        const double d2 = (c - b).cross(p - b);
        const double d3 = (a - c).cross(p - c);
        const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
        const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
        return !(has_neg && has_pos);
    };

    if (const auto* d = std::get_if<Disc>(&f.shape)) {
        const Vec2 c = f.pose.xy();
        if (point_in_tri(c)) return true;
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& p : boundary_points) best = std::min(best, distance(p, c));
        return best < tri.inflation + d->radius;
    }
    const Polygon poly = box_corners(std::get<BoxExtents>(f.shape), f.pose);
    for (const Vec2& v : poly) {
        if (point_in_tri(v)) return true;
    }
    // Sample the box boundary against triangle membership and distance.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % poly.size()];
        for (int k = 0; k <= 2000; ++k) {
            const Vec2 p = a + (b - a) * (static_cast<double>(k) / 2000);
            if (point_in_tri(p)) return true;
            for (const Vec2& q : boundary_points) best = std::min(best, distance(p, q));
        }
    }
    return best < tri.inflation;
}

// Optimal Tower of Hanoi distances by breadth-first search over all rod
// assignments (legal stack order is implied by disk sizes).
class HanoiBfs {
public:
    explicit HanoiBfs(int disks) : n_(disks) {
        const int total = pow3(n_);
        dist_.assign(total, -1);
        int goal = 0;
        for (int k = 0; k < n_; ++k) goal += 2 * pow3(k);  // all disks on rod 2 (0-based)
        std::deque<int> queue{goal};
        dist_[goal] = 0;
        while (!queue.empty()) {
            const int s = queue.front();
            queue.pop_front();
            for (const int t : moves(s)) {
                if (dist_[t] < 0) {
                    dist_[t] = dist_[s] + 1;
                    queue.push_back(t);
                }
            }
        }
    }

    // state: rod index (0..2) per disk, disk 0 = largest.
    int distance(const std::vector<int>& rods) const {
        int s = 0;
        for (int k = 0; k < n_; ++k) s += rods[k] * pow3(k);
        return dist_[s];
    }

    std::vector<int> legal_moves_count_check(const std::vector<int>& rods) const {
        int s = 0;
        for (int k = 0; k < n_; ++k) s += rods[k] * pow3(k);
        return moves(s);
    }

private:
    static int pow3(int k) {
        int r = 1;
        while (k--) r *= 3;
        return r;
    }
    int rod_of(int state, int disk) const { return (state / pow3(disk)) % 3; }

    std::vector<int> moves(int state) const {
        // Top disk of a rod = smallest disk (largest index) on it.
        std::vector<int> tops(3, -1);
        for (int disk = 0; disk < n_; ++disk) {
            const int rod = rod_of(state, disk);
            tops[rod] = disk;  // later (smaller) disks overwrite
        }
        std::vector<int> out;
        for (int from = 0; from < 3; ++from) {
            if (tops[from] < 0) continue;
            for (int to = 0; to < 3; ++to) {
                if (to == from) continue;
                if (tops[to] >= 0 && tops[to] > tops[from]) continue;  // smaller disk on top
                out.push_back(state + (to - from) * pow3(tops[from]));
            }
        }
        return out;
    }

    int n_;
    std::vector<int> dist_;
};

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return mix_seed(a, b); }

}  // namespace tmpidan::testsupport
