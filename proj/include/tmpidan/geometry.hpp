#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

namespace tmpidan {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
    Vec2 rotated(double angle) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
    Vec2 perp() const { return {-y, x}; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct Rect {
    Vec2 min;
    Vec2 max;

    bool contains(const Vec2& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    // True iff a disc of `radius` around p fits entirely inside.
    bool contains_disc(const Vec2& p, double radius) const {
        return p.x - radius >= min.x && p.x + radius <= max.x &&
               p.y - radius >= min.y && p.y + radius <= max.y;
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    Vec2 center() const { return {(min.x + max.x) * 0.5, (min.y + max.y) * 0.5}; }
    Rect united(const Rect& o) const {
        return {{std::min(min.x, o.min.x), std::min(min.y, o.min.y)},
                {std::max(max.x, o.max.x), std::max(max.y, o.max.y)}};
    }
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;

    Vec2 xy() const { return {x, y}; }
};

struct Disc {
    double radius = 0.0;
};

// Half extents of an oriented rectangle.
struct BoxExtents {
    double hx = 0.0;
    double hy = 0.0;
};

using Shape = std::variant<Disc, BoxExtents>;

// A shape placed in the plane.
struct Footprint {
    Shape shape;
    Pose pose;
};

using Polygon = std::vector<Vec2>;  // convex, consistent winding

double shape_max_dimension(const Shape& s);
double shape_bounding_radius(const Shape& s);
Polygon box_corners(const BoxExtents& box, const Pose& pose);

double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double distance_segment_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

bool point_in_convex_polygon(const Vec2& p, const Polygon& poly);
// 0 when the point is inside.
double distance_point_polygon(const Vec2& p, const Polygon& poly);
double distance_segment_polygon(const Vec2& a, const Vec2& b, const Polygon& poly);
double distance_polygon_polygon(const Polygon& a, const Polygon& b);
bool convex_polygons_intersect(const Polygon& a, const Polygon& b);

bool footprints_intersect(const Footprint& a, const Footprint& b);
// Strict containment: every point of `inner` lies inside `outer`.
bool footprint_contains(const Footprint& outer, const Footprint& inner);
bool disc_intersects_footprint(const Vec2& center, double radius, const Footprint& f);
double distance_point_footprint(const Vec2& p, const Footprint& f);
// Swept disc (capsule) from a to b of `radius` against a footprint.
bool capsule_intersects_footprint(const Vec2& a, const Vec2& b, double radius, const Footprint& f);
double distance_polygon_footprint(const Polygon& poly, const Footprint& f);

// Farthest parameter t >= 0 at which the ray origin + t*dir leaves the
// footprint, or nullopt when the ray misses it entirely.
std::optional<double> ray_exit_distance(const Vec2& origin, const Vec2& dir, const Footprint& f);

}  // namespace tmpidan
