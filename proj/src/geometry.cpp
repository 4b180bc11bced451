#include "tmpidan/geometry.hpp"

#include <algorithm>
#include <limits>

namespace tmpidan {

double shape_max_dimension(const Shape& s) {
    if (const auto* d = std::get_if<Disc>(&s)) return 2.0 * d->radius;
    const auto& b = std::get<BoxExtents>(s);
    return 2.0 * std::hypot(b.hx, b.hy);
}

double shape_bounding_radius(const Shape& s) {
    if (const auto* d = std::get_if<Disc>(&s)) return d->radius;
    const auto& b = std::get<BoxExtents>(s);
    return std::hypot(b.hx, b.hy);
}

Polygon box_corners(const BoxExtents& box, const Pose& pose) {
    const Vec2 c = pose.xy();
    const Vec2 ux = Vec2{1.0, 0.0}.rotated(pose.yaw);
    const Vec2 uy = Vec2{0.0, 1.0}.rotated(pose.yaw);
    return {
        c + ux * box.hx + uy * box.hy,
        c + ux * (-box.hx) + uy * box.hy,
        c + ux * (-box.hx) + uy * (-box.hy),
        c + ux * box.hx + uy * (-box.hy),
    };
}

double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const double v = (q - p).cross(r - p);
        if (v > 0.0) return 1;
        if (v < 0.0) return -1;
        return 0;
    };
    const auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
               std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
    };
    const int o1 = orient(a0, a1, b0);
    const int o2 = orient(a0, a1, b1);
    const int o3 = orient(b0, b1, a0);
    const int o4 = orient(b0, b1, a1);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a0, b0, a1)) return true;
    if (o2 == 0 && on_segment(a0, b1, a1)) return true;
    if (o3 == 0 && on_segment(b0, a0, b1)) return true;
    if (o4 == 0 && on_segment(b0, a1, b1)) return true;
    return false;
}

double distance_segment_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    return std::min(std::min(distance_point_segment(a0, b0, b1), distance_point_segment(a1, b0, b1)),
                    std::min(distance_point_segment(b0, a0, a1), distance_point_segment(b1, a0, a1)));
}

namespace {

// Winding-independent: all cross products must share a sign (or be zero).
bool point_in_convex_polygon_impl(const Vec2& p, const Polygon& poly) {
    bool has_pos = false, has_neg = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double c = (b - a).cross(p - a);
        if (c > 0.0) has_pos = true;
        if (c < 0.0) has_neg = true;
        if (has_pos && has_neg) return false;
    }
    return true;
}

}  // namespace

bool point_in_convex_polygon(const Vec2& p, const Polygon& poly) {
    if (poly.size() < 3) return false;
    return point_in_convex_polygon_impl(p, poly);
}

double distance_point_polygon(const Vec2& p, const Polygon& poly) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return distance(p, poly[0]);
    if (poly.size() >= 3 && point_in_convex_polygon_impl(p, poly)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, distance_point_segment(p, poly[i], poly[(i + 1) % n]));
    }
    return best;
}

double distance_segment_polygon(const Vec2& a, const Vec2& b, const Polygon& poly) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() >= 3 &&
        (point_in_convex_polygon_impl(a, poly) || point_in_convex_polygon_impl(b, poly)))
        return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, distance_segment_segment(a, b, poly[i], poly[(i + 1) % n]));
        if (best == 0.0) return 0.0;
    }
    return best;
}

bool convex_polygons_intersect(const Polygon& a, const Polygon& b) {
    // SAT over both polygons' edge normals.
    const auto separated_by_edges_of = [](const Polygon& p, const Polygon& q) {
        const std::size_t n = p.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 axis = (p[(i + 1) % n] - p[i]).perp();
            double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
            for (const Vec2& v : p) {
                const double d = axis.dot(v);
                pmin = std::min(pmin, d);
                pmax = std::max(pmax, d);
            }
            double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
            for (const Vec2& v : q) {
                const double d = axis.dot(v);
                qmin = std::min(qmin, d);
                qmax = std::max(qmax, d);
            }
            if (pmax < qmin || qmax < pmin) return true;
        }
        return false;
    };
    if (a.size() < 3 || b.size() < 3) return false;
    return !separated_by_edges_of(a, b) && !separated_by_edges_of(b, a);
}

double distance_polygon_polygon(const Polygon& a, const Polygon& b) {
    if (convex_polygons_intersect(a, b)) return 0.0;
    if (!a.empty() && !b.empty()) {
        if (a.size() >= 3 && point_in_convex_polygon_impl(b[0], a)) return 0.0;
        if (b.size() >= 3 && point_in_convex_polygon_impl(a[0], b)) return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    const std::size_t na = a.size(), nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            best = std::min(best, distance_segment_segment(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]));
        }
    }
    return best;
}

double distance_point_footprint(const Vec2& p, const Footprint& f) {
    if (const auto* d = std::get_if<Disc>(&f.shape)) {
        return std::max(0.0, distance(p, f.pose.xy()) - d->radius);
    }
    const auto poly = box_corners(std::get<BoxExtents>(f.shape), f.pose);
    return distance_point_polygon(p, poly);
}

bool disc_intersects_footprint(const Vec2& center, double radius, const Footprint& f) {
    return distance_point_footprint(center, f) < radius;
}

bool footprints_intersect(const Footprint& a, const Footprint& b) {
    if (const auto* da = std::get_if<Disc>(&a.shape)) {
        return disc_intersects_footprint(a.pose.xy(), da->radius, b);
    }
    if (const auto* db = std::get_if<Disc>(&b.shape)) {
        return disc_intersects_footprint(b.pose.xy(), db->radius, a);
    }
    const auto pa = box_corners(std::get<BoxExtents>(a.shape), a.pose);
    const auto pb = box_corners(std::get<BoxExtents>(b.shape), b.pose);
    return convex_polygons_intersect(pa, pb);
}

bool footprint_contains(const Footprint& outer, const Footprint& inner) {
    if (const auto* od = std::get_if<Disc>(&outer.shape)) {
        const Vec2 oc = outer.pose.xy();
        if (const auto* id = std::get_if<Disc>(&inner.shape)) {
            // Strict: a footprint never contains an equal copy of itself.
            return distance(oc, inner.pose.xy()) + id->radius < od->radius;
        }
        for (const Vec2& v : box_corners(std::get<BoxExtents>(inner.shape), inner.pose)) {
            if (distance(oc, v) >= od->radius) return false;
        }
        return true;
    }
    const auto opoly = box_corners(std::get<BoxExtents>(outer.shape), outer.pose);
    if (const auto* id = std::get_if<Disc>(&inner.shape)) {
        const Vec2 ic = inner.pose.xy();
        if (!point_in_convex_polygon(ic, opoly)) return false;
        // Each edge must stay at least one radius away from the disc center.
        const std::size_t n = opoly.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (distance_point_segment(ic, opoly[i], opoly[(i + 1) % n]) < id->radius) return false;
        }
        return true;
    }
    for (const Vec2& v : box_corners(std::get<BoxExtents>(inner.shape), inner.pose)) {
        if (!point_in_convex_polygon(v, opoly)) return false;
    }
    return true;
}

bool capsule_intersects_footprint(const Vec2& a, const Vec2& b, double radius, const Footprint& f) {
    if (const auto* d = std::get_if<Disc>(&f.shape)) {
        return distance_point_segment(f.pose.xy(), a, b) < radius + d->radius;
    }
    const auto poly = box_corners(std::get<BoxExtents>(f.shape), f.pose);
    return distance_segment_polygon(a, b, poly) < radius;
}

double distance_polygon_footprint(const Polygon& poly, const Footprint& f) {
    if (const auto* d = std::get_if<Disc>(&f.shape)) {
        return std::max(0.0, distance_point_polygon(f.pose.xy(), poly) - d->radius);
    }
    const auto fpoly = box_corners(std::get<BoxExtents>(f.shape), f.pose);
    return distance_polygon_polygon(poly, fpoly);
}

std::optional<double> ray_exit_distance(const Vec2& origin, const Vec2& dir, const Footprint& f) {
    if (const auto* d = std::get_if<Disc>(&f.shape)) {
        const Vec2 oc = origin - f.pose.xy();
        const double b = oc.dot(dir);
        const double c = oc.squared_norm() - d->radius * d->radius;
        const double disc = b * b - c;  // dir assumed unit length
        if (disc < 0.0) return std::nullopt;
        const double t_exit = -b + std::sqrt(disc);
        if (t_exit < 0.0) return std::nullopt;
        return t_exit;
    }
    // Slab test in the box frame.
    const auto& box = std::get<BoxExtents>(f.shape);
    const Vec2 local_o = (origin - f.pose.xy()).rotated(-f.pose.yaw);
    const Vec2 local_d = dir.rotated(-f.pose.yaw);
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    const double o[2] = {local_o.x, local_o.y};
    const double dv[2] = {local_d.x, local_d.y};
    const double h[2] = {box.hx, box.hy};
    for (int i = 0; i < 2; ++i) {
        if (std::abs(dv[i]) < 1e-12) {
            if (std::abs(o[i]) > h[i]) return std::nullopt;
        } else {
            double t0 = (-h[i] - o[i]) / dv[i];
            double t1 = (h[i] - o[i]) / dv[i];
            if (t0 > t1) std::swap(t0, t1);
            tmin = std::max(tmin, t0);
            tmax = std::min(tmax, t1);
        }
    }
    if (tmax < std::max(tmin, 0.0)) return std::nullopt;
    return tmax;
}

}  // namespace tmpidan
