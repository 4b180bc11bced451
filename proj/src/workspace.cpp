#include "tmpidan/workspace.hpp"

#include <algorithm>
#include <cmath>

namespace tmpidan {

std::string to_string(ObjectCategory c) {
    switch (c) {
        case ObjectCategory::Graspable: return "graspable";
        case ObjectCategory::PushableOnly: return "pushable_only";
        case ObjectCategory::Target: return "target";
        case ObjectCategory::Fixture: return "fixture";
    }
    return "graspable";
}

std::string to_string(SymbolicTag t) {
    switch (t) {
        case SymbolicTag::Clean: return "clean";
        case SymbolicTag::Dirty: return "dirty";
        case SymbolicTag::Cooked: return "cooked";
        case SymbolicTag::Raw: return "raw";
    }
    return "clean";
}

ObjectCategory object_category_from_string(const std::string& s) {
    if (s == "graspable") return ObjectCategory::Graspable;
    if (s == "pushable_only") return ObjectCategory::PushableOnly;
    if (s == "target") return ObjectCategory::Target;
    if (s == "fixture") return ObjectCategory::Fixture;
    throw std::runtime_error("unknown object category: " + s);
}

SymbolicTag symbolic_tag_from_string(const std::string& s) {
    if (s == "clean") return SymbolicTag::Clean;
    if (s == "dirty") return SymbolicTag::Dirty;
    if (s == "cooked") return SymbolicTag::Cooked;
    if (s == "raw") return SymbolicTag::Raw;
    throw std::runtime_error("unknown symbolic tag: " + s);
}

const ObjectModel* WorkspaceSnapshot::find_object(const std::string& id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

ObjectModel* WorkspaceSnapshot::find_object(const std::string& id) {
    for (auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

const RobotModel* WorkspaceSnapshot::find_robot(const std::string& id) const {
    for (const auto& r : robots)
        if (r.id == id) return &r;
    return nullptr;
}

RobotModel* WorkspaceSnapshot::find_robot(const std::string& id) {
    for (auto& r : robots)
        if (r.id == id) return &r;
    return nullptr;
}

const ArmModel* WorkspaceSnapshot::find_arm(const std::string& robot, const std::string& arm) const {
    const RobotModel* r = find_robot(robot);
    if (!r) return nullptr;
    for (const auto& a : r->arms)
        if (a.id == arm) return &a;
    return nullptr;
}

ArmModel* WorkspaceSnapshot::find_arm(const std::string& robot, const std::string& arm) {
    RobotModel* r = find_robot(robot);
    if (!r) return nullptr;
    for (auto& a : r->arms)
        if (a.id == arm) return &a;
    return nullptr;
}

Vec2 WorkspaceSnapshot::arm_reach_center_world(const RobotModel& r, const ArmModel& a) const {
    return r.base_pose.xy() + a.reach_center.rotated(r.base_pose.yaw);
}

Vec2 WorkspaceSnapshot::arm_ee_world(const RobotModel& r, const ArmModel& a) const {
    return a.ee ? *a.ee : arm_reach_center_world(r, a);
}

namespace {

bool pair_overlaps(const ObjectModel& a, const ObjectModel& b) {
    const Footprint fa = a.footprint();
    const Footprint fb = b.footprint();
    if (!footprints_intersect(fa, fb)) return false;
    // Strict nesting is stacking (e.g. a smaller ring placed onto a bigger one).
    return !footprint_contains(fa, fb) && !footprint_contains(fb, fa);
}

}  // namespace

std::optional<std::pair<std::string, std::string>> first_overlap(const WorkspaceSnapshot& s) {
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        if (!s.objects[i].on_table()) continue;
        for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
            if (!s.objects[j].on_table()) continue;
            if (pair_overlaps(s.objects[i], s.objects[j]))
                return std::make_pair(s.objects[i].id, s.objects[j].id);
        }
    }
    return std::nullopt;
}

bool overlap_free(const WorkspaceSnapshot& s) { return !first_overlap(s).has_value(); }

std::optional<Pose> next_free_storage_cell(const WorkspaceSnapshot& s, const Shape& shape) {
    const double pitch = s.params.storage_pitch;
    const double half = pitch * 0.5;
    for (double y = s.storage.min.y + half; y <= s.storage.max.y - half + 1e-9; y += pitch) {
        for (double x = s.storage.min.x + half; x <= s.storage.max.x - half + 1e-9; x += pitch) {
            const Footprint candidate{shape, Pose{x, y, 0.0}};
            bool free = true;
            for (const auto& o : s.objects) {
                if (!o.on_table()) continue;
                if (footprints_intersect(candidate, o.footprint())) {
                    free = false;
                    break;
                }
            }
            if (free) return Pose{x, y, 0.0};
        }
    }
    return std::nullopt;
}

namespace {

std::string arm_key(const std::string& robot, const std::string& arm) { return robot + "/" + arm; }

bool gripper_clear_at(const WorkspaceSnapshot& s, const Vec2& p, double radius) {
    if (!s.in_workspace(p)) return false;
    for (const auto& o : s.objects) {
        if (!o.on_table()) continue;
        if (disc_intersects_footprint(p, radius, o.footprint())) return false;
    }
    return true;
}

// Pull the gripper back from `from` until it is clear of every footprint
// (stacked neighbours included) and inside the workspace, preferring `dir`,
// capped at a short distance.
Vec2 retreat_point(const WorkspaceSnapshot& s, const Vec2& from, Vec2 dir, double start,
                   double radius) {
    if (dir.norm() == 0.0) dir = Vec2{0.0, -1.0};
    const Vec2 candidates[4] = {dir, dir * -1.0, dir.perp(), dir.perp() * -1.0};
    for (const Vec2& d : candidates) {
        for (double back = start; back <= start + 0.30; back += 0.01) {
            const Vec2 p = from + d * back;
            if (gripper_clear_at(s, p, radius)) return p;
        }
    }
    return from + dir * start;
}

// Placement is legal when the footprint is disjoint from everything on the
// table, or nested strictly inside one existing footprint (stacking).
void require_placeable(const WorkspaceSnapshot& s, const ObjectModel& obj, const Pose& dest) {
    const Footprint candidate{obj.shape, dest};
    for (const auto& other : s.objects) {
        if (other.id == obj.id || !other.on_table()) continue;
        const Footprint fo = other.footprint();
        if (!footprints_intersect(candidate, fo)) continue;
        if (footprint_contains(fo, candidate)) continue;  // placed onto a bigger footprint
        throw InconsistentEffect("place destination overlaps " + other.id);
    }
    const Vec2 c = dest.xy();
    if (!s.table.contains(c) && !s.storage.contains(c))
        throw InconsistentEffect("place destination outside table and storage");
}

const ObjectModel& require_object(const WorkspaceSnapshot& s, const std::string& id) {
    const ObjectModel* o = s.find_object(id);
    if (!o) throw InconsistentEffect("unknown object " + id);
    return *o;
}

struct Grip {
    RobotModel& robot;
    ArmModel& arm;
};

Grip require_arm(WorkspaceSnapshot& s, const std::string& robot, const std::string& arm) {
    RobotModel* r = s.find_robot(robot);
    if (!r) throw InconsistentEffect("unknown robot " + robot);
    for (auto& a : r->arms)
        if (a.id == arm) return {*r, a};
    throw InconsistentEffect("unknown arm " + arm + " on robot " + robot);
}

void require_at_appliance(const WorkspaceSnapshot& s, const ObjectModel& obj,
                          const std::string& appliance) {
    const ObjectModel& app = require_object(s, appliance);
    if (app.category != ObjectCategory::Fixture)
        throw InconsistentEffect(appliance + " is not a fixture appliance");
    if (!obj.on_table()) throw InconsistentEffect(obj.id + " is held, not at " + appliance);
    if (distance_point_footprint(obj.pose.xy(), app.footprint()) > s.params.appliance_service_radius)
        throw InconsistentEffect(obj.id + " is not at appliance " + appliance);
}

struct EffectVisitor {
    WorkspaceSnapshot& s;

    void operator()(const PickEffect& e) {
        Grip g = require_arm(s, e.robot, e.arm);
        if (g.arm.holding) throw InconsistentEffect("arm " + e.arm + " already holding " + *g.arm.holding);
        ObjectModel* obj = s.find_object(e.object);
        if (!obj) throw InconsistentEffect("unknown object " + e.object);
        if (obj->held_by) throw InconsistentEffect(e.object + " already held");
        if (obj->category != ObjectCategory::Graspable && obj->category != ObjectCategory::Target)
            throw InconsistentEffect(e.object + " is not graspable (" + to_string(obj->category) + ")");
        for (const auto& other : s.objects) {
            if (other.id == obj->id || !other.on_table()) continue;
            if (other.category == ObjectCategory::Fixture) continue;
            if (footprint_contains(obj->footprint(), other.footprint()))
                throw InconsistentEffect(e.object + " is covered by " + other.id);
        }
        obj->held_by = arm_key(e.robot, e.arm);
        g.arm.holding = e.object;
        g.arm.ee = obj->pose.xy();
    }

    void operator()(const PlaceEffect& e) { place_at(e.robot, e.arm, e.object, e.pose); }

    void operator()(const PlaceStorageEffect& e) {
        const ObjectModel& obj = require_object(s, e.object);
        const auto cell = next_free_storage_cell(s, obj.shape);
        if (!cell) throw InconsistentEffect("storage area full");
        place_at(e.robot, e.arm, e.object, *cell);
    }

    void operator()(const PushEffect& e) {
        Grip g = require_arm(s, e.robot, e.arm);
        ObjectModel* obj = s.find_object(e.object);
        if (!obj) throw InconsistentEffect("unknown object " + e.object);
        if (obj->category != ObjectCategory::PushableOnly)
            throw InconsistentEffect(e.object + " is not pushable-only");
        if (obj->held_by) throw InconsistentEffect(e.object + " is held");
        const Vec2 dir = (obj->pose.xy() - g.robot.base_pose.xy()).normalized();
        const Vec2 dest = obj->pose.xy() + dir * s.params.push_distance;
        const Pose new_pose{dest.x, dest.y, obj->pose.yaw};
        require_placeable(s, *obj, new_pose);
        obj->pose = new_pose;
        // Gripper ends behind the pushed object, just clear of it.
        g.arm.ee = retreat_point(s, dest, dir * -1.0,
                                 shape_bounding_radius(obj->shape) + g.robot.gripper_radius + 0.02,
                                 g.robot.gripper_radius);
    }

    void operator()(const HandoverEffect& e) {
        Grip from = require_arm(s, e.robot, e.from_arm);
        Grip to = require_arm(s, e.robot, e.to_arm);
        if (!from.arm.holding || *from.arm.holding != e.object)
            throw InconsistentEffect("arm " + e.from_arm + " does not hold " + e.object);
        if (to.arm.holding) throw InconsistentEffect("arm " + e.to_arm + " not empty");
        ObjectModel* obj = s.find_object(e.object);
        if (!obj) throw InconsistentEffect("unknown object " + e.object);
        from.arm.holding.reset();
        to.arm.holding = e.object;
        to.arm.ee = s.arm_ee_world(from.robot, from.arm);
        obj->held_by = arm_key(e.robot, e.to_arm);
    }

    void operator()(const WashEffect& e) {
        ObjectModel* obj = s.find_object(e.object);
        if (!obj) throw InconsistentEffect("unknown object " + e.object);
        require_at_appliance(s, *obj, e.appliance);
        obj->tags.erase(SymbolicTag::Dirty);
        obj->tags.insert(SymbolicTag::Clean);
    }

    void operator()(const CookEffect& e) {
        ObjectModel* obj = s.find_object(e.object);
        if (!obj) throw InconsistentEffect("unknown object " + e.object);
        require_at_appliance(s, *obj, e.appliance);
        obj->tags.erase(SymbolicTag::Raw);
        obj->tags.insert(SymbolicTag::Cooked);
    }

    void operator()(const WaitEffect&) {}
    void operator()(const SenseEffect&) {}

    void operator()(const ArmMoveEffect& e) {
        Grip g = require_arm(s, e.robot, e.arm);
        g.arm.ee = e.to;
    }

    void operator()(const MoveBaseEffect& e) {
        RobotModel* r = s.find_robot(e.robot);
        if (!r) throw InconsistentEffect("unknown robot " + e.robot);
        const auto it = s.stations.find(e.station);
        if (it == s.stations.end()) throw InconsistentEffect("unknown station " + e.station);
        r->base_pose = it->second;
        for (auto& a : r->arms) a.ee = s.arm_reach_center_world(*r, a);
    }

    void place_at(const std::string& robot, const std::string& arm, const std::string& object,
                  const Pose& dest) {
        Grip g = require_arm(s, robot, arm);
        if (!g.arm.holding || *g.arm.holding != object)
            throw InconsistentEffect("arm " + arm + " does not hold " + object);
        ObjectModel* obj = s.find_object(object);
        if (!obj) throw InconsistentEffect("unknown object " + object);
        require_placeable(s, *obj, dest);
        obj->pose = dest;
        obj->held_by.reset();
        g.arm.holding.reset();
        // Release and retreat toward the base so the gripper is not left
        // standing on or inside whatever it just put the object down onto.
        const Vec2 dir = (g.robot.base_pose.xy() - dest.xy()).normalized();
        g.arm.ee = retreat_point(s, dest.xy(), dir,
                                 shape_bounding_radius(obj->shape) + g.robot.gripper_radius + 0.02,
                                 g.robot.gripper_radius);
    }
};

}  // namespace

std::string effect_name(const ActionEffect& e) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PickEffect>) return "pick";
            else if constexpr (std::is_same_v<T, PlaceEffect>) return "place";
            else if constexpr (std::is_same_v<T, PlaceStorageEffect>) return "place_storage";
            else if constexpr (std::is_same_v<T, PushEffect>) return "push";
            else if constexpr (std::is_same_v<T, HandoverEffect>) return "handover";
            else if constexpr (std::is_same_v<T, WashEffect>) return "wash";
            else if constexpr (std::is_same_v<T, CookEffect>) return "cook";
            else if constexpr (std::is_same_v<T, WaitEffect>) return "wait";
            else if constexpr (std::is_same_v<T, SenseEffect>) return "sense";
            else if constexpr (std::is_same_v<T, MoveBaseEffect>) return "move_base";
            else return "arm_move";
        },
        e);
}

WorkspaceSnapshot apply_effect(WorkspaceSnapshot s, const ActionEffect& effect) {
    std::visit(EffectVisitor{s}, effect);
    return s;
}

void KnowledgeBase::apply(const ActionEffect& effect) {
    WorkspaceSnapshot next = apply_effect(current_, effect);
    next.epoch = current_.epoch + 1;
    history_.push_back(std::move(current_));
    current_ = std::move(next);
    log_.push_back(effect);
}

}  // namespace tmpidan
