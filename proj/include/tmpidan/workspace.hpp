#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tmpidan/geometry.hpp"

namespace tmpidan {

// An action effect whose preconditions do not hold in the current snapshot.
class InconsistentEffect : public std::runtime_error {
public:
    explicit InconsistentEffect(const std::string& violated)
        : std::runtime_error("inconsistent effect: " + violated) {}
};

enum class ObjectCategory { Graspable, PushableOnly, Target, Fixture };
enum class SymbolicTag { Clean, Dirty, Cooked, Raw };

std::string to_string(ObjectCategory c);
std::string to_string(SymbolicTag t);
ObjectCategory object_category_from_string(const std::string& s);
SymbolicTag symbolic_tag_from_string(const std::string& s);

struct ObjectModel {
    std::string id;
    Shape shape = Disc{0.03};
    Pose pose;
    ObjectCategory category = ObjectCategory::Graspable;
    std::set<SymbolicTag> tags;
    std::optional<std::string> held_by;  // "robot/arm" key while grasped

    Footprint footprint() const { return {shape, pose}; }
    bool on_table() const { return !held_by.has_value(); }
    bool movable() const {
        return category == ObjectCategory::Graspable || category == ObjectCategory::PushableOnly ||
               category == ObjectCategory::Target;
    }
};

struct ArmModel {
    std::string id;
    Vec2 reach_center;  // relative to the robot base frame
    double reach_radius = 0.75;
    std::optional<std::string> holding;
    std::optional<Vec2> ee;  // world-frame end-effector position, defaults to reach center
};

struct RobotModel {
    std::string id;
    Pose base_pose;
    double gripper_radius = 0.03;
    std::vector<ArmModel> arms;  // 1 or 2
};

// Tunables with paper-free defaults; carried with the snapshot so effects
// and generators agree on them.
struct WorkspaceParams {
    double push_distance = 0.10;
    double storage_pitch = 0.05;
    double pushable_ratio = 1.5;  // max dimension > ratio * gripper radius => push only
    double appliance_service_radius = 0.15;
};

struct WorkspaceSnapshot {
    Rect table{{-0.6, 0.0}, {0.6, 0.8}};
    Rect storage{{0.65, 0.0}, {0.95, 0.4}};
    std::vector<ObjectModel> objects;
    std::vector<RobotModel> robots;
    std::vector<std::string> targets;
    std::map<std::string, Pose> stations;
    WorkspaceParams params;
    std::uint64_t epoch = 0;

    const ObjectModel* find_object(const std::string& id) const;
    ObjectModel* find_object(const std::string& id);
    const RobotModel* find_robot(const std::string& id) const;
    RobotModel* find_robot(const std::string& id);
    const ArmModel* find_arm(const std::string& robot, const std::string& arm) const;
    ArmModel* find_arm(const std::string& robot, const std::string& arm);

    // Sampling bounds; free space itself is the exact table/storage union.
    Rect planning_bounds() const { return table.united(storage); }
    bool in_workspace(const Vec2& p) const { return table.contains(p) || storage.contains(p); }
    Vec2 arm_reach_center_world(const RobotModel& r, const ArmModel& a) const;
    Vec2 arm_ee_world(const RobotModel& r, const ArmModel& a) const;
};

// Held objects are exempt; strict containment counts as stacking, not overlap.
bool overlap_free(const WorkspaceSnapshot& s);
std::optional<std::pair<std::string, std::string>> first_overlap(const WorkspaceSnapshot& s);

// First free 0.05 m grid cell of the storage rectangle, row-major.
std::optional<Pose> next_free_storage_cell(const WorkspaceSnapshot& s, const Shape& shape);

struct PickEffect { std::string robot, arm, object; };
struct PlaceEffect { std::string robot, arm, object; Pose pose; };
struct PlaceStorageEffect { std::string robot, arm, object; };
struct PushEffect { std::string robot, arm, object; };
struct HandoverEffect { std::string robot, from_arm, to_arm, object; };
struct WashEffect { std::string object, appliance; };
struct CookEffect { std::string object, appliance; };
struct WaitEffect {};
struct SenseEffect {};
struct MoveBaseEffect { std::string robot, station; };
// Pure end-effector motion: commits where a trajectory left the arm.
struct ArmMoveEffect { std::string robot, arm; Vec2 to; };

using ActionEffect = std::variant<PickEffect, PlaceEffect, PlaceStorageEffect, PushEffect,
                                  HandoverEffect, WashEffect, CookEffect, WaitEffect, SenseEffect,
                                  MoveBaseEffect, ArmMoveEffect>;

std::string effect_name(const ActionEffect& e);

// Applies one effect to a snapshot copy (epoch untouched); throws
// InconsistentEffect naming the violated precondition.
WorkspaceSnapshot apply_effect(WorkspaceSnapshot s, const ActionEffect& effect);

struct Scenario {
    WorkspaceSnapshot world;
    std::uint64_t seed = 0;
};

class KnowledgeBase {
public:
    KnowledgeBase() = default;
    explicit KnowledgeBase(WorkspaceSnapshot initial) : current_(std::move(initial)) {}

    const WorkspaceSnapshot& sense() const { return current_; }

    // Applies the effect, archiving the previous snapshot; throws
    // InconsistentEffect naming the violated precondition.
    void apply(const ActionEffect& effect);

    // Value-returning variant; *this is left untouched.
    KnowledgeBase applied(const ActionEffect& effect) const {
        KnowledgeBase next = *this;
        next.apply(effect);
        return next;
    }

    const std::vector<WorkspaceSnapshot>& history() const { return history_; }
    const std::vector<ActionEffect>& log() const { return log_; }

private:
    WorkspaceSnapshot current_;
    std::vector<WorkspaceSnapshot> history_;
    std::vector<ActionEffect> log_;
};

}  // namespace tmpidan
