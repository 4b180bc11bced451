#include <algorithm>
#include <cmath>

#include "domains_detail.hpp"

namespace tmpidan {

namespace {

using namespace detail;

constexpr double kRodTolerance = 0.02;
const char* const kRods[3] = {"rod_1", "rod_2", "rod_3"};
const char* const kGoalRod = "rod_3";

std::optional<std::string> rod_of(const WorkspaceSnapshot& ws, const Vec2& p) {
    for (const char* rod : kRods) {
        const auto it = ws.stations.find(rod);
        if (it != ws.stations.end() && distance(p, it->second.xy()) <= kRodTolerance) return rod;
    }
    return std::nullopt;
}

double disk_radius(const ObjectModel& o) { return std::get<Disc>(o.shape).radius; }

bool is_disk(const ObjectModel& o) { return o.id.rfind("disk_", 0) == 0; }

// World with held disks put back at their remembered poses, so the move
// policy sees the same configuration the episode started from.
WorkspaceSnapshot restored(const WorkspaceSnapshot& ws) {
    WorkspaceSnapshot out = ws;
    for (auto& o : out.objects) {
        if (is_disk(o) && o.held_by) o.held_by.reset();
    }
    for (auto& r : out.robots) {
        for (auto& a : r.arms) a.holding.reset();
    }
    return out;
}

struct Move {
    std::string from, to, disk;
};

// Optimal next move toward "all disks on the goal rod" from any legal
// configuration: scan disks largest first, rerouting the subgoal to the
// third rod whenever a disk is off its current subgoal.
std::optional<Move> optimal_move(const WorkspaceSnapshot& ws) {
    std::vector<const ObjectModel*> disks;
    for (const auto& o : ws.objects) {
        if (is_disk(o) && o.on_table()) disks.push_back(&o);
    }
    std::sort(disks.begin(), disks.end(), [](const ObjectModel* a, const ObjectModel* b) {
        return disk_radius(*a) > disk_radius(*b);
    });

    const auto third = [](const std::string& a, const std::string& b) {
        for (const char* rod : kRods) {
            if (rod != a && rod != b) return std::string(rod);
        }
        return std::string(kRods[0]);
    };

    std::string target = kGoalRod;
    std::optional<Move> move;
    for (const ObjectModel* d : disks) {
        const auto rod = rod_of(ws, d->pose.xy());
        if (!rod) continue;
        if (*rod == target) continue;
        move = Move{*rod, target, d->id};
        target = third(*rod, target);
    }
    return move;
}

// Ids of same-rod disks bigger than `disk`: below it in the stack, hence
// under the grasp plane and excluded from collisions.
std::vector<std::string> stack_below(const WorkspaceSnapshot& ws, const std::string& rod,
                                     double radius) {
    std::vector<std::string> out;
    for (const auto& o : ws.objects) {
        if (!is_disk(o) || !o.on_table()) continue;
        const auto r = rod_of(ws, o.pose.xy());
        if (r && *r == rod && disk_radius(o) > radius) out.push_back(o.id);
    }
    return out;
}

std::pair<const ArmModel*, const ObjectModel*> held_disk(const RunContext& ctx) {
    const RobotModel* r = ctx.world.find_robot(ctx.robot);
    if (!r) return {nullptr, nullptr};
    for (const auto& a : r->arms) {
        if (!a.holding) continue;
        const ObjectModel* o = ctx.world.find_object(*a.holding);
        if (o && is_disk(*o)) return {&a, o};
    }
    return {nullptr, nullptr};
}

bool goal_reached(const WorkspaceSnapshot& ws) {
    const WorkspaceSnapshot fixed = restored(ws);
    for (const auto& o : fixed.objects) {
        if (!is_disk(o)) continue;
        const auto rod = rod_of(fixed, o.pose.xy());
        if (!rod || *rod != kGoalRod) return false;
    }
    return true;
}

std::vector<Grounding> ground_hanoi(const HyperArc&, const std::string& parent,
                                    const RunContext& ctx) {
    if (parent == "sensed" || parent == "updated") {
        return {Grounding{"", {GroundedStep{action(Verb::Sense), "", std::nullopt, SenseEffect{}, false}}}};
    }
    if (parent.rfind("checked_", 0) == 0) {
        const auto move = optimal_move(restored(ctx.world));
        if (!move) return {};
        const std::string expect = "checked_" + move->from.substr(4) + move->to.substr(4);
        if (expect != parent) return {};
        return {trivial_grounding()};
    }
    if (parent.rfind("picked_", 0) == 0) {
        const auto move = optimal_move(restored(ctx.world));
        if (!move) return {};
        if ("rod_" + parent.substr(7) != move->from) return {};
        const auto [arm, disk] = held_disk(ctx);
        if (arm && disk) {
            return disk->id == move->disk ? std::vector<Grounding>{trivial_grounding()}
                                          : std::vector<Grounding>{};
        }
        const ObjectModel* d = ctx.world.find_object(move->disk);
        if (!d) return {};
        return grasp_groundings(ctx, move->disk, stack_below(ctx.world, move->from, disk_radius(*d)),
                                false);
    }
    if (parent == "handed_over_left") {
        const auto move = optimal_move(restored(ctx.world));
        const auto [arm, disk] = held_disk(ctx);
        if (!move || !arm || !disk) return {};
        const RobotModel& r = *ctx.world.find_robot(ctx.robot);
        const Vec2 dest = ctx.world.stations.at(move->to).xy();
        if (ctx.config.ideal_motion) return {};  // full reach: direct placement wins
        if (within_reach(ctx.world, r, *arm, dest)) return {};
        for (const auto& other : r.arms) {
            if (other.id == arm->id || other.holding) continue;
            if (!within_reach(ctx.world, r, other, dest)) continue;
            const auto hp = handover_point(ctx.world, r, *arm, other);
            if (!hp) continue;
            GroundedStep step;
            step.action = action(Verb::Handover, disk->id);
            step.agent = arm->id;
            step.motion = MotionGoalSpec{PointGoal{*hp, 0.01},
                                         stack_below(ctx.world, move->from, disk_radius(*disk))};
            step.effect = HandoverEffect{ctx.robot, arm->id, other.id, disk->id};
            return {Grounding{arm->id, {step}}};
        }
        return {};
    }
    if (parent == "handed_over_right" || parent == "handed_over") {
        const auto [arm, disk] = held_disk(ctx);
        if (!arm || !disk) return {};
        return {trivial_grounding()};
    }
    if (parent.rfind("placed_to_rod_", 0) == 0) {
        const auto move = optimal_move(restored(ctx.world));
        if (!move || "rod_" + parent.substr(14) != move->to) return {};
        const auto [arm, disk] = held_disk(ctx);
        if (!arm || !disk || disk->id != move->disk) return {};
        const RobotModel& r = *ctx.world.find_robot(ctx.robot);
        const Pose dest = ctx.world.stations.at(move->to);
        if (!ctx.config.ideal_motion && !within_reach(ctx.world, r, *arm, dest.xy())) return {};
        std::vector<std::string> excludes = stack_below(ctx.world, move->to, disk_radius(*disk));
        const auto from_stack = stack_below(ctx.world, move->from, disk_radius(*disk));
        excludes.insert(excludes.end(), from_stack.begin(), from_stack.end());
        GroundedStep step;
        step.action = action(Verb::Place, disk->id);
        step.agent = arm->id;
        step.motion = MotionGoalSpec{PointGoal{dest.xy(), 0.01}, excludes};
        step.effect = PlaceEffect{ctx.robot, arm->id, disk->id, Pose{dest.x, dest.y, 0.0}};
        return {Grounding{arm->id, {step}}};
    }
    if (parent == "placed" || parent == "staged") return {trivial_grounding()};
    if (parent == "all_done") return goal_reached(ctx.world) ? std::vector<Grounding>{trivial_grounding()}
                                                             : std::vector<Grounding>{};
    if (parent == "not_done") return goal_reached(ctx.world) ? std::vector<Grounding>{}
                                                             : std::vector<Grounding>{trivial_grounding()};
    return {};
}

}  // namespace

DomainTemplate hanoi_template() {
    GraphBuilder b;
    b.add_node("sensed");
    b.add_node("updated");
    const char* pairs[6] = {"12", "13", "21", "23", "31", "32"};
    for (const char* p : pairs) b.add_node(std::string("checked_") + p);
    for (int i = 1; i <= 3; ++i) b.add_node("picked_" + std::to_string(i));
    b.add_node("handed_over_left");
    b.add_node("handed_over_right");
    b.add_node("handed_over");
    for (int j = 1; j <= 3; ++j) b.add_node("placed_to_rod_" + std::to_string(j));
    b.add_node("placed");
    b.add_node("staged");
    b.add_node("all_done", NodeKind::SuccessTerminal);
    b.add_node("not_done", NodeKind::FailureTerminal);

    b.add_arc("updated", {"sensed"}, {action(Verb::Sense)});
    for (const char* p : pairs) b.add_arc(std::string("checked_") + p, {"updated"}, {action(Verb::Sense)});
    for (const char* p : pairs) {
        const std::string from(1, p[0]);
        b.add_arc("picked_" + from, {std::string("checked_") + p}, {action(Verb::Pick)});
    }
    // Direct placements first so they are preferred at equal cost.
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            if (i == j) continue;
            b.add_arc("placed_to_rod_" + std::to_string(j), {"picked_" + std::to_string(i)},
                      {action(Verb::Place)});
        }
    }
    for (int i = 1; i <= 3; ++i)
        b.add_arc("handed_over_left", {"picked_" + std::to_string(i)}, {action(Verb::Handover)});
    b.add_arc("handed_over_right", {"handed_over_left"}, {});
    b.add_arc("handed_over", {"handed_over_right"}, {});
    for (int j = 1; j <= 3; ++j)
        b.add_arc("placed_to_rod_" + std::to_string(j), {"handed_over"}, {action(Verb::Place)});
    for (int j = 1; j <= 3; ++j)
        b.add_arc("placed", {"placed_to_rod_" + std::to_string(j)}, {});
    b.add_arc("staged", {"placed"}, {action(Verb::Sense)});
    b.add_arc("all_done", {"staged"}, {});
    b.add_arc("not_done", {"staged"}, {});

    DomainTemplate tmpl;
    tmpl.name = "hanoi";
    tmpl.graph = std::move(b).build();
    tmpl.augment_spec = {{"sensed", {action(Verb::Sense)}, 1.0}};
    tmpl.agents = {"left", "right"};

    Binding binding;
    binding.ground = ground_hanoi;
    const auto always = [](const WorkspaceSnapshot&, const std::string&) { return true; };
    for (const auto& n : tmpl.graph.nodes()) binding.state_predicates[n.label] = always;
    binding.state_predicates["all_done"] = [](const WorkspaceSnapshot& ws, const std::string&) {
        return goal_reached(ws);
    };
    binding.state_predicates["not_done"] = [](const WorkspaceSnapshot& ws, const std::string&) {
        return !goal_reached(ws);
    };
    tmpl.binding = std::move(binding);
    return tmpl;
}

Scenario hanoi_scenario(int n_disks) {
    if (n_disks < 1 || n_disks > 8) throw std::invalid_argument("supported disk counts: 1..8");
    Scenario sc;
    WorkspaceSnapshot& ws = sc.world;
    ws.table = Rect{{-0.5, 0.0}, {0.5, 0.7}};
    ws.storage = Rect{{0.5, 0.0}, {0.7, 0.2}};
    ws.params.pushable_ratio = 12.0;  // disks are grasped by the rim
    ws.stations["rod_1"] = Pose{-0.18, 0.22, 0.0};
    ws.stations["rod_2"] = Pose{0.18, 0.22, 0.0};
    ws.stations["rod_3"] = Pose{0.0, 0.5, 0.0};

    RobotModel pr2;
    pr2.id = "r1";
    pr2.base_pose = Pose{0.0, -0.1, 0.0};
    pr2.gripper_radius = 0.02;
    // Left covers rods 1 and 3, right covers rods 2 and 3: moves between
    // rod 1 and rod 2 require a handover.
    pr2.arms = {ArmModel{"left", Vec2{-0.2, 0.35}, 0.36, std::nullopt, std::nullopt},
                ArmModel{"right", Vec2{0.2, 0.35}, 0.36, std::nullopt, std::nullopt}};
    ws.robots.push_back(pr2);

    // disk_1 is the largest; all start nested on rod 1.
    for (int k = 1; k <= n_disks; ++k) {
        ObjectModel disk;
        disk.id = "disk_" + std::to_string(k);
        disk.shape = Disc{0.055 + 0.012 * (n_disks - k)};
        disk.pose = ws.stations.at("rod_1");
        disk.category = ObjectCategory::Graspable;
        ws.objects.push_back(std::move(disk));
    }
    return sc;
}

std::map<std::string, std::vector<std::string>> hanoi_stacks(const WorkspaceSnapshot& ws) {
    std::map<std::string, std::vector<std::string>> out;
    for (const char* rod : kRods) {
        std::vector<const ObjectModel*> disks;
        for (const auto& o : ws.objects) {
            if (!is_disk(o)) continue;
            const Vec2 p = o.pose.xy();
            const auto it = ws.stations.find(rod);
            if (it != ws.stations.end() && distance(p, it->second.xy()) <= kRodTolerance &&
                o.on_table())
                disks.push_back(&o);
        }
        std::sort(disks.begin(), disks.end(), [](const ObjectModel* a, const ObjectModel* b) {
            return disk_radius(*a) > disk_radius(*b);
        });
        for (const auto* d : disks) out[rod].push_back(d->id);
    }
    return out;
}

}  // namespace tmpidan
