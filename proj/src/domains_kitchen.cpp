#include <algorithm>
#include <cmath>

#include "domains_detail.hpp"

namespace tmpidan {

namespace {

using namespace detail;

bool near_pose(const Vec2& p, const Pose& pose, double tol = 0.02) {
    return distance(p, pose.xy()) <= tol;
}

bool at_station(const WorkspaceSnapshot& ws, const std::string& robot, const std::string& station) {
    const RobotModel* r = ws.find_robot(robot);
    const auto it = ws.stations.find(station);
    if (!r || it == ws.stations.end()) return false;
    return near_pose(r->base_pose.xy(), it->second, 1e-6);
}

bool served(const WorkspaceSnapshot& ws, const ObjectModel& o, const std::string& pose_prefix) {
    for (const auto& [name, pose] : ws.stations) {
        if (name.rfind(pose_prefix, 0) == 0 && near_pose(o.pose.xy(), pose)) return true;
    }
    return false;
}

// k-th (1-based) item of the given prefix not yet at a serving pose.
const ObjectModel* next_unserved(const WorkspaceSnapshot& ws, const std::string& id_prefix,
                                 const std::string& serve_prefix) {
    for (const auto& o : ws.objects) {
        if (o.id.rfind(id_prefix, 0) != 0) continue;
        if (!served(ws, o, serve_prefix)) return &o;
    }
    return nullptr;
}

std::string index_suffix(const ObjectModel* o) {
    if (!o) return "";
    const auto pos = o->id.rfind('_');
    return o->id.substr(pos + 1);
}

GroundedStep base_step(const RunContext& ctx, const std::string& station) {
    GroundedStep step;
    step.action = action(Verb::MoveBase, "", "base");
    step.agent = "base";
    step.effect = MoveBaseEffect{ctx.robot, station};
    return step;
}

// Appends pick+place steps for the held-object flow: grasp groundings for
// the pick, then a placement at `dest` by the grasping arm.
std::vector<Grounding> pick_place_groundings(const RunContext& ctx, const std::string& object,
                                             const Pose& dest,
                                             const std::vector<GroundedStep>& prefix,
                                             const std::vector<GroundedStep>& between) {
    std::vector<Grounding> out;
    WorkspaceSnapshot staged = ctx.world;
    for (const auto& step : prefix) {
        if (!step.effect) continue;
        try {
            staged = apply_effect(std::move(staged), *step.effect);
        } catch (const InconsistentEffect&) {
            return out;
        }
    }
    RunContext staged_ctx{staged, ctx.graph, ctx.robot, ctx.task, ctx.config, ctx.planner, ctx.seed};
    for (auto& g : grasp_groundings(staged_ctx, object, {}, false)) {
        Grounding full;
        full.primary_agent = g.primary_agent;
        full.steps = prefix;
        full.steps.insert(full.steps.end(), g.steps.begin(), g.steps.end());
        full.steps.insert(full.steps.end(), between.begin(), between.end());
        GroundedStep place;
        place.action = action(Verb::Place, object);
        place.agent = g.primary_agent;
        place.motion = MotionGoalSpec{PointGoal{dest.xy(), 0.01}, {}};
        place.effect = PlaceEffect{ctx.robot, g.primary_agent, object, dest};
        full.steps.push_back(place);
        out.push_back(std::move(full));
    }
    return out;
}

std::vector<Grounding> ground_kitchen(const HyperArc&, const std::string& parent,
                                      const RunContext& ctx) {
    const WorkspaceSnapshot& ws = ctx.world;
    // Cabbage and glass flows each work on their own first unserved item;
    // the glass of a pass trails its cabbage.
    const ObjectModel* cabbage_obj = next_unserved(ws, "cabbage_", "serve_cabbage_");
    const ObjectModel* glass_obj = next_unserved(ws, "glass_", "serve_glass_");
    const std::string cabbage = cabbage_obj ? cabbage_obj->id : "";
    const std::string glass = glass_obj ? glass_obj->id : "";
    const auto station = [&](const std::string& name) { return ws.stations.at(name); };

    if (parent == "INIT") {
        return {Grounding{"", {GroundedStep{action(Verb::Sense), "", std::nullopt, SenseEffect{}, false}}}};
    }
    if (parent == "at_worktable") {
        return {Grounding{"base", {base_step(ctx, "worktable")}}};
    }
    if (parent == "radish_aside") {
        if (!cabbage_obj) return {trivial_grounding()};
        // Move the radish obstructing this pass's cabbage aside, if any.
        std::set<std::string> blockers;
        try {
            blockers = objects_to_rearrange(ws, ctx.robot, cabbage, ctx.planner,
                                            heuristic_params(ctx));
        } catch (const NoFeasibleAngle&) {
        }
        const ObjectModel* radish = nullptr;
        for (const auto& id : blockers) {
            if (id.rfind("radish_", 0) == 0 && ws.find_object(id)->on_table()) {
                radish = ws.find_object(id);
                break;
            }
        }
        if (!radish) return {trivial_grounding()};
        return pick_place_groundings(ctx, radish->id, station("aside"), {}, {});
    }
    if (parent == "cabbage_picked") {
        if (!cabbage_obj) return {trivial_grounding()};
        if (arm_holding(ws, ctx.robot, cabbage)) return {trivial_grounding()};
        return grasp_groundings(ctx, cabbage, {}, false);
    }
    if (parent == "cabbage_staged") {
        if (!cabbage_obj) return {trivial_grounding()};
        const ArmModel* arm = arm_holding(ws, ctx.robot, cabbage);
        if (!arm) return {};
        GroundedStep place;
        place.action = action(Verb::Place, cabbage);
        place.agent = arm->id;
        place.motion = MotionGoalSpec{PointGoal{station("staging").xy(), 0.01}, {}};
        place.effect = PlaceEffect{ctx.robot, arm->id, cabbage, station("staging")};
        return {Grounding{arm->id, {place}}};
    }
    if (parent == "radish_restored") {
        const ObjectModel* displaced = nullptr;
        for (const auto& o : ws.objects) {
            if (o.id.rfind("radish_", 0) == 0 && o.on_table() &&
                near_pose(o.pose.xy(), station("aside"))) {
                displaced = &o;
                break;
            }
        }
        if (!displaced) return {trivial_grounding()};
        return pick_place_groundings(ctx, displaced->id, station("home_" + displaced->id), {}, {});
    }
    if (parent == "cabbage_at_dishwasher") {
        if (!cabbage_obj) return {trivial_grounding()};
        return pick_place_groundings(ctx, cabbage, station("dishwasher_pad"), {},
                                     {base_step(ctx, "dishwasher")});
    }
    if (parent == "cabbage_washed") {
        if (!cabbage_obj) return {trivial_grounding()};
        GroundedStep wash;
        wash.action = action(Verb::Wash, cabbage);
        wash.effect = WashEffect{cabbage, "dishwasher_box"};
        GroundedStep wait;
        wait.action = action(Verb::Wait);
        wait.effect = WaitEffect{};
        return {Grounding{"", {wash, wait}}};
    }
    if (parent == "cabbage_in_microwave") {
        if (!cabbage_obj) return {trivial_grounding()};
        return pick_place_groundings(ctx, cabbage, station("microwave_pad"), {},
                                     {base_step(ctx, "worktable")});
    }
    if (parent == "cabbage_cooked") {
        if (!cabbage_obj) return {trivial_grounding()};
        GroundedStep cook;
        cook.action = action(Verb::Cook, cabbage);
        cook.effect = CookEffect{cabbage, "microwave_box"};
        return {Grounding{"", {cook}}};
    }
    if (parent == "glass_in_dishwasher") {
        if (!glass_obj) return {trivial_grounding()};
        return pick_place_groundings(ctx, glass, station("dishwasher_pad"),
                                     {base_step(ctx, "mealtable")}, {base_step(ctx, "dishwasher")});
    }
    if (parent == "glass_washed") {
        if (!glass_obj) return {trivial_grounding()};
        GroundedStep wash;
        wash.action = action(Verb::Wash, glass);
        wash.effect = WashEffect{glass, "dishwasher_box"};
        return {Grounding{"", {wash}}};
    }
    if (parent == "cabbage_served") {
        if (!cabbage_obj) return {trivial_grounding()};
        return pick_place_groundings(ctx, cabbage,
                                     station("serve_cabbage_" + index_suffix(cabbage_obj)),
                                     {base_step(ctx, "worktable")}, {base_step(ctx, "mealtable")});
    }
    if (parent == "glass_served") {
        if (!glass_obj) return {trivial_grounding()};
        return pick_place_groundings(ctx, glass,
                                     station("serve_glass_" + index_suffix(glass_obj)),
                                     {base_step(ctx, "dishwasher")}, {base_step(ctx, "mealtable")});
    }
    if (parent == "END" || parent == "serving_incomplete") {
        bool all = true;
        for (const auto& o : ws.objects) {
            if (o.id.rfind("cabbage_", 0) == 0 && !served(ws, o, "serve_cabbage_")) all = false;
            if (o.id.rfind("glass_", 0) == 0 && !served(ws, o, "serve_glass_")) all = false;
        }
        if (parent == "END") return all ? std::vector<Grounding>{trivial_grounding()} : std::vector<Grounding>{};
        return all ? std::vector<Grounding>{} : std::vector<Grounding>{trivial_grounding()};
    }
    return {};
}

}  // namespace

DomainTemplate kitchen_template() {
    GraphBuilder b;
    b.add_node("INIT");
    const char* chain[] = {"at_worktable",        "radish_aside",       "cabbage_picked",
                           "cabbage_staged",      "radish_restored",    "cabbage_at_dishwasher",
                           "cabbage_washed",      "cabbage_in_microwave", "cabbage_cooked",
                           "glass_in_dishwasher", "glass_washed",       "cabbage_served",
                           "glass_served"};
    for (const char* label : chain) b.add_node(label);
    b.add_node("END", NodeKind::SuccessTerminal);
    b.add_node("serving_incomplete", NodeKind::FailureTerminal);

    std::string prev = "INIT";
    const std::map<std::string, std::vector<ActionSpec>> arc_actions = {
        {"at_worktable", {action(Verb::MoveBase)}},
        {"radish_aside", {action(Verb::Pick), action(Verb::Place)}},
        {"cabbage_picked", {action(Verb::Pick)}},
        {"cabbage_staged", {action(Verb::Place)}},
        {"radish_restored", {action(Verb::Pick), action(Verb::Place)}},
        {"cabbage_at_dishwasher", {action(Verb::Pick), action(Verb::MoveBase), action(Verb::Place)}},
        {"cabbage_washed", {action(Verb::Wash), action(Verb::Wait)}},
        {"cabbage_in_microwave", {action(Verb::Pick), action(Verb::MoveBase), action(Verb::Place)}},
        {"cabbage_cooked", {action(Verb::Cook)}},
        {"glass_in_dishwasher",
         {action(Verb::MoveBase), action(Verb::Pick), action(Verb::MoveBase), action(Verb::Place)}},
        {"glass_washed", {action(Verb::Wash)}},
        {"cabbage_served",
         {action(Verb::MoveBase), action(Verb::Pick), action(Verb::MoveBase), action(Verb::Place)}},
        {"glass_served",
         {action(Verb::MoveBase), action(Verb::Pick), action(Verb::MoveBase), action(Verb::Place)}},
    };
    for (const char* label : chain) {
        b.add_arc(label, {prev}, arc_actions.at(label));
        prev = label;
    }
    b.add_arc("END", {"glass_served"}, {});
    b.add_arc("serving_incomplete", {"glass_served"}, {});

    DomainTemplate tmpl;
    tmpl.name = "kitchen";
    tmpl.graph = std::move(b).build();
    tmpl.augment_spec = {{"INIT", {action(Verb::Sense)}, 1.0}};
    tmpl.agents = {"left", "right", "base"};

    Binding binding;
    binding.ground = ground_kitchen;
    const auto always = [](const WorkspaceSnapshot&, const std::string&) { return true; };
    for (const auto& n : tmpl.graph.nodes()) binding.state_predicates[n.label] = always;
    binding.state_predicates["at_worktable"] = [](const WorkspaceSnapshot& ws, const std::string&) {
        return !ws.robots.empty() && at_station(ws, ws.robots.front().id, "worktable");
    };
    binding.state_predicates["cabbage_washed"] = [](const WorkspaceSnapshot& ws, const std::string&) {
        for (const auto& o : ws.objects) {
            if (o.id.rfind("cabbage_", 0) == 0 && o.tags.count(SymbolicTag::Clean)) return true;
        }
        return false;
    };
    binding.state_predicates["cabbage_cooked"] = [](const WorkspaceSnapshot& ws, const std::string&) {
        for (const auto& o : ws.objects) {
            if (o.id.rfind("cabbage_", 0) == 0 && o.tags.count(SymbolicTag::Cooked)) return true;
        }
        return false;
    };
    tmpl.binding = std::move(binding);
    return tmpl;
}

Scenario kitchen_scenario() {
    Scenario sc;
    WorkspaceSnapshot& ws = sc.world;
    ws.table = Rect{{-1.2, 0.0}, {1.2, 1.6}};
    ws.storage = Rect{{1.2, 0.0}, {1.4, 0.2}};

    ws.params.pushable_ratio = 3.0;
    ws.stations["worktable"] = Pose{-0.7, 0.3, 0.0};
    ws.stations["dishwasher"] = Pose{0.5, 0.3, 0.0};
    ws.stations["mealtable"] = Pose{0.7, 1.05, 0.0};
    ws.stations["aside"] = Pose{-0.52, 0.7, 0.0};
    ws.stations["staging"] = Pose{-0.52, 0.34, 0.0};
    ws.stations["dishwasher_pad"] = Pose{0.66, 0.56, 0.0};
    ws.stations["microwave_pad"] = Pose{-0.81, 0.6, 0.0};
    ws.stations["home_radish_1"] = Pose{-0.74, 0.56, 0.0};
    ws.stations["home_radish_2"] = Pose{-0.6, 0.54, 0.0};
    ws.stations["serve_cabbage_1"] = Pose{0.62, 1.3, 0.0};
    ws.stations["serve_cabbage_2"] = Pose{0.78, 1.3, 0.0};
    ws.stations["serve_glass_1"] = Pose{0.62, 1.42, 0.0};
    ws.stations["serve_glass_2"] = Pose{0.78, 1.42, 0.0};

    RobotModel pr2;
    pr2.id = "r1";
    pr2.base_pose = ws.stations.at("worktable");
    pr2.gripper_radius = 0.022;
    pr2.arms = {ArmModel{"left", Vec2{-0.18, 0.15}, 0.55, std::nullopt, std::nullopt},
                ArmModel{"right", Vec2{0.18, 0.15}, 0.55, std::nullopt, std::nullopt}};
    ws.robots.push_back(pr2);

    const auto add = [&ws](const std::string& id, const Shape& shape, const Pose& pose,
                           ObjectCategory cat, std::set<SymbolicTag> tags = {}) {
        ObjectModel o;
        o.id = id;
        o.shape = shape;
        o.pose = pose;
        o.category = cat;
        o.tags = std::move(tags);
        ws.objects.push_back(std::move(o));
    };

    add("dishwasher_box", BoxExtents{0.12, 0.12}, Pose{0.85, 0.45, 0.0}, ObjectCategory::Fixture);
    add("microwave_box", BoxExtents{0.08, 0.08}, Pose{-0.97, 0.6, 0.0}, ObjectCategory::Fixture);
    add("cabbage_1", Disc{0.03}, Pose{-0.76, 0.66, 0.0}, ObjectCategory::Graspable,
        {SymbolicTag::Dirty, SymbolicTag::Raw});
    add("cabbage_2", Disc{0.03}, Pose{-0.6, 0.66, 0.0}, ObjectCategory::Graspable,
        {SymbolicTag::Dirty, SymbolicTag::Raw});
    // radish_1 sits between the base and cabbage_1, inside its grasp triangle.
    add("radish_1", Disc{0.02}, ws.stations.at("home_radish_1"), ObjectCategory::Graspable);
    add("radish_2", Disc{0.02}, ws.stations.at("home_radish_2"), ObjectCategory::Graspable);
    add("glass_1", Disc{0.018}, Pose{0.56, 1.5, 0.0}, ObjectCategory::Graspable,
        {SymbolicTag::Dirty});
    add("glass_2", Disc{0.018}, Pose{0.84, 1.5, 0.0}, ObjectCategory::Graspable,
        {SymbolicTag::Dirty});
    return sc;
}

}  // namespace tmpidan
