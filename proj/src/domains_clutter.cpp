#include <algorithm>
#include <cmath>
#include <random>

#include "domains_detail.hpp"

namespace tmpidan {

namespace detail {

ObstacleHeuristicParams heuristic_params(const RunContext& ctx) {
    return ObstacleHeuristicParams{ctx.config.angle_count, 50.0, ctx.seed};
}

const ArmModel* arm_holding(const WorkspaceSnapshot& ws, const std::string& robot,
                            const std::string& object) {
    const RobotModel* r = ws.find_robot(robot);
    if (!r) return nullptr;
    for (const auto& a : r->arms) {
        if (a.holding && *a.holding == object) return &a;
    }
    return nullptr;
}

Grounding trivial_grounding() { return Grounding{"", {}}; }

// Candidate grasp groundings: per free arm, the pre-checked approach angles
// closest to straight-on, one grounding each.
std::vector<Grounding> grasp_groundings(const RunContext& ctx, const std::string& object,
                                        std::vector<std::string> excludes, bool rearranges) {
    std::vector<Grounding> out;
    const RobotModel* r = ctx.world.find_robot(ctx.robot);
    const ObjectModel* obj = ctx.world.find_object(object);
    if (!r || !obj || !obj->on_table()) return out;

    for (const auto& arm : r->arms) {
        if (arm.holding) continue;
        if (ctx.config.ideal_motion) {
            GroundedStep step;
            step.action = action(Verb::Pick, object);
            step.agent = arm.id;
            step.motion =
                MotionGoalSpec{GraspApproachGoal{object, 0.0, grasp_standoff(*obj, r->gripper_radius)},
                               excludes};
            step.effect = PickEffect{ctx.robot, arm.id, object};
            step.rearranges = rearranges;
            out.push_back(Grounding{arm.id, {step}});
            continue;
        }
        std::vector<double> angles = discretized_angles(ctx.config.angle_count);
        std::stable_sort(angles.begin(), angles.end(),
                         [](double a, double b) { return std::abs(a) < std::abs(b); });
        int taken = 0;
        for (double angle : angles) {
            if (taken >= ctx.config.max_grasp_angles) break;
            MotionDomain domain;
            domain.workspace = ctx.world;
            domain.robot = ctx.robot;
            domain.acting_arm = arm.id;
            domain.moving_radius = r->gripper_radius;
            const double standoff = grasp_standoff(*obj, r->gripper_radius);
            domain.goal = GraspApproachGoal{object, angle, standoff};
            domain.exclude_objects = excludes;
            if (!collision_free(goal_point(domain), domain)) continue;
            if (!collision_free(obj->pose.xy(), domain)) continue;
            if (!grasp_approach_clear(domain)) continue;
            GroundedStep step;
            step.action = action(Verb::Pick, object);
            step.agent = arm.id;
            step.motion = MotionGoalSpec{GraspApproachGoal{object, angle, standoff}, excludes};
            step.effect = PickEffect{ctx.robot, arm.id, object};
            step.rearranges = rearranges;
            out.push_back(Grounding{arm.id, {step}});
            ++taken;
        }
    }
    return out;
}

std::optional<Vec2> handover_point(const WorkspaceSnapshot& ws, const RobotModel& r,
                                   const ArmModel& from, const ArmModel& to) {
    const Vec2 c1 = ws.arm_reach_center_world(r, from);
    const Vec2 c2 = ws.arm_reach_center_world(r, to);
    const double d = distance(c1, c2);
    if (d > from.reach_radius + to.reach_radius) return std::nullopt;
    if (d < 1e-9) return c1;
    // Midpoint of the intersection chord of the two reach discs.
    const double k = (d * d + from.reach_radius * from.reach_radius -
                      to.reach_radius * to.reach_radius) /
                     (2.0 * d * d);
    const Vec2 p = c1 + (c2 - c1) * k;
    if (distance(p, c1) > from.reach_radius || distance(p, c2) > to.reach_radius)
        return std::nullopt;
    return p;
}

bool point_clear_for_radius(const WorkspaceSnapshot& ws, const Vec2& p, double radius) {
    for (const auto& o : ws.objects) {
        if (!o.on_table()) continue;
        if (disc_intersects_footprint(p, radius, o.footprint())) return false;
    }
    return true;
}

bool within_reach(const WorkspaceSnapshot& ws, const RobotModel& r, const ArmModel& a,
                  const Vec2& p) {
    return distance(p, ws.arm_reach_center_world(r, a)) <= a.reach_radius;
}

}  // namespace detail

namespace {

using namespace detail;

// First row-major storage cell that is reachable and whose swept disc
// (gripper + carried object) is clear of everything still on the table.
std::optional<Pose> storage_cell_for_carry(const WorkspaceSnapshot& ws, const ObjectModel& obj,
                                           double carry_radius,
                                           const std::function<bool(const Vec2&)>& reachable) {
    const double pitch = ws.params.storage_pitch;
    const double half = pitch * 0.5;
    for (double y = ws.storage.min.y + half; y <= ws.storage.max.y - half + 1e-9; y += pitch) {
        for (double x = ws.storage.min.x + half; x <= ws.storage.max.x - half + 1e-9; x += pitch) {
            const Vec2 p{x, y};
            if (!reachable(p)) continue;
            if (!point_clear_for_radius(ws, p, carry_radius)) continue;
            const Footprint candidate{obj.shape, Pose{x, y, 0.0}};
            bool free = true;
            for (const auto& o : ws.objects) {
                if (!o.on_table() || o.id == obj.id) continue;
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

std::vector<Grounding> storage_place_groundings(const RunContext& ctx) {
    std::vector<Grounding> out;
    const RobotModel* r = ctx.world.find_robot(ctx.robot);
    if (!r) return out;

    const ArmModel* holder = nullptr;
    const ObjectModel* held = nullptr;
    for (const auto& a : r->arms) {
        if (!a.holding || *a.holding == ctx.task) continue;
        const ObjectModel* o = ctx.world.find_object(*a.holding);
        if (o && o->movable()) {
            holder = &a;
            held = o;
            break;
        }
    }
    if (!holder || !held) return out;

    const double carry_radius = r->gripper_radius + shape_bounding_radius(held->shape);
    const auto reach_of = [&](const ArmModel& a) {
        return [&ctx, r, &a](const Vec2& p) {
            return ctx.config.ideal_motion || within_reach(ctx.world, *r, a, p);
        };
    };

    const auto direct_cell = storage_cell_for_carry(ctx.world, *held, carry_radius, reach_of(*holder));
    if (direct_cell) {
        GroundedStep step;
        step.action = action(Verb::Place, held->id);
        step.agent = holder->id;
        step.motion = MotionGoalSpec{PointGoal{direct_cell->xy(), 0.01}, {}};
        step.effect = PlaceEffect{ctx.robot, holder->id, held->id, *direct_cell};
        step.rearranges = true;
        out.push_back(Grounding{holder->id, {step}});
        return out;
    }

    // Storage lies outside the holding arm's reach: hand over to the other
    // arm when it can reach a cell.
    for (const auto& other : r->arms) {
        if (other.id == holder->id || other.holding) continue;
        const auto cell = storage_cell_for_carry(ctx.world, *held, carry_radius, reach_of(other));
        if (!cell) continue;
        const auto hp = handover_point(ctx.world, *r, *holder, other);
        if (!hp) continue;
        GroundedStep handover;
        handover.action = action(Verb::Handover, held->id);
        handover.agent = holder->id;
        handover.motion = MotionGoalSpec{PointGoal{*hp, 0.01}, {}};
        handover.effect = HandoverEffect{ctx.robot, holder->id, other.id, held->id};
        GroundedStep place;
        place.action = action(Verb::Place, held->id);
        place.agent = other.id;
        place.motion = MotionGoalSpec{PointGoal{cell->xy(), 0.01}, {}};
        place.effect = PlaceEffect{ctx.robot, other.id, held->id, *cell};
        place.rearranges = true;
        out.push_back(Grounding{holder->id, {handover, place}});
    }
    return out;
}

std::vector<Grounding> push_groundings(const RunContext& ctx, const std::string& object) {
    std::vector<Grounding> out;
    const RobotModel* r = ctx.world.find_robot(ctx.robot);
    const ObjectModel* obj = ctx.world.find_object(object);
    if (!r || !obj) return out;

    const Vec2 dir = (obj->pose.xy() - r->base_pose.xy()).normalized();
    const Vec2 contact =
        obj->pose.xy() - dir * (shape_bounding_radius(obj->shape) + r->gripper_radius);
    for (const auto& arm : r->arms) {
        if (arm.holding) continue;
        try {
            apply_effect(ctx.world, PushEffect{ctx.robot, arm.id, object});
        } catch (const InconsistentEffect&) {
            continue;  // push destination blocked
        }
        if (!ctx.config.ideal_motion) {
            MotionDomain domain;
            domain.workspace = ctx.world;
            domain.robot = ctx.robot;
            domain.acting_arm = arm.id;
            domain.moving_radius = r->gripper_radius;
            domain.goal = PointGoal{contact, 0.01};
            domain.exclude_objects = {object};
            if (!collision_free(contact, domain)) continue;
        }
        GroundedStep step;
        step.action = action(Verb::Push, object);
        step.agent = arm.id;
        step.motion = MotionGoalSpec{PointGoal{contact, 0.01}, {object}};
        step.effect = PushEffect{ctx.robot, arm.id, object};
        step.rearranges = true;
        out.push_back(Grounding{arm.id, {step}});
    }
    return out;
}

std::set<std::string> rearrangement_set(const RunContext& ctx) {
    try {
        return objects_to_rearrange(ctx.world, ctx.robot, ctx.task, ctx.planner,
                                    heuristic_params(ctx));
    } catch (const NoFeasibleAngle&) {
        return {};
    }
}

const ObjectModel* pick_candidate(const RunContext& ctx, const std::set<std::string>& set,
                                  const std::function<double(const ObjectModel&)>& score) {
    const ObjectModel* best = nullptr;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& id : set) {
        const ObjectModel* o = ctx.world.find_object(id);
        if (!o || !o->on_table()) continue;
        if (o->category != ObjectCategory::Graspable &&
            !(o->category == ObjectCategory::Target && o->id != ctx.task))
            continue;
        const double s = score(*o);
        if (s < best_score) {
            best_score = s;
            best = o;
        }
    }
    return best;
}

bool holds_non_target_movable(const RunContext& ctx) {
    const RobotModel* r = ctx.world.find_robot(ctx.robot);
    if (!r) return false;
    for (const auto& a : r->arms) {
        if (!a.holding || *a.holding == ctx.task) continue;
        const ObjectModel* o = ctx.world.find_object(*a.holding);
        if (o && o->movable()) return true;
    }
    return false;
}

std::vector<Grounding> ground_clutter(const HyperArc&, const std::string& parent,
                                      const RunContext& ctx) {
    if (parent == "INIT") {
        return {Grounding{"", {GroundedStep{action(Verb::Sense), "", std::nullopt, SenseEffect{}, false}}}};
    }
    if (parent == "grasped_target_object") {
        if (arm_holding(ctx.world, ctx.robot, ctx.task)) return {trivial_grounding()};
        return grasp_groundings(ctx, ctx.task, {}, false);
    }
    if (parent == "grasped_object_closest_target_object") {
        if (holds_non_target_movable(ctx)) return {trivial_grounding()};
        const ObjectModel* target = ctx.world.find_object(ctx.task);
        if (!target) return {};
        const Vec2 tp = target->pose.xy();
        const auto set = rearrangement_set(ctx);
        const ObjectModel* obj =
            pick_candidate(ctx, set, [&](const ObjectModel& o) { return distance(o.pose.xy(), tp); });
        if (!obj) return {};
        return grasp_groundings(ctx, obj->id, {}, false);
    }
    if (parent == "grasped_object_closest_to_arms") {
        if (holds_non_target_movable(ctx)) return {trivial_grounding()};
        const RobotModel* r = ctx.world.find_robot(ctx.robot);
        if (!r) return {};
        const auto set = rearrangement_set(ctx);
        const ObjectModel* obj = pick_candidate(ctx, set, [&](const ObjectModel& o) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& a : r->arms)
                best = std::min(best, distance(o.pose.xy(), ctx.world.arm_ee_world(*r, a)));
            return best;
        });
        if (!obj) return {};
        return grasp_groundings(ctx, obj->id, {}, false);
    }
    if (parent == "pushed_largest_object") {
        const auto set = rearrangement_set(ctx);
        const ObjectModel* largest = nullptr;
        double best = -1.0;
        for (const auto& id : set) {
            const ObjectModel* o = ctx.world.find_object(id);
            if (!o || o->category != ObjectCategory::PushableOnly) continue;
            const double dim = shape_max_dimension(o->shape);
            if (dim > best) {
                best = dim;
                largest = o;
            }
        }
        if (!largest) return {};
        return push_groundings(ctx, largest->id);
    }
    if (parent == "placed_object_storage_area") return storage_place_groundings(ctx);
    if (parent == "END") return {trivial_grounding()};
    return {};
}

bool any_movable_in_storage(const WorkspaceSnapshot& ws) {
    for (const auto& o : ws.objects) {
        if (o.on_table() && o.movable() && ws.storage.contains(o.pose.xy())) return true;
    }
    return false;
}

}  // namespace

DomainTemplate clutter_template() {
    GraphBuilder b;
    b.add_node("INIT");
    b.add_node("grasped_target_object");
    b.add_node("grasped_object_closest_target_object");
    b.add_node("grasped_object_closest_to_arms");
    b.add_node("pushed_largest_object", NodeKind::FailureTerminal);
    b.add_node("placed_object_storage_area", NodeKind::FailureTerminal);
    b.add_node("END", NodeKind::SuccessTerminal);

    b.add_arc("grasped_target_object", {"INIT"}, {action(Verb::Pick)}, 1.0);
    b.add_arc("grasped_object_closest_target_object", {"INIT"}, {action(Verb::Pick)}, 2.0);
    b.add_arc("grasped_object_closest_to_arms", {"INIT"}, {action(Verb::Pick)}, 3.0);
    b.add_arc("pushed_largest_object", {"INIT"}, {action(Verb::Push)}, 4.0);
    b.add_arc("placed_object_storage_area", {"grasped_object_closest_target_object"},
              {action(Verb::Handover), action(Verb::Place)}, 1.0);
    b.add_arc("placed_object_storage_area", {"grasped_object_closest_to_arms"},
              {action(Verb::Handover), action(Verb::Place)}, 1.0);
    b.add_arc("END", {"grasped_target_object"}, {}, 1.0);

    DomainTemplate tmpl;
    tmpl.name = "clutter";
    tmpl.graph = std::move(b).build();
    tmpl.augment_spec = {{"INIT", {action(Verb::Sense)}, 1.0}};
    tmpl.agents = {"left", "right"};

    Binding binding;
    binding.ground = ground_clutter;
    binding.state_predicates = {
        {"INIT", [](const WorkspaceSnapshot&, const std::string&) { return true; }},
        {"grasped_target_object",
         [](const WorkspaceSnapshot& ws, const std::string& task) {
             const ObjectModel* o = ws.find_object(task);
             return o && o->held_by.has_value();
         }},
        {"grasped_object_closest_target_object",
         [](const WorkspaceSnapshot& ws, const std::string& task) {
             for (const auto& o : ws.objects)
                 if (o.held_by && o.id != task) return true;
             return false;
         }},
        {"grasped_object_closest_to_arms",
         [](const WorkspaceSnapshot& ws, const std::string& task) {
             for (const auto& o : ws.objects)
                 if (o.held_by && o.id != task) return true;
             return false;
         }},
        {"pushed_largest_object",
         [](const WorkspaceSnapshot&, const std::string&) { return true; }},
        {"placed_object_storage_area",
         [](const WorkspaceSnapshot& ws, const std::string&) { return any_movable_in_storage(ws); }},
        {"END",
         [](const WorkspaceSnapshot& ws, const std::string& task) {
             const ObjectModel* o = ws.find_object(task);
             return o && o->held_by.has_value();
         }},
    };
    tmpl.binding = std::move(binding);
    return tmpl;
}

Scenario generate_clutter(int n_objects, int n_robots, int n_targets, std::uint64_t seed) {
    if (n_objects < 1) throw std::invalid_argument("need at least one object");
    if (n_robots < 1 || n_robots > 4) throw std::invalid_argument("1 to 4 robots supported");
    if (n_targets < 1 || n_targets > n_objects)
        throw std::invalid_argument("targets must be in [1, objects]");

    Scenario sc;
    sc.seed = seed;
    WorkspaceSnapshot& ws = sc.world;
    ws.table = Rect{{-0.6, 0.0}, {0.6, 0.8}};
    ws.storage = Rect{{0.6, 0.0}, {0.9, 0.4}};
    // Cylinders up to 0.08 m across stay side-graspable with these grippers.
    ws.params.pushable_ratio = 4.0;

    if (n_robots == 1) {
        RobotModel baxter;
        baxter.id = "r1";
        baxter.base_pose = Pose{0.0, -0.25, 0.0};
        baxter.gripper_radius = 0.025;
        baxter.arms = {ArmModel{"left", Vec2{-0.15, 0.35}, 0.95, std::nullopt, std::nullopt},
                       ArmModel{"right", Vec2{0.15, 0.35}, 0.95, std::nullopt, std::nullopt}};
        ws.robots.push_back(baxter);
    } else {
        const Pose bases[4] = {{0.0, -0.25, M_PI_2}, {0.0, 1.05, -M_PI_2}, {-0.9, 0.4, 0.0},
                               {0.9, 0.4, M_PI}};
        for (int i = 0; i < n_robots; ++i) {
            RobotModel panda;
            panda.id = "r" + std::to_string(i + 1);
            panda.base_pose = bases[i];
            panda.gripper_radius = 0.025;
            panda.arms = {ArmModel{"arm", Vec2{0.3, 0.0}, 1.0, std::nullopt, std::nullopt}};
            ws.robots.push_back(panda);
        }
        ws.storage = Rect{{0.6, 0.0}, {0.9, 0.8}};
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius_dist(0.02, 0.04);
    const double clearance = 0.03;  // wider than the gripper so grasps stay extractable
    std::vector<double> radii(n_objects);
    for (double& r : radii) r = radius_dist(rng);
    // Large discs first: same radius distribution, far better packing odds.
    std::sort(radii.begin(), radii.end(), std::greater<>());
    for (int i = 0; i < n_objects; ++i) {
        const double r = radii[i];
        std::uniform_real_distribution<double> px(ws.table.min.x + r, ws.table.max.x - r);
        std::uniform_real_distribution<double> py(ws.table.min.y + r, ws.table.max.y - r);
        bool placed = false;
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const Vec2 p{px(rng), py(rng)};
            bool ok = true;
            for (const auto& o : ws.objects) {
                const double min_gap =
                    r + std::get<Disc>(o.shape).radius + clearance;
                if (distance(p, o.pose.xy()) < min_gap) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            ObjectModel obj;
            obj.id = "o" + std::to_string(i + 1);
            obj.shape = Disc{r};
            obj.pose = Pose{p.x, p.y, 0.0};
            obj.category = ObjectCategory::Graspable;
            ws.objects.push_back(std::move(obj));
            placed = true;
            break;
        }
        if (!placed)
            throw PackingFailure("could not place object " + std::to_string(i + 1) + " of " +
                                 std::to_string(n_objects));
    }

    // Targets sampled among the placed objects.
    std::vector<int> ids(n_objects);
    for (int i = 0; i < n_objects; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    for (int t = 0; t < n_targets; ++t) {
        ws.objects[ids[t]].category = ObjectCategory::Target;
        ws.targets.push_back(ws.objects[ids[t]].id);
    }
    return sc;
}

}  // namespace tmpidan
