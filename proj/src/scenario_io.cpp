#include "tmpidan/scenario_io.hpp"

#include <fstream>
#include <sstream>

namespace tmpidan {

using nlohmann::json;

namespace {

json vec_to_json(const Vec2& v) { return json::array({v.x, v.y}); }
Vec2 vec_from_json(const json& j) { return Vec2{j.at(0).get<double>(), j.at(1).get<double>()}; }

json pose_to_json(const Pose& p) { return json::array({p.x, p.y, p.yaw}); }
Pose pose_from_json(const json& j) {
    return Pose{j.at(0).get<double>(), j.at(1).get<double>(),
                j.size() > 2 ? j.at(2).get<double>() : 0.0};
}

json rect_to_json(const Rect& r) {
    return json{{"min", vec_to_json(r.min)}, {"max", vec_to_json(r.max)}};
}
Rect rect_from_json(const json& j) {
    return Rect{vec_from_json(j.at("min")), vec_from_json(j.at("max"))};
}

json shape_to_json(const Shape& s) {
    if (const auto* d = std::get_if<Disc>(&s)) {
        return json{{"type", "disc"}, {"radius", d->radius}};
    }
    const auto& b = std::get<BoxExtents>(s);
    return json{{"type", "box"}, {"half_extents", json::array({b.hx, b.hy})}};
}

Shape shape_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "disc") return Disc{j.at("radius").get<double>()};
    if (type == "box") {
        const auto& he = j.at("half_extents");
        return BoxExtents{he.at(0).get<double>(), he.at(1).get<double>()};
    }
    throw std::runtime_error("unknown shape type: " + type);
}

// 1-based line/column from a byte offset.
std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
    int line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

json scenario_to_json(const Scenario& sc) {
    const WorkspaceSnapshot& ws = sc.world;
    json j;
    j["table"] = rect_to_json(ws.table);
    j["storage"] = rect_to_json(ws.storage);
    j["seed"] = sc.seed;
    j["epoch"] = ws.epoch;

    json objects = json::array();
    for (const auto& o : ws.objects) {
        json jo;
        jo["id"] = o.id;
        jo["shape"] = shape_to_json(o.shape);
        jo["pose"] = pose_to_json(o.pose);
        jo["category"] = to_string(o.category);
        json tags = json::array();
        for (const auto& t : o.tags) tags.push_back(to_string(t));
        jo["tags"] = tags;
        if (o.held_by) jo["held_by"] = *o.held_by;
        objects.push_back(std::move(jo));
    }
    j["objects"] = std::move(objects);

    json robots = json::array();
    for (const auto& r : ws.robots) {
        json jr;
        jr["id"] = r.id;
        jr["base_pose"] = pose_to_json(r.base_pose);
        jr["gripper_radius"] = r.gripper_radius;
        json arms = json::array();
        for (const auto& a : r.arms) {
            json ja;
            ja["id"] = a.id;
            ja["reach_center"] = vec_to_json(a.reach_center);
            ja["reach_radius"] = a.reach_radius;
            if (a.holding) ja["holding"] = *a.holding;
            if (a.ee) ja["ee"] = vec_to_json(*a.ee);
            arms.push_back(std::move(ja));
        }
        jr["arms"] = std::move(arms);
        robots.push_back(std::move(jr));
    }
    j["robots"] = std::move(robots);

    j["targets"] = ws.targets;
    j["params"] = json{{"push_distance", ws.params.push_distance},
                       {"storage_pitch", ws.params.storage_pitch},
                       {"pushable_ratio", ws.params.pushable_ratio},
                       {"appliance_service_radius", ws.params.appliance_service_radius}};
    if (!ws.stations.empty()) {
        json st;
        for (const auto& [name, pose] : ws.stations) st[name] = pose_to_json(pose);
        j["stations"] = std::move(st);
    }
    return j;
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    WorkspaceSnapshot& ws = sc.world;
    ws.table = rect_from_json(j.at("table"));
    ws.storage = rect_from_json(j.at("storage"));
    sc.seed = j.value("seed", 0ULL);
    ws.epoch = j.value("epoch", 0ULL);

    for (const auto& jo : j.at("objects")) {
        ObjectModel o;
        o.id = jo.at("id").get<std::string>();
        o.shape = shape_from_json(jo.at("shape"));
        o.pose = pose_from_json(jo.at("pose"));
        o.category = object_category_from_string(jo.value("category", "graspable"));
        if (jo.contains("tags")) {
            for (const auto& t : jo.at("tags")) o.tags.insert(symbolic_tag_from_string(t));
        }
        if (jo.contains("held_by")) o.held_by = jo.at("held_by").get<std::string>();
        ws.objects.push_back(std::move(o));
    }
    for (const auto& jr : j.at("robots")) {
        RobotModel r;
        r.id = jr.at("id").get<std::string>();
        r.base_pose = pose_from_json(jr.at("base_pose"));
        r.gripper_radius = jr.at("gripper_radius").get<double>();
        for (const auto& ja : jr.at("arms")) {
            ArmModel a;
            a.id = ja.at("id").get<std::string>();
            a.reach_center = vec_from_json(ja.at("reach_center"));
            a.reach_radius = ja.at("reach_radius").get<double>();
            if (ja.contains("holding")) a.holding = ja.at("holding").get<std::string>();
            if (ja.contains("ee")) a.ee = vec_from_json(ja.at("ee"));
            r.arms.push_back(std::move(a));
        }
        ws.robots.push_back(std::move(r));
    }
    if (j.contains("targets")) ws.targets = j.at("targets").get<std::vector<std::string>>();
    if (j.contains("params")) {
        const auto& jp = j.at("params");
        ws.params.push_distance = jp.value("push_distance", ws.params.push_distance);
        ws.params.storage_pitch = jp.value("storage_pitch", ws.params.storage_pitch);
        ws.params.pushable_ratio = jp.value("pushable_ratio", ws.params.pushable_ratio);
        ws.params.appliance_service_radius =
            jp.value("appliance_service_radius", ws.params.appliance_service_radius);
    }
    if (j.contains("stations")) {
        for (const auto& [name, pose] : j.at("stations").items())
            ws.stations[name] = pose_from_json(pose);
    }
    return sc;
}

std::string scenario_to_string(const Scenario& sc) { return scenario_to_json(sc).dump(2) + "\n"; }

Scenario scenario_from_string(const std::string& text) {
    try {
        return scenario_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ScenarioParseError(e.what(), line, column);
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_string(buf.str());
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << scenario_to_string(sc);
}

json graph_to_json(const AndOrGraph& g) {
    json j;
    json nodes = json::array();
    for (const auto& n : g.nodes()) {
        const char* kind = n.kind == NodeKind::SuccessTerminal   ? "success"
                           : n.kind == NodeKind::FailureTerminal ? "failure"
                           : n.kind == NodeKind::AugmentedRoot   ? "augmented_root"
                                                                 : "internal";
        nodes.push_back(json{{"label", n.label}, {"kind", kind}});
    }
    j["nodes"] = std::move(nodes);
    json arcs = json::array();
    for (const auto& a : g.arcs()) {
        json ja;
        ja["parent"] = g.node(a.parent).label;
        json children = json::array();
        for (NodeId c : a.children) children.push_back(g.node(c).label);
        ja["children"] = std::move(children);
        ja["cost"] = a.cost;
        json actions = json::array();
        for (const auto& act : a.actions) {
            json jact{{"verb", to_string(act.verb)}};
            if (!act.object.empty()) jact["object"] = act.object;
            if (!act.agent_hint.empty()) jact["agent_hint"] = act.agent_hint;
            actions.push_back(std::move(jact));
        }
        ja["actions"] = std::move(actions);
        arcs.push_back(std::move(ja));
    }
    j["arcs"] = std::move(arcs);
    return j;
}

AndOrGraph graph_from_json(const json& j) {
    GraphBuilder b;
    for (const auto& jn : j.at("nodes")) {
        const std::string kind = jn.value("kind", "internal");
        NodeKind k = NodeKind::Internal;
        if (kind == "success") k = NodeKind::SuccessTerminal;
        else if (kind == "failure") k = NodeKind::FailureTerminal;
        else if (kind == "augmented_root") k = NodeKind::AugmentedRoot;
        b.add_node(jn.at("label").get<std::string>(), k);
    }
    for (const auto& ja : j.at("arcs")) {
        std::vector<ActionSpec> actions;
        if (ja.contains("actions")) {
            for (const auto& jact : ja.at("actions")) {
                actions.push_back(action(verb_from_string(jact.at("verb").get<std::string>()),
                                         jact.value("object", ""), jact.value("agent_hint", "")));
            }
        }
        b.add_arc(ja.at("parent").get<std::string>(),
                  ja.at("children").get<std::vector<std::string>>(), std::move(actions),
                  ja.value("cost", 1.0));
    }
    return std::move(b).build();
}

}  // namespace tmpidan
