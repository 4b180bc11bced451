#include <doctest.h>

#include "test_support.hpp"
#include "tmpidan/domains.hpp"
#include "tmpidan/planner.hpp"
#include "tmpidan/scenario_io.hpp"

using namespace tmpidan;
using tmpidan::testsupport::blocked_slot_world;
using tmpidan::testsupport::HanoiBfs;

namespace {

WorkspaceSnapshot clear_target_world() {
    WorkspaceSnapshot ws = blocked_slot_world();
    // Keep only the target, out in the open.
    ws.objects.erase(std::remove_if(ws.objects.begin(), ws.objects.end(),
                                    [](const ObjectModel& o) { return o.id != "target"; }),
                     ws.objects.end());
    ws.objects[0].pose = Pose{0.1, 0.4, 0.0};
    return ws;
}

PlannerConfig fast_config(std::uint64_t seed) {
    PlannerConfig cfg;
    cfg.motion_budget_ms = 400;
    cfg.depth_limit = 16;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("planner");

TEST_CASE("find_next_optimal keeps only the minimum cost tier") {
    GraphBuilder b;
    b.add_node("root");
    b.add_node("a");
    b.add_node("b");
    b.add_node("c");
    b.add_arc("a", {"root"}, {}, 1.0);
    b.add_arc("b", {"root"}, {}, 2.0);
    b.add_arc("c", {"root"}, {}, 1.0);
    const AndOrGraph g = std::move(b).build();
    AugmentedGraph ag = augment(g, WorkspaceSnapshot{}, {{"root", {}, 1.0}});
    ag.fire(ag.feasible_transitions()[0].first);

    const auto fts = ag.feasible_transitions();
    REQUIRE(fts.size() == 3);
    const auto ots = find_next_optimal(fts, ag);
    REQUIRE(ots.size() == 2);  // the two cost-1 arcs, ordered by arc id
    CHECK(ots[0].first < ots[1].first);
    CHECK(ag.graph().arc(ots[0].first).cost == 1.0);
    CHECK(ag.graph().arc(ots[1].first).cost == 1.0);

    CHECK_THROWS_AS(find_next_optimal({}, ag), EmptyFeasibleSet);
}

TEST_CASE("unobstructed clutter solves at depth one") {
    const auto tmpl = clutter_template();
    const auto m = run_single(tmpl, clear_target_world(), "r1", "target", fast_config(7));
    CHECK(m.solved);
    CHECK(m.depth == 1);
    CHECK(m.objects_rearranged == 0);
    CHECK(m.mp_attempts >= m.executions);
}

TEST_CASE("two queued blockers force depth three") {
    const auto tmpl = clutter_template();
    const auto ws = blocked_slot_world();
    for (std::uint64_t seed : {3u, 7u, 911u}) {
        const auto m = run_single(tmpl, ws, "r1", "target", fast_config(seed));
        CHECK(m.solved);
        CHECK(m.depth == 3);  // one graph per rearrangement plus the final grasp
        CHECK(m.objects_rearranged == 2);
        CHECK(m.depth == m.objects_rearranged + 1);
    }
    SUBCASE("depth limit one cannot solve it") {
        auto cfg = fast_config(3);
        cfg.depth_limit = 1;
        const auto m = run_single(tmpl, ws, "r1", "target", cfg);
        CHECK_FALSE(m.solved);
        CHECK(m.depth == 1);
    }
}

TEST_CASE("an unreachable target exhausts and expands with identical snapshots") {
    const auto tmpl = clutter_template();
    WorkspaceSnapshot ws = clear_target_world();
    for (auto& r : ws.robots) {
        for (auto& a : r.arms) a.reach_radius = 0.22;  // target out of reach
    }
    auto cfg = fast_config(1);
    cfg.depth_limit = 3;
    KnowledgeBase kb(ws);
    TaskRunner runner(tmpl, kb, "r1", "target", cfg);
    runner.run();
    CHECK(runner.status() == TaskRunner::Status::Failed);
    const auto& net = runner.network();
    CHECK(net.depth() == 3);
    REQUIRE(net.transitions().size() == 2);
    for (const auto& t : net.transitions()) {
        CHECK(t.reason == TransitionReason::Exhausted);
    }
    // The retries re-bound an identical configuration: only the monotone
    // epoch differs.
    const auto fingerprint = [](const WorkspaceSnapshot& w) {
        Scenario sc;
        sc.world = w;
        auto j = scenario_to_json(sc);
        j.erase("epoch");
        return j.dump();
    };
    CHECK(fingerprint(net.graphs()[0].binding()) == fingerprint(net.graphs()[1].binding()));
    CHECK(fingerprint(net.graphs()[1].binding()) == fingerprint(net.graphs()[2].binding()));
}

TEST_CASE("execute_candidate retries the remaining plans under seeded failures") {
    const auto tmpl = clutter_template();
    const auto ws = clear_target_world();
    bool saw_retry = false;
    for (std::uint64_t seed = 0; seed < 12 && !saw_retry; ++seed) {
        auto cfg = fast_config(seed);
        cfg.fail_prob = 0.55;
        KnowledgeBase kb(ws);
        TaskRunner runner(tmpl, kb, "r1", "target", cfg);
        runner.step();  // expand the initial graph
        runner.step();  // fire the INIT arc
        const auto fts = runner.network().active().feasible_transitions();
        REQUIRE_FALSE(fts.empty());
        const auto nc = runner.execute_candidate(fts.front().first);
        const auto m = runner.metrics();
        CHECK(m.mp_attempts >= m.executions);
        if (nc) {
            CHECK(kb.sense().find_object("target")->held_by.has_value());
            if (m.executions >= 3) saw_retry = true;  // first plans failed, a later one executed
        } else {
            CHECK(m.executions >= 1);  // every simulated plan was tried and failed
        }
    }
    CHECK(saw_retry);
}

TEST_CASE("execute_candidate with every plan failing returns absent") {
    const auto tmpl = clutter_template();
    const auto ws = clear_target_world();
    auto cfg = fast_config(4);
    cfg.depth_limit = 2;
    KnowledgeBase kb(ws);
    TaskRunner runner(tmpl, kb, "r1", "target", cfg);
    runner.step();
    runner.step();
    // Candidate whose grounding cannot exist: the push arc (nothing pushable).
    const auto& g = runner.network().active();
    std::optional<ArcId> push_arc;
    for (const auto& [arc, node] : g.feasible_transitions()) {
        if (g.graph().node(node).label == "pushed_largest_object") push_arc = arc;
    }
    REQUIRE(push_arc.has_value());
    CHECK_FALSE(runner.execute_candidate(*push_arc).has_value());
}

TEST_CASE("hanoi depth equals the BFS-optimal move count") {
    const auto tmpl = hanoi_template();
    for (int disks : {3, 4}) {
        const auto sc = hanoi_scenario(disks);
        PlannerConfig cfg;
        cfg.ideal_motion = true;
        cfg.depth_limit = 256;
        cfg.seed = 1;
        const auto m = run_single(tmpl, sc.world, "r1", "hanoi", cfg);
        const HanoiBfs oracle(disks);
        const int optimal = oracle.distance(std::vector<int>(disks, 0));
        CHECK(m.solved);
        CHECK(static_cast<int>(m.depth) == optimal);
        CHECK(optimal == (1 << disks) - 1);
    }
}

TEST_CASE("hanoi with real motion stays optimal on this geometry") {
    const auto tmpl = hanoi_template();
    const auto sc = hanoi_scenario(3);
    PlannerConfig cfg;
    cfg.motion_budget_ms = 300;
    cfg.depth_limit = 64;
    cfg.seed = 5;
    const auto m = run_single(tmpl, sc.world, "r1", "hanoi", cfg);
    CHECK(m.solved);
    CHECK(m.depth == 7);
    // Legality monitor: replaying the effect log never stacks a larger disk
    // on a smaller one.
    KnowledgeBase kb(sc.world);
    TaskRunner runner(tmpl, kb, "r1", "hanoi", cfg);
    runner.run();
    for (const auto& snap : kb.history()) {
        for (const auto& [rod, disks] : hanoi_stacks(snap)) {
            for (std::size_t i = 0; i + 1 < disks.size(); ++i) {
                const double above = std::get<Disc>(snap.find_object(disks[i + 1])->shape).radius;
                const double below = std::get<Disc>(snap.find_object(disks[i])->shape).radius;
                CHECK(above < below);
            }
        }
    }
}

TEST_CASE("failure probability inflates depth but never breaks solving here") {
    const auto tmpl = clutter_template();
    const auto ws = blocked_slot_world();
    double sum_d = 0.0;
    for (int s = 0; s < 10; ++s) {
        auto cfg = fast_config(100 + s);
        cfg.fail_prob = 0.3;
        cfg.depth_limit = 64;
        const auto m = run_single(tmpl, ws, "r1", "target", cfg);
        CHECK(m.solved);
        CHECK(m.mp_attempts > m.executions);
        sum_d += static_cast<double>(m.depth);
    }
    CHECK(sum_d / 10.0 > 3.0);
}

TEST_CASE("reached goal and solved_at_depth never disagree") {
    const auto tmpl = clutter_template();
    KnowledgeBase kb(blocked_slot_world());
    TaskRunner runner(tmpl, kb, "r1", "target", fast_config(3));
    while (runner.step() == TaskRunner::Status::Running) {
        const bool solved_signal = runner.network().solved_at_depth().has_value();
        CHECK(solved_signal == (runner.status() == TaskRunner::Status::Solved));
    }
    CHECK(runner.network().solved_at_depth().has_value());
    CHECK(runner.network().solved_at_depth() == runner.network().depth());
}

TEST_CASE("run_multi: disjoint regions solve for both robots") {
    const auto tmpl = clutter_template();
    WorkspaceSnapshot ws = blocked_slot_world();
    RobotModel r2 = ws.robots[0];
    r2.id = "r2";
    r2.base_pose = Pose{0.0, 1.05, M_PI};
    ws.robots.push_back(r2);
    ObjectModel t2;
    t2.id = "target2";
    t2.shape = Disc{0.03};
    t2.pose = Pose{-0.4, 0.3, 0.0};
    t2.category = ObjectCategory::Target;
    ws.objects.push_back(t2);
    ws.targets.push_back("target2");

    const auto multi = run_multi(tmpl, ws, {"target", "target2"}, fast_config(11));
    REQUIRE(multi.per_robot.size() == 2);
    for (const auto& [robot, metrics] : multi.per_robot) {
        CHECK(metrics.solved);
    }
    CHECK(multi.combined_utility > 0.0);
    CHECK(multi.assignment.robot_of_task.size() == 2);
}

TEST_CASE("run_multi: a single robot queues every task") {
    const auto tmpl = clutter_template();
    WorkspaceSnapshot ws = clear_target_world();
    ObjectModel t2 = *ws.find_object("target");
    t2.id = "target2";
    t2.pose = Pose{-0.3, 0.3, 0.0};
    ws.objects.push_back(t2);
    ws.targets.push_back("target2");
    const auto multi = run_multi(tmpl, ws, {"target", "target2"}, fast_config(2));
    REQUIRE(multi.per_robot.size() == 1);
    const auto& m = multi.per_robot.begin()->second;
    CHECK(m.solved);
    CHECK(m.depth >= 2);  // two networks, one per queued task
    CHECK(multi.assignment.queues.at("r1").size() == 2);
}

TEST_CASE("run_multi: a target no robot reaches is reported unsolved") {
    const auto tmpl = clutter_template();
    WorkspaceSnapshot ws = clear_target_world();
    for (auto& r : ws.robots) {
        for (auto& a : r.arms) a.reach_radius = 0.22;
    }
    auto cfg = fast_config(6);
    cfg.depth_limit = 2;
    const auto multi = run_multi(tmpl, ws, {"target"}, cfg);
    CHECK_FALSE(multi.per_robot.at("r1").solved);
}

TEST_SUITE_END();
