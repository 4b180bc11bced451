#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "test_support.hpp"
#include "tmpidan/graph.hpp"

using namespace tmpidan;
using tmpidan::testsupport::arc_ready_bruteforce;

namespace {

// The 5-node single pick-and-place graph.
AndOrGraph pick_place_graph() {
    GraphBuilder b;
    b.add_node("object_clear");
    b.add_node("gripper_empty");
    b.add_node("object_in_hand");
    b.add_node("object_on_table", NodeKind::FailureTerminal);
    b.add_node("target_on_table", NodeKind::SuccessTerminal);
    b.add_arc("object_in_hand", {"object_clear", "gripper_empty"}, {action(Verb::Pick)});
    b.add_arc("object_on_table", {"object_in_hand"}, {action(Verb::Place)});
    b.add_arc("target_on_table", {"object_in_hand"}, {action(Verb::Place)});
    return std::move(b).build();
}

const std::vector<AugmentedArcSpec> kPickPlaceAugment = {
    {"object_clear", {action(Verb::Sense)}, 1.0},
    {"gripper_empty", {action(Verb::Sense)}, 1.0},
};

AugmentedGraph augmented_pick_place() {
    return augment(pick_place_graph(), WorkspaceSnapshot{}, kPickPlaceAugment);
}

// Explores every reachable firing sequence, checking the incremental
// feasible set against the exhaustive readiness predicate at every state.
void check_all_reachable_states(const AugmentedGraph& g, int& states) {
    ++states;
    std::set<NodeId> achieved;
    for (const auto& n : g.graph().nodes()) {
        if (n.achieved) achieved.insert(n.id);
    }
    std::set<ArcId> expected;
    for (const auto& a : g.graph().arcs()) {
        if (arc_ready_bruteforce(g.graph(), a, achieved)) expected.insert(a.id);
    }
    std::set<ArcId> got;
    for (const auto& [arc, node] : g.feasible_transitions()) {
        got.insert(arc);
        CHECK(g.graph().arc(arc).parent == node);
    }
    REQUIRE(got == expected);
    for (ArcId arc : expected) {
        AugmentedGraph next = g.fired(arc);
        check_all_reachable_states(next, states);
    }
}

}  // namespace

TEST_SUITE_BEGIN("graph");

TEST_CASE("build validates the pick-and-place example") {
    const AndOrGraph g = pick_place_graph();
    CHECK(g.nodes().size() == 5);
    CHECK(g.arcs().size() == 3);
    CHECK(g.find_node("object_in_hand").has_value());
}

TEST_CASE("build accepts a degenerate single-terminal graph") {
    GraphBuilder b;
    b.add_node("done", NodeKind::SuccessTerminal);
    const AndOrGraph g = std::move(b).build();
    CHECK(g.nodes().size() == 1);
    CHECK(g.arcs().empty());
}

TEST_CASE("build rejects self-loops, cycles and dangling refs") {
    CHECK_THROWS_AS(
        AndOrGraph::build({Node{0, "a", NodeKind::Internal, false}},
                          {HyperArc{0, 0, {0}, {}, 1.0}}),
        CycleError);
    CHECK_THROWS_AS(AndOrGraph::build({Node{0, "a", NodeKind::Internal, false},
                                       Node{1, "b", NodeKind::Internal, false}},
                                      {HyperArc{0, 1, {0}, {}, 1.0}, HyperArc{1, 0, {1}, {}, 1.0}}),
                    CycleError);
    CHECK_THROWS_AS(
        AndOrGraph::build({Node{0, "a", NodeKind::Internal, false}},
                          {HyperArc{0, 0, {7}, {}, 1.0}}),
        DanglingRef);
    GraphBuilder b;
    b.add_node("a");
    CHECK_THROWS_AS(b.add_arc("a", {"missing"}), DanglingRef);
}

TEST_CASE("augment adds one bound root and the requested arcs") {
    const AndOrGraph g = pick_place_graph();
    WorkspaceSnapshot snap;
    snap.epoch = 3;
    const AugmentedGraph a = augment(g, snap, kPickPlaceAugment);
    CHECK(a.graph().nodes().size() == 6);
    CHECK(a.graph().arcs().size() == 5);
    CHECK(a.graph().node(a.root()).kind == NodeKind::AugmentedRoot);
    CHECK(a.graph().node(a.root()).achieved);
    CHECK(a.binding().epoch == 3);
    CHECK(g.nodes().size() == 5);  // original untouched

    SUBCASE("empty arc spec isolates the root") {
        const AugmentedGraph isolated = augment(g, snap, {});
        CHECK(isolated.feasible_transitions().empty());
        CHECK_FALSE(isolated.is_solved());
    }
    SUBCASE("augmenting twice gives structural twins with distinct identity") {
        const AugmentedGraph twin = augment(g, snap, kPickPlaceAugment);
        CHECK(twin.structural_hash() == a.structural_hash());
        CHECK(twin.instance_id() != a.instance_id());
    }
    SUBCASE("missing target label is a dangling reference") {
        CHECK_THROWS_AS(augment(g, snap, {{"nope", {}, 1.0}}), DanglingRef);
    }
}

TEST_CASE("feasible transitions follow AND readiness") {
    AugmentedGraph g = augmented_pick_place();
    // Root arcs only at construction.
    auto fts = g.feasible_transitions();
    REQUIRE(fts.size() == 2);
    g.fire(fts[0].first);
    g.fire(g.feasible_transitions()[0].first);
    // object_clear and gripper_empty achieved: h1 alone is ready.
    fts = g.feasible_transitions();
    REQUIRE(fts.size() == 1);
    CHECK(g.graph().node(fts[0].second).label == "object_in_hand");
}

TEST_CASE("solved graph exposes no transitions past the terminal") {
    AugmentedGraph g = augmented_pick_place();
    while (!g.is_solved()) {
        auto fts = g.feasible_transitions();
        REQUIRE_FALSE(fts.empty());
        // Prefer the success branch when it appears.
        ArcId pick = fts[0].first;
        for (const auto& [arc, node] : fts) {
            if (g.graph().node(node).kind == NodeKind::SuccessTerminal) pick = arc;
        }
        g.fire(pick);
    }
    for (const auto& [arc, node] : g.feasible_transitions()) {
        CHECK(g.graph().node(node).kind != NodeKind::SuccessTerminal);
    }
}

TEST_CASE("fire enforces AND semantics and monotone achievement") {
    AugmentedGraph g = augmented_pick_place();
    const NodeId in_hand = *g.graph().find_node("object_in_hand");
    ArcId h1 = 0;
    for (const auto& a : g.graph().arcs()) {
        if (a.parent == in_hand) h1 = a.id;
    }
    CHECK_THROWS_AS(g.fire(h1), InfeasibleFire);  // children not achieved yet
    for (int k = 0; k < 2; ++k) g.fire(g.feasible_transitions()[0].first);
    g.fire(h1);
    CHECK(g.graph().node(in_hand).achieved);
    CHECK_THROWS_AS(g.fire(h1), InfeasibleFire);  // parent already achieved
    CHECK_THROWS_AS(g.fired(999), DanglingRef);
}

TEST_CASE("the only valid firing orders reach the success terminal") {
    // Enumerate every reachable firing sequence and record which achieve
    // target_on_table; the pick must always precede either placement.
    int success_paths = 0;
    std::function<void(AugmentedGraph, std::vector<std::string>)> walk =
        [&](AugmentedGraph g, std::vector<std::string> order) {
            const auto fts = g.feasible_transitions();
            if (fts.empty()) {
                if (g.is_solved()) {
                    ++success_paths;
                    const auto at = [&order](const std::string& label) {
                        return std::find(order.begin(), order.end(), label) - order.begin();
                    };
                    // The pick always precedes the successful placement.
                    CHECK(at("object_in_hand") < at("target_on_table"));
                    CHECK(at("object_clear") < at("object_in_hand"));
                    CHECK(at("gripper_empty") < at("object_in_hand"));
                }
                return;
            }
            for (const auto& [arc, node] : fts) {
                auto next_order = order;
                next_order.push_back(g.graph().node(node).label);
                walk(g.fired(arc), std::move(next_order));
            }
        };
    walk(augmented_pick_place(), {});
    CHECK(success_paths > 0);
}

TEST_CASE("is_solved tracks success terminals only") {
    AugmentedGraph g = augmented_pick_place();
    CHECK_FALSE(g.is_solved());
    for (int k = 0; k < 2; ++k) g.fire(g.feasible_transitions()[0].first);
    g.fire(g.feasible_transitions()[0].first);  // object_in_hand
    // Fire the failure placement: still unsolved.
    const NodeId fail = *g.graph().find_node("object_on_table");
    for (const auto& [arc, node] : g.feasible_transitions()) {
        if (node == fail) g.fire(arc);
    }
    CHECK(g.has_failure_terminal_achieved());
    CHECK_FALSE(g.is_solved());
    const NodeId ok = *g.graph().find_node("target_on_table");
    for (const auto& [arc, node] : g.feasible_transitions()) {
        if (node == ok) g.fire(arc);
    }
    CHECK(g.is_solved());
}

TEST_CASE("exhaustive oracle over a 7-node doubly-OR graph") {
    GraphBuilder b;
    b.add_node("leaf_a");
    b.add_node("leaf_b");
    b.add_node("leaf_c");
    b.add_node("mid_ab");
    b.add_node("mid_bc");
    b.add_node("or_parent");
    b.add_node("goal", NodeKind::SuccessTerminal);
    b.add_arc("mid_ab", {"leaf_a", "leaf_b"});
    b.add_arc("mid_bc", {"leaf_b", "leaf_c"});
    b.add_arc("or_parent", {"mid_ab"});
    b.add_arc("or_parent", {"mid_bc"});
    b.add_arc("goal", {"or_parent"});
    const AndOrGraph g = std::move(b).build();
    const AugmentedGraph a =
        augment(g, WorkspaceSnapshot{},
                {{"leaf_a", {}, 1.0}, {"leaf_b", {}, 1.0}, {"leaf_c", {}, 1.0}});
    int states = 0;
    check_all_reachable_states(a, states);
    CHECK(states > 20);
}

TEST_CASE("OR semantics: any single ready arc achieves the parent") {
    for (int k = 2; k <= 3; ++k) {
        GraphBuilder b;
        b.add_node("parent");
        for (int i = 0; i < k; ++i) b.add_node("leaf_" + std::to_string(i));
        for (int i = 0; i < k; ++i) b.add_arc("parent", {"leaf_" + std::to_string(i)});
        const AndOrGraph g = std::move(b).build();
        for (int enabled = 0; enabled < k; ++enabled) {
            AugmentedGraph a = augment(
                g, WorkspaceSnapshot{}, {{"leaf_" + std::to_string(enabled), {}, 1.0}});
            a.fire(a.feasible_transitions()[0].first);
            const auto fts = a.feasible_transitions();
            REQUIRE(fts.size() == 1);
            CHECK(a.graph().node(fts[0].second).label == "parent");
            a.fire(fts[0].first);
            CHECK(a.graph().node(*a.graph().find_node("parent")).achieved);
        }
    }
}

TEST_CASE("random DAGs validate; injected cycles are rejected") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<int> nn(2, 10);
        const int n = nn(rng);
        std::vector<Node> nodes;
        for (int i = 0; i < n; ++i)
            nodes.push_back(Node{static_cast<NodeId>(i), "n" + std::to_string(i),
                                 NodeKind::Internal, false});
        std::vector<HyperArc> arcs;
        std::uniform_int_distribution<int> na(1, 2 * n);
        const int m = na(rng);
        for (int j = 0; j < m; ++j) {
            // Children strictly below the parent index: acyclic by construction.
            std::uniform_int_distribution<int> np(1, n - 1);
            const int parent = np(rng);
            std::set<NodeId> children;
            std::uniform_int_distribution<int> nc(1, 2);
            std::uniform_int_distribution<int> pick(0, parent - 1);
            const int want = std::min(nc(rng), parent);
            while (static_cast<int>(children.size()) < want) children.insert(pick(rng));
            arcs.push_back(HyperArc{static_cast<ArcId>(j), static_cast<NodeId>(parent),
                                    {children.begin(), children.end()}, {}, 1.0});
        }
        CHECK_NOTHROW(AndOrGraph::build(nodes, arcs));

        if (n >= 3) {
            // Close a 2-cycle between the first arc's parent and child.
            auto bad = arcs;
            const NodeId p = arcs[0].parent;
            const NodeId c = arcs[0].children[0];
            bad.push_back(HyperArc{static_cast<ArcId>(bad.size()), c, {p}, {}, 1.0});
            CHECK_THROWS_AS(AndOrGraph::build(nodes, bad), CycleError);
        }
    }
}

TEST_CASE("expand appends, records transitions, and never mutates history") {
    const AndOrGraph tmpl = pick_place_graph();
    GraphNetwork net(4);
    WorkspaceSnapshot snap;
    net.expand(tmpl, snap, kPickPlaceAugment);
    CHECK(net.depth() == 1);
    CHECK(net.transitions().empty());
    CHECK_FALSE(net.solved_at_depth().has_value());

    const std::uint64_t h0 = net.graphs()[0].structural_hash();
    snap.epoch = 1;
    net.expand(tmpl, snap, kPickPlaceAugment, TransitionReason::FailureTerminal);
    CHECK(net.depth() == 2);
    REQUIRE(net.transitions().size() == 1);
    CHECK(net.transitions()[0].from_index == 0);
    CHECK(net.transitions()[0].reason == TransitionReason::FailureTerminal);
    CHECK(net.graphs()[0].structural_hash() == h0);

    // Exhausted graphs expand with an identical snapshot.
    net.expand(tmpl, snap, kPickPlaceAugment, TransitionReason::Exhausted);
    CHECK(net.graphs()[1].binding().epoch == net.graphs()[2].binding().epoch);
    CHECK(net.graphs()[0].structural_hash() == h0);

    // Solve the active graph: expanding again is an error.
    AugmentedGraph& active = net.active();
    while (!active.is_solved()) {
        const auto fts = active.feasible_transitions();
        ArcId pick = fts[0].first;
        for (const auto& [arc, node] : fts) {
            if (active.graph().node(node).kind == NodeKind::SuccessTerminal) pick = arc;
        }
        active.fire(pick);
    }
    CHECK(net.solved_at_depth() == 3);
    CHECK_THROWS_AS(net.expand(tmpl, snap, kPickPlaceAugment), AlreadySolved);

    GraphNetwork tiny(1);
    tiny.expand(tmpl, snap, kPickPlaceAugment);
    CHECK_THROWS_AS(tiny.expand(tmpl, snap, kPickPlaceAugment), DepthLimitReached);
}

TEST_CASE("solved_at_depth returns the smallest solved index") {
    const AndOrGraph tmpl = pick_place_graph();
    GraphNetwork net(8);
    WorkspaceSnapshot snap;
    AugmentedGraph& g = net.expand(tmpl, snap, kPickPlaceAugment);
    while (!g.is_solved()) {
        const auto fts = g.feasible_transitions();
        ArcId pick = fts[0].first;
        for (const auto& [arc, node] : fts) {
            if (g.graph().node(node).kind == NodeKind::SuccessTerminal) pick = arc;
        }
        g.fire(pick);
    }
    CHECK(net.solved_at_depth() == 1);
}

TEST_CASE("work counters stay within the linear budget on random runs") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const AndOrGraph tmpl = pick_place_graph();
        GraphNetwork net(16);
        std::uniform_int_distribution<int> depth_dist(1, 16);
        const int target_depth = depth_dist(rng);
        for (int d = 0; d < target_depth; ++d) {
            AugmentedGraph& g = net.expand(tmpl, WorkspaceSnapshot{}, kPickPlaceAugment);
            // Fire a random number of transitions.
            std::uniform_int_distribution<int> fires(0, 5);
            int budget = fires(rng);
            while (budget-- > 0) {
                const auto fts = g.feasible_transitions();
                if (fts.empty()) break;
                std::uniform_int_distribution<std::size_t> pick(0, fts.size() - 1);
                g.fire(fts[pick(rng)].first);
            }
            if (net.solved_at_depth()) break;
        }
        const auto& first = net.graphs().front();
        const std::uint64_t per_graph_budget =
            first.graph().nodes().size() + first.graph().arcs().size();
        CHECK(net.total_work().total() <= per_graph_budget * net.depth());
    }
}

TEST_SUITE_END();
