#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tmpidan/workspace.hpp"

namespace tmpidan {

using NodeId = std::uint32_t;
using ArcId = std::uint32_t;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class CycleError : public GraphError {
public:
    using GraphError::GraphError;
};
class DanglingRef : public GraphError {
public:
    using GraphError::GraphError;
};
class InfeasibleFire : public GraphError {
public:
    using GraphError::GraphError;
};
class DepthLimitReached : public GraphError {
public:
    using GraphError::GraphError;
};
class AlreadySolved : public GraphError {
public:
    using GraphError::GraphError;
};
class EmptyFeasibleSet : public GraphError {
public:
    using GraphError::GraphError;
};

enum class NodeKind { Internal, SuccessTerminal, FailureTerminal, AugmentedRoot };

enum class Verb { Pick, Place, Push, Handover, MoveBase, Cook, Wash, Wait, Sense };

constexpr bool verb_is_geometric(Verb v) {
    return v == Verb::Pick || v == Verb::Place || v == Verb::Push || v == Verb::Handover ||
           v == Verb::MoveBase;
}

std::string to_string(Verb v);
Verb verb_from_string(const std::string& s);

struct ActionSpec {
    Verb verb = Verb::Sense;
    std::string object;      // empty = none
    std::string agent_hint;  // empty = any agent
    bool geometric = false;
};

inline ActionSpec action(Verb v, std::string object = {}, std::string agent_hint = {}) {
    return ActionSpec{v, std::move(object), std::move(agent_hint), verb_is_geometric(v)};
}

struct Node {
    NodeId id = 0;
    std::string label;
    NodeKind kind = NodeKind::Internal;
    bool achieved = false;
};

// Many-to-one mapping from an AND set of children to one parent; arcs
// sharing a parent are alternatives (OR).
struct HyperArc {
    ArcId id = 0;
    NodeId parent = 0;
    std::vector<NodeId> children;
    std::vector<ActionSpec> actions;
    double cost = 1.0;
};

class AndOrGraph {
public:
    AndOrGraph() = default;

    // Validates ids, endpoints, costs, and acyclicity.
    static AndOrGraph build(std::vector<Node> nodes, std::vector<HyperArc> arcs);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<HyperArc>& arcs() const { return arcs_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const HyperArc& arc(ArcId id) const { return arcs_.at(id); }
    std::optional<NodeId> find_node(std::string_view label) const;
    const std::vector<ArcId>& arcs_with_child(NodeId id) const { return arcs_by_child_.at(id); }

private:
    std::vector<Node> nodes_;
    std::vector<HyperArc> arcs_;
    std::vector<std::vector<ArcId>> arcs_by_child_;

    friend class AugmentedGraph;
};

// Incremental label-based construction used by the domain templates.
class GraphBuilder {
public:
    NodeId add_node(std::string label, NodeKind kind = NodeKind::Internal);
    ArcId add_arc(const std::string& parent, const std::vector<std::string>& children,
                  std::vector<ActionSpec> actions = {}, double cost = 1.0);
    AndOrGraph build() &&;

private:
    NodeId require(const std::string& label) const;
    std::vector<Node> nodes_;
    std::vector<HyperArc> arcs_;
};

struct WorkCounters {
    std::uint64_t node_visits = 0;
    std::uint64_t arc_evaluations = 0;
    std::uint64_t total() const { return node_visits + arc_evaluations; }
    WorkCounters& operator+=(const WorkCounters& o) {
        node_visits += o.node_visits;
        arc_evaluations += o.arc_evaluations;
        return *this;
    }
};

// One augmented hyper-arc mapping the root into the base graph.
struct AugmentedArcSpec {
    std::string target_label;
    std::vector<ActionSpec> actions;
    double cost = 1.0;
};

// Base graph plus one augmented root bound to a workspace snapshot.  The
// root counts as achieved from construction so its outgoing arcs are
// immediately fireable.
class AugmentedGraph {
public:
    AugmentedGraph(const AndOrGraph& base, WorkspaceSnapshot snapshot,
                   const std::vector<AugmentedArcSpec>& augmented_arcs);

    const AndOrGraph& graph() const { return g_; }
    NodeId root() const { return root_; }
    const WorkspaceSnapshot& binding() const { return binding_; }
    const std::vector<ArcId>& augmented_arcs() const { return augmented_arcs_; }
    std::uint64_t instance_id() const { return instance_id_; }

    // Arcs whose children are all achieved and whose parent is not,
    // ordered by (cost, arc id).
    std::vector<std::pair<ArcId, NodeId>> feasible_transitions() const;

    bool can_fire(ArcId id) const;
    void fire(ArcId id);
    AugmentedGraph fired(ArcId id) const {
        AugmentedGraph next = *this;
        next.fire(id);
        return next;
    }

    bool is_solved() const { return solved_; }
    bool has_failure_terminal_achieved() const;
    const WorkCounters& work() const { return work_; }
    std::uint64_t structural_hash() const;

private:
    AndOrGraph g_;
    NodeId root_ = 0;
    WorkspaceSnapshot binding_;
    std::vector<ArcId> augmented_arcs_;
    std::vector<std::uint32_t> pending_;  // per arc: unachieved child count
    bool solved_ = false;
    WorkCounters work_;
    std::uint64_t instance_id_ = 0;

    void mark_achieved(NodeId id);
};

// Free-function forms of the per-operation contracts.
AugmentedGraph augment(const AndOrGraph& graph, WorkspaceSnapshot snapshot,
                       const std::vector<AugmentedArcSpec>& augmented_arcs);
inline std::vector<std::pair<ArcId, NodeId>> feasible_transitions(const AugmentedGraph& g) {
    return g.feasible_transitions();
}
inline AugmentedGraph fire(const AugmentedGraph& g, ArcId arc) { return g.fired(arc); }
inline bool is_solved(const AugmentedGraph& g) { return g.is_solved(); }

enum class TransitionReason { FailureTerminal, Exhausted };

struct Transition {
    std::size_t from_index = 0;  // 0-based index of the upstream graph
    TransitionReason reason = TransitionReason::FailureTerminal;
    std::uint64_t snapshot_epoch = 0;
};

// Ordered sequence of augmented graphs; depth d = number of graphs.
class GraphNetwork {
public:
    explicit GraphNetwork(std::size_t depth_limit = 256);

    // Appends augment(tmpl, snapshot, arcs); `reason` is recorded for every
    // expansion after the first.  Throws AlreadySolved / DepthLimitReached.
    AugmentedGraph& expand(const AndOrGraph& tmpl, WorkspaceSnapshot snapshot,
                           const std::vector<AugmentedArcSpec>& augmented_arcs,
                           TransitionReason reason = TransitionReason::Exhausted);

    std::size_t depth() const { return graphs_.size(); }
    std::size_t depth_limit() const { return depth_limit_; }
    bool empty() const { return graphs_.empty(); }
    AugmentedGraph& active() { return graphs_.back(); }
    const AugmentedGraph& active() const { return graphs_.back(); }
    const std::vector<AugmentedGraph>& graphs() const { return graphs_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    // Smallest 1-based index of a solved graph.
    std::optional<std::size_t> solved_at_depth() const;
    WorkCounters total_work() const;

private:
    std::vector<AugmentedGraph> graphs_;
    std::vector<Transition> transitions_;
    std::size_t depth_limit_;
};

inline std::optional<std::size_t> solved_at_depth(const GraphNetwork& net) {
    return net.solved_at_depth();
}

}  // namespace tmpidan
