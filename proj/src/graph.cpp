#include "tmpidan/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <deque>

namespace tmpidan {

std::string to_string(Verb v) {
    switch (v) {
        case Verb::Pick: return "pick";
        case Verb::Place: return "place";
        case Verb::Push: return "push";
        case Verb::Handover: return "handover";
        case Verb::MoveBase: return "move_base";
        case Verb::Cook: return "cook";
        case Verb::Wash: return "wash";
        case Verb::Wait: return "wait";
        case Verb::Sense: return "sense";
    }
    return "sense";
}

Verb verb_from_string(const std::string& s) {
    if (s == "pick") return Verb::Pick;
    if (s == "place") return Verb::Place;
    if (s == "push") return Verb::Push;
    if (s == "handover") return Verb::Handover;
    if (s == "move_base") return Verb::MoveBase;
    if (s == "cook") return Verb::Cook;
    if (s == "wash") return Verb::Wash;
    if (s == "wait") return Verb::Wait;
    if (s == "sense") return Verb::Sense;
    throw std::runtime_error("unknown verb: " + s);
}

AndOrGraph AndOrGraph::build(std::vector<Node> nodes, std::vector<HyperArc> arcs) {
    AndOrGraph g;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id != i) throw GraphError("node ids must be dense and unique");
        for (std::size_t j = 0; j < i; ++j) {
            if (nodes[j].label == nodes[i].label)
                throw GraphError("duplicate node label: " + nodes[i].label);
        }
    }
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        auto& a = arcs[i];
        if (a.id != i) throw GraphError("arc ids must be dense and unique");
        if (a.children.empty()) throw GraphError("hyper-arc needs at least one child");
        if (a.cost < 0.0) throw GraphError("hyper-arc cost must be non-negative");
        if (a.parent >= nodes.size()) throw DanglingRef("arc parent does not exist");
        for (NodeId c : a.children) {
            if (c >= nodes.size()) throw DanglingRef("arc child does not exist");
            if (c == a.parent) throw CycleError("arc parent equals child: " + nodes[a.parent].label);
        }
        if (nodes[a.parent].kind == NodeKind::AugmentedRoot)
            throw GraphError("augmented root cannot have incoming arcs");
        for (NodeId c : a.children) {
            const NodeKind k = nodes[c].kind;
            if (k == NodeKind::SuccessTerminal || k == NodeKind::FailureTerminal)
                throw GraphError("terminal node cannot have outgoing arcs: " + nodes[c].label);
        }
    }

    // Kahn toposort over child->parent edges.
    std::vector<std::uint32_t> indeg(nodes.size(), 0);
    for (const auto& a : arcs) indeg[a.parent] += static_cast<std::uint32_t>(a.children.size());
    std::vector<std::vector<ArcId>> by_child(nodes.size());
    for (const auto& a : arcs)
        for (NodeId c : a.children) by_child[c].push_back(a.id);
    std::deque<NodeId> queue;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (indeg[i] == 0) queue.push_back(static_cast<NodeId>(i));
    std::size_t seen = 0;
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop_front();
        ++seen;
        for (ArcId aid : by_child[n]) {
            if (--indeg[arcs[aid].parent] == 0) queue.push_back(arcs[aid].parent);
        }
    }
    if (seen != nodes.size()) throw CycleError("hyper-arc set contains a cycle");

    g.nodes_ = std::move(nodes);
    g.arcs_ = std::move(arcs);
    g.arcs_by_child_ = std::move(by_child);
    return g;
}

std::optional<NodeId> AndOrGraph::find_node(std::string_view label) const {
    for (const auto& n : nodes_)
        if (n.label == label) return n.id;
    return std::nullopt;
}

NodeId GraphBuilder::add_node(std::string label, NodeKind kind) {
    const NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{id, std::move(label), kind, false});
    return id;
}

NodeId GraphBuilder::require(const std::string& label) const {
    for (const auto& n : nodes_)
        if (n.label == label) return n.id;
    throw DanglingRef("unknown node label: " + label);
}

ArcId GraphBuilder::add_arc(const std::string& parent, const std::vector<std::string>& children,
                            std::vector<ActionSpec> actions, double cost) {
    HyperArc arc;
    arc.id = static_cast<ArcId>(arcs_.size());
    arc.parent = require(parent);
    for (const auto& c : children) arc.children.push_back(require(c));
    arc.actions = std::move(actions);
    arc.cost = cost;
    arcs_.push_back(std::move(arc));
    return arcs_.back().id;
}

AndOrGraph GraphBuilder::build() && { return AndOrGraph::build(std::move(nodes_), std::move(arcs_)); }

namespace {
std::atomic<std::uint64_t> g_instance_counter{0};
}

AugmentedGraph::AugmentedGraph(const AndOrGraph& base, WorkspaceSnapshot snapshot,
                               const std::vector<AugmentedArcSpec>& augmented_arcs)
    : binding_(std::move(snapshot)), instance_id_(++g_instance_counter) {
    std::vector<Node> nodes = base.nodes();
    std::vector<HyperArc> arcs = base.arcs();
    for (const auto& n : nodes) {
        if (n.kind == NodeKind::AugmentedRoot)
            throw GraphError("base graph already contains an augmented root");
    }
    root_ = static_cast<NodeId>(nodes.size());
    nodes.push_back(Node{root_, "INIT#" + std::to_string(binding_.epoch), NodeKind::AugmentedRoot, false});
    for (const auto& spec : augmented_arcs) {
        const auto target = base.find_node(spec.target_label);
        if (!target) throw DanglingRef("augmented arc target not in graph: " + spec.target_label);
        HyperArc arc;
        arc.id = static_cast<ArcId>(arcs.size());
        arc.parent = *target;
        arc.children = {root_};
        arc.actions = spec.actions;
        arc.cost = spec.cost;
        augmented_arcs_.push_back(arc.id);
        arcs.push_back(std::move(arc));
    }
    g_ = AndOrGraph::build(std::move(nodes), std::move(arcs));

    // One evaluation per arc sets up the pending-child counts; afterwards
    // feasibility is maintained incrementally, which is what keeps the
    // total work linear per graph.
    pending_.resize(g_.arcs().size());
    for (const auto& a : g_.arcs()) {
        pending_[a.id] = static_cast<std::uint32_t>(a.children.size());
        ++work_.arc_evaluations;
    }
    mark_achieved(root_);
}

void AugmentedGraph::mark_achieved(NodeId id) {
    Node& n = g_.nodes_[id];
    if (n.achieved) return;
    n.achieved = true;
    ++work_.node_visits;
    if (n.kind == NodeKind::SuccessTerminal) solved_ = true;
    for (ArcId aid : g_.arcs_by_child_[id]) {
        if (pending_[aid] > 0) --pending_[aid];
    }
}

std::vector<std::pair<ArcId, NodeId>> AugmentedGraph::feasible_transitions() const {
    std::vector<std::pair<ArcId, NodeId>> out;
    for (const auto& a : g_.arcs()) {
        if (pending_[a.id] == 0 && !g_.node(a.parent).achieved) out.emplace_back(a.id, a.parent);
    }
    std::sort(out.begin(), out.end(), [this](const auto& l, const auto& r) {
        const double cl = g_.arc(l.first).cost;
        const double cr = g_.arc(r.first).cost;
        if (cl != cr) return cl < cr;
        return l.first < r.first;
    });
    return out;
}

bool AugmentedGraph::can_fire(ArcId id) const {
    if (id >= g_.arcs().size()) return false;
    return pending_[id] == 0 && !g_.node(g_.arc(id).parent).achieved;
}

void AugmentedGraph::fire(ArcId id) {
    if (id >= g_.arcs().size()) throw DanglingRef("unknown arc id");
    if (!can_fire(id)) throw InfeasibleFire("arc not in feasible transitions");
    mark_achieved(g_.arc(id).parent);
}

bool AugmentedGraph::has_failure_terminal_achieved() const {
    for (const auto& n : g_.nodes()) {
        if (n.kind == NodeKind::FailureTerminal && n.achieved) return true;
    }
    return false;
}

std::uint64_t AugmentedGraph::structural_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    const auto mix_str = [&](const std::string& s) {
        for (char c : s) mix(static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        mix(0xffULL);
    };
    for (const auto& n : g_.nodes()) {
        mix_str(n.label);
        mix(static_cast<std::uint64_t>(n.kind));
        mix(n.achieved ? 1 : 0);
    }
    for (const auto& a : g_.arcs()) {
        mix(a.parent);
        for (NodeId c : a.children) mix(c);
        std::uint64_t cost_bits;
        static_assert(sizeof(cost_bits) == sizeof(a.cost));
        std::memcpy(&cost_bits, &a.cost, sizeof(cost_bits));
        mix(cost_bits);
        for (const auto& act : a.actions) {
            mix(static_cast<std::uint64_t>(act.verb));
            mix_str(act.object);
        }
    }
    mix(binding_.epoch);
    return h;
}

AugmentedGraph augment(const AndOrGraph& graph, WorkspaceSnapshot snapshot,
                       const std::vector<AugmentedArcSpec>& augmented_arcs) {
    return AugmentedGraph(graph, std::move(snapshot), augmented_arcs);
}

GraphNetwork::GraphNetwork(std::size_t depth_limit) : depth_limit_(depth_limit) {
    if (depth_limit_ == 0) throw GraphError("depth limit must be positive");
}

AugmentedGraph& GraphNetwork::expand(const AndOrGraph& tmpl, WorkspaceSnapshot snapshot,
                                     const std::vector<AugmentedArcSpec>& augmented_arcs,
                                     TransitionReason reason) {
    if (solved_at_depth()) throw AlreadySolved("network already solved");
    if (graphs_.size() >= depth_limit_) throw DepthLimitReached("depth limit reached");
    if (!graphs_.empty()) {
        transitions_.push_back(Transition{graphs_.size() - 1, reason, snapshot.epoch});
    }
    graphs_.emplace_back(tmpl, std::move(snapshot), augmented_arcs);
    return graphs_.back();
}

std::optional<std::size_t> GraphNetwork::solved_at_depth() const {
    for (std::size_t i = 0; i < graphs_.size(); ++i) {
        if (graphs_[i].is_solved()) return i + 1;
    }
    return std::nullopt;
}

WorkCounters GraphNetwork::total_work() const {
    WorkCounters total;
    for (const auto& g : graphs_) total += g.work();
    return total;
}

}  // namespace tmpidan
