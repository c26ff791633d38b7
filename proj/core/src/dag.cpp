#include "bnfuse/dag.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace bnfuse {

std::string to_string(const Arc& arc) { return arc.from + "->" + arc.to; }

namespace {

std::map<NodeId, std::set<NodeId>> parent_sets(const std::set<NodeId>& nodes,
                                               const std::set<Arc>& arcs) {
    std::map<NodeId, std::set<NodeId>> parents;
    for (const auto& n : nodes) parents[n];
    for (const auto& a : arcs) parents[a.to].insert(a.from);
    return parents;
}

void check_endpoints(const std::set<NodeId>& nodes, const std::set<Arc>& arcs) {
    for (const auto& a : arcs) {
        if (a.from == a.to)
            throw StructuralError("self-loop arc " + to_string(a));
        if (a.from.empty() || a.to.empty())
            throw StructuralError("arc with empty node name");
        if (!nodes.contains(a.from) || !nodes.contains(a.to))
            throw StructuralError("arc " + to_string(a) +
                                  " references a node outside the graph");
    }
}

} // namespace

CycleCheck is_acyclic(const std::set<NodeId>& nodes, const std::set<Arc>& arcs) {
    check_endpoints(nodes, arcs);

    std::map<NodeId, std::set<NodeId>> children;
    for (const auto& a : arcs) children[a.from].insert(a.to);

    // Iterative DFS with colouring; sorted roots keep the witness deterministic.
    enum class Color { white, grey, black };
    std::map<NodeId, Color> color;
    for (const auto& n : nodes) color[n] = Color::white;

    std::map<NodeId, NodeId> parent_in_dfs;
    for (const auto& root : nodes) {
        if (color[root] != Color::white) continue;
        std::vector<std::pair<NodeId, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [node, done] = stack.back();
            stack.pop_back();
            if (done) {
                color[node] = Color::black;
                continue;
            }
            if (color[node] == Color::black) continue;
            color[node] = Color::grey;
            stack.emplace_back(node, true);
            auto it = children.find(node);
            if (it == children.end()) continue;
            for (const auto& next : it->second) {
                if (color[next] == Color::grey) {
                    // Back arc node->next: walk the grey chain up to `next`,
                    // then flip it into arc order. Yields [next, ..., node, next].
                    std::vector<NodeId> cycle{next, node};
                    NodeId cur = node;
                    while (cur != next) {
                        cur = parent_in_dfs.at(cur);
                        cycle.push_back(cur);
                    }
                    std::reverse(cycle.begin(), cycle.end());
                    return {false, cycle};
                }
                if (color[next] == Color::white) {
                    parent_in_dfs[next] = node;
                    stack.emplace_back(next, false);
                }
            }
        }
    }
    return {true, {}};
}

Dag::Dag(std::set<NodeId> nodes, std::set<Arc> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
    for (const auto& n : nodes_)
        if (n.empty()) throw StructuralError("empty node name");
    auto check = is_acyclic(nodes_, arcs_);
    if (!check.acyclic) {
        std::ostringstream msg;
        msg << "graph contains a cycle:";
        for (const auto& n : check.cycle) msg << " " << n;
        throw StructuralError(msg.str(), check.cycle);
    }
    parents_ = parent_sets(nodes_, arcs_);
    for (const auto& n : nodes_) children_[n];
    for (const auto& a : arcs_) children_[a.from].insert(a.to);
}

const std::set<NodeId>& Dag::parents(const NodeId& x) const {
    auto it = parents_.find(x);
    if (it == parents_.end()) throw LookupError("unknown node: " + x);
    return it->second;
}

const std::set<NodeId>& Dag::children(const NodeId& x) const {
    auto it = children_.find(x);
    if (it == children_.end()) throw LookupError("unknown node: " + x);
    return it->second;
}

Neighbors direct_neighbors(const Dag& dag, const NodeId& x) {
    return {dag.parents(x), dag.children(x)};
}

LayerMap layer_values(const std::set<NodeId>& nodes, const std::set<Arc>& arcs) {
    auto parents = parent_sets(nodes, arcs);
    std::map<NodeId, std::set<NodeId>> children;
    for (const auto& a : arcs) {
        if (!nodes.contains(a.from) || !nodes.contains(a.to))
            throw StructuralError("arc " + to_string(a) +
                                  " references a node outside the graph");
        children[a.from].insert(a.to);
    }

    // Longest path from a root via one pass in topological order.
    LayerMap layers;
    std::map<NodeId, int> remaining;
    std::deque<NodeId> ready;
    for (const auto& n : nodes) {
        remaining[n] = static_cast<int>(parents[n].size());
        if (remaining[n] == 0) {
            layers[n] = 0;
            ready.push_back(n);
        }
    }
    std::size_t seen = ready.size();
    while (!ready.empty()) {
        NodeId n = ready.front();
        ready.pop_front();
        auto it = children.find(n);
        if (it == children.end()) continue;
        for (const auto& child : it->second) {
            auto t = layers.find(child);
            int candidate = layers[n] + 1;
            if (t == layers.end() || t->second < candidate) layers[child] = candidate;
            if (--remaining[child] == 0) {
                ready.push_back(child);
                ++seen;
            }
        }
    }
    if (seen != nodes.size()) {
        auto check = is_acyclic(nodes, arcs);
        throw StructuralError("cycle detected while valuing the graph",
                              check.cycle);
    }
    return layers;
}

LayerMap layer_values(const Dag& dag, const std::set<NodeId>& extra_nodes) {
    LayerMap layers = layer_values(dag.nodes(), dag.arcs());
    // Nodes only mentioned as extras have no predecessors here, so value 0.
    for (const auto& n : extra_nodes)
        if (!dag.has_node(n)) layers[n] = 0;
    return layers;
}

std::set<NodeId> transitive_successors(const Dag& dag, const NodeId& x) {
    if (!dag.has_node(x)) throw LookupError("unknown node: " + x);
    std::set<NodeId> reached;
    std::vector<NodeId> frontier{x};
    while (!frontier.empty()) {
        NodeId n = frontier.back();
        frontier.pop_back();
        for (const auto& child : dag.children(n)) {
            if (reached.insert(child).second) frontier.push_back(child);
        }
    }
    reached.erase(x); // acyclic, so x is never its own successor
    return reached;
}

bool has_directed_path(const Dag& dag, const NodeId& x, const NodeId& y) {
    if (!dag.has_node(x) || !dag.has_node(y))
        throw LookupError("unknown node in path query: " + x + ", " + y);
    if (x == y) return false;
    return transitive_successors(dag, x).contains(y);
}

Dag project(const Dag& dag, const std::set<NodeId>& keep_nodes,
            const std::set<Arc>& keep_arcs) {
    for (const auto& n : keep_nodes)
        if (!dag.has_node(n))
            throw ValidationError("projection keeps unknown node: " + n);
    for (const auto& a : keep_arcs) {
        if (!dag.has_arc(a))
            throw ValidationError("projection keeps arc outside the graph: " +
                                  to_string(a));
        if (!keep_nodes.contains(a.from) || !keep_nodes.contains(a.to))
            throw ValidationError("projection keeps arc " + to_string(a) +
                                  " without keeping both endpoints");
    }
    return Dag(keep_nodes, keep_arcs);
}

} // namespace bnfuse
