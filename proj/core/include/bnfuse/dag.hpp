#ifndef BNFUSE_DAG_HPP
#define BNFUSE_DAG_HPP

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bnfuse/errors.hpp"

namespace bnfuse {

/// Nodes are identified by name; two nodes with equal names are the same
/// node, which is how variables are matched across author nets.
using NodeId = std::string;

struct Arc {
    NodeId from;
    NodeId to;

    auto operator<=>(const Arc&) const = default;
};

/// Arc rendered as "from->to" for messages and logs.
std::string to_string(const Arc& arc);

/// Longest-path-from-a-root valuation. Roots (and nodes listed without any
/// predecessor) sit at 0; every arc points from a lower value to a higher one.
using LayerMap = std::map<NodeId, int>;

struct CycleCheck {
    bool acyclic = true;
    /// One witness cycle when not acyclic, closed (front == back).
    std::vector<NodeId> cycle;
};

/// Checks a candidate node/arc set without building a Dag. Throws
/// StructuralError for self-loops or arcs with endpoints outside `nodes`.
CycleCheck is_acyclic(const std::set<NodeId>& nodes, const std::set<Arc>& arcs);

/// Immutable directed acyclic graph over named nodes. Construction validates
/// every invariant, so a Dag value is acyclic by construction.
class Dag {
public:
    Dag() = default;
    Dag(std::set<NodeId> nodes, std::set<Arc> arcs);

    const std::set<NodeId>& nodes() const noexcept { return nodes_; }
    const std::set<Arc>& arcs() const noexcept { return arcs_; }

    bool has_node(const NodeId& x) const { return nodes_.contains(x); }
    bool has_arc(const Arc& a) const { return arcs_.contains(a); }

    /// Direct predecessors of x. Throws LookupError for unknown nodes.
    const std::set<NodeId>& parents(const NodeId& x) const;
    /// Direct successors of x.
    const std::set<NodeId>& children(const NodeId& x) const;

    bool operator==(const Dag& other) const {
        return nodes_ == other.nodes_ && arcs_ == other.arcs_;
    }

private:
    std::set<NodeId> nodes_;
    std::set<Arc> arcs_;
    std::map<NodeId, std::set<NodeId>> parents_;
    std::map<NodeId, std::set<NodeId>> children_;
};

struct Neighbors {
    std::set<NodeId> predecessors;
    std::set<NodeId> successors;
};

/// Direct predecessor and successor sets of one node.
Neighbors direct_neighbors(const Dag& dag, const NodeId& x);

/// Topological values for every node of `dag`; names in `extra_nodes` that
/// the graph does not contain are valued 0 (imported isolated nodes).
LayerMap layer_values(const Dag& dag, const std::set<NodeId>& extra_nodes = {});

/// Same valuation over a raw node/arc set. Throws StructuralError (with a
/// witness) when the arcs contain a cycle.
LayerMap layer_values(const std::set<NodeId>& nodes, const std::set<Arc>& arcs);

/// All successors of x, direct and indirect. x itself is never included.
std::set<NodeId> transitive_successors(const Dag& dag, const NodeId& x);

/// True iff a directed path of length >= 1 leads from x to y.
bool has_directed_path(const Dag& dag, const NodeId& x, const NodeId& y);

/// Sub-DAG on (keep_nodes, keep_arcs). Both must come from `dag`, and every
/// kept arc's endpoints must be kept as well; otherwise ValidationError.
Dag project(const Dag& dag, const std::set<NodeId>& keep_nodes,
            const std::set<Arc>& keep_arcs);

} // namespace bnfuse

#endif
