#ifndef BNFUSE_REVERSAL_HPP
#define BNFUSE_REVERSAL_HPP

#include <set>
#include <utility>

#include "bnfuse/bayes.hpp"
#include "bnfuse/dag.hpp"

namespace bnfuse {

/// What a single arc reversal did to the graph besides flipping the arc:
/// each endpoint inherits the other endpoint's remaining parents.
struct ReversalEffect {
    /// The flipped arc, (to, from).
    Arc reversed;
    /// New arcs into the old tail, from parents of the old head it lacked.
    std::set<Arc> added_into_from;
    /// New arcs into the old head, from parents of the old tail it lacked.
    std::set<Arc> added_into_to;
};

/// Reverses `arc` in `dag`: removes it, adds the flipped arc and both
/// inherited-parent arc sets. Requires that no other directed path connects
/// arc.from to arc.to (otherwise InvalidReversalError); under that guard
/// the result is acyclic.
std::pair<Dag, ReversalEffect> reverse_arc_structural(const Dag& dag,
                                                      const Arc& arc);

/// Arc reversal on a full net: the structural rewrite above plus the
/// Bayes-rule CPT update for both endpoints. The joint distribution is
/// unchanged up to arithmetic tolerance. Conditioning contexts that get
/// zero probability after marginalization receive uniform columns.
DiscreteBayesNet reverse_arc_cpt(const DiscreteBayesNet& net, const Arc& arc);

} // namespace bnfuse

#endif
