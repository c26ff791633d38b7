#ifndef BNFUSE_RANDOM_NETS_HPP
#define BNFUSE_RANDOM_NETS_HPP

#include <cstdint>

#include "bnfuse/bayes.hpp"
#include "bnfuse/dag.hpp"

namespace bnfuse {

/// Seeded random DAG: a uniformly shuffled topological order over nodes
/// named <prefix>00, <prefix>01, ..., then each forward pair becomes an arc
/// independently with probability `density`. Density 1 gives the complete
/// DAG on that order; density 0 gives no arcs. Same arguments, same graph.
Dag random_dag(int node_count, double density, std::uint64_t seed,
               const std::string& name_prefix = "v");

/// Attaches seeded random binary CPTs (states "t"/"f", probabilities drawn
/// from [0.05, 0.95]) to every node of the structure.
DiscreteBayesNet with_random_binary_cpts(const Dag& structure,
                                         std::uint64_t seed);

} // namespace bnfuse

#endif
