#ifndef BNFUSE_DOT_HPP
#define BNFUSE_DOT_HPP

#include <string>
#include <vector>

#include "bnfuse/dag.hpp"

namespace bnfuse {

/// Graphviz digraph with one node line per node and one edge line per arc.
std::string to_dot(const Dag& dag, const std::string& name);

/// DOT export of a fused graph. Every edge carries a `sources` attribute
/// listing the 1-based inputs whose (transformed) arc set contains it; with
/// exactly two inputs an `origin` attribute additionally marks each edge as
/// first-only, second-only, or shared.
std::string fused_to_dot(const Dag& fused, const std::vector<Dag>& transformed,
                         const std::string& name);

} // namespace bnfuse

#endif
