#ifndef BNFUSE_FUSION_HPP
#define BNFUSE_FUSION_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bnfuse/dag.hpp"

namespace bnfuse {

/// Where an arc of the second net lands relative to the fused graph's
/// topological values: already present, addable as-is, in need of reversal,
/// or deferred because both endpoints sit on the same layer.
enum class ArcBucket { present, direct, reverse, deferred };

std::string to_token(ArcBucket bucket);

/// The three working sets of second-net arcs, disjoint at loop boundaries.
struct ArcPartition {
    std::set<Arc> direct;
    std::set<Arc> reverse;
    std::set<Arc> deferred;

    bool empty() const {
        return direct.empty() && reverse.empty() && deferred.empty();
    }
};

/// Buckets one arc by comparing the fused graph's topological values of its
/// endpoints; arcs the fused graph already holds are `present`.
ArcBucket classify_arc(const Arc& arc, const LayerMap& fused_layers,
                       const std::set<Arc>& fused_arcs);

/// Buckets every arc of the second net. `present` arcs are dropped.
ArcPartition classify_arcs(const std::set<Arc>& second_arcs,
                           const LayerMap& fused_layers,
                           const std::set<Arc>& fused_arcs);

/// Next arc to reverse: smallest head value in the second net's own
/// valuation, then largest tail value, then (to, from) name order.
Arc min_reversal(const ArcPartition& partition, const LayerMap& second_layers);

/// Next deferred arc to add: largest tail value in the fused valuation,
/// then largest head value in the second net's valuation, then (from, to)
/// name order.
Arc min_deferred(const ArcPartition& partition, const LayerMap& fused_layers,
                 const LayerMap& second_layers);

enum class EventKind {
    classify,        // initial bucket of a second-net arc
    select_reverse,  // arc chosen from the reversal set
    reverse,         // arc reversed in the second net (flip enters the fused graph)
    new_arc,         // arc generated by a reversal, with its bucket
    select_deferred, // arc chosen from the deferred set
    add_arc,         // arc added to the fused graph, with its source bucket
    transfer         // deferred arc moved to the direct set after a layer bump
};

std::string to_token(EventKind kind);

struct TraceEvent {
    EventKind kind;
    Arc arc;
    ArcBucket bucket;
    /// Digest of both topological valuations right after the event.
    std::uint64_t layer_digest;

    std::string to_log_line() const;
};

/// Ordered event log of one fusion run plus the two loop counters.
/// Replaying the events against the inputs reproduces the outputs.
struct FusionTrace {
    std::vector<TraceEvent> events;
    int reversal_iterations = 0; // passes of the reversal-draining loop
    int merge_iterations = 0;    // passes of the direct/deferred loop

    /// Line-oriented log: one event per line, counters as trailing comments.
    std::string to_log() const;
};

/// Arcs of the `reverse` events in order; the transform sequence that turns
/// the second net into its fused form.
std::vector<Arc> reversal_sequence(const FusionTrace& trace);

enum class LayerMaintenance {
    /// Adding a deferred arc bumps only the head's value; successor values
    /// go stale but are never consulted again.
    incremental,
    /// Recompute the full valuation after every deferred addition.
    full_recompute
};

struct FusionOptions {
    /// Verify acyclicity, set disjointness, value/bucket agreement, and
    /// no-re-entry after every mutation; breaches raise InvariantError.
    bool checked = false;
    LayerMaintenance layer_maintenance = LayerMaintenance::incremental;
};

struct FusionResult {
    /// The consensus graph: union nodes, first net's arcs plus the second
    /// net's transformed arcs.
    Dag fused;
    /// The second net after its reversal sequence.
    Dag transformed_second;
    FusionTrace trace;
    /// Partition of the fused arc set by which input uses each arc.
    std::set<Arc> only_first;
    std::set<Arc> only_second;
    std::set<Arc> shared;
};

/// Fuses two DAGs into one acyclic consensus structure by incremental graph
/// union with ordered arc reversals. Both inputs embed in the result:
/// projecting the fused graph onto (first's nodes, only_first + shared)
/// returns the first input, and onto (second's nodes, only_second + shared)
/// returns the transformed second input.
FusionResult fuse_dags(const Dag& first, const Dag& second,
                       const FusionOptions& options = {});

struct MultiFusionResult {
    Dag fused;
    /// Each input as re-expressed inside the fused graph. The first input
    /// is never transformed.
    std::vector<Dag> transformed;
    /// traces[0] is empty; input i >= 1 was fused in pass i.
    std::vector<FusionTrace> traces;
};

/// Left-fold of fuse_dags over the inputs, in the given order. The order
/// matters: different orders give different (all valid) consensus graphs.
MultiFusionResult fuse_many(const std::vector<Dag>& inputs,
                            const FusionOptions& options = {});

} // namespace bnfuse

#endif
