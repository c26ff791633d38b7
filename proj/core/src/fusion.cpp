#include "bnfuse/fusion.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "bnfuse/reversal.hpp"

namespace bnfuse {

std::string to_token(ArcBucket bucket) {
    switch (bucket) {
        case ArcBucket::present: return "present";
        case ArcBucket::direct: return "direct";
        case ArcBucket::reverse: return "reverse";
        case ArcBucket::deferred: return "deferred";
    }
    return "?";
}

std::string to_token(EventKind kind) {
    switch (kind) {
        case EventKind::classify: return "classify";
        case EventKind::select_reverse: return "select-reverse";
        case EventKind::reverse: return "reverse";
        case EventKind::new_arc: return "new-arc";
        case EventKind::select_deferred: return "select-deferred";
        case EventKind::add_arc: return "add-arc";
        case EventKind::transfer: return "transfer";
    }
    return "?";
}

namespace {

int layer_of(const LayerMap& layers, const NodeId& node) {
    auto it = layers.find(node);
    if (it == layers.end())
        throw LookupError("no topological value for node " + node);
    return it->second;
}

Arc flipped(const Arc& a) { return {a.to, a.from}; }

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::uint64_t digest_layers(const LayerMap& fused_layers,
                            const LayerMap& second_layers) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [node, value] : fused_layers) {
        h = fnv1a(h, node.data(), node.size());
        h = fnv1a(h, &value, sizeof(value));
    }
    unsigned char sep = 0xff;
    h = fnv1a(h, &sep, 1);
    for (const auto& [node, value] : second_layers) {
        h = fnv1a(h, node.data(), node.size());
        h = fnv1a(h, &value, sizeof(value));
    }
    return h;
}

} // namespace

std::string TraceEvent::to_log_line() const {
    std::ostringstream line;
    line << to_token(kind) << " " << arc.from << "->" << arc.to;
    if (kind == EventKind::classify || kind == EventKind::new_arc ||
        kind == EventKind::add_arc || kind == EventKind::transfer)
        line << " " << to_token(bucket);
    char digest[20];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(layer_digest));
    line << " layers=" << digest;
    return line.str();
}

std::string FusionTrace::to_log() const {
    std::ostringstream out;
    for (const auto& event : events) out << event.to_log_line() << "\n";
    out << "# reversal-iterations " << reversal_iterations << "\n";
    out << "# merge-iterations " << merge_iterations << "\n";
    return out.str();
}

std::vector<Arc> reversal_sequence(const FusionTrace& trace) {
    std::vector<Arc> arcs;
    for (const auto& event : trace.events)
        if (event.kind == EventKind::reverse) arcs.push_back(event.arc);
    return arcs;
}

ArcBucket classify_arc(const Arc& arc, const LayerMap& fused_layers,
                       const std::set<Arc>& fused_arcs) {
    int from_value = layer_of(fused_layers, arc.from);
    int to_value = layer_of(fused_layers, arc.to);
    if (from_value < to_value)
        return fused_arcs.contains(arc) ? ArcBucket::present : ArcBucket::direct;
    if (from_value > to_value) return ArcBucket::reverse;
    return ArcBucket::deferred;
}

ArcPartition classify_arcs(const std::set<Arc>& second_arcs,
                           const LayerMap& fused_layers,
                           const std::set<Arc>& fused_arcs) {
    ArcPartition parts;
    for (const auto& arc : second_arcs) {
        switch (classify_arc(arc, fused_layers, fused_arcs)) {
            case ArcBucket::present: break;
            case ArcBucket::direct: parts.direct.insert(arc); break;
            case ArcBucket::reverse: parts.reverse.insert(arc); break;
            case ArcBucket::deferred: parts.deferred.insert(arc); break;
        }
    }
    return parts;
}

Arc min_reversal(const ArcPartition& partition, const LayerMap& second_layers) {
    if (partition.reverse.empty())
        throw ValidationError("no arc awaits reversal");
    auto key = [&](const Arc& a) {
        return std::make_tuple(layer_of(second_layers, a.to),
                               -layer_of(second_layers, a.from), a.to, a.from);
    };
    return *std::min_element(
        partition.reverse.begin(), partition.reverse.end(),
        [&](const Arc& a, const Arc& b) { return key(a) < key(b); });
}

Arc min_deferred(const ArcPartition& partition, const LayerMap& fused_layers,
                 const LayerMap& second_layers) {
    if (partition.deferred.empty())
        throw ValidationError("no deferred arc to select");
    auto key = [&](const Arc& a) {
        return std::make_tuple(-layer_of(fused_layers, a.from),
                               -layer_of(second_layers, a.to), a.from, a.to);
    };
    return *std::min_element(
        partition.deferred.begin(), partition.deferred.end(),
        [&](const Arc& a, const Arc& b) { return key(a) < key(b); });
}

namespace {

// Mutable run state shared by the loop phases of fuse_dags.
struct FusionRun {
    const FusionOptions& options;
    std::set<NodeId> fused_nodes;
    std::set<Arc> fused_arcs;
    LayerMap fused_layers;
    Dag second;
    LayerMap second_layers;
    ArcPartition parts;
    FusionTrace trace;
    // Unordered endpoint pairs whose arc left a working set for the fused
    // graph; neither orientation may enter a working set again.
    std::set<std::pair<NodeId, NodeId>> retired;

    explicit FusionRun(const FusionOptions& opt) : options(opt) {}

    void emit(EventKind kind, const Arc& arc, ArcBucket bucket) {
        trace.events.push_back(
            {kind, arc, bucket, digest_layers(fused_layers, second_layers)});
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw InvariantError(msg, trace.to_log());
    }

    void retire(const Arc& arc) {
        retired.insert(std::minmax(arc.from, arc.to));
    }

    void check_fused_acyclic(const std::string& what) {
        if (!options.checked) return;
        auto check = is_acyclic(fused_nodes, fused_arcs);
        if (!check.acyclic) fail(what + " closed a cycle in the fused graph");
    }

    void insert_into(ArcBucket bucket, const Arc& arc) {
        if (options.checked && retired.contains(std::minmax(arc.from, arc.to)))
            fail("arc " + to_string(arc) + " re-entered a working set");
        bool inserted = false;
        switch (bucket) {
            case ArcBucket::direct: inserted = parts.direct.insert(arc).second; break;
            case ArcBucket::reverse: inserted = parts.reverse.insert(arc).second; break;
            case ArcBucket::deferred: inserted = parts.deferred.insert(arc).second; break;
            case ArcBucket::present: return;
        }
        if (options.checked && !inserted)
            fail("arc " + to_string(arc) + " was already in a working set");
    }

    // Checked-mode sweep: fused graph acyclic, buckets consistent with the
    // stored values, sets pairwise disjoint with no flipped duplicates, and
    // the stored values fresh wherever a decision may still read them.
    void verify(const char* where) {
        if (!options.checked) return;
        auto check = is_acyclic(fused_nodes, fused_arcs);
        if (!check.acyclic) fail(std::string("fused graph acyclicity broke ") + where);

        for (const auto& a : parts.direct)
            if (!(layer_of(fused_layers, a.from) < layer_of(fused_layers, a.to)))
                fail("direct arc " + to_string(a) + " violates its ordering " + where);
        for (const auto& a : parts.reverse)
            if (!(layer_of(fused_layers, a.from) > layer_of(fused_layers, a.to)))
                fail("reversal arc " + to_string(a) + " violates its ordering " + where);
        for (const auto& a : parts.deferred)
            if (layer_of(fused_layers, a.from) != layer_of(fused_layers, a.to))
                fail("deferred arc " + to_string(a) + " violates its ordering " + where);

        auto overlaps = [](const std::set<Arc>& x, const std::set<Arc>& y) {
            for (const auto& a : x)
                if (y.contains(a)) return true;
            return false;
        };
        if (overlaps(parts.direct, parts.reverse) ||
            overlaps(parts.direct, parts.deferred) ||
            overlaps(parts.reverse, parts.deferred))
            fail(std::string("working sets overlap ") + where);
        auto flipped_member = [&](const Arc& a) {
            Arc r = flipped(a);
            return parts.direct.contains(r) || parts.reverse.contains(r) ||
                   parts.deferred.contains(r);
        };
        for (const auto& a : parts.direct)
            if (flipped_member(a)) fail("both orientations of " + to_string(a) + " pending");
        for (const auto& a : parts.reverse)
            if (flipped_member(a)) fail("both orientations of " + to_string(a) + " pending");
        for (const auto& a : parts.deferred)
            if (flipped_member(a)) fail("both orientations of " + to_string(a) + " pending");

        // Stored values may go stale only on successors of bumped heads,
        // which no pending arc touches.
        LayerMap fresh = layer_values(fused_nodes, fused_arcs);
        auto fresh_at = [&](const NodeId& n) { return layer_of(fresh, n); };
        for (const auto* set : {&parts.direct, &parts.reverse, &parts.deferred})
            for (const auto& a : *set) {
                if (layer_of(fused_layers, a.from) != fresh_at(a.from) ||
                    layer_of(fused_layers, a.to) != fresh_at(a.to))
                    fail("stored topological value went stale on pending arc " +
                         to_string(a));
            }
    }
};

} // namespace

FusionResult fuse_dags(const Dag& first, const Dag& second,
                       const FusionOptions& options) {
    FusionRun run(options);

    // The fused graph starts with every node but only the first net's arcs.
    run.fused_nodes = first.nodes();
    run.fused_nodes.insert(second.nodes().begin(), second.nodes().end());
    run.fused_arcs = first.arcs();
    run.fused_layers = layer_values(run.fused_nodes, run.fused_arcs);
    run.second = second;
    run.second_layers = layer_values(run.second);

    for (const auto& arc : second.arcs()) {
        ArcBucket bucket = classify_arc(arc, run.fused_layers, run.fused_arcs);
        if (bucket != ArcBucket::present) run.insert_into(bucket, arc);
        run.emit(EventKind::classify, arc, bucket);
    }
    run.verify("after classification");

    // Drain the reversal set. Every selected arc points against the fused
    // order, so its flip never changes a fused topological value.
    while (!run.parts.reverse.empty()) {
        ++run.trace.reversal_iterations;

        Arc picked = min_reversal(run.parts, run.second_layers);
        run.emit(EventKind::select_reverse, picked, ArcBucket::reverse);
        run.parts.reverse.erase(picked);

        run.fused_arcs.insert(flipped(picked)); // may already be present
        run.retire(picked);
        run.check_fused_acyclic("adding the flip of " + to_string(picked));

        auto [rewritten, effect] = reverse_arc_structural(run.second, picked);
        run.emit(EventKind::reverse, picked, ArcBucket::reverse);

        std::set<Arc> generated = effect.added_into_from;
        generated.insert(effect.added_into_to.begin(),
                         effect.added_into_to.end());
        for (const auto& arc : generated) {
            int from_value = layer_of(run.fused_layers, arc.from);
            int to_value = layer_of(run.fused_layers, arc.to);
            ArcBucket bucket = from_value < to_value   ? ArcBucket::direct
                               : from_value > to_value ? ArcBucket::reverse
                                                       : ArcBucket::deferred;
            run.insert_into(bucket, arc);
            run.emit(EventKind::new_arc, arc, bucket);
        }

        run.second = std::move(rewritten);
        run.second_layers = layer_values(run.second);
        run.verify("after a reversal");
    }

    // Alternate bulk direct flushes with single deferred additions.
    while (!run.parts.direct.empty() || !run.parts.deferred.empty()) {
        ++run.trace.merge_iterations;

        // Direct arcs already point the way the fused order requires, so
        // none of them changes a topological value.
        std::vector<Arc> flush(run.parts.direct.begin(), run.parts.direct.end());
        run.parts.direct.clear();
        for (const auto& arc : flush) {
            run.fused_arcs.insert(arc);
            run.retire(arc);
            run.emit(EventKind::add_arc, arc, ArcBucket::direct);
            run.check_fused_acyclic("direct addition of " + to_string(arc));
        }

        if (!run.parts.deferred.empty()) {
            Arc picked = min_deferred(run.parts, run.fused_layers, run.second_layers);
            run.emit(EventKind::select_deferred, picked, ArcBucket::deferred);
            run.parts.deferred.erase(picked);

            run.fused_arcs.insert(picked);
            run.retire(picked);
            run.check_fused_acyclic("deferred addition of " + to_string(picked));
            // The head climbs one layer. Its successors' stored values go
            // stale, but every arc still pending sits on layers at or below
            // the bumped one, so no later decision reads them.
            if (options.layer_maintenance == LayerMaintenance::full_recompute) {
                run.fused_layers = layer_values(run.fused_nodes, run.fused_arcs);
            } else {
                run.fused_layers[picked.to] = run.fused_layers[picked.from] + 1;
            }
            run.emit(EventKind::add_arc, picked, ArcBucket::deferred);

            // Remaining deferred arcs into the bumped head now point upward;
            // they belong with the direct set and flush next pass.
            std::vector<Arc> moved;
            for (const auto& arc : run.parts.deferred)
                if (arc.to == picked.to) moved.push_back(arc);
            for (const auto& arc : moved) {
                if (options.checked &&
                    layer_of(run.fused_layers, arc.from) !=
                        layer_of(run.fused_layers, arc.to) - 1)
                    run.fail("transferred arc " + to_string(arc) +
                             " is not one layer below its head");
                run.parts.deferred.erase(arc);
                run.parts.direct.insert(arc);
                run.emit(EventKind::transfer, arc, ArcBucket::direct);
            }
        }
        run.verify("after a merge pass");
    }

    FusionResult result;
    result.fused = Dag(run.fused_nodes, run.fused_arcs);
    result.transformed_second = std::move(run.second);
    result.trace = std::move(run.trace);

    const auto& first_arcs = first.arcs();
    const auto& second_arcs = result.transformed_second.arcs();
    for (const auto& a : result.fused.arcs()) {
        bool in_first = first_arcs.contains(a);
        bool in_second = second_arcs.contains(a);
        if (in_first && in_second) result.shared.insert(a);
        else if (in_first) result.only_first.insert(a);
        else if (in_second) result.only_second.insert(a);
        else
            throw InvariantError("fused arc " + to_string(a) +
                                     " belongs to neither input",
                                 result.trace.to_log());
    }
    for (const auto& a : first_arcs)
        if (!result.fused.has_arc(a))
            throw InvariantError("fused graph lost first-net arc " + to_string(a),
                                 result.trace.to_log());
    for (const auto& a : second_arcs)
        if (!result.fused.has_arc(a))
            throw InvariantError(
                "fused graph lost transformed second-net arc " + to_string(a),
                result.trace.to_log());

    // Both inputs must embed exactly.
    std::set<Arc> first_keep = result.only_first;
    first_keep.insert(result.shared.begin(), result.shared.end());
    std::set<Arc> second_keep = result.only_second;
    second_keep.insert(result.shared.begin(), result.shared.end());
    if (!(project(result.fused, first.nodes(), first_keep) == first))
        throw InvariantError("projection failed to recover the first input",
                             result.trace.to_log());
    if (!(project(result.fused, result.transformed_second.nodes(), second_keep) ==
          result.transformed_second))
        throw InvariantError(
            "projection failed to recover the transformed second input",
            result.trace.to_log());

    // Termination bounds on the loop counters.
    auto n2 = static_cast<long long>(second.nodes().size());
    long long pair_bound = n2 * (n2 - 1) / 2;
    if (result.trace.reversal_iterations + result.trace.merge_iterations >
            pair_bound ||
        result.trace.merge_iterations > n2)
        throw InvariantError("loop counters exceeded their bounds",
                             result.trace.to_log());

    return result;
}

MultiFusionResult fuse_many(const std::vector<Dag>& inputs,
                            const FusionOptions& options) {
    if (inputs.empty())
        throw ValidationError("fusion needs at least one input graph");

    MultiFusionResult result;
    result.fused = inputs.front();
    result.transformed.push_back(inputs.front());
    result.traces.emplace_back(); // the first input seeds the fused graph

    for (std::size_t i = 1; i < inputs.size(); ++i) {
        FusionResult pass = fuse_dags(result.fused, inputs[i], options);
        result.fused = std::move(pass.fused);
        result.transformed.push_back(std::move(pass.transformed_second));
        result.traces.push_back(std::move(pass.trace));
    }
    return result;
}

} // namespace bnfuse
