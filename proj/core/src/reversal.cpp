#include "bnfuse/reversal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bnfuse {

namespace {

constexpr double kDriftTolerance = 1e-12;

// DFS from->to that is not allowed to take the arc itself.
bool other_path_exists(const Dag& dag, const Arc& arc) {
    std::vector<NodeId> frontier;
    std::set<NodeId> seen;
    for (const auto& next : dag.children(arc.from)) {
        if (next == arc.to) continue; // skip the direct arc
        if (seen.insert(next).second) frontier.push_back(next);
    }
    while (!frontier.empty()) {
        NodeId n = frontier.back();
        frontier.pop_back();
        if (n == arc.to) return true;
        for (const auto& next : dag.children(n))
            if (seen.insert(next).second) frontier.push_back(next);
    }
    return false;
}

} // namespace

std::pair<Dag, ReversalEffect> reverse_arc_structural(const Dag& dag,
                                                      const Arc& arc) {
    if (!dag.has_arc(arc))
        throw LookupError("cannot reverse absent arc " + to_string(arc));
    if (other_path_exists(dag, arc))
        throw InvalidReversalError(
            "another directed path connects " + arc.from + " to " + arc.to +
            "; reversing " + to_string(arc) + " here would close a cycle");

    const auto& parents_of_from = dag.parents(arc.from);
    const auto& parents_of_to = dag.parents(arc.to);

    ReversalEffect effect;
    effect.reversed = {arc.to, arc.from};
    for (const auto& z : parents_of_to)
        if (z != arc.from && !parents_of_from.contains(z))
            effect.added_into_from.insert({z, arc.from});
    for (const auto& z : parents_of_from)
        if (z != arc.to && !parents_of_to.contains(z))
            effect.added_into_to.insert({z, arc.to});

    auto arcs = dag.arcs();
    arcs.erase(arc);
    arcs.insert(effect.reversed);
    arcs.insert(effect.added_into_from.begin(), effect.added_into_from.end());
    arcs.insert(effect.added_into_to.begin(), effect.added_into_to.end());
    return {Dag(dag.nodes(), std::move(arcs)), std::move(effect)};
}

DiscreteBayesNet reverse_arc_cpt(const DiscreteBayesNet& net, const Arc& arc) {
    Dag rewritten = reverse_arc_structural(net.structure(), arc).first;

    const NodeId& tail = arc.from;
    const NodeId& head = arc.to;
    const Cpt& tail_cpt = net.cpt(tail);
    const Cpt& head_cpt = net.cpt(head);

    // Shared conditioning context: both old parent sets, minus the endpoints.
    std::vector<NodeId> context(rewritten.parents(head).begin(),
                                rewritten.parents(head).end());
    std::vector<int> context_cards;
    for (const auto& p : context)
        context_cards.push_back(static_cast<int>(net.domain(p).size()));

    int tail_states = static_cast<int>(net.domain(tail).size());
    int head_states = static_cast<int>(net.domain(head).size());

    auto position_in = [](const std::vector<NodeId>& order, const NodeId& x) {
        auto it = std::find(order.begin(), order.end(), x);
        return static_cast<std::size_t>(it - order.begin());
    };
    // Old tail parents all live inside the context; old head parents are
    // context members plus the tail itself (marked by the sentinel).
    std::vector<std::size_t> tail_parent_pos;
    for (const auto& p : tail_cpt.parent_order())
        tail_parent_pos.push_back(position_in(context, p));
    constexpr std::size_t kTailSlot = static_cast<std::size_t>(-1);
    std::vector<std::size_t> head_parent_pos;
    for (const auto& p : head_cpt.parent_order())
        head_parent_pos.push_back(p == tail ? kTailSlot : position_in(context, p));

    std::vector<NodeId> tail_parents(context);
    tail_parents.insert(
        std::upper_bound(tail_parents.begin(), tail_parents.end(), head), head);
    std::size_t head_slot = position_in(tail_parents, head);

    std::vector<double> head_table; // P'(head | context)
    std::vector<double> tail_table; // P'(tail | context..., head), head fastest

    std::vector<int> digits(context.size(), 0);
    std::vector<int> assignment;
    std::vector<double> mixed(head_states);
    std::vector<double> joint_cell(
        static_cast<std::size_t>(tail_states) * head_states);
    do {
        assignment.clear();
        for (std::size_t pos : tail_parent_pos) assignment.push_back(digits[pos]);
        int tail_config = tail_cpt.config_index(assignment);

        std::fill(mixed.begin(), mixed.end(), 0.0);
        for (int ts = 0; ts < tail_states; ++ts) {
            assignment.clear();
            for (std::size_t pos : head_parent_pos)
                assignment.push_back(pos == kTailSlot ? ts : digits[pos]);
            int head_config = head_cpt.config_index(assignment);
            double tail_p = tail_cpt.value(tail_config, ts);
            for (int hs = 0; hs < head_states; ++hs) {
                double product = head_cpt.value(head_config, hs) * tail_p;
                mixed[hs] += product;
                joint_cell[static_cast<std::size_t>(ts) * head_states + hs] =
                    product;
            }
        }

        double sum = 0.0;
        for (double m : mixed) sum += m;
        if (std::abs(sum - 1.0) > kDriftTolerance)
            throw InvariantError("marginalized column drifted from 1 by more "
                                 "than the tolerated rounding");
        for (int hs = 0; hs < head_states; ++hs)
            head_table.push_back(mixed[hs] / sum);

        for (int hs = 0; hs < head_states; ++hs) {
            if (mixed[hs] == 0.0) {
                // Unreachable context; any distribution preserves the joint.
                for (int ts = 0; ts < tail_states; ++ts)
                    tail_table.push_back(1.0 / tail_states);
                continue;
            }
            for (int ts = 0; ts < tail_states; ++ts)
                tail_table.push_back(
                    joint_cell[static_cast<std::size_t>(ts) * head_states + hs] /
                    mixed[hs]);
        }
    } while (next_config(digits, context_cards));

    // tail_table rows are ordered (context..., head) with the head varying
    // fastest; the canonical layout wants the head at its name-order slot.
    std::vector<int> tail_parent_cards;
    for (const auto& p : tail_parents)
        tail_parent_cards.push_back(static_cast<int>(net.domain(p).size()));
    std::vector<double> tail_canonical(tail_table.size());
    {
        std::vector<int> full(tail_parents.size(), 0);
        std::size_t row = 0;
        do {
            std::size_t built = 0;
            for (std::size_t i = 0; i < context.size(); ++i) {
                int digit = full[i >= head_slot ? i + 1 : i];
                built = built * context_cards[i] + digit;
            }
            built = built * head_states + full[head_slot];
            for (int ts = 0; ts < tail_states; ++ts)
                tail_canonical[row * tail_states + ts] =
                    tail_table[built * tail_states + ts];
            ++row;
        } while (next_config(full, tail_parent_cards));
    }

    std::map<NodeId, Cpt> cpts;
    for (const auto& n : net.structure().nodes())
        if (n != tail && n != head) cpts.emplace(n, net.cpt(n));
    cpts.emplace(head, Cpt(context, context_cards, head_states, head_table));
    cpts.emplace(tail, Cpt(tail_parents, tail_parent_cards, tail_states,
                           std::move(tail_canonical)));
    return DiscreteBayesNet(std::move(rewritten), net.domains(), std::move(cpts));
}

} // namespace bnfuse
