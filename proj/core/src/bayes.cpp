#include "bnfuse/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bnfuse/reversal.hpp"

namespace bnfuse {

namespace {

constexpr double kColumnTolerance = 1e-9;

std::vector<NodeId> sorted_parents(const Dag& dag, const NodeId& node) {
    const auto& p = dag.parents(node);
    return {p.begin(), p.end()};
}

std::size_t checked_state_space(const DiscreteBayesNet& net,
                                std::size_t max_entries) {
    std::size_t total = 1;
    for (const auto& [node, states] : net.domains()) {
        total *= states.size();
        if (total > max_entries) {
            std::ostringstream msg;
            msg << "joint state space exceeds the enumeration cap of "
                << max_entries << " entries";
            throw ValidationError(msg.str());
        }
    }
    return total;
}

// Per-variable lookup plan: where each variable and its parents sit in the
// global variable order, so joint products avoid name lookups.
struct NodePlan {
    int self = 0;
    std::vector<int> parent_positions;
    const Cpt* cpt = nullptr;
};

std::vector<NodePlan> make_plans(const DiscreteBayesNet& net,
                                 const std::vector<NodeId>& order) {
    std::map<NodeId, int> position;
    for (int i = 0; i < static_cast<int>(order.size()); ++i)
        position[order[i]] = i;

    std::vector<NodePlan> plans;
    plans.reserve(order.size());
    for (const auto& node : order) {
        NodePlan plan;
        plan.self = position.at(node);
        plan.cpt = &net.cpt(node);
        for (const auto& parent : plan.cpt->parent_order())
            plan.parent_positions.push_back(position.at(parent));
        plans.push_back(std::move(plan));
    }
    return plans;
}

double config_probability(const std::vector<NodePlan>& plans,
                          const std::vector<int>& digits,
                          std::vector<int>& scratch) {
    double p = 1.0;
    for (const auto& plan : plans) {
        scratch.clear();
        for (int pos : plan.parent_positions) scratch.push_back(digits[pos]);
        int config = plan.cpt->config_index(scratch);
        p *= plan.cpt->value(config, digits[plan.self]);
    }
    return p;
}

} // namespace

bool next_config(std::vector<int>& digits, std::span<const int> cards) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < cards[i]) return true;
        digits[i] = 0;
    }
    return false;
}

Cpt::Cpt(std::vector<NodeId> parents, std::vector<int> parent_cards,
         int domain_size, std::vector<double> table)
    : parents_(std::move(parents)),
      parent_cards_(std::move(parent_cards)),
      domain_size_(domain_size),
      table_(std::move(table)) {
    if (parents_.size() != parent_cards_.size())
        throw ValidationError("CPT parent list and cardinality list differ in size");
    if (!std::is_sorted(parents_.begin(), parents_.end()))
        throw ValidationError("CPT parents must be listed in name order");
    if (std::adjacent_find(parents_.begin(), parents_.end()) != parents_.end())
        throw ValidationError("CPT lists a duplicate parent");
    if (domain_size_ < 2)
        throw ValidationError("CPT domain needs at least two states");
    for (int c : parent_cards_)
        if (c < 2) throw ValidationError("CPT parent domain needs at least two states");

    std::size_t configs = 1;
    for (int c : parent_cards_) configs *= static_cast<std::size_t>(c);
    if (table_.size() != configs * static_cast<std::size_t>(domain_size_))
        throw ValidationError("CPT table size does not match parents and domain");
}

std::span<const double> Cpt::column(int config) const {
    if (config < 0 || config >= config_count())
        throw LookupError("CPT configuration index out of range");
    return {table_.data() + static_cast<std::size_t>(config) * domain_size_,
            static_cast<std::size_t>(domain_size_)};
}

double Cpt::value(int config, int state) const {
    if (state < 0 || state >= domain_size_)
        throw LookupError("CPT state index out of range");
    return column(config)[static_cast<std::size_t>(state)];
}

int Cpt::config_index(std::span<const int> parent_states) const {
    if (parent_states.size() != parents_.size())
        throw LookupError("CPT configuration has the wrong arity");
    int index = 0;
    for (std::size_t i = 0; i < parent_states.size(); ++i) {
        if (parent_states[i] < 0 || parent_states[i] >= parent_cards_[i])
            throw LookupError("CPT parent state out of range");
        index = index * parent_cards_[i] + parent_states[i];
    }
    return index;
}

DiscreteBayesNet::DiscreteBayesNet(
    Dag structure, std::map<NodeId, std::vector<std::string>> domains,
    std::map<NodeId, Cpt> cpts)
    : structure_(std::move(structure)),
      domains_(std::move(domains)),
      cpts_(std::move(cpts)) {
    for (const auto& [node, states] : domains_) {
        if (!structure_.has_node(node))
            throw ValidationError("domain given for unknown node: " + node);
        if (states.size() < 2)
            throw ValidationError("node " + node + " needs at least two states");
        std::set<std::string> unique(states.begin(), states.end());
        if (unique.size() != states.size())
            throw ValidationError("node " + node + " repeats a state label");
    }
    for (const auto& node : structure_.nodes()) {
        if (!domains_.contains(node))
            throw ValidationError("node " + node + " has no domain");
        if (!cpts_.contains(node))
            throw ValidationError("node " + node + " has no CPT");
    }
    if (cpts_.size() != structure_.nodes().size())
        throw ValidationError("CPT given for a node outside the structure");

    for (const auto& [node, cpt] : cpts_) {
        auto expected = sorted_parents(structure_, node);
        if (cpt.parent_order() != expected)
            throw ValidationError("CPT for " + node +
                                  " is not conditioned exactly on its parents");
        if (cpt.domain_size() != static_cast<int>(domains_.at(node).size()))
            throw ValidationError("CPT for " + node +
                                  " does not match the node's domain size");
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (cpt.parent_cards()[i] !=
                static_cast<int>(domains_.at(expected[i]).size()))
                throw ValidationError("CPT for " + node +
                                      " disagrees with parent domain sizes");
        }
        for (int c = 0; c < cpt.config_count(); ++c) {
            double sum = 0.0;
            for (double p : cpt.column(c)) {
                if (p < -kColumnTolerance || p > 1.0 + kColumnTolerance)
                    throw ValidationError("CPT for " + node +
                                          " holds a probability outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kColumnTolerance) {
                std::ostringstream msg;
                msg << "CPT column " << c << " for " << node << " sums to "
                    << sum << ", not 1";
                throw ValidationError(msg.str());
            }
        }
    }

    // Scrub slack above the last few ulps so downstream arithmetic starts
    // from normalized columns. Columns already within 1e-13 stay untouched,
    // which keeps reconstruction a fixed point.
    for (auto& [node, cpt] : cpts_) {
        auto table = cpt.table();
        bool touched = false;
        int width = cpt.domain_size();
        for (int c = 0; c < cpt.config_count(); ++c) {
            double sum = 0.0;
            for (int s = 0; s < width; ++s)
                sum += table[static_cast<std::size_t>(c) * width + s];
            if (std::abs(sum - 1.0) > 1e-13) {
                for (int s = 0; s < width; ++s)
                    table[static_cast<std::size_t>(c) * width + s] /= sum;
                touched = true;
            }
        }
        if (touched)
            cpt = Cpt(cpt.parent_order(), cpt.parent_cards(), width,
                      std::move(table));
    }
}

const std::vector<std::string>& DiscreteBayesNet::domain(const NodeId& x) const {
    auto it = domains_.find(x);
    if (it == domains_.end()) throw LookupError("unknown node: " + x);
    return it->second;
}

const Cpt& DiscreteBayesNet::cpt(const NodeId& x) const {
    auto it = cpts_.find(x);
    if (it == cpts_.end()) throw LookupError("unknown node: " + x);
    return it->second;
}

int DiscreteBayesNet::state_index(const NodeId& x, const std::string& label) const {
    const auto& states = domain(x);
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end())
        throw LookupError("node " + x + " has no state named '" + label + "'");
    return static_cast<int>(it - states.begin());
}

std::size_t JointTable::index_of(std::span<const int> states) const {
    if (states.size() != cards.size())
        throw LookupError("joint configuration has the wrong arity");
    std::size_t index = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] < 0 || states[i] >= cards[i])
            throw LookupError("joint state out of range");
        index = index * static_cast<std::size_t>(cards[i]) +
                static_cast<std::size_t>(states[i]);
    }
    return index;
}

double JointTable::probability(std::span<const int> states) const {
    return probabilities[index_of(states)];
}

JointTable enumerate_joint(const DiscreteBayesNet& net, std::size_t max_entries) {
    std::size_t total = checked_state_space(net, max_entries);

    JointTable joint;
    joint.variable_order.assign(net.structure().nodes().begin(),
                                net.structure().nodes().end());
    for (const auto& node : joint.variable_order)
        joint.cards.push_back(static_cast<int>(net.domain(node).size()));
    joint.probabilities.reserve(total);

    auto plans = make_plans(net, joint.variable_order);
    std::vector<int> digits(joint.variable_order.size(), 0);
    std::vector<int> scratch;
    if (joint.variable_order.empty()) {
        joint.probabilities.push_back(1.0);
        return joint;
    }
    do {
        joint.probabilities.push_back(config_probability(plans, digits, scratch));
    } while (next_config(digits, joint.cards));

    double sum = std::accumulate(joint.probabilities.begin(),
                                 joint.probabilities.end(), 0.0);
    if (std::abs(sum - 1.0) > kColumnTolerance)
        throw ValidationError("enumerated joint does not sum to 1");
    return joint;
}

std::vector<double> query(const DiscreteBayesNet& net, const NodeId& target,
                          const std::map<NodeId, std::string>& evidence,
                          std::size_t max_entries) {
    checked_state_space(net, max_entries);
    if (!net.structure().has_node(target))
        throw LookupError("unknown query target: " + target);
    if (evidence.contains(target))
        throw ValidationError("query target " + target + " is fixed by evidence");

    std::vector<NodeId> order(net.structure().nodes().begin(),
                              net.structure().nodes().end());
    std::map<NodeId, int> position;
    for (int i = 0; i < static_cast<int>(order.size()); ++i) position[order[i]] = i;

    std::vector<int> cards;
    for (const auto& node : order)
        cards.push_back(static_cast<int>(net.domain(node).size()));

    for (const auto& [node, state] : evidence)
        if (!net.structure().has_node(node))
            throw LookupError("evidence names unknown node: " + node);

    // Pin evidence digits; run the odometer over the free variables only.
    std::vector<int> digits(order.size(), 0);
    std::vector<int> free_positions;
    for (const auto& node : order) {
        auto it = evidence.find(node);
        if (it == evidence.end()) {
            free_positions.push_back(position.at(node));
        } else {
            digits[position.at(node)] = net.state_index(node, it->second);
        }
    }

    auto plans = make_plans(net, order);
    int target_pos = position.at(target);
    std::vector<double> mass(net.domain(target).size(), 0.0);

    std::vector<int> free_digits(free_positions.size(), 0);
    std::vector<int> free_cards;
    for (int pos : free_positions) free_cards.push_back(cards[pos]);
    std::vector<int> scratch;
    do {
        for (std::size_t i = 0; i < free_positions.size(); ++i)
            digits[free_positions[i]] = free_digits[i];
        mass[digits[target_pos]] += config_probability(plans, digits, scratch);
    } while (next_config(free_digits, free_cards));

    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (total <= 0.0) {
        std::ostringstream msg;
        msg << "evidence has zero probability under the net";
        throw EvidenceError(msg.str());
    }
    for (double& m : mass) m /= total;
    return mass;
}

DiscreteBayesNet extend_cpt(const DiscreteBayesNet& net, const NodeId& node,
                            const std::set<NodeId>& new_parents) {
    if (!net.structure().has_node(node))
        throw LookupError("unknown node: " + node);
    const auto& current = net.structure().parents(node);
    for (const auto& p : current)
        if (!new_parents.contains(p))
            throw ValidationError("extend_cpt cannot drop parent " + p + " of " +
                                  node);
    for (const auto& p : new_parents) {
        if (!net.structure().has_node(p))
            throw LookupError("unknown parent node: " + p);
        if (p == node)
            throw ValidationError("node " + node + " cannot parent itself");
    }
    if (new_parents == current) return net;

    auto arcs = net.structure().arcs();
    for (const auto& p : new_parents) arcs.insert({p, node});
    Dag extended(net.structure().nodes(), arcs); // rejects introduced cycles

    std::vector<NodeId> parent_list(new_parents.begin(), new_parents.end());
    std::vector<int> parent_cards;
    for (const auto& p : parent_list)
        parent_cards.push_back(static_cast<int>(net.domain(p).size()));

    const Cpt& old = net.cpt(node);
    // Positions of the old parents inside the enlarged, sorted parent list.
    std::vector<int> old_positions;
    for (const auto& p : old.parent_order()) {
        auto it = std::find(parent_list.begin(), parent_list.end(), p);
        old_positions.push_back(static_cast<int>(it - parent_list.begin()));
    }

    int domain_size = old.domain_size();
    std::vector<double> table;
    std::vector<int> digits(parent_list.size(), 0);
    std::vector<int> restricted;
    do {
        restricted.clear();
        for (int pos : old_positions) restricted.push_back(digits[pos]);
        auto source = old.column(old.config_index(restricted));
        table.insert(table.end(), source.begin(), source.end());
    } while (next_config(digits, parent_cards));

    auto cpts = std::map<NodeId, Cpt>();
    for (const auto& n : net.structure().nodes())
        if (n != node) cpts.emplace(n, net.cpt(n));
    cpts.emplace(node, Cpt(parent_list, parent_cards, domain_size, table));
    return DiscreteBayesNet(std::move(extended), net.domains(), std::move(cpts));
}

DiscreteBayesNet align_to_consensus(const DiscreteBayesNet& net,
                                    const Dag& consensus,
                                    const std::vector<Arc>& reversal_events) {
    DiscreteBayesNet current = net;
    for (const auto& arc : reversal_events) {
        if (!current.structure().has_arc(arc))
            throw TraceMismatchError("reversal event " + to_string(arc) +
                                     " does not apply to the net");
        current = reverse_arc_cpt(current, arc);
    }

    for (const auto& node : current.structure().nodes())
        if (!consensus.has_node(node))
            throw TraceMismatchError("consensus lacks net variable " + node);
    for (const auto& arc : current.structure().arcs())
        if (!consensus.has_arc(arc))
            throw TraceMismatchError("transformed net arc " + to_string(arc) +
                                     " is absent from the consensus");

    // Adopt every consensus arc among this net's own variables.
    const std::vector<NodeId> own(current.structure().nodes().begin(),
                                  current.structure().nodes().end());
    for (const auto& node : own) {
        std::set<NodeId> wanted;
        for (const auto& p : consensus.parents(node))
            if (current.structure().has_node(p)) wanted.insert(p);
        if (wanted != current.structure().parents(node))
            current = extend_cpt(current, node, wanted);
    }
    return current;
}

} // namespace bnfuse
