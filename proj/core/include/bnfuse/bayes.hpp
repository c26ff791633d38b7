#ifndef BNFUSE_BAYES_HPP
#define BNFUSE_BAYES_HPP

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bnfuse/dag.hpp"
#include "bnfuse/errors.hpp"

namespace bnfuse {

/// Advances a mixed-radix configuration, last digit fastest.
/// Returns false once the odometer wraps back to all zeros.
bool next_config(std::vector<int>& digits, std::span<const int> cards);

/// Conditional probability table for one variable. Parents are kept in
/// name order; one column per joint parent configuration, configurations
/// numbered with the last parent varying fastest.
class Cpt {
public:
    Cpt() = default;
    Cpt(std::vector<NodeId> parents, std::vector<int> parent_cards,
        int domain_size, std::vector<double> table);

    const std::vector<NodeId>& parent_order() const noexcept { return parents_; }
    const std::vector<int>& parent_cards() const noexcept { return parent_cards_; }
    int domain_size() const noexcept { return domain_size_; }
    int config_count() const noexcept {
        return domain_size_ == 0
                   ? 0
                   : static_cast<int>(table_.size()) / domain_size_;
    }
    const std::vector<double>& table() const noexcept { return table_; }

    std::span<const double> column(int config) const;
    double value(int config, int state) const;

    /// Mixed-radix index of a full parent-state assignment.
    int config_index(std::span<const int> parent_states) const;

    bool operator==(const Cpt&) const = default;

private:
    std::vector<NodeId> parents_;
    std::vector<int> parent_cards_;
    int domain_size_ = 0;
    std::vector<double> table_;
};

/// Discrete Bayes net: a DAG, one finite domain per node, and one CPT per
/// node conditioned exactly on its parents. Construction validates that
/// every CPT column is a probability distribution (within 1e-9).
class DiscreteBayesNet {
public:
    DiscreteBayesNet() = default;
    DiscreteBayesNet(Dag structure,
                     std::map<NodeId, std::vector<std::string>> domains,
                     std::map<NodeId, Cpt> cpts);

    const Dag& structure() const noexcept { return structure_; }
    const std::map<NodeId, std::vector<std::string>>& domains() const noexcept {
        return domains_;
    }
    const std::vector<std::string>& domain(const NodeId& x) const;
    const Cpt& cpt(const NodeId& x) const;

    int state_index(const NodeId& x, const std::string& label) const;

    bool operator==(const DiscreteBayesNet&) const = default;

private:
    Dag structure_;
    std::map<NodeId, std::vector<std::string>> domains_;
    std::map<NodeId, Cpt> cpts_;
};

/// Full joint distribution, variables in name order, entries numbered with
/// the last variable varying fastest.
struct JointTable {
    std::vector<NodeId> variable_order;
    std::vector<int> cards;
    std::vector<double> probabilities;

    std::size_t index_of(std::span<const int> states) const;
    double probability(std::span<const int> states) const;
};

/// Joint state spaces above this entry count are rejected; this is a desk
/// scale tool, not a production inference engine.
inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// Brute-force joint: the probability of each full configuration is the
/// product of the matching CPT entries.
JointTable enumerate_joint(const DiscreteBayesNet& net,
                           std::size_t max_entries = kDefaultEnumerationCap);

/// Posterior over `target` given the evidence assignment, by summing the
/// joint over the free variables and renormalizing. Evidence whose total
/// mass is zero raises EvidenceError.
std::vector<double> query(const DiscreteBayesNet& net, const NodeId& target,
                          const std::map<NodeId, std::string>& evidence,
                          std::size_t max_entries = kDefaultEnumerationCap);

/// Re-expresses one node's CPT over an enlarged parent set by replicating
/// its columns across the added parents' configurations. The node is
/// conditionally independent of the additions, so the joint is unchanged.
DiscreteBayesNet extend_cpt(const DiscreteBayesNet& net, const NodeId& node,
                            const std::set<NodeId>& new_parents);

/// Rewrites an author net over a consensus structure: replays the recorded
/// reversal sequence, then extends each CPT with the consensus arcs (among
/// this net's own variables) that the transformed net lacks. The result's
/// structure equals the consensus restricted to the net's variables, and
/// the joint over those variables is preserved.
DiscreteBayesNet align_to_consensus(const DiscreteBayesNet& net,
                                    const Dag& consensus,
                                    const std::vector<Arc>& reversal_events);

} // namespace bnfuse

#endif
