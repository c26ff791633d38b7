#ifndef BNFUSE_COMPROMISE_HPP
#define BNFUSE_COMPROMISE_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bnfuse/bayes.hpp"
#include "bnfuse/fusion.hpp"

namespace bnfuse {

/// Non-negative author weights, at least one positive; normalized to sum 1
/// before use.
class CompromiseWeights {
public:
    explicit CompromiseWeights(std::vector<double> weights);

    static CompromiseWeights equal(std::size_t authors);

    std::size_t size() const noexcept { return weights_.size(); }
    const std::vector<double>& raw() const noexcept { return weights_; }
    std::vector<double> normalized() const;

private:
    std::vector<double> weights_;
};

/// Builds the consensus net: fuses the author structures, rewrites every
/// author net over the fused graph, then averages CPT entries per node and
/// parent configuration across the authors that model the node (weights
/// renormalized over that subset). Authors never supply opinions about
/// variables they do not model.
DiscreteBayesNet prior_compromise(const std::vector<DiscreteBayesNet>& nets,
                                  const CompromiseWeights& weights,
                                  const FusionOptions& options = {});

struct PosteriorCompromise {
    std::vector<double> distribution;
    /// Authors whose nets give the evidence zero probability; they have no
    /// posterior to average and are dropped.
    std::vector<std::size_t> dropped_authors;
    /// Weights renormalized over the remaining authors, full-length.
    std::vector<double> effective_weights;
};

/// Runs the query in each author's own net and takes the weighted average
/// of the posteriors.
PosteriorCompromise posterior_compromise(
    const std::vector<DiscreteBayesNet>& nets, const CompromiseWeights& weights,
    const NodeId& target, const std::map<NodeId, std::string>& evidence);

struct CompromiseReport {
    std::vector<std::string> target_states;
    /// Posterior of the target under the prior-compromise (consensus) net.
    std::vector<double> prior;
    /// Posterior compromise: weighted average of the authors' posteriors.
    std::vector<double> posterior;
    /// Each author's own posterior; empty for dropped authors.
    std::vector<std::vector<double>> per_author;
    std::vector<std::size_t> dropped_authors;
    std::vector<double> effective_weights;
};

/// Runs both compromise regimes and every individual net on one query.
CompromiseReport compare_compromises(
    const std::vector<DiscreteBayesNet>& nets, const CompromiseWeights& weights,
    const NodeId& target, const std::map<NodeId, std::string>& evidence,
    const FusionOptions& options = {});

} // namespace bnfuse

#endif
