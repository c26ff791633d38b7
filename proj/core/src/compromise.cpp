#include "bnfuse/compromise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bnfuse {

CompromiseWeights::CompromiseWeights(std::vector<double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty())
        throw ValidationError("weight vector is empty");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0))
            throw ValidationError("weights must be non-negative");
        sum += w;
    }
    if (sum <= 0.0)
        throw ValidationError("at least one weight must be positive");
}

CompromiseWeights CompromiseWeights::equal(std::size_t authors) {
    if (authors == 0) throw ValidationError("no authors to weight");
    return CompromiseWeights(std::vector<double>(authors, 1.0));
}

std::vector<double> CompromiseWeights::normalized() const {
    double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    std::vector<double> out(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i) out[i] = weights_[i] / sum;
    return out;
}

namespace {

void check_author_count(const std::vector<DiscreteBayesNet>& nets,
                        const CompromiseWeights& weights) {
    if (nets.empty()) throw ValidationError("no author nets given");
    if (weights.size() != nets.size()) {
        std::ostringstream msg;
        msg << "weight count " << weights.size() << " does not match author count "
            << nets.size();
        throw ValidationError(msg.str());
    }
}

void check_shared_domains(const std::vector<DiscreteBayesNet>& nets) {
    std::map<NodeId, std::pair<std::size_t, const std::vector<std::string>*>>
        seen;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        for (const auto& [node, states] : nets[i].domains()) {
            auto it = seen.find(node);
            if (it == seen.end()) {
                seen.emplace(node, std::make_pair(i, &states));
            } else if (*it->second.second != states) {
                std::ostringstream msg;
                msg << "authors " << it->second.first + 1 << " and " << i + 1
                    << " disagree on the domain of variable " << node;
                throw ValidationError(msg.str());
            }
        }
    }
}

} // namespace

DiscreteBayesNet prior_compromise(const std::vector<DiscreteBayesNet>& nets,
                                  const CompromiseWeights& weights,
                                  const FusionOptions& options) {
    check_author_count(nets, weights);
    check_shared_domains(nets);

    std::vector<Dag> structures;
    structures.reserve(nets.size());
    for (const auto& net : nets) structures.push_back(net.structure());
    MultiFusionResult fusion = fuse_many(structures, options);

    std::vector<DiscreteBayesNet> aligned;
    aligned.reserve(nets.size());
    for (std::size_t i = 0; i < nets.size(); ++i)
        aligned.push_back(align_to_consensus(nets[i], fusion.fused,
                                             reversal_sequence(fusion.traces[i])));

    auto normalized = weights.normalized();

    std::map<NodeId, std::vector<std::string>> domains;
    for (const auto& net : aligned)
        for (const auto& [node, states] : net.domains())
            domains.emplace(node, states);

    std::map<NodeId, Cpt> cpts;
    for (const auto& node : fusion.fused.nodes()) {
        const auto& parent_set = fusion.fused.parents(node);
        std::vector<NodeId> parents(parent_set.begin(), parent_set.end());
        std::vector<int> parent_cards;
        for (const auto& p : parents)
            parent_cards.push_back(static_cast<int>(domains.at(p).size()));
        int domain_size = static_cast<int>(domains.at(node).size());

        // Authors that model this variable, with their share of the weight.
        // An author with no opinion about a variable contributes nothing to
        // it, rather than a uniform guess.
        struct Contributor {
            const DiscreteBayesNet* net;
            double weight;
            std::vector<std::size_t> parent_slots; // into the fused parent list
        };
        std::vector<Contributor> contributors;
        double weight_sum = 0.0;
        for (std::size_t i = 0; i < aligned.size(); ++i) {
            if (!aligned[i].structure().has_node(node)) continue;
            Contributor c{&aligned[i], normalized[i], {}};
            for (const auto& p : aligned[i].cpt(node).parent_order()) {
                auto it = std::find(parents.begin(), parents.end(), p);
                c.parent_slots.push_back(
                    static_cast<std::size_t>(it - parents.begin()));
            }
            weight_sum += c.weight;
            contributors.push_back(std::move(c));
        }
        if (contributors.empty())
            throw ValidationError("no author models variable " + node);
        if (weight_sum <= 0.0) {
            // Every author who models this variable has zero weight; fall
            // back to averaging them equally.
            for (auto& c : contributors)
                c.weight = 1.0 / static_cast<double>(contributors.size());
            weight_sum = 1.0;
        }

        std::vector<double> table;
        std::vector<int> digits(parents.size(), 0);
        std::vector<int> restricted;
        do {
            for (int s = 0; s < domain_size; ++s) {
                double entry = 0.0;
                for (const auto& c : contributors) {
                    restricted.clear();
                    for (std::size_t slot : c.parent_slots)
                        restricted.push_back(digits[slot]);
                    const Cpt& cpt = c.net->cpt(node);
                    entry += c.weight *
                             cpt.value(cpt.config_index(restricted), s);
                }
                table.push_back(entry / weight_sum);
            }
        } while (next_config(digits, parent_cards));

        cpts.emplace(node, Cpt(parents, parent_cards, domain_size,
                               std::move(table)));
    }

    return DiscreteBayesNet(fusion.fused, std::move(domains), std::move(cpts));
}

PosteriorCompromise posterior_compromise(
    const std::vector<DiscreteBayesNet>& nets, const CompromiseWeights& weights,
    const NodeId& target, const std::map<NodeId, std::string>& evidence) {
    check_author_count(nets, weights);
    check_shared_domains(nets);

    auto normalized = weights.normalized();

    std::size_t domain_size = 0;
    std::vector<std::vector<double>> posteriors(nets.size());
    PosteriorCompromise out;
    double remaining = 0.0;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (normalized[i] == 0.0) continue;
        try {
            posteriors[i] = query(nets[i], target, evidence);
            domain_size = posteriors[i].size();
            remaining += normalized[i];
        } catch (const EvidenceError&) {
            // No posterior exists for this author; drop and renormalize.
            out.dropped_authors.push_back(i);
        }
    }
    if (remaining <= 0.0)
        throw EvidenceError("evidence is impossible under every weighted net");

    out.effective_weights.assign(nets.size(), 0.0);
    out.distribution.assign(domain_size, 0.0);
    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (posteriors[i].empty() || normalized[i] == 0.0) continue;
        double w = normalized[i] / remaining;
        out.effective_weights[i] = w;
        for (std::size_t s = 0; s < domain_size; ++s)
            out.distribution[s] += w * posteriors[i][s];
    }
    return out;
}

CompromiseReport compare_compromises(
    const std::vector<DiscreteBayesNet>& nets, const CompromiseWeights& weights,
    const NodeId& target, const std::map<NodeId, std::string>& evidence,
    const FusionOptions& options) {
    check_author_count(nets, weights);

    CompromiseReport report;

    PosteriorCompromise posterior =
        posterior_compromise(nets, weights, target, evidence);
    report.posterior = posterior.distribution;
    report.dropped_authors = posterior.dropped_authors;
    report.effective_weights = posterior.effective_weights;

    report.per_author.resize(nets.size());
    for (std::size_t i = 0; i < nets.size(); ++i) {
        try {
            report.per_author[i] = query(nets[i], target, evidence);
        } catch (const EvidenceError&) {
            // dropped author: no posterior to report
        } catch (const LookupError&) {
            // an unweighted author may not model the query variables at all;
            // weighted ones already failed inside posterior_compromise
        }
    }

    DiscreteBayesNet consensus = prior_compromise(nets, weights, options);
    report.prior = query(consensus, target, evidence);
    report.target_states = consensus.domain(target);
    return report;
}

} // namespace bnfuse
