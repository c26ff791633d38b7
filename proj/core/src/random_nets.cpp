#include "bnfuse/random_nets.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bnfuse {

namespace {

// Uniform in [0, 1) straight from the generator's bits; keeps output
// independent of standard-library distribution implementations.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

Dag random_dag(int node_count, double density, std::uint64_t seed,
               const std::string& name_prefix) {
    if (node_count < 0) throw ValidationError("negative node count");
    if (density < 0.0 || density > 1.0)
        throw ValidationError("density must lie in [0, 1]");

    int width = 2;
    for (int scale = 100; node_count > scale; scale *= 10) ++width;

    std::vector<NodeId> names;
    names.reserve(node_count);
    for (int i = 0; i < node_count; ++i) {
        std::ostringstream name;
        name << name_prefix;
        name.width(width);
        name.fill('0');
        name << i;
        names.push_back(name.str());
    }

    std::mt19937_64 rng(seed);
    std::vector<NodeId> order = names;
    // Fisher-Yates from the raw generator, for cross-platform stability.
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = rng() % i;
        std::swap(order[i - 1], order[j]);
    }

    std::set<Arc> arcs;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (unit_draw(rng) < density) arcs.insert({order[i], order[j]});

    return Dag({names.begin(), names.end()}, std::move(arcs));
}

DiscreteBayesNet with_random_binary_cpts(const Dag& structure,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::map<NodeId, std::vector<std::string>> domains;
    for (const auto& n : structure.nodes()) domains[n] = {"t", "f"};

    std::map<NodeId, Cpt> cpts;
    for (const auto& n : structure.nodes()) {
        const auto& parent_set = structure.parents(n);
        std::vector<NodeId> parents(parent_set.begin(), parent_set.end());
        std::vector<int> cards(parents.size(), 2);
        std::size_t configs = std::size_t{1} << parents.size();
        std::vector<double> table;
        table.reserve(configs * 2);
        for (std::size_t c = 0; c < configs; ++c) {
            double p = 0.05 + 0.90 * unit_draw(rng);
            table.push_back(p);
            table.push_back(1.0 - p);
        }
        cpts.emplace(n, Cpt(parents, cards, 2, std::move(table)));
    }
    return DiscreteBayesNet(structure, std::move(domains), std::move(cpts));
}

} // namespace bnfuse
