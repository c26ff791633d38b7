#ifndef BNFUSE_NET_IO_HPP
#define BNFUSE_NET_IO_HPP

#include <string>
#include <variant>

#include "bnfuse/bayes.hpp"
#include "bnfuse/dag.hpp"

namespace bnfuse {

/// A parsed net document. Documents without CPTs are plain structures;
/// documents where every node carries states and a CPT are full nets.
/// Mixing the two is a validation error.
struct ParsedNet {
    std::string name;
    std::variant<Dag, DiscreteBayesNet> value;

    bool is_bayes() const { return std::holds_alternative<DiscreteBayesNet>(value); }
    const Dag& structure() const {
        return is_bayes() ? std::get<DiscreteBayesNet>(value).structure()
                          : std::get<Dag>(value);
    }
    const DiscreteBayesNet& bayes() const { return std::get<DiscreteBayesNet>(value); }
};

/// Parses a JSON net document:
///
///   {
///     "name": "...",
///     "nodes": [{"name": "A", "states": [...], "cpt": [[...], ...]}, ...],
///     "arcs": [["A", "B"], ...]
///   }
///
/// CPT rows are one per parent configuration with parents in name order and
/// the last parent varying fastest; each row is a distribution over the
/// node's states. Malformed text raises ParseError, invariant breaches
/// raise ValidationError/StructuralError.
ParsedNet parse_net(const std::string& text);

/// Canonical text form: nodes and arcs sorted, probabilities printed with
/// 12 significant digits. parse_net(write_net(n)) reproduces n (CPT entries
/// to the serialized precision), and a second round trip is byte-stable.
std::string write_net(const Dag& dag, const std::string& name);
std::string write_net(const DiscreteBayesNet& net, const std::string& name);

} // namespace bnfuse

#endif
