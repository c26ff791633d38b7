#include "bnfuse/net_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace bnfuse {

namespace {

using nlohmann::ordered_json;

// Probabilities travel as decimal text with 12 significant digits; parsing
// the printed form back gives the stored double, so a written file is a
// fixed point of write(parse(.)).
double round_12(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return std::strtod(buffer, nullptr);
}

const ordered_json& require(const ordered_json& object, const char* key,
                            const std::string& where) {
    auto it = object.find(key);
    if (it == object.end())
        throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

std::string node_context(std::size_t index) {
    std::ostringstream out;
    out << "nodes[" << index << "]";
    return out.str();
}

} // namespace

ParsedNet parse_net(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("net document is not valid JSON: ") +
                         e.what());
    }
    if (!doc.is_object()) throw ParseError("net document must be a JSON object");

    ParsedNet parsed;
    if (auto it = doc.find("name"); it != doc.end()) {
        if (!it->is_string()) throw ParseError("'name' must be a string");
        parsed.name = it->get<std::string>();
    }

    const auto& nodes_json = require(doc, "nodes", "document");
    if (!nodes_json.is_array()) throw ParseError("'nodes' must be an array");

    std::set<NodeId> nodes;
    std::map<NodeId, std::vector<std::string>> domains;
    std::map<NodeId, ordered_json> raw_cpts;
    std::size_t with_cpt = 0;
    for (std::size_t i = 0; i < nodes_json.size(); ++i) {
        const auto& entry = nodes_json[i];
        std::string where = node_context(i);
        if (!entry.is_object()) throw ParseError(where + " must be an object");
        const auto& name_json = require(entry, "name", where);
        if (!name_json.is_string() || name_json.get<std::string>().empty())
            throw ParseError(where + ".name must be a non-empty string");
        NodeId name = name_json.get<std::string>();
        if (!nodes.insert(name).second)
            throw ValidationError(where + ": duplicate node '" + name + "'");

        if (auto it = entry.find("states"); it != entry.end()) {
            if (!it->is_array())
                throw ParseError(where + ".states must be an array");
            std::vector<std::string> states;
            for (const auto& s : *it) {
                if (!s.is_string())
                    throw ParseError(where + ".states entries must be strings");
                states.push_back(s.get<std::string>());
            }
            domains.emplace(name, std::move(states));
        }
        if (auto it = entry.find("cpt"); it != entry.end()) {
            if (!it->is_array())
                throw ParseError(where + ".cpt must be an array of rows");
            if (!domains.contains(name))
                throw ValidationError(where + ": cpt given without states");
            raw_cpts.emplace(name, *it);
            ++with_cpt;
        }
    }
    if (with_cpt != 0 && with_cpt != nodes.size())
        throw ValidationError(
            "either every node carries a cpt or none does; found " +
            std::to_string(with_cpt) + " of " + std::to_string(nodes.size()));

    const auto& arcs_json = require(doc, "arcs", "document");
    if (!arcs_json.is_array()) throw ParseError("'arcs' must be an array");
    std::set<Arc> arcs;
    for (std::size_t i = 0; i < arcs_json.size(); ++i) {
        const auto& entry = arcs_json[i];
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
            !entry[1].is_string()) {
            std::ostringstream msg;
            msg << "arcs[" << i << "] must be a [from, to] string pair";
            throw ParseError(msg.str());
        }
        Arc arc{entry[0].get<std::string>(), entry[1].get<std::string>()};
        if (!nodes.contains(arc.from) || !nodes.contains(arc.to)) {
            std::ostringstream msg;
            msg << "arcs[" << i << "] references an undeclared node";
            throw ValidationError(msg.str());
        }
        if (!arcs.insert(arc).second) {
            std::ostringstream msg;
            msg << "arcs[" << i << "] repeats arc " << to_string(arc);
            throw ValidationError(msg.str());
        }
    }

    Dag structure(nodes, arcs); // validates acyclicity

    if (with_cpt == 0) {
        parsed.value = std::move(structure);
        return parsed;
    }

    std::map<NodeId, Cpt> cpts;
    for (const auto& node : nodes) {
        const auto& states = domains.at(node);
        const auto& parent_set = structure.parents(node);
        std::vector<NodeId> parents(parent_set.begin(), parent_set.end());
        std::vector<int> parent_cards;
        std::size_t configs = 1;
        for (const auto& p : parents) {
            if (!domains.contains(p))
                throw ValidationError("parent " + p + " of " + node +
                                      " declares no states");
            parent_cards.push_back(static_cast<int>(domains.at(p).size()));
            configs *= domains.at(p).size();
        }

        const auto& rows = raw_cpts.at(node);
        if (rows.size() != configs) {
            std::ostringstream msg;
            msg << "cpt for " << node << " has " << rows.size()
                << " rows; its parents allow " << configs << " configurations";
            throw ValidationError(msg.str());
        }
        std::vector<double> table;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (!row.is_array() || row.size() != states.size()) {
                std::ostringstream msg;
                msg << "cpt row " << r << " for " << node << " needs "
                    << states.size() << " probabilities";
                throw ValidationError(msg.str());
            }
            for (const auto& p : row) {
                if (!p.is_number()) {
                    std::ostringstream msg;
                    msg << "cpt row " << r << " for " << node
                        << " holds a non-number";
                    throw ParseError(msg.str());
                }
                table.push_back(p.get<double>());
            }
        }
        cpts.emplace(node, Cpt(parents, parent_cards,
                               static_cast<int>(states.size()), table));
    }

    parsed.value =
        DiscreteBayesNet(std::move(structure), std::move(domains), std::move(cpts));
    return parsed;
}

namespace {

ordered_json arcs_to_json(const std::set<Arc>& arcs) {
    ordered_json out = ordered_json::array();
    for (const auto& a : arcs) out.push_back({a.from, a.to});
    return out;
}

} // namespace

std::string write_net(const Dag& dag, const std::string& name) {
    ordered_json doc;
    doc["name"] = name;
    doc["nodes"] = ordered_json::array();
    for (const auto& n : dag.nodes()) doc["nodes"].push_back({{"name", n}});
    doc["arcs"] = arcs_to_json(dag.arcs());
    return doc.dump(2) + "\n";
}

std::string write_net(const DiscreteBayesNet& net, const std::string& name) {
    ordered_json doc;
    doc["name"] = name;
    doc["nodes"] = ordered_json::array();
    for (const auto& n : net.structure().nodes()) {
        ordered_json entry;
        entry["name"] = n;
        entry["states"] = net.domain(n);
        const Cpt& cpt = net.cpt(n);
        ordered_json rows = ordered_json::array();
        for (int c = 0; c < cpt.config_count(); ++c) {
            ordered_json row = ordered_json::array();
            for (double p : cpt.column(c)) row.push_back(round_12(p));
            rows.push_back(std::move(row));
        }
        entry["cpt"] = std::move(rows);
        doc["nodes"].push_back(std::move(entry));
    }
    doc["arcs"] = arcs_to_json(net.structure().arcs());
    return doc.dump(2) + "\n";
}

} // namespace bnfuse
