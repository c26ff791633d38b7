#include "bnfuse/dot.hpp"

#include <sstream>

namespace bnfuse {

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string to_dot(const Dag& dag, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << quoted(name) << " {\n";
    for (const auto& n : dag.nodes()) out << "  " << quoted(n) << ";\n";
    for (const auto& a : dag.arcs())
        out << "  " << quoted(a.from) << " -> " << quoted(a.to) << ";\n";
    out << "}\n";
    return out.str();
}

std::string fused_to_dot(const Dag& fused, const std::vector<Dag>& transformed,
                         const std::string& name) {
    std::ostringstream out;
    out << "digraph " << quoted(name) << " {\n";
    for (const auto& n : fused.nodes()) out << "  " << quoted(n) << ";\n";
    for (const auto& a : fused.arcs()) {
        std::vector<std::size_t> sources;
        for (std::size_t i = 0; i < transformed.size(); ++i)
            if (transformed[i].has_arc(a)) sources.push_back(i + 1);

        out << "  " << quoted(a.from) << " -> " << quoted(a.to) << " [sources=\"";
        for (std::size_t i = 0; i < sources.size(); ++i) {
            if (i) out << ",";
            out << sources[i];
        }
        out << "\"";
        if (transformed.size() == 2) {
            const char* origin = sources.size() == 2 ? "shared"
                                 : sources[0] == 1   ? "first-only"
                                                     : "second-only";
            out << " origin=\"" << origin << "\"";
        }
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace bnfuse
