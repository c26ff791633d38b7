#ifndef BNFUSE_ERRORS_HPP
#define BNFUSE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace bnfuse {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph-shape violations: cycles, self-loops, dangling arc endpoints.
/// When a cycle was found, `cycle` holds one witness as a node sequence
/// that starts and ends at the same node.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& msg,
                             std::vector<std::string> witness = {})
        : Error(msg), cycle(std::move(witness)) {}

    std::vector<std::string> cycle;
};

/// A referenced node, arc, state, or author does not exist.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Violated contract on otherwise well-formed inputs: unnormalized CPT
/// columns, mismatched domains, bad weights, projection outside the graph,
/// state spaces over the enumeration cap, empty selection pools.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed net document text.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Evidence assignment with zero probability under a net.
class EvidenceError : public Error {
public:
    using Error::Error;
};

/// A replayed reversal event does not apply to the net in its current form.
class TraceMismatchError : public Error {
public:
    using Error::Error;
};

/// Arc reversal requested while another directed path connects the same
/// endpoints. Inside fusion this means the selection order is broken, so it
/// is reported as an internal failure rather than a user error.
class InvalidReversalError : public Error {
public:
    using Error::Error;
};

/// A checked-mode algorithm invariant failed mid-run. `trace_dump` carries
/// the event log up to the failure point.
class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& msg, std::string trace = {})
        : Error(msg), trace_dump(std::move(trace)) {}

    std::string trace_dump;
};

} // namespace bnfuse

#endif
