#pragma once
// Error types shared across the library.

#include <stdexcept>
#include <string>

namespace gal {

// Malformed input file; message names the offending record.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data violates a documented invariant (label range, row counts, ...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested generative-process parameters cannot be realized (p or q > 1, d < C-1, ...).
struct InfeasibleParamsError : std::runtime_error {
    explicit InfeasibleParamsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact enumeration would exceed the configured term budget.
struct EnumerationCapError : std::runtime_error {
    explicit EnumerationCapError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gal
