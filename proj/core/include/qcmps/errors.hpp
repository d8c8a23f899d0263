#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcmps {

/// Malformed textual input (FCIDUMP, polynomial dumps, matrix files).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A precondition of a library call was not met by the caller.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical diagnostic tripped (non-Hermitian residue, non-convergence, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition)
        throw ContractViolation(message);
}

} // namespace qcmps
