#ifndef PSTSIM_ERRORS_HPP
#define PSTSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pstsim {

// Raised for malformed input documents (network configs, CLI arguments
// that fail structural checks). Carries a 1-based line number when the
// source is a text document, 0 otherwise.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Raised when an input is well-formed but violates a model invariant
// (self-coupling, degenerate shifts, basis mismatch, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace pstsim

#endif
