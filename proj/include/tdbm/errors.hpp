#ifndef TDBM_ERRORS_HPP
#define TDBM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tdbm {

// Error taxonomy shared by all modules. The CLI maps each class to a
// distinct exit code (usage=1, validation=2, numerical=3, collision=4).

// Caller misuse: bad flag combinations, API preconditions violated.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files (CSV/JSON syntax, bad header, unreadable path).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a data invariant
// (non-monotone time, overlapping vehicles, degenerate spread, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: rank-deficient fits, non-convergence.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tdbm

#endif  // TDBM_ERRORS_HPP
