#pragma once

#include <stdexcept>
#include <string>

namespace condasian {

enum class ErrorKind {
    pole,
    non_convergence,
    zero_argument,
    cancellation,
    excluded_point,
    precondition,
    inversion_failure,
    clamp_violation,
    turning_point,
    truncation,
    quadrature,
    root_bracket,
    denominator
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Any failure of a numerical kernel. Maps to exit code 1 in the CLI.
class NumericalError : public Error {
public:
    NumericalError(ErrorKind kind, const std::string& what)
        : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Invalid user input. Maps to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace condasian
