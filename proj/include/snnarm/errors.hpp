#pragma once

#include <stdexcept>
#include <string>

namespace snnarm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (mismatched dimensions, bad values).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A linear solve or factorization failed.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class UnreachableTarget : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// The integrator produced a non-finite state.
class SimulationDiverged : public Error {
public:
    SimulationDiverged(const std::string& what, long step) : Error(what), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace detail
}  // namespace snnarm
