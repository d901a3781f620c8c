#pragma once

#include <stdexcept>
#include <string>

namespace legwheel {

// Base for all recoverable domain failures. CLI maps these to exit code 2,
// except DivergenceError which maps to 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Target outside the reachable workspace. Carries the reach deficit in meters
// (how far outside the feasible band the request was, when known).
class OutOfWorkspaceError : public Error {
public:
    OutOfWorkspaceError(const std::string& msg, double deficit = 0.0)
        : Error(msg), deficit_m(deficit) {}
    double deficit_m;
};

class SingularConfigurationError : public Error {
public:
    explicit SingularConfigurationError(const std::string& msg) : Error(msg) {}
};

// NaN/Inf detected while integrating. step_index is the offending step.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, long step)
        : Error(msg), step_index(step) {}
    long step_index;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class UnsupportedFeatureError : public Error {
public:
    explicit UnsupportedFeatureError(const std::string& msg) : Error(msg) {}
};

}  // namespace legwheel
