#pragma once

#include <stdexcept>
#include <string>

namespace fvirp {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MeshError : std::runtime_error {
    explicit MeshError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TensorError : std::runtime_error {
    explicit TensorError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InterpError : std::runtime_error {
    explicit InterpError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ModelValidationError : std::runtime_error {
    explicit ModelValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LinearSolveError : std::runtime_error {
    explicit LinearSolveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace fvirp
