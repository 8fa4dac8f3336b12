#pragma once

#include <stdexcept>
#include <string>

namespace vortexlab {

// Error taxonomy mapped to CLI exit codes: config -> 2, solver -> 3,
// verification threshold -> 4. Geometry/parameter errors are config-class.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParameterError : ConfigError {
    explicit ParameterError(const std::string& msg) : ConfigError(msg) {}
};

struct GeometryError : ConfigError {
    explicit GeometryError(const std::string& msg) : ConfigError(msg) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace vortexlab
