// errors.hpp — exception types shared by the library and the CLI

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ionthermo {

// Bad user input or violated precondition. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested problem does not fit the memory budget. CLI exit code 3.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::uint64_t required_bytes)
        : std::runtime_error(what), required_bytes_(required_bytes) {}
    std::uint64_t required_bytes() const noexcept { return required_bytes_; }

private:
    std::uint64_t required_bytes_;
};

// Solver failure, non-convergence or inconsistent numerics. CLI exit code 4.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace ionthermo
