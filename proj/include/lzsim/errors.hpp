#pragma once

#include <stdexcept>
#include <string>

namespace lzsim {

// Common base so the CLI can map library failures to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed scenario configuration or CLI usage (exit code 2).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Operand has a Hilbert-space dimension the operation does not support.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// A numerical invariant (normalization, Hermiticity, positivity, ...)
// was violated beyond tolerance (exit code 3).
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error(what) {}
};

// Integrator drift tolerance tripped; retry with a smaller step.
class StepSizeError : public ContractViolation {
public:
    explicit StepSizeError(const std::string& what) : ContractViolation(what) {}
};

}  // namespace lzsim
