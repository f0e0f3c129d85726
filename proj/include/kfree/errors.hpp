// errors.hpp
// Exception types shared by every kfree module.
//
// Two families, which the CLI maps onto distinct exit codes:
//   input errors       ValidationError, ConfigError, DomainError
//   computation errors CapacityError, RegionError, PoleError

#pragma once

#include <stdexcept>
#include <string>

namespace kfree {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ComputationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value violates a documented precondition (n = 0, k < 2, ...).
struct DomainError : InputError {
    using InputError::InputError;
};

// Character tables, discriminants and similar objects that fail an axiom.
struct ValidationError : InputError {
    using InputError::InputError;
};

// Experiment or CLI configuration that cannot be run.
struct ConfigError : InputError {
    using InputError::InputError;
};

// A request exceeds what a table or memory bound can hold.
struct CapacityError : ComputationError {
    using ComputationError::ComputationError;
};

// Analytic evaluation requested outside the validated region.
struct RegionError : ComputationError {
    using ComputationError::ComputationError;
};

// Evaluation point too close to a pole.
struct PoleError : ComputationError {
    using ComputationError::ComputationError;
};

}  // namespace kfree
