#pragma once

#include <stdexcept>
#include <string>

namespace polarlab {

// Invalid input: bad parameters, unknown family tags, missing keys,
// violated preconditions. Maps to the CLI usage/config exit code.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PreconditionError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

// Failures of the numerics themselves. Maps to the CLI numeric exit code.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketError : public NumericError {
public:
    using NumericError::NumericError;
};

class MonotonicityError : public NumericError {
public:
    using NumericError::NumericError;
};

class NonConvergence : public NumericError {
public:
    using NumericError::NumericError;
};

class BudgetExceeded : public NumericError {
public:
    using NumericError::NumericError;
};

class CaseMismatch : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace polarlab
