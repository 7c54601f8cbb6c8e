#pragma once

#include <stdexcept>
#include <string>

namespace liqrec {

// Base of every error raised by the toolkit. The CLI maps each subclass to
// a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An argument fell outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Input files or series failed validation (parse errors, gaps, misalignment).
class DataError : public Error {
public:
    using Error::Error;
};

// Two series that must share a calendar do not.
class AlignmentError : public DataError {
public:
    using DataError::DataError;
};

// An estimator could not produce a result (rank deficiency, empty pools, ...).
class EstimatorError : public Error {
public:
    using Error::Error;
};

// Configuration rejected before any computation ran.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace liqrec
