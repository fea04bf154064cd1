#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lpvss {

// Base of every error thrown by this library. The three intermediate
// categories map onto CLI exit codes: usage -> 1, data -> 2, numeric -> 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct UsageError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// numkernel
struct SingularMatrix : NumericError {
    using NumericError::NumericError;
};

struct NoConvergence : NumericError {
    NoConvergence(const std::string& msg, std::vector<double> partial)
        : NumericError(msg), partial_moduli(std::move(partial)) {}
    std::vector<double> partial_moduli;  // moduli recovered before the cap hit
};

struct ShapeMismatch : DataError {
    using DataError::DataError;
};

// data
struct RaggedRow : DataError {
    using DataError::DataError;
};
struct BadHeader : DataError {
    using DataError::DataError;
};
struct NonNumericCell : DataError {
    using DataError::DataError;
};
struct SegmentTooShort : DataError {
    using DataError::DataError;
};

// train
struct WindowTooLong : DataError {
    using DataError::DataError;
};
struct DegenerateWindow : UsageError {
    using UsageError::UsageError;
};
struct NonFiniteLoss : NumericError {
    using NumericError::NumericError;
};

struct ConfigError : UsageError {
    using UsageError::UsageError;
};

}  // namespace lpvss
