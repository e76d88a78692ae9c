#pragma once

#include <stdexcept>
#include <string>

namespace merton {

// Values double as process exit codes for mertonctl.
enum class ErrorCategory : int {
    Usage = 1,
    Data = 2,
    Numerical = 3,
    Io = 4,
};

const char* to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorCategory::Usage, what) {}
};

class ConfigError : public UsageError {
public:
    using UsageError::UsageError;
};

/// A step was run before the artefact it consumes was produced.
class DependencyError : public UsageError {
public:
    using UsageError::UsageError;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

/// Precondition violated by an argument value.
class InvalidArgument : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    SchemaError(const std::string& column, const std::string& what)
        : DataError(what), column_(column) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class ArbitrageError : public DataError {
public:
    using DataError::DataError;
};

class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class RiskNeutralInfeasible : public NumericalError {
public:
    RiskNeutralInfeasible(double q, const std::string& what) : NumericalError(what), q_(q) {}
    double q() const noexcept { return q_; }

private:
    double q_;
};

/// Arithmetic-return tree with a down factor 1 + D <= 0.
class NegativePriceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationInfeasible : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NanObjective : public NumericalError {
public:
    NanObjective(double abscissa, const std::string& what) : NumericalError(what), abscissa_(abscissa) {}
    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace merton
