#pragma once

#include <stdexcept>
#include <string>

namespace senses {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
    usage = 1,
    data = 2,
    numeric = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exitCode() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Thrown when a focal concept has no documents inside the requested year range.
struct EmptyOrbitError : DataError {
    using DataError::DataError;
};

/// Thrown when a quantity needs an edge between two senses that never co-occur.
struct NoEdgeError : DataError {
    using DataError::DataError;
};

} // namespace senses
