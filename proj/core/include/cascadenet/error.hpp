#pragma once

#include <stdexcept>
#include <string>

namespace cascadenet {

/// Failure category; the CLI maps each onto a process exit code.
enum class ErrorKind {
    Usage,  // bad configuration or arguments
    Data,   // malformed or unusable input data
    Io,     // filesystem or network failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// CSV content that cannot be parsed. Row numbers are 1-based file lines.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::string column = {})
        : Error(ErrorKind::Data, what), row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

/// Input that parses but violates a numerical precondition
/// (too few observations, zero variance, empty date intersection, ...).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Argument outside the mathematical domain of an estimator.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Operand dimensions disagree.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

}  // namespace cascadenet
