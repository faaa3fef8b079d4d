#pragma once

#include <stdexcept>
#include <string>

namespace vqc {

/// Bad index, shape or configuration value passed by the caller.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but cannot be turned into a quantum state
/// (e.g. an all-zero vector under amplitude encoding).
class DegenerateInput : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A loss, score or gradient became NaN/inf during training.
class NumericalFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Metric that is not defined for the given labels (e.g. AUC with one class).
class UndefinedMetric : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class UnsupportedSize : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Malformed CSV content. Carries the 1-based line (and column when known).
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, std::size_t line, std::size_t column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

class VersionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class CorruptFile : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace vqc
