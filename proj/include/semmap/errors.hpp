#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semmap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation precondition (dimension mismatch, wrong
/// frame tag, wrong descriptor category, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// A required point-cloud pixel carries no point.
class InvalidCloudError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

class IncompatibleVersionError : public Error {
public:
    using Error::Error;
};

/// Failure inside one named stage of the update pipeline.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace semmap
