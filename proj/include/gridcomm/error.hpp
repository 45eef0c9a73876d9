#pragma once

#include <stdexcept>
#include <string>

namespace gridcomm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad action id, stepping a
/// finished episode, out-of-bounds coordinates, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// An episode or channel configuration cannot be honoured.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Instruction text that does not match the grammar.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string token)
        : Error(message), token_(std::move(token)) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

/// No action sequence within the step budget solves the task.
class UnsolvableError : public Error {
public:
    using Error::Error;
};

}  // namespace gridcomm
