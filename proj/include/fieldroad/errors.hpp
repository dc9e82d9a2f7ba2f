#pragma once

#include <stdexcept>
#include <string>

namespace fieldroad {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

/// Input outside the mathematical domain of an operation (t <= 0, s < 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

/// No sign change of f_s found below the search cap.
class BracketError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "bracket_error"; }
};

/// Two independent routes disagree beyond tolerance. Not recoverable.
class InconsistencyError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "inconsistency_error"; }
};

/// Invalid configuration of a grid, solver or CLI run.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
};

/// Numerical scheme left its stability region or produced non-finite values.
class StabilityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "stability_error"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io_error"; }
};

}  // namespace fieldroad
