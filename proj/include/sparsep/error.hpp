#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sparsep
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file contents.
class FormatError : public Error
{
public:
    using Error::Error;
};

/// File cannot be opened, read, or written.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Argument outside the domain an operation accepts.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// The objective produced a non-finite value. Carries the last iterate
/// at which the objective was finite.
class OptimizationError : public Error
{
public:
    OptimizationError(const std::string& what, std::vector<double> last_valid)
        : Error(what), last_valid_(std::move(last_valid))
    {
    }

    const std::vector<double>& last_valid() const noexcept { return last_valid_; }

private:
    std::vector<double> last_valid_;
};

}  // namespace sparsep
