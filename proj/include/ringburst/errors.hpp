#pragma once

#include <stdexcept>
#include <string>

namespace ringburst {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical configuration (violated invariant, missing field, ...).
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Angular-momentum index outside the truncated basis.
class RangeError : public Error
{
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Formula applied outside its physical validity window.
class ValidityError : public Error
{
public:
    using Error::Error;
};

/// Kick too strong for the basis; carries the cutoff that would suffice.
class TruncationError : public Error
{
public:
    TruncationError(const std::string& what, int required_cutoff)
        : Error(what), m_required(required_cutoff)
    {
    }
    int required_cutoff() const { return m_required; }

private:
    int m_required;
};

/// Integration step too coarse; carries the largest acceptable step.
class StepSizeError : public Error
{
public:
    StepSizeError(const std::string& what, double suggested)
        : Error(what), m_suggested(suggested)
    {
    }
    double suggested_step() const { return m_suggested; }

private:
    double m_suggested;
};

class UnsupportedError : public Error
{
public:
    using Error::Error;
};

} // namespace ringburst
