#ifndef SAR_ERRORS_HPP
#define SAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sar {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A constructor or factory received an out-of-range parameter.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// Array lengths do not match the grid they are paired with.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A coordinate or probability lies outside its admissible interval.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A run configuration is inconsistent (bad key, violated constraint, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The propagation produced non-finite amplitudes.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// A transmitted-sector quantity was requested while T(t) is below the floor.
class UndefinedSectorError : public Error {
public:
    using Error::Error;
};

/// File system failure while emitting results.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace sar

#endif
