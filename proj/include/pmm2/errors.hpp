#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pmm2 {

// Base of every error raised by the library. Callers that only care about
// "something went wrong with the data" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LengthError : public Error {
public:
    using Error::Error;
};

// Invalid distribution or configuration parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Model violates stationarity or invertibility.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

// Singular normal equations (e.g. a constant series).
class RankError : public Error {
public:
    using Error::Error;
};

// Moment set with nonpositive variance or nonpositive Delta.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

// Unreadable or malformed input data.
class DataError : public Error {
public:
    using Error::Error;
};

// Invalid experiment configuration; `path` locates the offending field as a
// JSON pointer (e.g. "/models/0/phi").
class ConfigError : public ParameterError {
public:
    ConfigError(std::string path, const std::string& message)
        : ParameterError(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace pmm2
