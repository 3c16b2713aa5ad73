#pragma once

#include <stdexcept>
#include <string>

namespace contbell {

// Root of every exception the library throws. Callers that only need to
// distinguish "our" failures from std failures can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. p > 1).
class DomainError : public Error {
public:
    using Error::Error;
};

// API misuse: mismatched grids, wrong outcome-space kind, empty inputs.
class UsageError : public Error {
public:
    using Error::Error;
};

// User-supplied data (tables, files, matrices) failed validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The two eigenstate spectra of a measurement carry no distinguishing
// information, so the auxiliary functions cannot be built.
class SpectraIndistinguishable : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

// Gram matrix of the product basis is singular.
class DegenerateBasis : public Error {
public:
    using Error::Error;
};

// A basis-change matrix violates a^{+-} + a^{-+} = 0.
class ConditionViolated : public Error {
public:
    using Error::Error;
};

class InconsistentData : public Error {
public:
    InconsistentData(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace contbell
