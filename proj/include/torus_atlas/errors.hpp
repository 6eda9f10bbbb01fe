#pragma once

#include <stdexcept>
#include <string>

namespace torus_atlas {

// Input that violates a documented precondition (bad point, bad config).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPointError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Failures of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double time)
        : NumericalError(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SmallnessViolated : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GridTooCoarse : public NumericalError {
public:
    GridTooCoarse(const std::string& what, int suggested_n)
        : NumericalError(what), suggested_n_(suggested_n) {}
    int suggested_n() const { return suggested_n_; }

private:
    int suggested_n_;
};

class RefinementBudgetError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OverlapMismatch : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A cover that leaves part of the target region without any bump support.
class CoverageGap : public ValidationError {
public:
    CoverageGap(const std::string& what, double I, double E)
        : ValidationError(what), I_(I), E_(E) {}
    double witness_I() const { return I_; }
    double witness_E() const { return E_; }

private:
    double I_, E_;
};

}  // namespace torus_atlas
