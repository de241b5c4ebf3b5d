#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tscal {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user text: expressions and scale descriptions.
class ParseError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public ParseError {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class NonConstantExponent : public ParseError {
public:
    explicit NonConstantExponent(std::size_t offset);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ScaleSpecError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Mathematical failures: points outside the scale, domain violations,
/// non-convergent limits.
class MathError : public Error {
public:
    using Error::Error;
};

class NotInScale : public MathError {
public:
    explicit NotInScale(double t);
    double point() const noexcept { return t_; }

private:
    double t_;
};

class ReversedBounds : public MathError {
public:
    ReversedBounds(double a, double b);
};

class DecompositionTooLarge : public MathError {
public:
    using MathError::MathError;
};

class DomainError : public MathError {
public:
    DomainError(std::string subexpression, double t, const std::string& reason);

    const std::string& subexpression() const noexcept { return subexpression_; }
    double point() const noexcept { return t_; }

private:
    std::string subexpression_;
    double t_;
};

class NotDifferentiable : public MathError {
public:
    using MathError::MathError;
};

class NotInKappa : public MathError {
public:
    explicit NotInKappa(double t);
};

class NonPositivePoint : public MathError {
public:
    explicit NonPositivePoint(double t);
};

class LimitDiverged : public MathError {
public:
    using MathError::MathError;
};

class ZeroNotInScale : public MathError {
public:
    using MathError::MathError;
};

class InternalDisagreement : public MathError {
public:
    InternalDisagreement(double primary, double cross_check);
};

class PoleAtPoint : public MathError {
public:
    using MathError::MathError;
};

class NoWitnessFound : public MathError {
public:
    using MathError::MathError;
};

class QuadratureBudgetExceeded : public MathError {
public:
    using MathError::MathError;
};

class EndpointSingularity : public MathError {
public:
    using MathError::MathError;
};

/// Not a math failure: the caller named a verification law that does not exist.
class UnknownLaw : public Error {
public:
    explicit UnknownLaw(const std::string& name);
};

} // namespace tscal
