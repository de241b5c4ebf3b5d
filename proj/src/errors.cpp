#include "tscal/errors.hpp"

#include "tscal/format.hpp"

namespace tscal {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ", ";
        out += item;
    }
    return out;
}

} // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail)
    : ParseError("syntax error at offset " + std::to_string(offset) + ": " + detail +
                 (expected.empty() ? std::string{} : " (expected one of: " + join(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

NonConstantExponent::NonConstantExponent(std::size_t offset)
    : ParseError("exponent at offset " + std::to_string(offset) + " depends on t; only constant exponents are supported"),
      offset_(offset) {}

NotInScale::NotInScale(double t) : MathError("point " + format_real(t) + " is not in the time scale"), t_(t) {}

ReversedBounds::ReversedBounds(double a, double b)
    : MathError("reversed bounds: " + format_real(a) + " > " + format_real(b)) {}

DomainError::DomainError(std::string subexpression, double t, const std::string& reason)
    : MathError("domain error in '" + subexpression + "' at t=" + format_real(t) + ": " + reason),
      subexpression_(std::move(subexpression)),
      t_(t) {}

NotInKappa::NotInKappa(double t)
    : MathError("point " + format_real(t) + " is a left-scattered maximum (not in T^kappa)") {}

NonPositivePoint::NonPositivePoint(double t)
    : MathError("conformable derivative needs t > 0, got " + format_real(t)) {}

InternalDisagreement::InternalDisagreement(double primary, double cross_check)
    : MathError("higher-order paths disagree: " + format_real(primary) + " vs " + format_real(cross_check)) {}

UnknownLaw::UnknownLaw(const std::string& name) : Error("unknown law '" + name + "'") {}

} // namespace tscal
