#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace tscal {

struct ExprNode;

/// Immutable real-valued function of the single variable t.
///
/// Cheap to copy (shared, immutable nodes). Builders fold constants, so a
/// Power's exponent is always a Constant node.
class Expr {
public:
    static Expr constant(double value);
    static Expr variable();

    const ExprNode& node() const noexcept { return *node_; }

    /// Returns the folded value when the whole tree is a constant.
    bool is_constant() const noexcept;
    double constant_value() const;

private:
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
    friend Expr make_node(ExprNode node);

    std::shared_ptr<const ExprNode> node_;
};

enum class BinaryOp { Add, Sub, Mul, Div };
enum class Func { Log, Exp, Sin, Cos, Sqrt, Abs };

struct Constant {
    double value;
};
struct Variable {};
struct Binary {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};
struct Power {
    Expr base;
    Expr exponent;
};
struct Apply {
    Func func;
    Expr arg;
};

struct ExprNode {
    std::variant<Constant, Variable, Binary, Power, Apply> v;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, double exponent);
Expr apply(Func func, const Expr& arg);

std::string_view func_name(Func func);

/// expr := term (("+"|"-") term)* ; term := factor (("*"|"/") factor)* ;
/// factor := unary ("^" unary)? ; unary := "-" unary | atom ;
/// atom := number | "t" | ident "(" expr ")" | "(" expr ")"
///
/// Throws SyntaxError (with byte offset and expected tokens) or
/// NonConstantExponent.
Expr parse_expr(std::string_view source);

/// Fully parenthesised text that parses back to a structurally equal tree.
std::string render(const Expr& e);

/// Throws DomainError instead of ever returning NaN or infinity.
double eval(const Expr& e, double t);

/// Exact classical derivative d/dt. Throws NotDifferentiable on abs.
Expr derivative(const Expr& e);

/// outer(inner(t)).
Expr compose(const Expr& outer, const Expr& inner);

bool structurally_equal(const Expr& a, const Expr& b);

using RealFunction = std::function<double(double)>;

inline RealFunction as_function(const Expr& e) {
    return [e](double t) { return eval(e, t); };
}

} // namespace tscal
