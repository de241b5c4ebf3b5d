#include "tscal/expr.hpp"

#include "tscal/errors.hpp"
#include "tscal/format.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace tscal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double apply_op(BinaryOp op, double a, double b) {
    switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div: return a / b;
    }
    return std::nan("");
}

double apply_func(Func f, double x) {
    switch (f) {
    case Func::Log: return std::log(x);
    case Func::Exp: return std::exp(x);
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Sqrt: return std::sqrt(x);
    case Func::Abs: return std::abs(x);
    }
    return std::nan("");
}

char op_char(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    }
    return '?';
}

bool is_integer(double x) { return std::floor(x) == x; }

} // namespace

Expr make_node(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

Expr Expr::constant(double value) { return make_node({Constant{value}}); }
Expr Expr::variable() { return make_node({Variable{}}); }

bool Expr::is_constant() const noexcept { return std::holds_alternative<Constant>(node_->v); }

double Expr::constant_value() const { return std::get<Constant>(node_->v).value; }

namespace {

Expr binary(BinaryOp op, const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        const double v = apply_op(op, a.constant_value(), b.constant_value());
        if (std::isfinite(v)) return Expr::constant(v);
    }
    return make_node({Binary{op, a, b}});
}

} // namespace

Expr operator+(const Expr& a, const Expr& b) { return binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return binary(BinaryOp::Div, a, b); }

Expr pow(const Expr& base, double exponent) {
    if (base.is_constant()) {
        const double v = std::pow(base.constant_value(), exponent);
        if (std::isfinite(v)) return Expr::constant(v);
    }
    return make_node({Power{base, Expr::constant(exponent)}});
}

Expr apply(Func func, const Expr& arg) {
    if (arg.is_constant()) {
        const double v = apply_func(func, arg.constant_value());
        if (std::isfinite(v)) return Expr::constant(v);
    }
    return make_node({Apply{func, arg}});
}

std::string_view func_name(Func func) {
    switch (func) {
    case Func::Log: return "log";
    case Func::Exp: return "exp";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        skip_ws();
        if (pos_ >= src_.size()) fail({"expression"}, "empty input");
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) fail({"+", "-", "*", "/", "^", "end of input"}, unexpected());
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
        throw SyntaxError(pos_, std::move(expected), detail);
    }

    std::string unexpected() const {
        if (pos_ >= src_.size()) return "unexpected end of input";
        return std::string("unexpected '") + src_[pos_] + "'";
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = lhs + parse_term();
            else if (accept('-'))
                lhs = lhs - parse_term();
            else
                return lhs;
        }
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = lhs * parse_factor();
            else if (accept('/'))
                lhs = lhs / parse_factor();
            else
                return lhs;
        }
    }

    Expr parse_factor() {
        Expr base = parse_unary();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t exponent_at = pos_;
        Expr exponent = parse_unary();
        if (!exponent.is_constant()) {
            if (mentions_variable(exponent)) throw NonConstantExponent(exponent_at);
            throw SyntaxError(exponent_at, {}, "exponent does not fold to a finite constant");
        }
        return pow(base, exponent.constant_value());
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::constant(-1.0) * parse_unary();
        return parse_atom();
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail({"number", "t", "function", "(", "-"}, "unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            Expr inner = parse_expr();
            if (!accept(')')) fail({")"}, unexpected());
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            const std::string_view ident = src_.substr(start, pos_ - start);
            if (ident == "t") return Expr::variable();
            for (Func f : {Func::Log, Func::Exp, Func::Sin, Func::Cos, Func::Sqrt, Func::Abs}) {
                if (ident != func_name(f)) continue;
                if (!accept('(')) fail({"("}, unexpected());
                Expr arg = parse_expr();
                if (!accept(')')) fail({")"}, unexpected());
                return apply(f, arg);
            }
            pos_ = start;
            fail({"t", "log", "exp", "sin", "cos", "sqrt", "abs"}, "unknown identifier '" + std::string(ident) + "'");
        }
        fail({"number", "t", "function", "(", "-"}, unexpected());
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [this] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            pos_ = start;
            fail({"number"}, "malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail({"digit"}, "malformed exponent in number");
        }
        const std::string text(src_.substr(start, pos_ - start));
        const double v = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(v)) {
            pos_ = start;
            fail({}, "number out of range");
        }
        return Expr::constant(v);
    }

    static bool mentions_variable(const Expr& e) {
        return std::visit(overloaded{
                              [](const Constant&) { return false; },
                              [](const Variable&) { return true; },
                              [](const Binary& b) { return mentions_variable(b.lhs) || mentions_variable(b.rhs); },
                              [](const Power& p) { return mentions_variable(p.base); },
                              [](const Apply& a) { return mentions_variable(a.arg); },
                          },
                          e.node().v);
    }
};

} // namespace

Expr parse_expr(std::string_view source) { return Parser(source).parse(); }

std::string render(const Expr& e) {
    return std::visit(overloaded{
                          [](const Constant& c) {
                              const std::string s = format_real(c.value);
                              return std::signbit(c.value) ? "(" + s + ")" : s;
                          },
                          [](const Variable&) { return std::string("t"); },
                          [](const Binary& b) {
                              return "(" + render(b.lhs) + op_char(b.op) + render(b.rhs) + ")";
                          },
                          [](const Power& p) { return "(" + render(p.base) + "^" + render(p.exponent) + ")"; },
                          [](const Apply& a) { return std::string(func_name(a.func)) + "(" + render(a.arg) + ")"; },
                      },
                      e.node().v);
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

double checked(double v, const Expr& e, double t, const char* reason) {
    if (!std::isfinite(v)) throw DomainError(render(e), t, reason);
    return v;
}

} // namespace

double eval(const Expr& e, double t) {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [t](const Variable&) { return t; },
            [&](const Binary& b) {
                const double l = eval(b.lhs, t);
                const double r = eval(b.rhs, t);
                if (b.op == BinaryOp::Div && r == 0.0) throw DomainError(render(e), t, "division by zero");
                return checked(apply_op(b.op, l, r), e, t, "overflow");
            },
            [&](const Power& p) {
                const double base = eval(p.base, t);
                const double k = p.exponent.constant_value();
                if (base < 0 && !is_integer(k))
                    throw DomainError(render(e), t, "negative base with non-integer exponent");
                if (base == 0 && k < 0) throw DomainError(render(e), t, "zero raised to a negative power");
                return checked(std::pow(base, k), e, t, "overflow");
            },
            [&](const Apply& a) {
                const double x = eval(a.arg, t);
                if (a.func == Func::Log && x <= 0) throw DomainError(render(e), t, "log of non-positive value");
                if (a.func == Func::Sqrt && x < 0) throw DomainError(render(e), t, "sqrt of negative value");
                return checked(apply_func(a.func, x), e, t, "overflow");
            },
        },
        e.node().v);
}

// ---------------------------------------------------------------------------
// symbolic differentiation

namespace {

bool is_value(const Expr& e, double v) { return e.is_constant() && e.constant_value() == v; }

Expr sum(const Expr& a, const Expr& b) {
    if (is_value(a, 0)) return b;
    if (is_value(b, 0)) return a;
    return a + b;
}

Expr difference(const Expr& a, const Expr& b) {
    if (is_value(b, 0)) return a;
    if (is_value(a, 0)) return Expr::constant(-1) * b;
    return a - b;
}

Expr product(const Expr& a, const Expr& b) {
    if (is_value(a, 0) || is_value(b, 0)) return Expr::constant(0);
    if (is_value(a, 1)) return b;
    if (is_value(b, 1)) return a;
    return a * b;
}

Expr quotient(const Expr& a, const Expr& b) {
    if (is_value(a, 0)) return Expr::constant(0);
    if (is_value(b, 1)) return a;
    return a / b;
}

Expr power(const Expr& base, double k) {
    if (k == 0) return Expr::constant(1);
    if (k == 1) return base;
    return pow(base, k);
}

} // namespace

Expr derivative(const Expr& e) {
    return std::visit(
        overloaded{
            [](const Constant&) { return Expr::constant(0); },
            [](const Variable&) { return Expr::constant(1); },
            [](const Binary& b) {
                const Expr dl = derivative(b.lhs);
                const Expr dr = derivative(b.rhs);
                switch (b.op) {
                case BinaryOp::Add: return sum(dl, dr);
                case BinaryOp::Sub: return difference(dl, dr);
                case BinaryOp::Mul: return sum(product(dl, b.rhs), product(b.lhs, dr));
                case BinaryOp::Div:
                    return quotient(difference(product(dl, b.rhs), product(b.lhs, dr)), power(b.rhs, 2));
                }
                return Expr::constant(0);
            },
            [](const Power& p) {
                const double k = p.exponent.constant_value();
                if (k == 0) return Expr::constant(0);
                return product(product(Expr::constant(k), power(p.base, k - 1)), derivative(p.base));
            },
            [&e](const Apply& a) {
                const Expr du = derivative(a.arg);
                switch (a.func) {
                case Func::Log: return quotient(du, a.arg);
                case Func::Exp: return product(e, du);
                case Func::Sin: return product(apply(Func::Cos, a.arg), du);
                case Func::Cos: return product(Expr::constant(-1), product(apply(Func::Sin, a.arg), du));
                case Func::Sqrt: return quotient(du, product(Expr::constant(2), e));
                case Func::Abs: throw NotDifferentiable("abs(" + render(a.arg) + ") is not continuously differentiable");
                }
                return Expr::constant(0);
            },
        },
        e.node().v);
}

Expr compose(const Expr& outer, const Expr& inner) {
    return std::visit(overloaded{
                          [&outer](const Constant&) { return outer; },
                          [&inner](const Variable&) { return inner; },
                          [&inner](const Binary& b) {
                              return binary(b.op, compose(b.lhs, inner), compose(b.rhs, inner));
                          },
                          [&inner](const Power& p) { return pow(compose(p.base, inner), p.exponent.constant_value()); },
                          [&inner](const Apply& a) { return apply(a.func, compose(a.arg, inner)); },
                      },
                      outer.node().v);
}

bool structurally_equal(const Expr& a, const Expr& b) {
    const auto& x = a.node().v;
    const auto& y = b.node().v;
    if (x.index() != y.index()) return false;
    return std::visit(
        overloaded{
            [&y](const Constant& c) { return c.value == std::get<Constant>(y).value; },
            [](const Variable&) { return true; },
            [&y](const Binary& l) {
                const auto& r = std::get<Binary>(y);
                return l.op == r.op && structurally_equal(l.lhs, r.lhs) && structurally_equal(l.rhs, r.rhs);
            },
            [&y](const Power& l) {
                const auto& r = std::get<Power>(y);
                return structurally_equal(l.base, r.base) && structurally_equal(l.exponent, r.exponent);
            },
            [&y](const Apply& l) {
                const auto& r = std::get<Apply>(y);
                return l.func == r.func && structurally_equal(l.arg, r.arg);
            },
        },
        x);
}

} // namespace tscal
