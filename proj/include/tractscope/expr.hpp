#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tractscope/log_complex.hpp"

namespace tractscope {

struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(const std::string& msg, size_t off)
        : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"),
          offset(off) {}
};

struct EvalError : std::runtime_error {
    enum class Kind { DivideByZero, Overflow, DomainGuard };
    Kind kind;
    EvalError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

enum class NodeKind {
    Variable,   // z
    Literal,    // complex constant
    Add,
    Sub,
    Mul,
    Div,
    Pow,        // integer power, exponent >= 0
    Exp,
    Sin,
    Cos,
    BESeries,   // m-th termwise derivative of g(z) = sum (z/2^k)^(2^k); m = order
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    Complex lit{};          // Literal
    int ipow = 0;           // Pow exponent
    int order = 0;          // BESeries derivative order
    ExprPtr lhs, rhs;       // children (rhs unused for unary)
};

// Immutable parsed expression tree.
class Expr {
public:
    Expr() = default;
    explicit Expr(ExprPtr root) : root_(std::move(root)) {}

    bool valid() const { return root_ != nullptr; }
    const ExprPtr& root() const { return root_; }

    Complex eval(const Complex& z) const;
    LogComplex eval_log(const Complex& z) const;
    Expr derivative() const;

    // Same zero set, cheaper winding: drops exp() factors (which never
    // vanish) from top-level products and quotients.
    Expr strip_nonvanishing_factors() const;

    std::string to_string() const;

private:
    ExprPtr root_;
};

Expr parse(const std::string& source);

// Node constructors with light constant folding (used by the parser and
// the symbolic derivative).
ExprPtr make_lit(const Complex& c);
ExprPtr make_var();
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, int k);
ExprPtr make_fn(NodeKind kind, ExprPtr a);
ExprPtr make_beseries(ExprPtr a, int order);

// The Bergweiler-Eremenko series and its termwise derivatives,
// evaluated with the quantified tail bound (see be.hpp for the
// series-level API).
Complex eval_beseries(const Complex& z, int order, double tol = 1e-15);

} // namespace tractscope
