#include "tractscope/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace tractscope {

namespace {

bool is_lit(const ExprPtr& e, const Complex& c) {
    return e->kind == NodeKind::Literal && e->lit == c;
}

} // namespace

ExprPtr make_lit(const Complex& c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Literal;
    n->lit = c;
    return n;
}

ExprPtr make_var() {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Variable;
    return n;
}

static ExprPtr make_binary(NodeKind k, ExprPtr a, ExprPtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

ExprPtr make_add(ExprPtr a, ExprPtr b) {
    if (is_lit(a, 0.0)) return b;
    if (is_lit(b, 0.0)) return a;
    if (a->kind == NodeKind::Literal && b->kind == NodeKind::Literal)
        return make_lit(a->lit + b->lit);
    return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
    if (is_lit(b, 0.0)) return a;
    if (a->kind == NodeKind::Literal && b->kind == NodeKind::Literal)
        return make_lit(a->lit - b->lit);
    return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
    if (is_lit(a, 0.0) || is_lit(b, 0.0)) return make_lit(0.0);
    if (is_lit(a, 1.0)) return b;
    if (is_lit(b, 1.0)) return a;
    if (a->kind == NodeKind::Literal && b->kind == NodeKind::Literal)
        return make_lit(a->lit * b->lit);
    return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
    if (is_lit(a, 0.0)) return make_lit(0.0);
    if (is_lit(b, 1.0)) return a;
    return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

ExprPtr make_pow(ExprPtr a, int k) {
    if (k == 0) return make_lit(1.0);
    if (k == 1) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Pow;
    n->ipow = k;
    n->lhs = std::move(a);
    return n;
}

ExprPtr make_fn(NodeKind kind, ExprPtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(a);
    return n;
}

ExprPtr make_beseries(ExprPtr a, int order) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::BESeries;
    n->order = order;
    n->lhs = std::move(a);
    return n;
}

// ---------------------------------------------------------------------------
// BE series: g(z) = sum_{k>=1} (z/2^k)^(2^k) and termwise derivatives.
// Truncation rule: cut at the first K with 2^(K+1) >= 2|z| whose tail bound
// 2*(|z|/2^(K+1))^(2^(K+1)) is below tol.
// ---------------------------------------------------------------------------

Complex eval_beseries(const Complex& z, int order, double tol) {
    double r = std::abs(z);
    if (r > 700.0)
        throw EvalError(EvalError::Kind::DomainGuard,
                        "beg(z) requires |z| <= 700 to stay within double range");
    int K = 1;
    while ((1 << (K + 1)) < 2.0 * r) ++K;
    // extend until the tail bound is honest
    while (K < 40) {
        double ratio = r / std::pow(2.0, K + 1);
        double tail = 2.0 * std::pow(ratio, std::pow(2.0, K + 1));
        if (tail < tol) break;
        ++K;
    }
    Complex sum(0.0, 0.0);
    for (int k = 1; k <= K; ++k) {
        double ek = std::pow(2.0, k);
        if (ek < order) continue;
        // d^m/dz^m (z/2^k)^(2^k) = ffact(2^k, m) * (z/2^k)^(2^k) / z^m
        Complex base = std::pow(z / std::pow(2.0, k), ek);
        double ffact = 1.0;
        for (int m = 0; m < order; ++m) ffact *= (ek - m);
        if (z == Complex(0.0, 0.0)) {
            if (static_cast<int>(ek) == order)
                sum += ffact / std::pow(2.0, static_cast<double>(k) * ek);
            continue;
        }
        Complex zm = std::pow(z, order);
        sum += ffact * base / zm;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Plain evaluation
// ---------------------------------------------------------------------------

static Complex eval_node(const ExprNode* n, const Complex& z) {
    switch (n->kind) {
        case NodeKind::Variable: return z;
        case NodeKind::Literal: return n->lit;
        case NodeKind::Add: return eval_node(n->lhs.get(), z) + eval_node(n->rhs.get(), z);
        case NodeKind::Sub: return eval_node(n->lhs.get(), z) - eval_node(n->rhs.get(), z);
        case NodeKind::Mul: return eval_node(n->lhs.get(), z) * eval_node(n->rhs.get(), z);
        case NodeKind::Div: {
            Complex a = eval_node(n->lhs.get(), z);
            Complex b = eval_node(n->rhs.get(), z);
            if (b == Complex(0.0, 0.0))
                throw EvalError(EvalError::Kind::DivideByZero, "division by zero");
            return a / b;
        }
        case NodeKind::Pow: {
            Complex a = eval_node(n->lhs.get(), z);
            Complex r(1.0, 0.0);
            Complex base = a;
            int k = n->ipow;
            while (k > 0) {
                if (k & 1) r *= base;
                base *= base;
                k >>= 1;
            }
            return r;
        }
        case NodeKind::Exp: return std::exp(eval_node(n->lhs.get(), z));
        case NodeKind::Sin: return std::sin(eval_node(n->lhs.get(), z));
        case NodeKind::Cos: return std::cos(eval_node(n->lhs.get(), z));
        case NodeKind::BESeries: return eval_beseries(eval_node(n->lhs.get(), z), n->order);
    }
    return Complex(0.0, 0.0);
}

Complex Expr::eval(const Complex& z) const { return eval_node(root_.get(), z); }

// ---------------------------------------------------------------------------
// Log-space evaluation
// ---------------------------------------------------------------------------

static LogComplex eval_log_node(const ExprNode* n, const Complex& z);

// Child value as an ordinary complex number, needed where the recursion
// leaves log space (arguments of exp/sin/cos/beg).
static Complex child_value(const ExprNode* n, const Complex& z) {
    LogComplex lc = eval_log_node(n, z);
    if (lc.is_zero) return Complex(0.0, 0.0);
    if (lc.log_mod > 700.0)
        throw EvalError(EvalError::Kind::Overflow,
                        "intermediate value exceeds double range");
    return lc.value();
}

static LogComplex eval_log_node(const ExprNode* n, const Complex& z) {
    switch (n->kind) {
        case NodeKind::Variable: return LogComplex::from_value(z);
        case NodeKind::Literal: return LogComplex::from_value(n->lit);
        case NodeKind::Add:
            return lc_add(eval_log_node(n->lhs.get(), z), eval_log_node(n->rhs.get(), z));
        case NodeKind::Sub:
            return lc_sub(eval_log_node(n->lhs.get(), z), eval_log_node(n->rhs.get(), z));
        case NodeKind::Mul:
            return lc_mul(eval_log_node(n->lhs.get(), z), eval_log_node(n->rhs.get(), z));
        case NodeKind::Div: {
            LogComplex b = eval_log_node(n->rhs.get(), z);
            if (b.is_zero)
                throw EvalError(EvalError::Kind::DivideByZero, "division by zero");
            return lc_div(eval_log_node(n->lhs.get(), z), b);
        }
        case NodeKind::Pow:
            return lc_pow(eval_log_node(n->lhs.get(), z), n->ipow);
        case NodeKind::Exp: {
            Complex w = child_value(n->lhs.get(), z);
            return LogComplex{w.real(), w.imag(), false};
        }
        case NodeKind::Sin:
        case NodeKind::Cos: {
            Complex w = child_value(n->lhs.get(), z);
            if (std::abs(w.imag()) > 20.0) {
                // exp-form: sinh overflows long before the log of |sin| does
                LogComplex a{-w.imag(), w.real(), false};   // e^{iw}
                LogComplex b{w.imag(), -w.real(), false};   // e^{-iw}
                if (n->kind == NodeKind::Sin) {
                    LogComplex s = lc_sub(a, b); // divide by 2i
                    if (s.is_zero) return s;
                    return LogComplex{s.log_mod - M_LN2, s.arg - M_PI / 2.0, false};
                }
                LogComplex c = lc_add(a, b);
                if (c.is_zero) return c;
                return LogComplex{c.log_mod - M_LN2, c.arg, false};
            }
            return LogComplex::from_value(n->kind == NodeKind::Sin ? std::sin(w)
                                                                   : std::cos(w));
        }
        case NodeKind::BESeries:
            return LogComplex::from_value(
                eval_beseries(child_value(n->lhs.get(), z), n->order));
    }
    return LogComplex::zero();
}

LogComplex Expr::eval_log(const Complex& z) const { return eval_log_node(root_.get(), z); }

// ---------------------------------------------------------------------------
// Symbolic derivative
// ---------------------------------------------------------------------------

static ExprPtr diff(const ExprPtr& n) {
    switch (n->kind) {
        case NodeKind::Variable: return make_lit(1.0);
        case NodeKind::Literal: return make_lit(0.0);
        case NodeKind::Add: return make_add(diff(n->lhs), diff(n->rhs));
        case NodeKind::Sub: return make_sub(diff(n->lhs), diff(n->rhs));
        case NodeKind::Mul:
            return make_add(make_mul(diff(n->lhs), n->rhs),
                            make_mul(n->lhs, diff(n->rhs)));
        case NodeKind::Div:
            return make_div(make_sub(make_mul(diff(n->lhs), n->rhs),
                                     make_mul(n->lhs, diff(n->rhs))),
                            make_pow(n->rhs, 2));
        case NodeKind::Pow:
            return make_mul(make_mul(make_lit(static_cast<double>(n->ipow)),
                                     make_pow(n->lhs, n->ipow - 1)),
                            diff(n->lhs));
        case NodeKind::Exp:
            return make_mul(diff(n->lhs), make_fn(NodeKind::Exp, n->lhs));
        case NodeKind::Sin:
            return make_mul(diff(n->lhs), make_fn(NodeKind::Cos, n->lhs));
        case NodeKind::Cos:
            return make_mul(make_mul(make_lit(-1.0), diff(n->lhs)),
                            make_fn(NodeKind::Sin, n->lhs));
        case NodeKind::BESeries:
            return make_mul(diff(n->lhs), make_beseries(n->lhs, n->order + 1));
    }
    return make_lit(0.0);
}

Expr Expr::derivative() const { return Expr(diff(root_)); }

// ---------------------------------------------------------------------------
// Nonvanishing-factor removal
// ---------------------------------------------------------------------------

static bool never_vanishes(const ExprPtr& n) {
    if (n->kind == NodeKind::Exp) return true;
    if (n->kind == NodeKind::Literal) return n->lit != Complex(0.0, 0.0);
    return false;
}

static ExprPtr strip(const ExprPtr& n) {
    if (n->kind == NodeKind::Mul) {
        ExprPtr a = strip(n->lhs), b = strip(n->rhs);
        if (never_vanishes(a)) return b;
        if (never_vanishes(b)) return a;
        return make_binary(NodeKind::Mul, a, b);
    }
    if (n->kind == NodeKind::Div) {
        ExprPtr a = strip(n->lhs);
        if (never_vanishes(a)) return make_lit(1.0);
        return make_binary(NodeKind::Div, a, n->rhs);
    }
    return n;
}

Expr Expr::strip_nonvanishing_factors() const {
    ExprPtr s = strip(root_);
    if (never_vanishes(s)) return Expr(make_lit(1.0));
    return Expr(s);
}

// ---------------------------------------------------------------------------
// Printing (reports and diagnostics)
// ---------------------------------------------------------------------------

static void print_node(const ExprPtr& n, std::ostream& os) {
    switch (n->kind) {
        case NodeKind::Variable: os << "z"; break;
        case NodeKind::Literal: {
            if (n->lit.imag() == 0.0) os << n->lit.real();
            else if (n->lit.real() == 0.0) os << n->lit.imag() << "i";
            else os << "(" << n->lit.real() << "+" << n->lit.imag() << "i)";
            break;
        }
        case NodeKind::Add: os << "("; print_node(n->lhs, os); os << "+"; print_node(n->rhs, os); os << ")"; break;
        case NodeKind::Sub: os << "("; print_node(n->lhs, os); os << "-"; print_node(n->rhs, os); os << ")"; break;
        case NodeKind::Mul: os << "("; print_node(n->lhs, os); os << "*"; print_node(n->rhs, os); os << ")"; break;
        case NodeKind::Div: os << "("; print_node(n->lhs, os); os << "/"; print_node(n->rhs, os); os << ")"; break;
        case NodeKind::Pow: print_node(n->lhs, os); os << "^" << n->ipow; break;
        case NodeKind::Exp: os << "exp("; print_node(n->lhs, os); os << ")"; break;
        case NodeKind::Sin: os << "sin("; print_node(n->lhs, os); os << ")"; break;
        case NodeKind::Cos: os << "cos("; print_node(n->lhs, os); os << ")"; break;
        case NodeKind::BESeries:
            os << (n->order == 0 ? "beg(" : ("beg_d" + std::to_string(n->order) + "("));
            print_node(n->lhs, os);
            os << ")";
            break;
    }
}

std::string Expr::to_string() const {
    std::ostringstream os;
    print_node(root_, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over
//   expr   := term {(+|-) term}
//   term   := factor {(*|/) factor}
//   factor := '-' factor | postfix
//   postfix:= primary ['^' integer]
//   primary:= number['i'] | 'i' | 'z' | name '(' expr ')' | '(' expr ')'
// '^' binds tighter than unary minus; exponents are nonnegative integers.
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(const std::string& src) : s_(src) {}

    ExprPtr run() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_ + 1);
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) { ++pos_; return true; }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected ") + what, pos_ + 1);
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            if (accept('+')) e = make_add(e, parse_term());
            else if (accept('-')) e = make_sub(e, parse_term());
            else return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (accept('*')) e = make_mul(e, parse_factor());
            else if (accept('/')) e = make_div(e, parse_factor());
            else return e;
        }
    }

    ExprPtr parse_factor() {
        if (accept('-')) return make_sub(make_lit(0.0), parse_factor());
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        if (accept('^')) {
            skip_ws();
            size_t start = pos_;
            if (pos_ < s_.size() && s_[pos_] == '-')
                throw ParseError("exponent must be a nonnegative integer", pos_ + 1);
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                throw ParseError("exponent must be a nonnegative integer", pos_ + 1);
            long v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                v = v * 10 + (s_[pos_] - '0');
                if (v > 1000000) throw ParseError("exponent too large", start + 1);
                ++pos_;
            }
            if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
                throw ParseError("exponent must be a nonnegative integer", pos_ + 1);
            e = make_pow(e, static_cast<int>(v));
        }
        return e;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_ + 1);
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_expr();
            expect(')', "')'");
            return e;
        }
        throw ParseError("unexpected character", pos_ + 1);
    }

    ExprPtr parse_number() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save; // 'e' was not an exponent
            }
        }
        if (pos_ == start) throw ParseError("malformed number", start + 1);
        double v = std::stod(s_.substr(start, pos_ - start));
        if (pos_ < s_.size() && s_[pos_] == 'i') {
            ++pos_;
            return make_lit(Complex(0.0, v));
        }
        return make_lit(Complex(v, 0.0));
    }

    ExprPtr parse_name() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "z") return make_var();
        if (name == "i") return make_lit(Complex(0.0, 1.0));
        NodeKind fn;
        if (name == "exp") fn = NodeKind::Exp;
        else if (name == "sin") fn = NodeKind::Sin;
        else if (name == "cos") fn = NodeKind::Cos;
        else if (name == "beg") fn = NodeKind::BESeries;
        else throw ParseError("unknown identifier '" + name + "'", start + 1);
        expect('(', "'('");
        ExprPtr arg = parse_expr();
        expect(')', "')'");
        if (fn == NodeKind::BESeries) return make_beseries(arg, 0);
        return make_fn(fn, arg);
    }
};

} // namespace

Expr parse(const std::string& source) {
    Parser p(source);
    return Expr(p.run());
}

} // namespace tractscope
