#include "sims/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "sims/errors.hpp"
#include "sims/numerics.hpp"

namespace sims {

namespace {

Expr make(NodeType t, cplx v = {}, Expr l = nullptr, Expr r = nullptr,
          FuncName f = FuncName::Exp) {
    auto n = std::make_shared<Node>();
    n->type = t;
    n->value = v;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    n->func = f;
    return n;
}

bool is_const(const Expr& e, cplx c) {
    return e->type == NodeType::Const && e->value == c;
}

// Integer exponent if the constant is a real integer of modest size.
bool small_integer(cplx c, long& n) {
    if (c.imag() != 0.0) return false;
    double r = c.real();
    if (std::fabs(r) > 64 || r != std::floor(r)) return false;
    n = static_cast<long>(r);
    return true;
}

// Exponent exactly 1/n for n in 2..64.
bool unit_fraction(cplx c, int& n) {
    if (c.imag() != 0.0 || c.real() <= 0.0 || c.real() > 0.5) return false;
    double inv = 1.0 / c.real();
    double k = std::round(inv);
    if (k < 2 || k > 64) return false;
    if (1.0 / k != c.real()) return false;
    n = static_cast<int>(k);
    return true;
}

cplx ipow(cplx z, long n, cplx x) {
    bool inv = n < 0;
    unsigned long m = static_cast<unsigned long>(inv ? -n : n);
    cplx result(1.0, 0.0), base = z;
    while (m) {
        if (m & 1u) result *= base;
        m >>= 1;
        if (m) base *= base;
    }
    if (inv) {
        if (result == cplx(0.0, 0.0)) throw DivisionByZero(x);
        result = 1.0 / result;
    }
    return result;
}

cplx eval_pow(cplx z, cplx c, cplx x) {
    long n;
    if (small_integer(c, n)) return ipow(z, n, x);
    int k;
    if (unit_fraction(c, k)) return principal_root(z, k);
    if (z == cplx(0.0, 0.0)) {
        if (c.real() > 0) return 0.0;
        throw DomainError(x, "non-positive power of zero");
    }
    return std::exp(c * principal_log(z));
}

cplx eval_func(FuncName f, cplx z, cplx x) {
    switch (f) {
        case FuncName::Exp: return std::exp(z);
        case FuncName::Log:
            if (z == cplx(0.0, 0.0)) throw DomainError(x, "log of zero");
            return principal_log(z);
        case FuncName::Sqrt: return principal_root(z, 2);
        case FuncName::Sin: return std::sin(z);
        case FuncName::Cos: return std::cos(z);
    }
    return {};
}

}  // namespace

const char* func_name(FuncName f) {
    switch (f) {
        case FuncName::Exp: return "exp";
        case FuncName::Log: return "log";
        case FuncName::Sqrt: return "sqrt";
        case FuncName::Sin: return "sin";
        case FuncName::Cos: return "cos";
    }
    return "?";
}

Expr constant(cplx c) { return make(NodeType::Const, c); }
Expr variable() { return make(NodeType::Var); }

Expr neg(Expr a) {
    if (a->type == NodeType::Const) return constant(-a->value);
    if (a->type == NodeType::Neg) return a->lhs;
    return make(NodeType::Neg, {}, std::move(a));
}

Expr add(Expr a, Expr b) {
    if (a->type == NodeType::Const && b->type == NodeType::Const) return constant(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make(NodeType::Add, {}, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
    if (a->type == NodeType::Const && b->type == NodeType::Const) return constant(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return make(NodeType::Sub, {}, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
    if (a->type == NodeType::Const && b->type == NodeType::Const) return constant(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return neg(std::move(b));
    if (is_const(b, -1.0)) return neg(std::move(a));
    return make(NodeType::Mul, {}, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
    if (b->type == NodeType::Const && b->value == cplx(0.0, 0.0)) {
        if (a->type == NodeType::Const) throw DivisionByZero(0.0);
        return make(NodeType::Div, {}, std::move(a), std::move(b));
    }
    if (a->type == NodeType::Const && b->type == NodeType::Const) return constant(a->value / b->value);
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    return make(NodeType::Div, {}, std::move(a), std::move(b));
}

Expr pow(Expr base, cplx exponent) {
    if (exponent == cplx(0.0, 0.0)) return constant(1.0);
    if (exponent == cplx(1.0, 0.0)) return base;
    if (base->type == NodeType::Const) return constant(eval_pow(base->value, exponent, 0.0));
    return make(NodeType::Pow, exponent, std::move(base));
}

Expr func(FuncName f, Expr a) {
    if (a->type == NodeType::Const) return constant(eval_func(f, a->value, 0.0));
    return make(NodeType::Func, {}, std::move(a), nullptr, f);
}

cplx evaluate(const Expr& e, cplx x) {
    switch (e->type) {
        case NodeType::Const: return e->value;
        case NodeType::Var: return x;
        case NodeType::Neg: return -evaluate(e->lhs, x);
        case NodeType::Add: return evaluate(e->lhs, x) + evaluate(e->rhs, x);
        case NodeType::Sub: return evaluate(e->lhs, x) - evaluate(e->rhs, x);
        case NodeType::Mul: return evaluate(e->lhs, x) * evaluate(e->rhs, x);
        case NodeType::Div: {
            cplx d = evaluate(e->rhs, x);
            if (d == cplx(0.0, 0.0)) throw DivisionByZero(x);
            return evaluate(e->lhs, x) / d;
        }
        case NodeType::Pow: return eval_pow(evaluate(e->lhs, x), e->value, x);
        case NodeType::Func: return eval_func(e->func, evaluate(e->lhs, x), x);
    }
    return {};
}

Expr differentiate(const Expr& e) {
    switch (e->type) {
        case NodeType::Const: return constant(0.0);
        case NodeType::Var: return constant(1.0);
        case NodeType::Neg: return neg(differentiate(e->lhs));
        case NodeType::Add: return add(differentiate(e->lhs), differentiate(e->rhs));
        case NodeType::Sub: return sub(differentiate(e->lhs), differentiate(e->rhs));
        case NodeType::Mul:
            return add(mul(differentiate(e->lhs), e->rhs), mul(e->lhs, differentiate(e->rhs)));
        case NodeType::Div: {
            // (f'g - fg') / g^2
            Expr num = sub(mul(differentiate(e->lhs), e->rhs), mul(e->lhs, differentiate(e->rhs)));
            return div(num, pow(e->rhs, 2.0));
        }
        case NodeType::Pow: {
            cplx c = e->value;
            return mul(mul(constant(c), pow(e->lhs, c - 1.0)), differentiate(e->lhs));
        }
        case NodeType::Func: {
            const Expr& g = e->lhs;
            Expr dg = differentiate(g);
            switch (e->func) {
                case FuncName::Exp: return mul(e, dg);
                case FuncName::Log: return div(dg, g);
                case FuncName::Sqrt: return div(dg, mul(constant(2.0), e));
                case FuncName::Sin: return mul(func(FuncName::Cos, g), dg);
                case FuncName::Cos: return neg(mul(func(FuncName::Sin, g), dg));
            }
        }
    }
    return nullptr;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_const(cplx c) {
    std::string s = "(" + fmt_double(c.real());
    double im = c.imag();
    if (std::signbit(im))
        s += "-" + fmt_double(-im) + "i)";
    else
        s += "+" + fmt_double(im) + "i)";
    return s;
}

}  // namespace

std::string to_string(const Expr& e) {
    switch (e->type) {
        case NodeType::Const: return fmt_const(e->value);
        case NodeType::Var: return "x";
        case NodeType::Neg: return "(-" + to_string(e->lhs) + ")";
        case NodeType::Add: return "(" + to_string(e->lhs) + "+" + to_string(e->rhs) + ")";
        case NodeType::Sub: return "(" + to_string(e->lhs) + "-" + to_string(e->rhs) + ")";
        case NodeType::Mul: return "(" + to_string(e->lhs) + "*" + to_string(e->rhs) + ")";
        case NodeType::Div: return "(" + to_string(e->lhs) + "/" + to_string(e->rhs) + ")";
        case NodeType::Pow: return "(" + to_string(e->lhs) + "^" + fmt_const(e->value) + ")";
        case NodeType::Func: return std::string(func_name(e->func)) + "(" + to_string(e->lhs) + ")";
    }
    return {};
}

bool is_constant(const Expr& e) { return e->type == NodeType::Const; }

bool depends_on_x(const Expr& e) {
    if (!e) return false;
    if (e->type == NodeType::Var) return true;
    return depends_on_x(e->lhs) || depends_on_x(e->rhs);
}

std::size_t node_count(const Expr& e) {
    if (!e) return 0;
    return 1 + node_count(e->lhs) + node_count(e->rhs);
}

Expr match_minus_f_plus_i(const Expr& q) {
    const cplx I(0.0, 1.0);
    if (q->type == NodeType::Add) {
        if (is_const(q->rhs, I) && q->lhs->type == NodeType::Neg) return q->lhs->lhs;
        if (is_const(q->lhs, I) && q->rhs->type == NodeType::Neg) return q->rhs->lhs;
    }
    if (q->type == NodeType::Sub && is_const(q->lhs, I)) return q->rhs;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('-'|'+') unary | power
//   power := primary ('^' unary)?
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : src_(s) {}

    Expr run() {
        Expr e = expr();
        skip();
        if (pos_ != src_.size()) fail("operator or end of input");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) const { throw ParseError(pos_, expected); }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+'))
                e = add(e, term());
            else if (accept('-'))
                e = sub(e, term());
            else
                return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) {
                e = mul(e, unary());
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (is_const(d, 0.0) && is_constant(e)) {
                    pos_ = at;
                    fail("non-zero divisor");
                }
                e = div(e, d);
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (accept('^')) {
            skip();
            std::size_t at = pos_;
            Expr ex = unary();
            if (!is_constant(ex)) {
                pos_ = at;
                fail("constant exponent");
            }
            return pow(base, ex->value);
        }
        return base;
    }

    Expr number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ - start == 1 && src_[start] == '.') {
            pos_ = start;
            fail("number");
        }
        // Exponent only when followed by a digit, so that "2e" is not swallowed.
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                pos_ = q;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double v = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr);
        if (pos_ < src_.size() && src_[pos_] == 'i' &&
            !(pos_ + 1 < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
            ++pos_;
            return constant(cplx(0.0, v));
        }
        return constant(v);
    }

    Expr primary() {
        skip();
        if (pos_ >= src_.size()) fail("expression");
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            if (!accept(')')) fail("')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            std::string_view id = src_.substr(start, pos_ - start);
            if (id == "x") return variable();
            if (id == "i") return constant(cplx(0.0, 1.0));
            if (id == "pi") return constant(M_PI);
            if (id == "e") return constant(M_E);
            FuncName f;
            if (id == "exp") f = FuncName::Exp;
            else if (id == "log") f = FuncName::Log;
            else if (id == "sqrt") f = FuncName::Sqrt;
            else if (id == "sin") f = FuncName::Sin;
            else if (id == "cos") f = FuncName::Cos;
            else {
                pos_ = start;
                fail("x, i, pi, e or a function name");
            }
            if (!accept('(')) fail("'('");
            Expr arg = expr();
            if (!accept(')')) fail("')'");
            return func(f, arg);
        }
        fail("expression");
    }
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace sims
