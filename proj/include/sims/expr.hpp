#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>

namespace sims {

using cplx = std::complex<double>;

enum class NodeType { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class FuncName { Exp, Log, Sqrt, Sin, Cos };

struct Node;
using Expr = std::shared_ptr<const Node>;

// Immutable tree. For Pow the exponent lives in `value`; Func and Neg use `lhs`.
struct Node {
    NodeType type;
    cplx value{};
    FuncName func = FuncName::Exp;
    Expr lhs, rhs;
};

// Smart constructors fold constants and trivial 0/1 cases.
Expr constant(cplx c);
Expr variable();
Expr neg(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr base, cplx exponent);
Expr func(FuncName f, Expr a);

Expr parse(std::string_view text);
cplx evaluate(const Expr& e, cplx x);
Expr differentiate(const Expr& e);
std::string to_string(const Expr& e);

bool is_constant(const Expr& e);
bool depends_on_x(const Expr& e);
std::size_t node_count(const Expr& e);

// Matches q = -f + i (or i - f, i + -f) and returns f, else nullptr.
Expr match_minus_f_plus_i(const Expr& q);

const char* func_name(FuncName f);

}  // namespace sims
