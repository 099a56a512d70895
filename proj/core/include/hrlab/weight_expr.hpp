#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hrlab::expr {

// Radial weight expressions r -> V(r) over the grammar
//   {numbers, r, N, R, b, c, + - * / ^, exp, parentheses}.
// ASTs are immutable after construction and safe to share across threads.

enum class NodeKind {
    Constant,
    Parameter,
    Radial,   // the variable r
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
};

enum class ParamSymbol { N, R, b, c };

const char* param_name(ParamSymbol s);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

inline constexpr std::size_t kNoSourcePos = static_cast<std::size_t>(-1);

struct ExprNode {
    NodeKind kind;
    double value = 0.0;                      // Constant
    ParamSymbol param = ParamSymbol::N;      // Parameter
    ExprPtr lhs;                             // unary operand or left child
    ExprPtr rhs;                             // right child (binary only)
    std::size_t src_pos = kNoSourcePos;      // char offset in the source text
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t p)
        : std::runtime_error(msg), pos(p) {}
    std::size_t pos;
};

struct EvalError : std::runtime_error {
    EvalError(const std::string& msg, std::size_t p)
        : std::runtime_error(msg), pos(p) {}
    std::size_t pos;
};

// Late-bound parameter values. One AST serves sweeps over N, R, b, c.
class ParamBinding {
public:
    ParamBinding() = default;

    ParamBinding& set_n(int n);
    ParamBinding& set_r(double radius);   // radius in (0, inf]; inf allowed
    ParamBinding& set_b(double b);
    ParamBinding& set_c(double c);

    std::optional<double> get(ParamSymbol s) const;
    bool has(ParamSymbol s) const { return get(s).has_value(); }

    std::optional<int> n() const { return n_; }
    std::optional<double> radius() const { return radius_; }
    std::optional<double> b() const { return b_; }
    std::optional<double> c() const { return c_; }

private:
    std::optional<int> n_;
    std::optional<double> radius_;
    std::optional<double> b_;
    std::optional<double> c_;
};

class WeightExpr {
public:
    WeightExpr() = default;
    explicit WeightExpr(ExprPtr root) : root_(std::move(root)) {}

    // Throws ParseError with a character position on malformed input,
    // unknown identifiers, and r-dependent exponents.
    static WeightExpr parse(std::string_view text);
    static WeightExpr constant(double v);

    bool empty() const { return root_ == nullptr; }
    const ExprPtr& root() const { return root_; }

    // Exact-arithmetic semantics up to floating rounding; never clamps.
    // Throws EvalError (with source location) on division by zero,
    // fractional powers of negative bases, unbound parameters, and
    // non-finite intermediate results.
    double evaluate(double r, const ParamBinding& binding) const;

    // Symbolic d/dr. The grammar is closed under differentiation because
    // exponents are restricted to r-free subtrees at parse time.
    WeightExpr derivative() const;

    // Canonical fully parenthesized form; parse(to_string()) reproduces
    // a structurally equal AST.
    std::string to_string() const;

    bool structurally_equal(const WeightExpr& other) const;

    std::vector<ParamSymbol> free_params() const;

    // True when no Radial node occurs in the tree.
    bool is_r_free() const;

private:
    ExprPtr root_;
};

// Structural expression algebra (with light constant folding), used to build
// derived weights such as the dimension-shifted pair slot and the pointwise
// admissibility expressions.
WeightExpr radial_var();
WeightExpr parameter(ParamSymbol s);
WeightExpr operator+(const WeightExpr& a, const WeightExpr& b);
WeightExpr operator-(const WeightExpr& a, const WeightExpr& b);
WeightExpr operator*(const WeightExpr& a, const WeightExpr& b);
WeightExpr operator/(const WeightExpr& a, const WeightExpr& b);
WeightExpr operator-(const WeightExpr& a);
WeightExpr pow_expr(const WeightExpr& base, const WeightExpr& expo);

}  // namespace hrlab::expr
