#include "hrlab/weight_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace hrlab::expr {

const char* param_name(ParamSymbol s) {
    switch (s) {
        case ParamSymbol::N: return "N";
        case ParamSymbol::R: return "R";
        case ParamSymbol::b: return "b";
        case ParamSymbol::c: return "c";
    }
    return "?";
}

ParamBinding& ParamBinding::set_n(int n) {
    if (n < 1) throw std::invalid_argument("binding: N must be an integer >= 1");
    n_ = n;
    return *this;
}

ParamBinding& ParamBinding::set_r(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("binding: R must be positive");
    radius_ = radius;
    return *this;
}

ParamBinding& ParamBinding::set_b(double b) {
    b_ = b;
    return *this;
}

ParamBinding& ParamBinding::set_c(double c) {
    c_ = c;
    return *this;
}

std::optional<double> ParamBinding::get(ParamSymbol s) const {
    switch (s) {
        case ParamSymbol::N: return n_ ? std::optional<double>(static_cast<double>(*n_)) : std::nullopt;
        case ParamSymbol::R: return radius_;
        case ParamSymbol::b: return b_;
        case ParamSymbol::c: return c_;
    }
    return std::nullopt;
}

namespace {

ExprPtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr make_const(double v, std::size_t pos = kNoSourcePos) {
    return make_node({NodeKind::Constant, v, ParamSymbol::N, nullptr, nullptr, pos});
}

ExprPtr make_param(ParamSymbol s, std::size_t pos = kNoSourcePos) {
    return make_node({NodeKind::Parameter, 0.0, s, nullptr, nullptr, pos});
}

ExprPtr make_radial(std::size_t pos = kNoSourcePos) {
    return make_node({NodeKind::Radial, 0.0, ParamSymbol::N, nullptr, nullptr, pos});
}

bool is_const(const ExprPtr& e, double v) {
    return e->kind == NodeKind::Constant && e->value == v;
}

// Light constant folding keeps derivatives readable. Deliberately not a
// canonical simplifier (general CAS features are out of scope).
ExprPtr make_binary(NodeKind k, ExprPtr a, ExprPtr b, std::size_t pos = kNoSourcePos) {
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant) {
        switch (k) {
            case NodeKind::Add: return make_const(a->value + b->value, pos);
            case NodeKind::Sub: return make_const(a->value - b->value, pos);
            case NodeKind::Mul: return make_const(a->value * b->value, pos);
            default: break;  // Div/Pow of constants kept verbatim ("N^2/(4*r^2)" style)
        }
    }
    switch (k) {
        case NodeKind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case NodeKind::Sub:
            if (is_const(b, 0.0)) return a;
            break;
        case NodeKind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0, pos);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case NodeKind::Div:
            if (is_const(a, 0.0)) return make_const(0.0, pos);
            if (is_const(b, 1.0)) return a;
            break;
        case NodeKind::Pow:
            if (is_const(b, 1.0)) return a;
            break;
        default:
            break;
    }
    return make_node({k, 0.0, ParamSymbol::N, std::move(a), std::move(b), pos});
}

ExprPtr make_neg(ExprPtr a, std::size_t pos = kNoSourcePos) {
    if (a->kind == NodeKind::Constant) return make_const(-a->value, pos);
    return make_node({NodeKind::Neg, 0.0, ParamSymbol::N, std::move(a), nullptr, pos});
}

ExprPtr make_exp(ExprPtr a, std::size_t pos = kNoSourcePos) {
    return make_node({NodeKind::Exp, 0.0, ParamSymbol::N, std::move(a), nullptr, pos});
}

bool node_has_radial(const ExprNode& n) {
    if (n.kind == NodeKind::Radial) return true;
    if (n.lhs && node_has_radial(*n.lhs)) return true;
    if (n.rhs && node_has_radial(*n.rhs)) return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr run() {
        skip_ws();
        if (eof()) throw ParseError("empty expression", 0);
        ExprPtr e = parse_expr();
        skip_ws();
        if (!eof()) throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(text_[pos_]))) pos_++;
    }

    bool accept(char c) {
        skip_ws();
        if (!eof() && text_[pos_] == c) {
            pos_++;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (eof() || text_[pos_] != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        pos_++;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            skip_ws();
            std::size_t p = pos_;
            if (accept('+'))
                e = make_binary(NodeKind::Add, e, parse_term(), p);
            else if (accept('-'))
                e = make_binary(NodeKind::Sub, e, parse_term(), p);
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            skip_ws();
            std::size_t p = pos_;
            if (accept('*'))
                e = make_binary(NodeKind::Mul, e, parse_unary(), p);
            else if (accept('/'))
                e = make_binary(NodeKind::Div, e, parse_unary(), p);
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        skip_ws();
        std::size_t p = pos_;
        if (accept('-')) return make_neg(parse_unary(), p);
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        skip_ws();
        std::size_t p = pos_;
        if (accept('^')) {
            ExprPtr expo = parse_unary();  // right-assoc; r^-2 works without parens
            if (node_has_radial(*expo))
                throw ParseError("exponent must not depend on r", p);
            return make_binary(NodeKind::Pow, base, expo, p);
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (eof()) throw ParseError("unexpected end of expression", pos_);
        std::size_t p = pos_;
        char ch = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(ch))) return parse_ident();
        if (ch == '(') {
            pos_++;
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", p);
    }

    ExprPtr parse_number() {
        std::size_t p = pos_;
        while (!eof()) {
            char ch = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
                pos_++;
            } else if (ch == 'e' || ch == 'E') {
                std::size_t next = pos_ + 1;
                if (next < text_.size() &&
                    (std::isdigit(static_cast<unsigned char>(text_[next])) || text_[next] == '+' ||
                     text_[next] == '-')) {
                    pos_ = next + 1;
                    while (!eof() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) pos_++;
                }
                break;
            } else {
                break;
            }
        }
        std::string tok(text_.substr(p, pos_ - p));
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ParseError("malformed number '" + tok + "'", p);
        return make_const(v, p);
    }

    ExprPtr parse_ident() {
        std::size_t p = pos_;
        while (!eof() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) pos_++;
        std::string name(text_.substr(p, pos_ - p));
        if (name == "r") return make_radial(p);
        if (name == "N") return make_param(ParamSymbol::N, p);
        if (name == "R") return make_param(ParamSymbol::R, p);
        if (name == "b") return make_param(ParamSymbol::b, p);
        if (name == "c") return make_param(ParamSymbol::c, p);
        if (name == "exp") {
            expect('(');
            ExprPtr arg = parse_expr();
            expect(')');
            return make_exp(arg, p);
        }
        throw ParseError("unknown identifier '" + name + "'", p);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double eval_node(const ExprNode& n, double r, const ParamBinding& binding);

double checked(double v, const ExprNode& n) {
    if (!std::isfinite(v)) throw EvalError("non-finite result", n.src_pos);
    return v;
}

double eval_pow(const ExprNode& n, double r, const ParamBinding& binding) {
    double base = eval_node(*n.lhs, r, binding);
    double expo = eval_node(*n.rhs, r, binding);
    if (base == 0.0) {
        if (expo < 0.0) throw EvalError("zero raised to a negative power", n.src_pos);
        return expo == 0.0 ? 1.0 : 0.0;
    }
    if (base < 0.0 && expo != std::nearbyint(expo))
        throw EvalError("fractional power of a negative base", n.src_pos);
    return checked(std::pow(base, expo), n);
}

double eval_node(const ExprNode& n, double r, const ParamBinding& binding) {
    switch (n.kind) {
        case NodeKind::Constant:
            return n.value;
        case NodeKind::Parameter: {
            auto v = binding.get(n.param);
            if (!v)
                throw EvalError(std::string("unbound parameter '") + param_name(n.param) + "'",
                                n.src_pos);
            return *v;
        }
        case NodeKind::Radial:
            return r;
        case NodeKind::Add:
            return checked(eval_node(*n.lhs, r, binding) + eval_node(*n.rhs, r, binding), n);
        case NodeKind::Sub:
            return checked(eval_node(*n.lhs, r, binding) - eval_node(*n.rhs, r, binding), n);
        case NodeKind::Mul:
            return checked(eval_node(*n.lhs, r, binding) * eval_node(*n.rhs, r, binding), n);
        case NodeKind::Div: {
            double den = eval_node(*n.rhs, r, binding);
            if (den == 0.0) throw EvalError("division by zero", n.src_pos);
            return checked(eval_node(*n.lhs, r, binding) / den, n);
        }
        case NodeKind::Pow:
            return eval_pow(n, r, binding);
        case NodeKind::Neg:
            return -eval_node(*n.lhs, r, binding);
        case NodeKind::Exp:
            return checked(std::exp(eval_node(*n.lhs, r, binding)), n);
    }
    throw EvalError("corrupt expression node", n.src_pos);
}

ExprPtr diff_node(const ExprPtr& e) {
    const ExprNode& n = *e;
    switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Parameter:
            return make_const(0.0);
        case NodeKind::Radial:
            return make_const(1.0);
        case NodeKind::Add:
            return make_binary(NodeKind::Add, diff_node(n.lhs), diff_node(n.rhs));
        case NodeKind::Sub:
            return make_binary(NodeKind::Sub, diff_node(n.lhs), diff_node(n.rhs));
        case NodeKind::Mul:
            return make_binary(NodeKind::Add,
                               make_binary(NodeKind::Mul, diff_node(n.lhs), n.rhs),
                               make_binary(NodeKind::Mul, n.lhs, diff_node(n.rhs)));
        case NodeKind::Div:
            // (f/g)' = f'/g - f*g'/g^2
            return make_binary(
                NodeKind::Sub, make_binary(NodeKind::Div, diff_node(n.lhs), n.rhs),
                make_binary(NodeKind::Div, make_binary(NodeKind::Mul, n.lhs, diff_node(n.rhs)),
                            make_binary(NodeKind::Pow, n.rhs, make_const(2.0))));
        case NodeKind::Pow: {
            // Exponent is r-free by construction: (f^g)' = g * f^(g-1) * f'
            ExprPtr gm1 = make_binary(NodeKind::Sub, n.rhs, make_const(1.0));
            ExprPtr pw = make_binary(NodeKind::Pow, n.lhs, gm1);
            return make_binary(NodeKind::Mul, make_binary(NodeKind::Mul, n.rhs, pw),
                               diff_node(n.lhs));
        }
        case NodeKind::Neg:
            return make_neg(diff_node(n.lhs));
        case NodeKind::Exp:
            return make_binary(NodeKind::Mul, diff_node(n.lhs), make_exp(n.lhs));
    }
    return make_const(0.0);
}

void print_node(const ExprNode& n, std::string& out) {
    char buf[40];
    switch (n.kind) {
        case NodeKind::Constant:
            if (n.value < 0) {
                std::snprintf(buf, sizeof(buf), "(-%.17g)", -n.value);
            } else {
                std::snprintf(buf, sizeof(buf), "%.17g", n.value);
            }
            out += buf;
            return;
        case NodeKind::Parameter:
            out += param_name(n.param);
            return;
        case NodeKind::Radial:
            out += 'r';
            return;
        case NodeKind::Neg:
            out += "(-";
            print_node(*n.lhs, out);
            out += ')';
            return;
        case NodeKind::Exp:
            out += "exp(";
            print_node(*n.lhs, out);
            out += ')';
            return;
        default:
            break;
    }
    const char* op = nullptr;
    switch (n.kind) {
        case NodeKind::Add: op = "+"; break;
        case NodeKind::Sub: op = "-"; break;
        case NodeKind::Mul: op = "*"; break;
        case NodeKind::Div: op = "/"; break;
        case NodeKind::Pow: op = "^"; break;
        default: op = "?"; break;
    }
    out += '(';
    print_node(*n.lhs, out);
    out += op;
    print_node(*n.rhs, out);
    out += ')';
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Constant:
            // bitwise-identical constants; distinguishes 0.0 from -0.0 is not
            // needed, so compare through == with a NaN guard
            return a.value == b.value;
        case NodeKind::Parameter:
            return a.param == b.param;
        case NodeKind::Radial:
            return true;
        default:
            break;
    }
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    if (a.lhs && !nodes_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !nodes_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

void collect_params(const ExprNode& n, std::vector<ParamSymbol>& out) {
    if (n.kind == NodeKind::Parameter) {
        for (ParamSymbol s : out)
            if (s == n.param) return;
        out.push_back(n.param);
        return;
    }
    if (n.lhs) collect_params(*n.lhs, out);
    if (n.rhs) collect_params(*n.rhs, out);
}

}  // namespace

WeightExpr WeightExpr::parse(std::string_view text) {
    return WeightExpr(Parser(text).run());
}

WeightExpr WeightExpr::constant(double v) { return WeightExpr(make_const(v)); }

double WeightExpr::evaluate(double r, const ParamBinding& binding) const {
    if (!root_) throw EvalError("empty expression", kNoSourcePos);
    return eval_node(*root_, r, binding);
}

WeightExpr WeightExpr::derivative() const {
    if (!root_) return WeightExpr(make_const(0.0));
    return WeightExpr(diff_node(root_));
}

std::string WeightExpr::to_string() const {
    if (!root_) return "0";
    std::string out;
    print_node(*root_, out);
    return out;
}

bool WeightExpr::structurally_equal(const WeightExpr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return nodes_equal(*root_, *other.root_);
}

std::vector<ParamSymbol> WeightExpr::free_params() const {
    std::vector<ParamSymbol> out;
    if (root_) collect_params(*root_, out);
    return out;
}

bool WeightExpr::is_r_free() const { return !root_ || !node_has_radial(*root_); }

WeightExpr radial_var() { return WeightExpr(make_radial()); }

WeightExpr parameter(ParamSymbol s) { return WeightExpr(make_param(s)); }

WeightExpr operator+(const WeightExpr& a, const WeightExpr& b) {
    return WeightExpr(make_binary(NodeKind::Add, a.root(), b.root()));
}

WeightExpr operator-(const WeightExpr& a, const WeightExpr& b) {
    return WeightExpr(make_binary(NodeKind::Sub, a.root(), b.root()));
}

WeightExpr operator*(const WeightExpr& a, const WeightExpr& b) {
    return WeightExpr(make_binary(NodeKind::Mul, a.root(), b.root()));
}

WeightExpr operator/(const WeightExpr& a, const WeightExpr& b) {
    return WeightExpr(make_binary(NodeKind::Div, a.root(), b.root()));
}

WeightExpr operator-(const WeightExpr& a) { return WeightExpr(make_neg(a.root())); }

WeightExpr pow_expr(const WeightExpr& base, const WeightExpr& expo) {
    if (!expo.is_r_free())
        throw ParseError("exponent must not depend on r", kNoSourcePos);
    return WeightExpr(make_binary(NodeKind::Pow, base.root(), expo.root()));
}

}  // namespace hrlab::expr
