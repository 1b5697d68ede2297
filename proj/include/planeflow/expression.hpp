#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "planeflow/errors.hpp"

namespace planeflow {

enum class Var { X, Y };

/// Immutable arithmetic expression over variables x, y: the four operations,
/// right-associative power, unary minus, and sin/cos/log calls.
class Expr {
public:
    struct Node;

    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    bool valid() const { return node_ != nullptr; }

    /// Throws eval_error on log of a non-positive value or a fractional
    /// power of a negative base.
    double eval(double x, double y) const;

    /// Parenthesized text form; parsing it back reproduces the same values.
    std::string str() const;

    const Node* node() const { return node_.get(); }
    std::shared_ptr<const Node> handle() const { return node_; }

    static Expr number(double v);
    static Expr variable(Var v);

private:
    std::shared_ptr<const Node> node_;
};

/// Parses infix text with standard precedence
/// (power > unary minus > mul/div > add/sub). Throws parse_error with a
/// 1-based column on malformed input or unknown identifiers.
Expr parse_expression(std::string_view text);

/// Symbolic partial derivative; the result is lightly folded but otherwise
/// unsimplified.
Expr differentiate(const Expr& e, Var var);

/// Tree combinators (with the same light folding the derivative uses).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);

} // namespace planeflow
