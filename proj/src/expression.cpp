#include "planeflow/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace planeflow {

struct Expr::Node {
    enum class Op { Num, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Log };

    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using Node = Expr::Node;
using Op = Node::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Num;
    n->value = v;
    return n;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

bool is_num(const NodePtr& n, double v) {
    return n->op == Op::Num && n->value == v;
}

// Peephole construction: folds constants and drops 0/1 identities so
// derivative trees stay readable. No deeper rewriting.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
    if (a->op == Op::Num && b->op == Op::Num) return make_num(a->value + b->value);
    return make_node(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_num(b, 0.0)) return a;
    if (a->op == Op::Num && b->op == Op::Num) return make_num(a->value - b->value);
    if (is_num(a, 0.0)) return make_node(Op::Neg, std::move(b));
    return make_node(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
    if (a->op == Op::Num && b->op == Op::Num) return make_num(a->value * b->value);
    return make_node(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0)) return make_num(0.0);
    if (is_num(b, 1.0)) return a;
    return make_node(Op::Div, std::move(a), std::move(b));
}

NodePtr pow_node(NodePtr a, NodePtr b) {
    if (is_num(b, 1.0)) return a;
    if (is_num(b, 0.0)) return make_num(1.0);
    return make_node(Op::Pow, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (a->op == Op::Num) return make_num(-a->value);
    return make_node(Op::Neg, std::move(a));
}

double eval_node(const Node& n, double x, double y) {
    switch (n.op) {
    case Op::Num:
        return n.value;
    case Op::VarX:
        return x;
    case Op::VarY:
        return y;
    case Op::Neg:
        return -eval_node(*n.a, x, y);
    case Op::Add:
        return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case Op::Sub:
        return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case Op::Mul:
        return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case Op::Div:
        return eval_node(*n.a, x, y) / eval_node(*n.b, x, y);
    case Op::Pow: {
        const double base = eval_node(*n.a, x, y);
        const double exponent = eval_node(*n.b, x, y);
        if (base < 0.0 && std::rint(exponent) != exponent) {
            throw eval_error("power: fractional exponent of a negative base");
        }
        return std::pow(base, exponent);
    }
    case Op::Sin:
        return std::sin(eval_node(*n.a, x, y));
    case Op::Cos:
        return std::cos(eval_node(*n.a, x, y));
    case Op::Log: {
        const double arg = eval_node(*n.a, x, y);
        if (!(arg > 0.0)) {
            throw eval_error("log: argument must be positive");
        }
        return std::log(arg);
    }
    }
    throw eval_error("corrupt expression node");
}

int precedence(const Node& n) {
    switch (n.op) {
    case Op::Add:
    case Op::Sub:
        return 1;
    case Op::Mul:
    case Op::Div:
        return 2;
    case Op::Neg:
        return 3;
    case Op::Pow:
        return 4;
    case Op::Num:
        return n.value < 0.0 ? 3 : 5;
    default:
        return 5;
    }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, std::string& out, bool needs_parens) {
    if (needs_parens) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const Node& n, std::string& out) {
    const int p = precedence(n);
    switch (n.op) {
    case Op::Num:
        out += fmt::format("{}", n.value);
        return;
    case Op::VarX:
        out += 'x';
        return;
    case Op::VarY:
        out += 'y';
        return;
    case Op::Neg:
        out += '-';
        print_child(*n.a, out, precedence(*n.a) < p);
        return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
        print_child(*n.a, out, precedence(*n.a) < p);
        const char* sym = n.op == Op::Add   ? " + "
                          : n.op == Op::Sub ? " - "
                          : n.op == Op::Mul ? "*"
                                            : "/";
        out += sym;
        const bool right_parens = n.op == Op::Add || n.op == Op::Mul
                                      ? precedence(*n.b) < p
                                      : precedence(*n.b) <= p;
        print_child(*n.b, out, right_parens);
        return;
    }
    case Op::Pow:
        print_child(*n.a, out, precedence(*n.a) <= p);
        out += '^';
        print_child(*n.b, out, precedence(*n.b) < p);
        return;
    case Op::Sin:
    case Op::Cos:
    case Op::Log:
        out += n.op == Op::Sin ? "sin(" : n.op == Op::Cos ? "cos(" : "log(";
        print_node(*n.a, out);
        out += ')';
        return;
    }
}

NodePtr diff_node(const NodePtr& n, Var var) {
    switch (n->op) {
    case Op::Num:
        return make_num(0.0);
    case Op::VarX:
        return make_num(var == Var::X ? 1.0 : 0.0);
    case Op::VarY:
        return make_num(var == Var::Y ? 1.0 : 0.0);
    case Op::Neg:
        return neg(diff_node(n->a, var));
    case Op::Add:
        return add(diff_node(n->a, var), diff_node(n->b, var));
    case Op::Sub:
        return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Op::Mul:
        return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Op::Div:
        return div(sub(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var))),
                   pow_node(n->b, make_num(2.0)));
    case Op::Pow: {
        if (n->b->op == Op::Num) {
            const double c = n->b->value;
            return mul(mul(make_num(c), pow_node(n->a, make_num(c - 1.0))),
                       diff_node(n->a, var));
        }
        // d(u^v) = u^v (v' log u + v u' / u)
        return mul(pow_node(n->a, n->b),
                   add(mul(diff_node(n->b, var), make_node(Op::Log, n->a)),
                       div(mul(n->b, diff_node(n->a, var)), n->a)));
    }
    case Op::Sin:
        return mul(make_node(Op::Cos, n->a), diff_node(n->a, var));
    case Op::Cos:
        return neg(mul(make_node(Op::Sin, n->a), diff_node(n->a, var)));
    case Op::Log:
        return div(diff_node(n->a, var), n->a);
    }
    throw eval_error("corrupt expression node");
}

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind = Kind::End;
    double value = 0.0;
    std::string text;
    std::size_t column = 0; // 1-based
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& current() const { return current_; }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        current_ = Token{};
        current_.column = pos_ + 1;
        if (pos_ >= text_.size()) {
            current_.kind = Token::Kind::End;
            return;
        }
        const char c = text_[pos_];
        switch (c) {
        case '+': current_.kind = Token::Kind::Plus; ++pos_; return;
        case '-': current_.kind = Token::Kind::Minus; ++pos_; return;
        case '*': current_.kind = Token::Kind::Star; ++pos_; return;
        case '/': current_.kind = Token::Kind::Slash; ++pos_; return;
        case '^': current_.kind = Token::Kind::Caret; ++pos_; return;
        case '(': current_.kind = Token::Kind::LParen; ++pos_; return;
        case ')': current_.kind = Token::Kind::RParen; ++pos_; return;
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.data() + pos_;
            const char* end = text_.data() + text_.size();
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc{} || ptr == begin) {
                throw parse_error("malformed number", pos_ + 1);
            }
            current_.kind = Token::Kind::Number;
            current_.value = value;
            pos_ += static_cast<std::size_t>(ptr - begin);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            current_.kind = Token::Kind::Ident;
            current_.text = std::string(text_.substr(pos_, end - pos_));
            pos_ = end;
            return;
        }
        throw parse_error(fmt::format("unexpected character '{}'", c), pos_ + 1);
    }

    std::size_t end_column() const { return text_.size() + 1; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    Token current_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {}

    NodePtr parse() {
        NodePtr root = parse_expr();
        if (lexer_.current().kind != Token::Kind::End) {
            throw parse_error("unexpected trailing input", lexer_.current().column);
        }
        return root;
    }

private:
    Lexer lexer_;
    std::vector<std::size_t> open_parens_; // columns of unclosed '('

    [[noreturn]] void fail_unexpected(const char* expected) {
        const Token& tok = lexer_.current();
        if (tok.kind == Token::Kind::End) {
            // Blame the innermost unclosed parenthesis when there is one.
            if (!open_parens_.empty()) {
                throw parse_error("unterminated parenthesis", open_parens_.back());
            }
            throw parse_error(fmt::format("expected {} but reached end of input", expected),
                              tok.column);
        }
        throw parse_error(fmt::format("expected {}", expected), tok.column);
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (true) {
            const auto kind = lexer_.current().kind;
            if (kind == Token::Kind::Plus) {
                lexer_.advance();
                lhs = make_node(Op::Add, lhs, parse_term());
            } else if (kind == Token::Kind::Minus) {
                lexer_.advance();
                lhs = make_node(Op::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (true) {
            const auto kind = lexer_.current().kind;
            if (kind == Token::Kind::Star) {
                lexer_.advance();
                lhs = make_node(Op::Mul, lhs, parse_unary());
            } else if (kind == Token::Kind::Slash) {
                lexer_.advance();
                lhs = make_node(Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (lexer_.current().kind == Token::Kind::Minus) {
            lexer_.advance();
            return make_node(Op::Neg, parse_unary());
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (lexer_.current().kind == Token::Kind::Caret) {
            lexer_.advance();
            // Right-associative; the exponent may start with a unary minus.
            return make_node(Op::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_group(std::size_t open_column) {
        open_parens_.push_back(open_column);
        NodePtr inner = parse_expr();
        if (lexer_.current().kind != Token::Kind::RParen) {
            fail_unexpected("')'");
        }
        open_parens_.pop_back();
        lexer_.advance();
        return inner;
    }

    NodePtr parse_primary() {
        const Token tok = lexer_.current();
        switch (tok.kind) {
        case Token::Kind::Number:
            lexer_.advance();
            return make_num(tok.value);
        case Token::Kind::LParen:
            lexer_.advance();
            return parse_group(tok.column);
        case Token::Kind::Ident: {
            lexer_.advance();
            if (tok.text == "x") return make_node(Op::VarX, nullptr);
            if (tok.text == "y") return make_node(Op::VarY, nullptr);
            Op fn;
            if (tok.text == "sin") {
                fn = Op::Sin;
            } else if (tok.text == "cos") {
                fn = Op::Cos;
            } else if (tok.text == "log") {
                fn = Op::Log;
            } else {
                throw parse_error(fmt::format("unknown identifier '{}'", tok.text), tok.column);
            }
            if (lexer_.current().kind != Token::Kind::LParen) {
                fail_unexpected("'(' after function name");
            }
            const std::size_t open_column = lexer_.current().column;
            lexer_.advance();
            return make_node(fn, parse_group(open_column));
        }
        default:
            fail_unexpected("an expression");
        }
    }
};

} // namespace

double Expr::eval(double x, double y) const {
    if (!node_) {
        throw eval_error("empty expression");
    }
    return eval_node(*node_, x, y);
}

std::string Expr::str() const {
    if (!node_) {
        return "";
    }
    std::string out;
    print_node(*node_, out);
    return out;
}

Expr Expr::number(double v) { return Expr(make_num(v)); }

Expr Expr::variable(Var v) {
    return Expr(make_node(v == Var::X ? Op::VarX : Op::VarY, nullptr));
}

Expr parse_expression(std::string_view text) {
    Parser parser(text);
    return Expr(parser.parse());
}

Expr differentiate(const Expr& e, Var var) {
    if (!e.valid()) {
        throw eval_error("empty expression");
    }
    return Expr(diff_node(e.handle(), var));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.handle(), b.handle())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.handle(), b.handle())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.handle(), b.handle())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.handle(), b.handle())); }
Expr operator-(const Expr& a) { return Expr(neg(a.handle())); }
Expr pow(const Expr& a, const Expr& b) { return Expr(pow_node(a.handle(), b.handle())); }

} // namespace planeflow
