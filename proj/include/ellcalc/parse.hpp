#pragma once

// Text form of expressions.
//
// Grammar (also in docs/grammar.md):
//   expr     = term { ("+" | "-") term }
//   term     = unary { ("*" | "/") unary }
//   unary    = "-" unary | power
//   power    = primary [ "^" exponent ]
//   exponent = integer | "-" integer | "(" [ "-" ] integer ")"
//   primary  = number | variable | function "(" expr ")" | "(" expr ")"
//   variable = "rho" | "phi" | "theta" | "a"
//   function = "sin" | "cos" | "exp" | "ln"
//
// "^" binds tighter than unary minus, which binds tighter than "*" and "/".
// Exponents are integer literals. Printing uses shortest round-trip decimal
// literals; print(parse(print(e))) == print(e) for every expression free of
// kernel calls (kernels print as bare names that the parser does not know).

#include <charconv>
#include <cstring>
#include <string>
#include <string_view>

#include "expr.hpp"

namespace ellcalc {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, size_t position)
        : std::runtime_error("parse error at position " + std::to_string(position) + ": " + msg),
          pos(position) {}
    size_t pos;
};

namespace detail {

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                      src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    Expr parse_expr() {
        Expr acc = parse_term();
        for (;;) {
            if (eat('+')) acc = acc + parse_term();
            else if (eat('-')) acc = acc - parse_term();
            else return acc;
        }
    }

    Expr parse_term() {
        Expr acc = parse_unary();
        for (;;) {
            if (eat('*')) acc = acc * parse_unary();
            else if (eat('/')) acc = acc / parse_unary();
            else return acc;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (eat('^')) return pow_int(base, parse_exponent());
        return base;
    }

    int parse_exponent() {
        skip_ws();
        bool parens = eat('(');
        skip_ws();
        bool neg = eat('-');
        skip_ws();
        if (pos_ >= src_.size() || !isdigit(src_[pos_])) fail("exponent must be an integer literal");
        size_t start = pos_;
        while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
            pos_ = start;
            fail("exponent must be an integer literal");
        }
        int value = 0;
        auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc()) { pos_ = start; fail("exponent out of range"); }
        (void)p;
        if (parens && !eat(')')) fail("expected ')' after exponent");
        return neg ? -value : value;
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (isdigit(c)) return parse_number();
        if (isalpha(c) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        size_t start = pos_;
        while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ >= src_.size() || !isdigit(src_[pos_])) pos_ = mark;  // not an exponent part
            else
                while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
        }
        double value = 0.0;
        auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || p != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return constant(value);
    }

    Expr parse_identifier() {
        size_t start = pos_;
        while (pos_ < src_.size() && (isalnum(src_[pos_]) || src_[pos_] == '_')) ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (name == "rho" || name == "phi" || name == "theta" || name == "a") {
            if (peek() == '(') { pos_ = start; fail("'" + std::string(name) + "' is not a function"); }
            if (name == "rho") return variable(Var::rho);
            if (name == "phi") return variable(Var::phi);
            if (name == "theta") return variable(Var::theta);
            return variable(Var::a);
        }
        NodeKind fn;
        if (name == "sin") fn = NodeKind::Sin;
        else if (name == "cos") fn = NodeKind::Cos;
        else if (name == "exp") fn = NodeKind::Exp;
        else if (name == "ln") fn = NodeKind::Ln;
        else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!eat('(')) fail("expected '(' after '" + std::string(name) + "'");
        Expr arg = parse_expr();
        if (!eat(')')) fail("expected ')'");
        switch (fn) {
            case NodeKind::Sin: return sin(arg);
            case NodeKind::Cos: return cos(arg);
            case NodeKind::Exp: return exp(arg);
            default: {
                if (arg.node()->kind == NodeKind::Constant && arg.node()->value <= 0.0)
                    throw ParseError("ln of non-positive constant", start);
                return ln(arg);
            }
        }
    }

    static bool isdigit(char c) { return c >= '0' && c <= '9'; }
    static bool isalpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
    static bool isalnum(char c) { return isdigit(c) || isalpha(c); }

    std::string_view src_;
    size_t pos_ = 0;
};

inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

// Printer precedence: Sum 1, Product/Quotient 2, Negate 3, Power 4, atoms 5.
// Negate parenthesizes Sum/Product/Quotient operands so the tighter binding of
// unary minus relative to "*" cannot reassociate on reparse.
inline int print_prec(const Node* n) {
    switch (n->kind) {
        case NodeKind::Sum: return 1;
        case NodeKind::Product:
        case NodeKind::Quotient: return 2;
        case NodeKind::Negate: return 3;
        case NodeKind::Power: return 4;
        case NodeKind::Constant: return n->value < 0.0 ? 3 : 5;
        default: return 5;
    }
}

inline void print_node(const Node* n, std::string& out);

inline void print_child(const Node* n, int min_prec, std::string& out) {
    bool parens = print_prec(n) < min_prec;
    if (parens) out += '(';
    print_node(n, out);
    if (parens) out += ')';
}

inline void print_node(const Node* n, std::string& out) {
    switch (n->kind) {
        case NodeKind::Constant: out += format_double(n->value); break;
        case NodeKind::Variable: out += var_name(n->var); break;
        case NodeKind::Kernel: out += kernel_info(n->kernel_id).name; break;
        case NodeKind::Sum:
            for (size_t i = 0; i < n->children.size(); ++i) {
                const Node* c = n->children[i];
                if (i == 0) {
                    print_child(c, 2, out);
                    continue;
                }
                if (c->kind == NodeKind::Negate) {
                    // binary '-' binds loosest, so products/quotients need no parens here
                    out += " - ";
                    print_child(c->children[0], 2, out);
                } else if (c->kind == NodeKind::Constant && c->value < 0.0) {
                    out += " - ";
                    out += format_double(-c->value);
                } else if (c->kind == NodeKind::Product &&
                           c->children[0]->kind == NodeKind::Constant &&
                           c->children[0]->value < 0.0) {
                    out += " - ";
                    out += format_double(-c->children[0]->value);
                    for (size_t j = 1; j < c->children.size(); ++j) {
                        out += '*';
                        print_child(c->children[j], 3, out);
                    }
                } else {
                    out += " + ";
                    print_child(c, 2, out);
                }
            }
            break;
        case NodeKind::Product:
            for (size_t i = 0; i < n->children.size(); ++i) {
                if (i) out += '*';
                print_child(n->children[i], 3, out);
            }
            break;
        case NodeKind::Quotient:
            print_child(n->children[0], 2, out);
            out += '/';
            print_child(n->children[1], 3, out);
            break;
        case NodeKind::Negate:
            out += '-';
            print_child(n->children[0], 3, out);
            break;
        case NodeKind::Power:
            print_child(n->children[0], 5, out);
            out += '^';
            if (n->exponent < 0) {
                out += "(";
                out += std::to_string(n->exponent);
                out += ")";
            } else {
                out += std::to_string(n->exponent);
            }
            break;
        case NodeKind::Sin:
            out += "sin(";
            print_node(n->children[0], out);
            out += ')';
            break;
        case NodeKind::Cos:
            out += "cos(";
            print_node(n->children[0], out);
            out += ')';
            break;
        case NodeKind::Exp:
            out += "exp(";
            print_node(n->children[0], out);
            out += ')';
            break;
        case NodeKind::Ln:
            out += "ln(";
            print_node(n->children[0], out);
            out += ')';
            break;
    }
}

}  // namespace detail

inline Expr parse(std::string_view src) { return detail::Parser(src).parse(); }

inline std::string print(Expr e) {
    std::string out;
    detail::print_node(e.node(), out);
    return out;
}

}  // namespace ellcalc
