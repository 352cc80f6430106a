#pragma once

// Parameter-sequence expressions: a tiny arithmetic language over the
// single integer variable `i` (1-based), e.g. "3/5 - 1/i" or
// "exp(-abs(sin(i)))".
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | primary
//   primary := number | 'i' | func '(' expr [',' expr] ')' | '(' expr ')'
//   func    := sin | exp | abs | pow

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ktau/error.hpp"

namespace ktau {

enum class SeqOp { Const, Var, Neg, Add, Sub, Mul, Div, Sin, Exp, Abs, Pow };

struct SeqNode {
    SeqOp op;
    double value = 0.0;  // Const only
    std::shared_ptr<const SeqNode> lhs;
    std::shared_ptr<const SeqNode> rhs;
};

using SeqNodePtr = std::shared_ptr<const SeqNode>;

namespace detail {

inline SeqNodePtr make_node(SeqOp op, SeqNodePtr lhs = nullptr, SeqNodePtr rhs = nullptr) {
    return std::make_shared<const SeqNode>(SeqNode{op, 0.0, std::move(lhs), std::move(rhs)});
}

inline SeqNodePtr make_const(double v) {
    return std::make_shared<const SeqNode>(SeqNode{SeqOp::Const, v, nullptr, nullptr});
}

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class SeqParser {
public:
    explicit SeqParser(std::string_view src) : src_(src) {}

    SeqNodePtr parse() {
        skip_ws();
        if (pos_ == src_.size()) fail("empty expression");
        auto node = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return node;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, ErrorKind kind = ErrorKind::Syntax) const {
        fail_at(pos_, msg, kind);
    }

    [[noreturn]] void fail_at(std::size_t at, const std::string& msg,
                              ErrorKind kind = ErrorKind::Syntax) const {
        throw Error(kind, msg + " at position " + std::to_string(at), at);
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

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ == src_.size()) fail(std::string("expected '") + c + "' but reached end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    SeqNodePtr expr() {
        auto node = term();
        for (;;) {
            if (accept('+')) {
                node = make_node(SeqOp::Add, node, term());
            } else if (accept('-')) {
                node = make_node(SeqOp::Sub, node, term());
            } else {
                return node;
            }
        }
    }

    SeqNodePtr term() {
        auto node = unary();
        for (;;) {
            if (accept('*')) {
                node = make_node(SeqOp::Mul, node, unary());
            } else if (accept('/')) {
                node = make_node(SeqOp::Div, node, unary());
            } else {
                return node;
            }
        }
    }

    SeqNodePtr unary() {
        if (accept('-')) return make_node(SeqOp::Neg, unary());
        return primary();
    }

    SeqNodePtr primary() {
        skip_ws();
        if (pos_ == src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto node = expr();
            expect(')');
            return node;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    SeqNodePtr number() {
        const std::size_t start = pos_;
        // Scan the literal: digits, optional fraction, optional exponent.
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double v = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec == std::errc::result_out_of_range) fail_at(start, "number out of range");
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            fail_at(start, "malformed number '" + std::string(text) + "'");
        }
        return make_const(v);
    }

    SeqNodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(src_.substr(start, pos_ - start));
        skip_ws();
        const bool call = pos_ < src_.size() && src_[pos_] == '(';
        if (!call) {
            if (name == "i") return make_node(SeqOp::Var);
            fail_at(start, "unknown identifier '" + name + "'", ErrorKind::UnknownIdentifier);
        }

        SeqOp op;
        int arity = 1;
        if (name == "sin") {
            op = SeqOp::Sin;
        } else if (name == "exp") {
            op = SeqOp::Exp;
        } else if (name == "abs") {
            op = SeqOp::Abs;
        } else if (name == "pow") {
            op = SeqOp::Pow;
            arity = 2;
        } else {
            fail_at(start, "unknown function '" + name + "'", ErrorKind::UnknownFunction);
        }

        expect('(');
        auto first = expr();
        SeqNodePtr second;
        if (arity == 2) {
            expect(',');
            second = expr();
        }
        expect(')');
        return make_node(op, std::move(first), std::move(second));
    }
};

inline double eval_node(const SeqNode& node, double i) {
    double r = 0.0;
    switch (node.op) {
        case SeqOp::Const: return node.value;
        case SeqOp::Var: return i;
        case SeqOp::Neg: r = -eval_node(*node.lhs, i); break;
        case SeqOp::Add: r = eval_node(*node.lhs, i) + eval_node(*node.rhs, i); break;
        case SeqOp::Sub: r = eval_node(*node.lhs, i) - eval_node(*node.rhs, i); break;
        case SeqOp::Mul: r = eval_node(*node.lhs, i) * eval_node(*node.rhs, i); break;
        case SeqOp::Div: {
            const double num = eval_node(*node.lhs, i);
            const double den = eval_node(*node.rhs, i);
            if (den == 0.0) {
                throw Error(ErrorKind::DivisionByZero,
                            "division by zero at i = " + format_double(i));
            }
            r = num / den;
            break;
        }
        case SeqOp::Sin: r = std::sin(eval_node(*node.lhs, i)); break;
        case SeqOp::Exp: r = std::exp(eval_node(*node.lhs, i)); break;
        case SeqOp::Abs: r = std::fabs(eval_node(*node.lhs, i)); break;
        case SeqOp::Pow: r = std::pow(eval_node(*node.lhs, i), eval_node(*node.rhs, i)); break;
    }
    if (!std::isfinite(r)) {
        throw Error(ErrorKind::NonFinite, "non-finite value at i = " + format_double(i));
    }
    return r;
}

inline const char* function_name(SeqOp op) {
    switch (op) {
        case SeqOp::Sin: return "sin";
        case SeqOp::Exp: return "exp";
        case SeqOp::Abs: return "abs";
        case SeqOp::Pow: return "pow";
        default: return "";
    }
}

inline const char* binary_symbol(SeqOp op) {
    switch (op) {
        case SeqOp::Add: return " + ";
        case SeqOp::Sub: return " - ";
        case SeqOp::Mul: return " * ";
        case SeqOp::Div: return " / ";
        default: return "";
    }
}

inline void print_node(const SeqNode& node, std::string& out) {
    switch (node.op) {
        case SeqOp::Const: out += format_double(node.value); return;
        case SeqOp::Var: out += 'i'; return;
        case SeqOp::Neg:
            out += "(-";
            print_node(*node.lhs, out);
            out += ')';
            return;
        case SeqOp::Add:
        case SeqOp::Sub:
        case SeqOp::Mul:
        case SeqOp::Div:
            out += '(';
            print_node(*node.lhs, out);
            out += binary_symbol(node.op);
            print_node(*node.rhs, out);
            out += ')';
            return;
        case SeqOp::Sin:
        case SeqOp::Exp:
        case SeqOp::Abs:
        case SeqOp::Pow:
            out += function_name(node.op);
            out += '(';
            print_node(*node.lhs, out);
            if (node.rhs) {
                out += ", ";
                print_node(*node.rhs, out);
            }
            out += ')';
            return;
    }
}

inline void sexpr_node(const SeqNode& node, std::string& out) {
    const char* head = nullptr;
    switch (node.op) {
        case SeqOp::Const: out += format_double(node.value); return;
        case SeqOp::Var: out += 'i'; return;
        case SeqOp::Neg: head = "neg"; break;
        case SeqOp::Add: head = "add"; break;
        case SeqOp::Sub: head = "sub"; break;
        case SeqOp::Mul: head = "mul"; break;
        case SeqOp::Div: head = "div"; break;
        default: head = function_name(node.op); break;
    }
    out += '(';
    out += head;
    out += ' ';
    sexpr_node(*node.lhs, out);
    if (node.rhs) {
        out += ' ';
        sexpr_node(*node.rhs, out);
    }
    out += ')';
}

inline bool mentions_var(const SeqNode& node) {
    if (node.op == SeqOp::Var) return true;
    return (node.lhs && mentions_var(*node.lhs)) || (node.rhs && mentions_var(*node.rhs));
}

inline bool same_tree(const SeqNode& a, const SeqNode& b) {
    if (a.op != b.op) return false;
    if (a.op == SeqOp::Const) return a.value == b.value;
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    return (!a.lhs || same_tree(*a.lhs, *b.lhs)) && (!a.rhs || same_tree(*a.rhs, *b.rhs));
}

}  // namespace detail

/// Parsed, immutable parameter sequence t_i. Cheap to copy; safe to share
/// across threads.
class SeqSpec {
public:
    [[nodiscard]] static SeqSpec parse(std::string_view source) {
        return SeqSpec(std::string(source), detail::SeqParser(source).parse());
    }

    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] const SeqNode& root() const noexcept { return *root_; }

    /// t_i for i >= 1.
    [[nodiscard]] double eval(std::int64_t i) const {
        if (i < 1) {
            throw Error(ErrorKind::InvalidArgument,
                        "sequence index must be >= 1, got " + std::to_string(i));
        }
        return detail::eval_node(*root_, static_cast<double>(i));
    }

    /// t_1..t_n as a 0-based vector.
    [[nodiscard]] std::vector<double> values(std::int64_t n) const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(n > 0 ? n : 0));
        for (std::int64_t i = 1; i <= n; ++i) out.push_back(eval(i));
        return out;
    }

    /// Fully parenthesized canonical form; parses back to an identical tree.
    [[nodiscard]] std::string print() const {
        std::string out;
        detail::print_node(*root_, out);
        return out;
    }

    [[nodiscard]] std::string sexpr() const {
        std::string out;
        detail::sexpr_node(*root_, out);
        return out;
    }

    [[nodiscard]] bool is_constant() const { return !detail::mentions_var(*root_); }

    friend bool operator==(const SeqSpec& a, const SeqSpec& b) {
        return detail::same_tree(*a.root_, *b.root_);
    }

private:
    SeqSpec(std::string source, SeqNodePtr root) : source_(std::move(source)), root_(std::move(root)) {}

    std::string source_;
    SeqNodePtr root_;
};

inline SeqSpec parse_seq(std::string_view source) { return SeqSpec::parse(source); }

inline double eval_seq(const SeqSpec& spec, std::int64_t i) { return spec.eval(i); }

}  // namespace ktau
