#pragma once

// Small expression language for kernels Phi(y) and matrix entries a_ij(y).
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := ("-" | "+") unary | power
//   power   := primary [ "^" exponent ]          (right associative)
//   exponent:= ("-" | "+") exponent | power
//   primary := number | "y" index | "nrm" "(" "y" ")"
//            | ("exp" | "abs") "(" expr ")"
//            | ("min" | "max") "(" expr "," expr ")"
//            | "chi" "(" bound "," bound ")" "(" expr ")"
//            | "(" expr ")"
//   bound   := [ "-" | "+" ] "inf" | expr
//
// Precedence from tightest: ^, unary minus, * /, + -. So -2^2 == -4 and
// 2^-1 == 0.5. chi(a,b)(s) is the open-interval indicator a < s < b.

#include <hausdorff/errors.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hausdorff {

class Expr {
public:
    enum class Op : std::uint8_t {
        Number, Var, Norm, Neg, Add, Sub, Mul, Div, Pow, Exp, Abs, Min, Max, Chi
    };

    struct Node {
        Op op;
        double value = 0.0;  // Number literal
        int var = 0;         // Var: zero-based coordinate
        int a = -1, b = -1, c = -1;
    };

    Expr() = default;

    static Expr parse(std::string_view text, int dim);

    double operator()(std::span<const double> y) const { return eval(y); }

    double eval(std::span<const double> y) const {
        if (static_cast<int>(y.size()) != dim_) {
            throw Error("expression of dimension " + std::to_string(dim_) +
                        " evaluated at a point of dimension " + std::to_string(y.size()));
        }
        return eval_node(root_, y);
    }

    int dim() const noexcept { return dim_; }
    bool empty() const noexcept { return !nodes_; }

    // Fully parenthesised rendering; parses back to an equivalent tree.
    std::string to_string() const { return nodes_ ? render(root_) : std::string(); }

    // True when the expression reads individual coordinates y1..yn.
    bool uses_coordinates() const {
        if (!nodes_) return false;
        for (const auto& n : *nodes_) {
            if (n.op == Op::Var) return true;
        }
        return false;
    }

    bool uses_norm() const {
        if (!nodes_) return false;
        for (const auto& n : *nodes_) {
            if (n.op == Op::Norm) return true;
        }
        return false;
    }

    bool is_constant() const { return !uses_coordinates() && !uses_norm(); }

    // Depends on y only through |y| (or not at all).
    bool is_radial() const { return !uses_coordinates(); }

    const std::string& source() const noexcept { return source_; }

private:
    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = -1;
    int dim_ = 0;
    std::string source_;

    const Node& node(int i) const { return (*nodes_)[static_cast<std::size_t>(i)]; }

    [[noreturn]] void domain_error(int i, const char* what) const {
        throw DomainError(render(i), what);
    }

    double checked(int i, double v) const {
        if (!std::isfinite(v)) domain_error(i, "non-finite result");
        return v;
    }

    double eval_node(int i, std::span<const double> y) const {
        const Node& n = node(i);
        switch (n.op) {
            case Op::Number: return n.value;
            case Op::Var: return y[static_cast<std::size_t>(n.var)];
            case Op::Norm: {
                double s = 0.0;
                for (double v : y) s += v * v;
                return std::sqrt(s);
            }
            case Op::Neg: return -eval_node(n.a, y);
            case Op::Add: return checked(i, eval_node(n.a, y) + eval_node(n.b, y));
            case Op::Sub: return checked(i, eval_node(n.a, y) - eval_node(n.b, y));
            case Op::Mul: return checked(i, eval_node(n.a, y) * eval_node(n.b, y));
            case Op::Div: {
                const double num = eval_node(n.a, y);
                const double den = eval_node(n.b, y);
                if (den == 0.0) domain_error(i, "division by zero");
                return checked(i, num / den);
            }
            case Op::Pow: {
                const double base = eval_node(n.a, y);
                const double ex = eval_node(n.b, y);
                if (base == 0.0 && ex < 0.0) domain_error(i, "zero raised to a negative power");
                if (base < 0.0 && std::trunc(ex) != ex) domain_error(i, "negative base with fractional exponent");
                return checked(i, std::pow(base, ex));
            }
            case Op::Exp: return checked(i, std::exp(eval_node(n.a, y)));
            case Op::Abs: return std::fabs(eval_node(n.a, y));
            case Op::Min: return std::fmin(eval_node(n.a, y), eval_node(n.b, y));
            case Op::Max: return std::fmax(eval_node(n.a, y), eval_node(n.b, y));
            case Op::Chi: {
                const double lo = eval_node(n.a, y);
                const double hi = eval_node(n.b, y);
                const double s = eval_node(n.c, y);
                return (lo < s && s < hi) ? 1.0 : 0.0;
            }
        }
        return 0.0;
    }

    static std::string number_text(double v) {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    std::string render(int i) const {
        const Node& n = node(i);
        auto bin = [&](const char* sym) { return "(" + render(n.a) + sym + render(n.b) + ")"; };
        switch (n.op) {
            case Op::Number: return number_text(n.value);
            case Op::Var: return "y" + std::to_string(n.var + 1);
            case Op::Norm: return "nrm(y)";
            case Op::Neg: return "(-" + render(n.a) + ")";
            case Op::Add: return bin("+");
            case Op::Sub: return bin("-");
            case Op::Mul: return bin("*");
            case Op::Div: return bin("/");
            case Op::Pow: return bin("^");
            case Op::Exp: return "exp(" + render(n.a) + ")";
            case Op::Abs: return "abs(" + render(n.a) + ")";
            case Op::Min: return "min(" + render(n.a) + "," + render(n.b) + ")";
            case Op::Max: return "max(" + render(n.a) + "," + render(n.b) + ")";
            case Op::Chi: return "chi(" + render(n.a) + "," + render(n.b) + ")(" + render(n.c) + ")";
        }
        return {};
    }

    friend class ExprParser;
};

class ExprParser {
public:
    ExprParser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    Expr run() {
        if (dim_ < 1) throw Error("expression dimension must be positive");
        skip_ws();
        const int root = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        Expr e;
        e.nodes_ = std::make_shared<const std::vector<Expr::Node>>(std::move(nodes_));
        e.root_ = root;
        e.dim_ = dim_;
        e.source_ = std::string(text_);
        return e;
    }

private:
    using Op = Expr::Op;
    static constexpr int kMaxDepth = 200;

    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    std::vector<Expr::Node> nodes_;

    struct DepthGuard {
        ExprParser& p;
        explicit DepthGuard(ExprParser& parser) : p(parser) {
            if (++p.depth_ > kMaxDepth) p.fail("expression nested too deeply");
        }
        ~DepthGuard() { --p.depth_; }
    };

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(pos_, what); }

    int add(Expr::Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int add(Op op, int a = -1, int b = -1, int c = -1) { return add(Expr::Node{op, 0.0, 0, a, b, c}); }
    int number(double v) { return add(Expr::Node{Op::Number, v, 0, -1, -1, -1}); }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            skip_ws();
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
        skip_ws();
    }

    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    int parse_expr() {
        DepthGuard guard(*this);
        int lhs = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = add(Op::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = add(Op::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                lhs = add(Op::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = add(Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        DepthGuard guard(*this);
        skip_ws();
        if (accept('-')) return add(Op::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_exponent() {
        DepthGuard guard(*this);
        skip_ws();
        if (accept('-')) return add(Op::Neg, parse_exponent());
        if (accept('+')) return parse_exponent();
        return parse_power();
    }

    int parse_power() {
        const int base = parse_primary();
        if (accept('^')) return add(Op::Pow, base, parse_exponent());
        return base;
    }

    int parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
            if (q < text_.size() && is_digit(text_[q])) {
                pos_ = q;
                while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
            }
        }
        double v = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        const auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
            pos_ = start;
            fail("malformed number");
        }
        skip_ws();
        return number(v);
    }

    std::string parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    // Parses "(" arg {"," arg} ")" and checks the count.
    std::vector<int> parse_args(const std::string& fname, std::size_t arity, std::size_t at) {
        expect('(');
        std::vector<int> args;
        if (peek() != ')') {
            args.push_back(parse_expr());
            while (accept(',')) args.push_back(parse_expr());
        }
        expect(')');
        if (args.size() != arity) {
            throw ArityError(at, fname + " expects " + std::to_string(arity) + " argument(s), got " +
                                     std::to_string(args.size()));
        }
        return args;
    }

    int parse_bound() {
        skip_ws();
        const std::size_t save = pos_;
        double sign = 1.0;
        if (peek() == '-' || peek() == '+') {
            sign = peek() == '-' ? -1.0 : 1.0;
            ++pos_;
            skip_ws();
        }
        if (text_.substr(pos_, 3) == "inf" &&
            (pos_ + 3 >= text_.size() || !(is_alpha(text_[pos_ + 3]) || is_digit(text_[pos_ + 3])))) {
            pos_ += 3;
            skip_ws();
            return number(sign * std::numeric_limits<double>::infinity());
        }
        pos_ = save;
        return parse_expr();
    }

    int parse_primary() {
        DepthGuard guard(*this);
        skip_ws();
        const std::size_t at = pos_;
        const char c = peek();
        if (c == '\0') fail("unexpected end of input");
        if (is_digit(c) || c == '.') return parse_number();
        if (c == '(') {
            expect('(');
            const int inner = parse_expr();
            expect(')');
            return inner;
        }
        if (!is_alpha(c)) fail(std::string("unexpected character '") + c + "'");

        const std::string name = parse_ident();
        skip_ws();
        if (name.size() > 1 && name[0] == 'y' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            int idx = 0;
            const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
            if (res.ec != std::errc() || idx < 1 || idx > dim_) throw UnknownIdentifier(at, name);
            return add(Expr::Node{Op::Var, 0.0, idx - 1, -1, -1, -1});
        }
        if (name == "nrm") {
            expect('(');
            const std::size_t arg_at = pos_;
            if (parse_ident() != "y") {
                pos_ = arg_at;
                fail("nrm takes the vector argument 'y'");
            }
            expect(')');
            return add(Op::Norm);
        }
        if (name == "exp" || name == "abs") {
            const auto args = parse_args(name, 1, at);
            return add(name == "exp" ? Op::Exp : Op::Abs, args[0]);
        }
        if (name == "min" || name == "max") {
            const auto args = parse_args(name, 2, at);
            return add(name == "min" ? Op::Min : Op::Max, args[0], args[1]);
        }
        if (name == "chi") {
            expect('(');
            const int lo = parse_bound();
            if (!accept(',')) {
                if (peek() == ')') throw ArityError(at, "chi expects two bounds");
                fail("expected ','");
            }
            const int hi = parse_bound();
            if (peek() == ',') throw ArityError(at, "chi expects two bounds");
            expect(')');
            if (peek() != '(') fail("chi(a,b) must be applied to an argument");
            const auto args = parse_args("chi(a,b)", 1, at);
            return add(Op::Chi, lo, hi, args[0]);
        }
        throw UnknownIdentifier(at, name);
    }
};

inline Expr Expr::parse(std::string_view text, int dim) { return ExprParser(text, dim).run(); }

inline Expr parse_expr(std::string_view text, int dim) { return Expr::parse(text, dim); }

inline double eval_expr(const Expr& e, std::span<const double> y) { return e.eval(y); }

}  // namespace hausdorff
