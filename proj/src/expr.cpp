#include "svh/expr.hpp"

#include <cctype>
#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <numbers>

#include "svh/error.hpp"

namespace svh::expr {
namespace {

using Fn1 = double (*)(double);
using Fn2 = double (*)(double, double);

struct Fn1Entry {
    const char* name;
    Fn1 fn;
};
struct Fn2Entry {
    const char* name;
    Fn2 fn;
};

constexpr Fn1Entry kFn1[] = {
    {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
    {"sinh", std::sinh}, {"cosh", std::cosh}, {"tanh", std::tanh},
    {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
    {"abs", std::fabs},  {"floor", std::floor},
};

double fn_pow(double a, double b) { return std::pow(a, b); }
double fn_min(double a, double b) { return a < b ? a : b; }
double fn_max(double a, double b) { return a > b ? a : b; }

constexpr Fn2Entry kFn2[] = {{"pow", fn_pow}, {"min", fn_min}, {"max", fn_max}};

} // namespace

class Parser {
public:
    Parser(const std::string& text, int n_vars) : text_(text), n_vars_(n_vars) {}

    Expression run() {
        Expression e;
        e.text_ = text_;
        parse_expr(e.program_);
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        // Bound the evaluation stack.
        int depth = 0, max_depth = 0;
        for (const auto& ins : e.program_) {
            switch (ins.op) {
                case Expression::Op::push_const:
                case Expression::Op::push_var: ++depth; break;
                case Expression::Op::neg:
                case Expression::Op::fn1: break;
                default: --depth; break;
            }
            max_depth = std::max(max_depth, depth);
        }
        if (max_depth > 60) fail("expression too deeply nested");
        return e;
    }

private:
    using Program = std::vector<Expression::Instr>;

    const std::string& text_;
    int n_vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw FormatError("expression error at offset " + std::to_string(pos_) + ": " + msg +
                          " in \"" + text_ + "\"");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void parse_expr(Program& out) {
        parse_term(out);
        while (true) {
            if (consume('+')) {
                parse_term(out);
                out.push_back({Expression::Op::add, 0, 0.0});
            } else if (consume('-')) {
                parse_term(out);
                out.push_back({Expression::Op::sub, 0, 0.0});
            } else {
                return;
            }
        }
    }

    void parse_term(Program& out) {
        parse_factor(out);
        while (true) {
            if (consume('*')) {
                parse_factor(out);
                out.push_back({Expression::Op::mul, 0, 0.0});
            } else if (consume('/')) {
                parse_factor(out);
                out.push_back({Expression::Op::div, 0, 0.0});
            } else {
                return;
            }
        }
    }

    void parse_factor(Program& out) {
        parse_unary(out);
        if (consume('^')) {  // right-associative
            parse_factor(out);
            out.push_back({Expression::Op::pow, 0, 0.0});
        }
    }

    void parse_unary(Program& out) {
        if (consume('-')) {
            parse_unary(out);
            out.push_back({Expression::Op::neg, 0, 0.0});
            return;
        }
        parse_primary(out);
    }

    void parse_primary(Program& out) {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr(out);
            if (!consume(')')) fail("missing ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(start, &end);
            if (end == start) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - start);
            out.push_back({Expression::Op::push_const, 0, v});
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (consume('(')) {
                for (std::size_t i = 0; i < std::size(kFn1); ++i) {
                    if (name == kFn1[i].name) {
                        parse_expr(out);
                        if (!consume(')')) fail("missing ')' after " + name);
                        out.push_back({Expression::Op::fn1, static_cast<int>(i), 0.0});
                        return;
                    }
                }
                for (std::size_t i = 0; i < std::size(kFn2); ++i) {
                    if (name == kFn2[i].name) {
                        parse_expr(out);
                        if (!consume(',')) fail("expected ',' in " + name + "(a, b)");
                        parse_expr(out);
                        if (!consume(')')) fail("missing ')' after " + name);
                        out.push_back({Expression::Op::fn2, static_cast<int>(i), 0.0});
                        return;
                    }
                }
                fail("unknown function '" + name + "'");
            }
            if (name == "pi") {
                out.push_back({Expression::Op::push_const, 0, std::numbers::pi});
                return;
            }
            if (name == "e") {
                out.push_back({Expression::Op::push_const, 0, std::numbers::e});
                return;
            }
            if (name.size() >= 2 && name[0] == 'x') {
                char* end = nullptr;
                const long idx = std::strtol(name.c_str() + 1, &end, 10);
                if (*end == '\0' && idx >= 1 && idx <= n_vars_) {
                    out.push_back({Expression::Op::push_var, static_cast<int>(idx - 1), 0.0});
                    return;
                }
                if (*end == '\0')
                    fail("variable " + name + " out of range (problem has " +
                         std::to_string(n_vars_) + " variables)");
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

Expression Expression::parse(const std::string& text, int n_vars) {
    return Parser(text, n_vars).run();
}

double Expression::eval(const Vec& x) const {
    double stack[64];
    int top = -1;
    for (const auto& ins : program_) {
        switch (ins.op) {
            case Op::push_const: stack[++top] = ins.value; break;
            case Op::push_var: stack[++top] = x[static_cast<std::size_t>(ins.a)]; break;
            case Op::add: --top; stack[top] += stack[top + 1]; break;
            case Op::sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::div: --top; stack[top] /= stack[top + 1]; break;
            case Op::pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case Op::neg: stack[top] = -stack[top]; break;
            case Op::fn1: stack[top] = kFn1[ins.a].fn(stack[top]); break;
            case Op::fn2: --top; stack[top] = kFn2[ins.a].fn(stack[top], stack[top + 1]); break;
        }
    }
    return stack[0];
}

} // namespace svh::expr
