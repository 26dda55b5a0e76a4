#pragma once

#include <string>
#include <vector>

#include "svh/linalg.hpp"

namespace svh::expr {

// A compiled scalar expression over variables x1..xn. Supports + - * / ^,
// parentheses, unary minus, numeric literals, the constants pi and e, and
// the functions sin cos tan sinh cosh tanh exp log sqrt abs floor, plus the
// two-argument pow, min, max. Parse failures raise FormatError.
class Expression {
public:
    static Expression parse(const std::string& text, int n_vars);

    double eval(const Vec& x) const;

    const std::string& text() const noexcept { return text_; }

private:
    enum class Op : std::uint8_t {
        push_const, push_var, add, sub, mul, div, pow, neg, fn1, fn2,
    };
    struct Instr {
        Op op;
        int a = 0;       // var index / function id
        double value = 0.0;
    };

    std::string text_;
    std::vector<Instr> program_;

    friend class Parser;
};

} // namespace svh::expr
