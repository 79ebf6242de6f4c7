#pragma once

#include "gnat/core.hpp"

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gnat {

// Arithmetic expression over named variables, e.g. "k*exp(-t)" or "1/(1+x1^2)".
// Grammar: + - * / ^ (right associative), unary minus, parentheses, numbers,
// the constants pi and e, and the functions exp log sqrt sin cos tanh.
// Evaluation is generic over double and Dual so sextet derivatives are exact.
class Expression {
public:
    Expression() = default;

    // Throws PreconditionError with the offending position on malformed input.
    static Expression parse(std::string_view text, std::vector<std::string> variables);

    template <class T>
    T eval(std::span<const T> vars) const {
        if (nodes_.empty()) throw PreconditionError("Expression: evaluating an empty expression");
        return eval_node<T>(root_, vars);
    }

    const std::string& text() const { return text_; }
    const std::vector<std::string>& variables() const { return variables_; }

private:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Sin, Cos, Tanh };
    struct Node {
        Op op;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    friend class ExpressionParser;

    template <class T>
    T eval_node(int idx, std::span<const T> vars) const {
        using std::cos, std::exp, std::log, std::sin, std::sqrt, std::pow, std::tanh;
        const Node& nd = nodes_[idx];
        switch (nd.op) {
            case Op::Const: return T(nd.value);
            case Op::Var: return vars[static_cast<size_t>(nd.value)];
            case Op::Add: return eval_node<T>(nd.lhs, vars) + eval_node<T>(nd.rhs, vars);
            case Op::Sub: return eval_node<T>(nd.lhs, vars) - eval_node<T>(nd.rhs, vars);
            case Op::Mul: return eval_node<T>(nd.lhs, vars) * eval_node<T>(nd.rhs, vars);
            case Op::Div: return eval_node<T>(nd.lhs, vars) / eval_node<T>(nd.rhs, vars);
            case Op::Pow: return pow(eval_node<T>(nd.lhs, vars), eval_node<T>(nd.rhs, vars));
            case Op::Neg: return -eval_node<T>(nd.lhs, vars);
            case Op::Exp: return exp(eval_node<T>(nd.lhs, vars));
            case Op::Log: return log(eval_node<T>(nd.lhs, vars));
            case Op::Sqrt: return sqrt(eval_node<T>(nd.lhs, vars));
            case Op::Sin: return sin(eval_node<T>(nd.lhs, vars));
            case Op::Cos: return cos(eval_node<T>(nd.lhs, vars));
            case Op::Tanh: return tanh(eval_node<T>(nd.lhs, vars));
        }
        return T(0.0);
    }

    std::string text_;
    std::vector<std::string> variables_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

// Splits "a,b(c,d),e" at top-level separators (parentheses respected), trimming blanks.
std::vector<std::string> split_top_level(std::string_view text, char sep);

}  // namespace gnat
