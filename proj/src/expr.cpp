#include "gnat/expr.hpp"

#include <cctype>
#include <charconv>
#include <utility>

namespace gnat {

class ExpressionParser {
public:
    ExpressionParser(Expression& out, std::string_view text) : out_(out), text_(text) {}

    void run() {
        out_.root_ = parse_sum();
        skip_blank();
        if (pos_ != text_.size()) fail("unexpected trailing input");
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const {
        throw PreconditionError("expression '" + std::string(text_) + "': " + what + " at position " +
                                std::to_string(pos_));
    }

    void skip_blank() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_blank();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
        out_.nodes_.push_back({op, value, lhs, rhs});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = push(Op::Add, lhs, parse_product());
            else if (accept('-')) lhs = push(Op::Sub, lhs, parse_product());
            else return lhs;
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = push(Op::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = push(Op::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    int parse_unary() {
        if (accept('-')) return push(Op::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (accept('^')) return push(Op::Pow, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_blank();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (accept('(')) {
            int inner = parse_sum();
            if (!accept(')')) fail("missing ')'");
            return inner;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    int parse_number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<size_t>(ptr - begin);
        return push(Op::Const, -1, -1, value);
    }

    int parse_identifier() {
        const size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        static const std::pair<const char*, Op> functions[] = {
            {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt},
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"tanh", Op::Tanh}};
        for (const auto& [fname, op] : functions) {
            if (name == fname) {
                if (!accept('(')) fail("expected '(' after " + name);
                int arg = parse_sum();
                if (!accept(')')) fail("missing ')' after argument of " + name);
                return push(op, arg);
            }
        }
        for (size_t i = 0; i < out_.variables_.size(); ++i)
            if (out_.variables_[i] == name) return push(Op::Var, -1, -1, static_cast<double>(i));
        if (name == "pi") return push(Op::Const, -1, -1, M_PI);
        if (name == "e") return push(Op::Const, -1, -1, M_E);
        fail("unknown identifier '" + name + "'");
    }

    Expression& out_;
    std::string_view text_;
    size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
    Expression e;
    e.text_ = std::string(text);
    e.variables_ = std::move(variables);
    ExpressionParser(e, text).run();
    return e;
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    auto flush = [&] {
        size_t b = cur.find_first_not_of(" \t");
        size_t e = cur.find_last_not_of(" \t");
        parts.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
        cur.clear();
    };
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return parts;
}

}  // namespace gnat
