#pragma once

// Minimal arithmetic expressions for user-defined coefficient entries and
// boundary data: +, -, *, /, sin, cos, numeric constants, pi, and the
// variables y1..y4 (x1..x4 accepted as synonyms).

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "homoglab/linalg.hpp"

namespace homoglab {

class Expr {
  public:
    static Expr parse(const std::string& text, int dim);

    double eval(const Vec& y) const;

    const std::string& text() const { return text_; }
    bool empty() const { return nodes_.empty(); }

  private:
    enum class Op : uint8_t { Const, Var, Add, Sub, Mul, Div, Neg, Sin, Cos };
    struct Node {
        Op op;
        double value = 0;  // Const
        int var = 0;       // Var
        int lhs = -1, rhs = -1;
    };

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string text_;

    friend class ExprParser;
};

class ExprParser {
  public:
    ExprParser(const std::string& s, int dim) : s_(s), dim_(dim) {}

    Expr run() {
        Expr e;
        e.text_ = s_;
        nodes_ = &e.nodes_;
        pos_ = 0;
        e.root_ = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return e;
    }

  private:
    const std::string& s_;
    int dim_;
    size_t pos_ = 0;
    std::vector<Expr::Node>* nodes_ = nullptr;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("expression error at position " + std::to_string(pos_) +
                                    " in \"" + s_ + "\": " + msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(Expr::Node n) {
        nodes_->push_back(n);
        return int(nodes_->size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        while (true) {
            if (eat('+')) {
                int rhs = parse_product();
                lhs = add({Expr::Op::Add, 0, 0, lhs, rhs});
            } else if (eat('-')) {
                int rhs = parse_product();
                lhs = add({Expr::Op::Sub, 0, 0, lhs, rhs});
            } else {
                return lhs;
            }
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        while (true) {
            if (eat('*')) {
                int rhs = parse_unary();
                lhs = add({Expr::Op::Mul, 0, 0, lhs, rhs});
            } else if (eat('/')) {
                int rhs = parse_unary();
                lhs = add({Expr::Op::Div, 0, 0, lhs, rhs});
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        if (eat('-')) return add({Expr::Op::Neg, 0, 0, parse_unary(), -1});
        if (eat('+')) return parse_unary();
        return parse_atom();
    }

    int parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t end = 0;
            double v = std::stod(s_.substr(pos_), &end);
            pos_ += end;
            return add({Expr::Op::Const, v, 0, -1, -1});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string word = s_.substr(start, pos_ - start);
            if (word == "pi") return add({Expr::Op::Const, kPi, 0, -1, -1});
            if (word == "sin" || word == "cos") {
                if (!eat('(')) fail("expected '(' after " + word);
                int inner = parse_sum();
                if (!eat(')')) fail("expected ')'");
                return add({word == "sin" ? Expr::Op::Sin : Expr::Op::Cos, 0, 0, inner, -1});
            }
            if ((word[0] == 'y' || word[0] == 'x') && word.size() == 2 &&
                word[1] >= '1' && word[1] <= '0' + char(dim_)) {
                return add({Expr::Op::Var, 0, word[1] - '1', -1, -1});
            }
            fail("unknown identifier '" + word + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

inline Expr Expr::parse(const std::string& text, int dim) {
    return ExprParser(text, dim).run();
}

inline double Expr::eval(const Vec& y) const {
    if (root_ < 0) throw std::logic_error("empty expression");
    // nodes_ is in topological (creation) order, children precede parents
    double stack[256];
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        double v = 0;
        switch (n.op) {
            case Op::Const: v = n.value; break;
            case Op::Var: v = y[n.var]; break;
            case Op::Add: v = stack[n.lhs] + stack[n.rhs]; break;
            case Op::Sub: v = stack[n.lhs] - stack[n.rhs]; break;
            case Op::Mul: v = stack[n.lhs] * stack[n.rhs]; break;
            case Op::Div: v = stack[n.lhs] / stack[n.rhs]; break;
            case Op::Neg: v = -stack[n.lhs]; break;
            case Op::Sin: v = std::sin(stack[n.lhs]); break;
            case Op::Cos: v = std::cos(stack[n.lhs]); break;
        }
        if (i >= 256) throw std::length_error("expression too large");
        stack[i] = v;
    }
    return stack[size_t(root_)];
}

}  // namespace homoglab
