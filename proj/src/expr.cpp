#include "fvirp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fvirp/errors.hpp"

namespace fvirp {

struct Expr::Node {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos };
    Op op;
    double value = 0.0;
    int var = 0; // 0..4 -> u, v, x, y, t
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression parse error at position " + std::to_string(pos_) + ": " +
                          what + " in '" + s_ + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+'))
                lhs = make(Op::Add, lhs, term());
            else if (consume('-'))
                lhs = make(Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*'))
                lhs = make(Op::Mul, lhs, factor());
            else if (consume('/'))
                lhs = make(Op::Div, lhs, factor());
            else
                return lhs;
        }
    }

    // Unary minus binds looser than '^': -2^2 = -(2^2).
    NodePtr factor() {
        if (consume('-')) return make(Op::Neg, factor());
        if (consume('+')) return factor();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (consume('^')) return make(Op::Pow, base, factor()); // right associative
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        if (consume('(')) {
            NodePtr e = expr();
            if (!consume(')')) fail("missing ')'");
            return e;
        }
        fail("unexpected character");
    }

    NodePtr number() {
        const char* start = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - start);
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }

    NodePtr ident() {
        std::size_t end = pos_;
        while (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) ++end;
        const std::string name = s_.substr(pos_, end - pos_);
        pos_ = end;
        static const std::vector<std::string> vars = {"u", "v", "x", "y", "t"};
        for (int i = 0; i < static_cast<int>(vars.size()); ++i)
            if (name == vars[i]) {
                auto n = std::make_shared<Expr::Node>();
                n->op = Op::Var;
                n->var = i;
                return n;
            }
        Op fn;
        if (name == "exp")
            fn = Op::Exp;
        else if (name == "sin")
            fn = Op::Sin;
        else if (name == "cos")
            fn = Op::Cos;
        else
            fail("unknown identifier '" + name + "'");
        if (!consume('(')) fail("expected '(' after function name");
        NodePtr arg = expr();
        if (!consume(')')) fail("missing ')'");
        return make(fn, arg);
    }
};

double eval_node(const Expr::Node& n, const ExprEnv& env) {
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
        switch (n.var) {
        case 0: return env.u;
        case 1: return env.v;
        case 2: return env.x;
        case 3: return env.y;
        default: return env.t;
        }
    case Op::Add: return eval_node(*n.lhs, env) + eval_node(*n.rhs, env);
    case Op::Sub: return eval_node(*n.lhs, env) - eval_node(*n.rhs, env);
    case Op::Mul: return eval_node(*n.lhs, env) * eval_node(*n.rhs, env);
    case Op::Div: return eval_node(*n.lhs, env) / eval_node(*n.rhs, env);
    case Op::Pow: return std::pow(eval_node(*n.lhs, env), eval_node(*n.rhs, env));
    case Op::Neg: return -eval_node(*n.lhs, env);
    case Op::Exp: return std::exp(eval_node(*n.lhs, env));
    case Op::Sin: return std::sin(eval_node(*n.lhs, env));
    case Op::Cos: return std::cos(eval_node(*n.lhs, env));
    }
    return 0.0;
}

} // namespace

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).run();
    return e;
}

double Expr::eval(const ExprEnv& env) const { return eval_node(*root_, env); }

} // namespace fvirp
