#pragma once

#include <memory>
#include <string>

namespace fvirp {

// Environment for the model expression grammar: reaction arguments (u, v),
// space-time coordinates (x, y, t).
struct ExprEnv {
    double u = 0.0;
    double v = 0.0;
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

// Compiled arithmetic expression over +, -, *, /, ^, exp, sin, cos, numeric
// constants and the variables u, v, x, y, t.
class Expr {
public:
    static Expr parse(const std::string& text);
    double eval(const ExprEnv& env) const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

} // namespace fvirp
