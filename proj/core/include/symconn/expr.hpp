#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "symconn/jet.hpp"

namespace symconn {

/// Immutable expression tree over the variables x, y.
struct ExprNode {
    enum class Kind {
        kNumber,
        kVarX,
        kVarY,
        kConstPi,
        kConstE,
        kNeg,
        kAdd,
        kSub,
        kMul,
        kDiv,
        kPow,
        kCall,
    };

    Kind kind;
    double number = 0.0;  // kNumber only
    std::string func;     // kCall only
    std::shared_ptr<const ExprNode> lhs;  // unary operand or left child
    std::shared_ptr<const ExprNode> rhs;  // right child of binary ops
};

struct ExprAst {
    std::shared_ptr<const ExprNode> root;
};

struct ParseError {
    std::size_t offset = 0;
    std::string message;
    std::string expected;

    /// "parse error at offset N: message (expected ...)".
    std::string to_string() const;
};

class ParseException : public std::runtime_error {
public:
    explicit ParseException(ParseError err);
    const ParseError& error() const { return err_; }

private:
    ParseError err_;
};

/// Recursive-descent parse. Precedence, loosest first: + -, then * /, then
/// unary -, then right-associative ^. Parentheses group; implicit
/// multiplication is not supported. Functions: exp, log, sin, cos, tan,
/// sinh, cosh, tanh, sqrt, atan. Constants: pi, e. Numbers are decimal
/// literals with optional exponent.
std::variant<ExprAst, ParseError> parse(std::string_view text);

/// parse() that throws ParseException instead of returning the error.
ExprAst parse_or_throw(std::string_view text);

/// Jet of the expression at (x, y), exact to truncation. Domain errors
/// from the jet module (poles, log of nonpositive values) propagate.
Jet2 eval_jet(const ExprAst& ast, double x, double y, int order);

/// Fully parenthesized rendering; reparses to a structurally equal tree.
std::string to_string(const ExprAst& ast);

/// Structural equality of trees.
bool expr_equal(const ExprAst& a, const ExprAst& b);

/// Constructors with light constant folding (0 and 1 identities collapse,
/// numeric operands fold). All accept and return shared trees; inputs are
/// never mutated.
ExprAst expr_number(double v);
ExprAst expr_x();
ExprAst expr_y();
ExprAst expr_neg(const ExprAst& a);
ExprAst expr_add(const ExprAst& a, const ExprAst& b);
ExprAst expr_sub(const ExprAst& a, const ExprAst& b);
ExprAst expr_mul(const ExprAst& a, const ExprAst& b);
ExprAst expr_div(const ExprAst& a, const ExprAst& b);
ExprAst expr_pow(const ExprAst& a, const ExprAst& b);
ExprAst expr_call(std::string_view fn, const ExprAst& a);

/// Partial derivative with respect to var ('x' or 'y') as a new tree,
/// simplified by the constant folding of the constructors above.
ExprAst differentiate(const ExprAst& ast, char var);

/// Replace every occurrence of x by for_x and of y by for_y.
ExprAst substitute(const ExprAst& ast, const ExprAst& for_x, const ExprAst& for_y);

}  // namespace symconn
