#include "symconn/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace symconn {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;

NodePtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::kNumber;
    n->number = v;
    return n;
}

NodePtr make_leaf(Kind k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    return n;
}

NodePtr make_unary(Kind k, NodePtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(operand);
    return n;
}

NodePtr make_binary(Kind k, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call(std::string func, NodePtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::kCall;
    n->func = std::move(func);
    n->lhs = std::move(arg);
    return n;
}

constexpr const char* kFunctions[] = {"exp", "log", "sin", "cos", "tan",
                                      "sinh", "cosh", "tanh", "sqrt", "atan"};

bool is_function(std::string_view name) {
    for (const char* f : kFunctions) {
        if (name == f) return true;
    }
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::variant<ExprAst, ParseError> run() {
        NodePtr root = parse_sum();
        if (failed_) return err_;
        skip_ws();
        if (pos_ != text_.size()) {
            fail(pos_, "unexpected trailing input", "end of input or an operator");
            return err_;
        }
        return ExprAst{std::move(root)};
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    bool failed_ = false;
    ParseError err_;

    void fail(std::size_t offset, std::string message, std::string expected) {
        if (failed_) return;
        failed_ = true;
        err_ = ParseError{offset, std::move(message), std::move(expected)};
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool peek_char(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume_char(char c) {
        if (peek_char(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    // sum := product (('+'|'-') product)*
    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        if (failed_) return nullptr;
        for (;;) {
            if (consume_char('+')) {
                NodePtr rhs = parse_product();
                if (failed_) return nullptr;
                lhs = make_binary(Kind::kAdd, std::move(lhs), std::move(rhs));
            } else if (consume_char('-')) {
                NodePtr rhs = parse_product();
                if (failed_) return nullptr;
                lhs = make_binary(Kind::kSub, std::move(lhs), std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    // product := factor (('*'|'/') factor)*
    NodePtr parse_product() {
        NodePtr lhs = parse_factor();
        if (failed_) return nullptr;
        for (;;) {
            if (consume_char('*')) {
                NodePtr rhs = parse_factor();
                if (failed_) return nullptr;
                lhs = make_binary(Kind::kMul, std::move(lhs), std::move(rhs));
            } else if (consume_char('/')) {
                NodePtr rhs = parse_factor();
                if (failed_) return nullptr;
                lhs = make_binary(Kind::kDiv, std::move(lhs), std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    // factor := '-' factor | power
    NodePtr parse_factor() {
        if (consume_char('-')) {
            NodePtr operand = parse_factor();
            if (failed_) return nullptr;
            return make_unary(Kind::kNeg, std::move(operand));
        }
        return parse_power();
    }

    // power := atom ('^' factor)?   (right-associative through factor)
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (failed_) return nullptr;
        if (consume_char('^')) {
            NodePtr exponent = parse_factor();
            if (failed_) return nullptr;
            return make_binary(Kind::kPow, std::move(base), std::move(exponent));
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail(pos_, "unexpected end of input", "a number, variable, or '('");
            return nullptr;
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (failed_) return nullptr;
            if (!consume_char(')')) {
                fail(pos_, "unbalanced parenthesis", "')'");
                return nullptr;
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return parse_identifier();
        }
        fail(pos_, std::string("unexpected character '") + c + "'",
             "a number, variable, or '('");
        return nullptr;
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ < text_.size() &&
                std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
            } else {
                // "2e" with no digits is the number 2 followed by the
                // constant e, which the grammar rejects downstream; back
                // out of the exponent scan.
                pos_ = mark;
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            fail(start, "malformed number literal", "a decimal literal");
            return nullptr;
        }
        return make_number(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return make_leaf(Kind::kVarX);
        if (name == "y") return make_leaf(Kind::kVarY);
        if (name == "pi") return make_leaf(Kind::kConstPi);
        if (name == "e") return make_leaf(Kind::kConstE);
        if (is_function(name)) {
            if (!consume_char('(')) {
                fail(pos_, "function name without argument list", "'('");
                return nullptr;
            }
            NodePtr arg = parse_sum();
            if (failed_) return nullptr;
            if (!consume_char(')')) {
                fail(pos_, "unbalanced parenthesis", "')'");
                return nullptr;
            }
            return make_call(std::string(name), std::move(arg));
        }
        fail(start, "unknown identifier '" + std::string(name) + "'",
             "x, y, pi, e, or a function name");
        return nullptr;
    }
};

}  // namespace

std::string ParseError::to_string() const {
    std::string out = "parse error at offset " + std::to_string(offset) + ": " + message;
    if (!expected.empty()) {
        out += " (expected " + expected + ")";
    }
    return out;
}

ParseException::ParseException(ParseError err)
    : std::runtime_error(err.to_string()), err_(std::move(err)) {}

std::variant<ExprAst, ParseError> parse(std::string_view text) {
    return Parser(text).run();
}

ExprAst parse_or_throw(std::string_view text) {
    auto result = parse(text);
    if (auto* err = std::get_if<ParseError>(&result)) {
        throw ParseException(*err);
    }
    return std::get<ExprAst>(std::move(result));
}

namespace {

Jet2 eval_node(const ExprNode& node, double x, double y, int order) {
    switch (node.kind) {
        case Kind::kNumber:
            return Jet2::constant(order, node.number);
        case Kind::kVarX:
            return Jet2::variable_x(order, x);
        case Kind::kVarY:
            return Jet2::variable_y(order, y);
        case Kind::kConstPi:
            return Jet2::constant(order, 3.14159265358979323846);
        case Kind::kConstE:
            return Jet2::constant(order, 2.71828182845904523536);
        case Kind::kNeg:
            return -eval_node(*node.lhs, x, y, order);
        case Kind::kAdd:
            return eval_node(*node.lhs, x, y, order) + eval_node(*node.rhs, x, y, order);
        case Kind::kSub:
            return eval_node(*node.lhs, x, y, order) - eval_node(*node.rhs, x, y, order);
        case Kind::kMul:
            return eval_node(*node.lhs, x, y, order) * eval_node(*node.rhs, x, y, order);
        case Kind::kDiv:
            return eval_node(*node.lhs, x, y, order) / eval_node(*node.rhs, x, y, order);
        case Kind::kPow: {
            // Constant exponents (possibly negated) take the pow-const
            // path, which handles integer powers of any base; everything
            // else goes through exp(rhs*log(lhs)).
            const ExprNode* exponent = node.rhs.get();
            bool negated = false;
            while (exponent->kind == Kind::kNeg) {
                negated = !negated;
                exponent = exponent->lhs.get();
            }
            if (exponent->kind == Kind::kNumber) {
                const double p = negated ? -exponent->number : exponent->number;
                return jet_pow(eval_node(*node.lhs, x, y, order), p);
            }
            Jet2 base = eval_node(*node.lhs, x, y, order);
            Jet2 expo = eval_node(*node.rhs, x, y, order);
            return jet_exp(expo * jet_log(base));
        }
        case Kind::kCall:
            return jet_apply(node.func, eval_node(*node.lhs, x, y, order));
    }
    throw std::logic_error("unreachable expression kind");
}

void print_node(const ExprNode& node, std::string& out) {
    switch (node.kind) {
        case Kind::kNumber: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", node.number);
            out += buf;
            return;
        }
        case Kind::kVarX:
            out += 'x';
            return;
        case Kind::kVarY:
            out += 'y';
            return;
        case Kind::kConstPi:
            out += "pi";
            return;
        case Kind::kConstE:
            out += 'e';
            return;
        case Kind::kNeg:
            out += "(-";
            print_node(*node.lhs, out);
            out += ')';
            return;
        case Kind::kAdd:
        case Kind::kSub:
        case Kind::kMul:
        case Kind::kDiv:
        case Kind::kPow: {
            const char op = node.kind == Kind::kAdd   ? '+'
                            : node.kind == Kind::kSub ? '-'
                            : node.kind == Kind::kMul ? '*'
                            : node.kind == Kind::kDiv ? '/'
                                                      : '^';
            out += '(';
            print_node(*node.lhs, out);
            out += op;
            print_node(*node.rhs, out);
            out += ')';
            return;
        }
        case Kind::kCall:
            out += node.func;
            out += '(';
            print_node(*node.lhs, out);
            out += ')';
            return;
    }
}

}  // namespace

Jet2 eval_jet(const ExprAst& ast, double x, double y, int order) {
    if (!ast.root) {
        throw std::invalid_argument("empty expression");
    }
    return eval_node(*ast.root, x, y, order);
}

std::string to_string(const ExprAst& ast) {
    std::string out;
    if (ast.root) print_node(*ast.root, out);
    return out;
}

bool expr_equal(const ExprAst& a, const ExprAst& b) {
    const auto equal = [](const ExprNode* p, const ExprNode* q, const auto& self) -> bool {
        if (p == nullptr || q == nullptr) return p == q;
        if (p->kind != q->kind) return false;
        if (p->kind == Kind::kNumber && p->number != q->number) return false;
        if (p->kind == Kind::kCall && p->func != q->func) return false;
        return self(p->lhs.get(), q->lhs.get(), self) &&
               self(p->rhs.get(), q->rhs.get(), self);
    };
    return equal(a.root.get(), b.root.get(), equal);
}

namespace {

bool is_number(const ExprAst& a, double v) {
    return a.root && a.root->kind == Kind::kNumber && a.root->number == v;
}

bool is_any_number(const ExprAst& a) {
    return a.root && a.root->kind == Kind::kNumber;
}

ExprAst make_node(Kind kind, const ExprAst& lhs, const ExprAst& rhs,
                  std::string_view fn = {}) {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->func = std::string(fn);
    node->lhs = lhs.root;
    node->rhs = rhs.root;
    return ExprAst{std::move(node)};
}

}  // namespace

ExprAst expr_number(double v) {
    if (!std::isfinite(v)) {
        throw std::domain_error("non-finite expression constant");
    }
    auto node = std::make_shared<ExprNode>();
    node->kind = Kind::kNumber;
    node->number = v;
    return ExprAst{std::move(node)};
}

ExprAst expr_x() {
    auto node = std::make_shared<ExprNode>();
    node->kind = Kind::kVarX;
    return ExprAst{std::move(node)};
}

ExprAst expr_y() {
    auto node = std::make_shared<ExprNode>();
    node->kind = Kind::kVarY;
    return ExprAst{std::move(node)};
}

ExprAst expr_neg(const ExprAst& a) {
    if (is_any_number(a)) return expr_number(-a.root->number);
    if (a.root && a.root->kind == Kind::kNeg) return ExprAst{a.root->lhs};
    return make_node(Kind::kNeg, a, ExprAst{});
}

ExprAst expr_add(const ExprAst& a, const ExprAst& b) {
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    if (is_any_number(a) && is_any_number(b)) {
        return expr_number(a.root->number + b.root->number);
    }
    return make_node(Kind::kAdd, a, b);
}

ExprAst expr_sub(const ExprAst& a, const ExprAst& b) {
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return expr_neg(b);
    if (is_any_number(a) && is_any_number(b)) {
        return expr_number(a.root->number - b.root->number);
    }
    return make_node(Kind::kSub, a, b);
}

ExprAst expr_mul(const ExprAst& a, const ExprAst& b) {
    if (is_number(a, 0.0) || is_number(b, 0.0)) return expr_number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    if (is_number(a, -1.0)) return expr_neg(b);
    if (is_number(b, -1.0)) return expr_neg(a);
    if (is_any_number(a) && is_any_number(b)) {
        return expr_number(a.root->number * b.root->number);
    }
    return make_node(Kind::kMul, a, b);
}

ExprAst expr_div(const ExprAst& a, const ExprAst& b) {
    if (is_number(a, 0.0) && !is_number(b, 0.0)) return expr_number(0.0);
    if (is_number(b, 1.0)) return a;
    return make_node(Kind::kDiv, a, b);
}

ExprAst expr_pow(const ExprAst& a, const ExprAst& b) {
    if (is_number(b, 1.0)) return a;
    if (is_number(b, 0.0)) return expr_number(1.0);
    return make_node(Kind::kPow, a, b);
}

ExprAst expr_call(std::string_view fn, const ExprAst& a) {
    if (!is_function(fn)) {
        throw std::invalid_argument("unknown elementary function: " + std::string(fn));
    }
    return make_node(Kind::kCall, a, ExprAst{}, fn);
}

namespace {

ExprAst diff_node(const std::shared_ptr<const ExprNode>& node, char var);

ExprAst diff_call(const std::shared_ptr<const ExprNode>& node, char var) {
    const ExprAst u{node->lhs};
    const ExprAst du = diff_node(node->lhs, var);
    if (is_number(du, 0.0)) return expr_number(0.0);
    const std::string& fn = node->func;
    ExprAst outer;  // d(fn)/du
    if (fn == "exp") {
        outer = ExprAst{node};
    } else if (fn == "log") {
        return expr_div(du, u);
    } else if (fn == "sin") {
        outer = expr_call("cos", u);
    } else if (fn == "cos") {
        outer = expr_neg(expr_call("sin", u));
    } else if (fn == "tan") {
        outer = expr_add(expr_number(1.0),
                         expr_pow(expr_call("tan", u), expr_number(2.0)));
    } else if (fn == "sinh") {
        outer = expr_call("cosh", u);
    } else if (fn == "cosh") {
        outer = expr_call("sinh", u);
    } else if (fn == "tanh") {
        outer = expr_sub(expr_number(1.0),
                         expr_pow(expr_call("tanh", u), expr_number(2.0)));
    } else if (fn == "sqrt") {
        return expr_div(du, expr_mul(expr_number(2.0), expr_call("sqrt", u)));
    } else if (fn == "atan") {
        return expr_div(du, expr_add(expr_number(1.0),
                                     expr_pow(u, expr_number(2.0))));
    } else {
        throw std::invalid_argument("unknown elementary function: " + fn);
    }
    return expr_mul(outer, du);
}

ExprAst diff_node(const std::shared_ptr<const ExprNode>& node, char var) {
    const ExprAst lhs{node ? node->lhs : nullptr};
    const ExprAst rhs{node ? node->rhs : nullptr};
    switch (node->kind) {
        case Kind::kNumber:
        case Kind::kConstPi:
        case Kind::kConstE:
            return expr_number(0.0);
        case Kind::kVarX:
            return expr_number(var == 'x' ? 1.0 : 0.0);
        case Kind::kVarY:
            return expr_number(var == 'y' ? 1.0 : 0.0);
        case Kind::kNeg:
            return expr_neg(diff_node(node->lhs, var));
        case Kind::kAdd:
            return expr_add(diff_node(node->lhs, var), diff_node(node->rhs, var));
        case Kind::kSub:
            return expr_sub(diff_node(node->lhs, var), diff_node(node->rhs, var));
        case Kind::kMul:
            return expr_add(expr_mul(diff_node(node->lhs, var), rhs),
                            expr_mul(lhs, diff_node(node->rhs, var)));
        case Kind::kDiv: {
            const ExprAst dl = diff_node(node->lhs, var);
            const ExprAst dr = diff_node(node->rhs, var);
            if (is_number(dr, 0.0)) return expr_div(dl, rhs);
            return expr_div(expr_sub(expr_mul(dl, rhs), expr_mul(lhs, dr)),
                            expr_pow(rhs, expr_number(2.0)));
        }
        case Kind::kPow: {
            const ExprAst dl = diff_node(node->lhs, var);
            const ExprAst dr = diff_node(node->rhs, var);
            if (is_number(dr, 0.0)) {
                // d(u^c) = c u^(c-1) u'
                const ExprAst cm1 = is_any_number(rhs)
                        ? expr_number(rhs.root->number - 1.0)
                        : expr_sub(rhs, expr_number(1.0));
                return expr_mul(expr_mul(rhs, expr_pow(lhs, cm1)), dl);
            }
            // d(u^v) = u^v (v' log u + v u'/u)
            const ExprAst term = expr_add(expr_mul(dr, expr_call("log", lhs)),
                                          expr_div(expr_mul(rhs, dl), lhs));
            return expr_mul(ExprAst{node}, term);
        }
        case Kind::kCall:
            return diff_call(node, var);
    }
    throw std::logic_error("unhandled expression node kind");
}

ExprAst subst_node(const std::shared_ptr<const ExprNode>& node,
                   const ExprAst& for_x, const ExprAst& for_y) {
    switch (node->kind) {
        case Kind::kNumber:
        case Kind::kConstPi:
        case Kind::kConstE:
            return ExprAst{node};
        case Kind::kVarX:
            return for_x;
        case Kind::kVarY:
            return for_y;
        case Kind::kNeg:
            return expr_neg(subst_node(node->lhs, for_x, for_y));
        case Kind::kAdd:
            return expr_add(subst_node(node->lhs, for_x, for_y),
                            subst_node(node->rhs, for_x, for_y));
        case Kind::kSub:
            return expr_sub(subst_node(node->lhs, for_x, for_y),
                            subst_node(node->rhs, for_x, for_y));
        case Kind::kMul:
            return expr_mul(subst_node(node->lhs, for_x, for_y),
                            subst_node(node->rhs, for_x, for_y));
        case Kind::kDiv:
            return expr_div(subst_node(node->lhs, for_x, for_y),
                            subst_node(node->rhs, for_x, for_y));
        case Kind::kPow:
            return expr_pow(subst_node(node->lhs, for_x, for_y),
                            subst_node(node->rhs, for_x, for_y));
        case Kind::kCall:
            return make_node(Kind::kCall, subst_node(node->lhs, for_x, for_y),
                             ExprAst{}, node->func);
    }
    throw std::logic_error("unhandled expression node kind");
}

}  // namespace

ExprAst differentiate(const ExprAst& ast, char var) {
    if (!ast.root) {
        throw std::invalid_argument("empty expression");
    }
    if (var != 'x' && var != 'y') {
        throw std::invalid_argument("differentiation variable must be 'x' or 'y'");
    }
    return diff_node(ast.root, var);
}

ExprAst substitute(const ExprAst& ast, const ExprAst& for_x, const ExprAst& for_y) {
    if (!ast.root || !for_x.root || !for_y.root) {
        throw std::invalid_argument("empty expression");
    }
    return subst_node(ast.root, for_x, for_y);
}

}  // namespace symconn
