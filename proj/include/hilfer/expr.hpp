#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hilfer {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Mlf };
enum class Constant { Pi, E };

namespace detail {
struct Node;
}

/// Immutable scalar expression over a fixed list of variable names.
///
/// Grammar (usual infix; `^` binds tightest and is right associative):
///
///     expr   := term (('+' | '-') term)*
///     term   := unary (('*' | '/') unary)*
///     unary  := ('-' | '+') unary | power
///     power  := atom ('^' unary)?
///     atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Functions: sin cos tan exp log sqrt abs mlf(mu, z). Constants: pi, e.
/// Evaluation never returns NaN or infinity; those cases raise DomainError.
class Expr {
public:
    Expr();  // the literal 0 with no variables

    static Expr parse(std::string_view source, std::vector<std::string> allowed_vars);
    static Expr constant(double value, std::vector<std::string> vars = {});

    /// Variables the expression may reference, in slot order.
    const std::vector<std::string>& variables() const noexcept { return vars_; }
    /// Variables actually referenced, sorted.
    std::vector<std::string> free_variables() const;

    double eval(const std::map<std::string, double>& bindings) const;
    /// Fast path: `slots[i]` is the value of `variables()[i]`.
    double eval(std::span<const double> slots) const;

    /// Fully parenthesised text that parses back to the same tree.
    std::string to_string() const;

    bool structurally_equal(const Expr& other) const;
    friend bool operator==(const Expr& a, const Expr& b) { return a.structurally_equal(b); }

    const detail::Node& root() const noexcept { return *root_; }

private:
    Expr(std::shared_ptr<const detail::Node> root, std::vector<std::string> vars);

    std::shared_ptr<const detail::Node> root_;
    std::vector<std::string> vars_;

    friend class ExprBuilder;
};

namespace detail {

struct Node {
    enum class Kind { Number, Const, Var, Neg, Binary, Call };
    Kind kind = Kind::Number;
    double number = 0.0;
    Constant constant = Constant::Pi;
    std::size_t slot = 0;
    std::string name;  // variable name (Var only)
    BinaryOp op = BinaryOp::Add;
    Function fn = Function::Sin;
    std::vector<std::shared_ptr<const Node>> kids;
};

}  // namespace detail

/// Builds trees programmatically (used for random round-trip testing and for
/// composing perturbed right-hand sides).
class ExprBuilder {
public:
    using NodePtr = std::shared_ptr<const detail::Node>;

    explicit ExprBuilder(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    NodePtr number(double v) const;
    NodePtr constant(Constant c) const;
    NodePtr variable(const std::string& name) const;
    NodePtr neg(NodePtr x) const;
    NodePtr binary(BinaryOp op, NodePtr l, NodePtr r) const;
    NodePtr call(Function fn, std::vector<NodePtr> args) const;
    /// Re-roots an existing expression's tree in this builder's variable list.
    NodePtr import(const Expr& e) const;

    Expr build(NodePtr root) const { return Expr(std::move(root), vars_); }

private:
    std::vector<std::string> vars_;
};

}  // namespace hilfer
