#include "hilfer/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "hilfer/errors.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

namespace {

struct FunctionInfo {
    std::string_view name;
    Function fn;
    std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Function::Sin, 1},   {"cos", Function::Cos, 1},   {"tan", Function::Tan, 1},
    {"exp", Function::Exp, 1},   {"log", Function::Log, 1},   {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},   {"mlf", Function::Mlf, 2},
};

std::string_view function_name(Function fn) {
    for (const auto& f : kFunctions)
        if (f.fn == fn) return f.name;
    return "?";
}

char op_char(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return '+';
        case BinaryOp::Sub: return '-';
        case BinaryOp::Mul: return '*';
        case BinaryOp::Div: return '/';
        case BinaryOp::Pow: return '^';
    }
    return '?';
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw SyntaxError("empty expression", pos_);
        auto root = expr();
        skip_ws();
        if (pos_ != src_.size()) throw SyntaxError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return root;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size())
                throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    static NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->kids = {std::move(l), std::move(r)};
        return n;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_binary(BinaryOp::Add, lhs, term());
            else if (accept('-')) lhs = make_binary(BinaryOp::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(BinaryOp::Mul, lhs, unary());
            else if (accept('/')) lhs = make_binary(BinaryOp::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Neg;
            n->kids = {unary()};
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (accept('^')) return make_binary(BinaryOp::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (is_ident_start(c)) return identifier();
        if (accept('(')) {
            auto inner = expr();
            expect(')');
            return inner;
        }
        throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t nd = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            nd += digits();
        }
        if (nd == 0) throw SyntaxError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // the 'e' belongs to what follows
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value))
            throw SyntaxError("malformed number", start);
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Number;
        n->number = value;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            const auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                         [&](const FunctionInfo& f) { return f.name == name; });
            if (it == std::end(kFunctions)) throw UnknownIdentifier(name, start);
            ++pos_;
            std::vector<NodePtr> args{expr()};
            while (accept(',')) args.push_back(expr());
            expect(')');
            if (args.size() != it->arity)
                throw SyntaxError(name + " expects " + std::to_string(it->arity) + " argument(s)", start);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Call;
            n->fn = it->fn;
            n->kids = std::move(args);
            return n;
        }

        const auto v = std::find(vars_.begin(), vars_.end(), name);
        if (v != vars_.end()) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Var;
            n->slot = static_cast<std::size_t>(v - vars_.begin());
            n->name = name;
            return n;
        }
        if (name == "pi" || name == "e") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Const;
            n->constant = name == "pi" ? Constant::Pi : Constant::E;
            return n;
        }
        throw UnknownIdentifier(name, start);
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " produced a non-finite value");
    return v;
}

double eval_node(const Node& n, std::span<const double> slots) {
    switch (n.kind) {
        case Node::Kind::Number: return n.number;
        case Node::Kind::Const: return n.constant == Constant::Pi ? std::numbers::pi : std::numbers::e;
        case Node::Kind::Var: return slots[n.slot];
        case Node::Kind::Neg: return -eval_node(*n.kids[0], slots);
        case Node::Kind::Binary: {
            const double l = eval_node(*n.kids[0], slots);
            const double r = eval_node(*n.kids[1], slots);
            switch (n.op) {
                case BinaryOp::Add: return checked(l + r, "addition");
                case BinaryOp::Sub: return checked(l - r, "subtraction");
                case BinaryOp::Mul: return checked(l * r, "multiplication");
                case BinaryOp::Div:
                    if (r == 0.0) throw DomainError("division by zero");
                    return checked(l / r, "division");
                case BinaryOp::Pow: return checked(std::pow(l, r), "power");
            }
            break;
        }
        case Node::Kind::Call: {
            const double x = eval_node(*n.kids[0], slots);
            switch (n.fn) {
                case Function::Sin: return std::sin(x);
                case Function::Cos: return std::cos(x);
                case Function::Tan: return checked(std::tan(x), "tan");
                case Function::Exp: return checked(std::exp(x), "exp");
                case Function::Log:
                    if (!(x > 0.0)) throw DomainError("log of non-positive value");
                    return std::log(x);
                case Function::Sqrt:
                    if (x < 0.0) throw DomainError("sqrt of negative value");
                    return std::sqrt(x);
                case Function::Abs: return std::fabs(x);
                case Function::Mlf: return checked(mittag_leffler(x, eval_node(*n.kids[1], slots)), "mlf");
            }
            break;
        }
    }
    throw DomainError("corrupt expression node");
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::Number: {
            char buf[64];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.number);
            out.append(buf, ptr);
            return;
        }
        case Node::Kind::Const: out += n.constant == Constant::Pi ? "pi" : "e"; return;
        case Node::Kind::Var: out += n.name; return;
        case Node::Kind::Neg:
            out += "(-";
            print_node(*n.kids[0], out);
            out += ')';
            return;
        case Node::Kind::Binary:
            out += '(';
            print_node(*n.kids[0], out);
            out += ' ';
            out += op_char(n.op);
            out += ' ';
            print_node(*n.kids[1], out);
            out += ')';
            return;
        case Node::Kind::Call:
            out += function_name(n.fn);
            out += '(';
            for (std::size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.kids[i], out);
            }
            out += ')';
            return;
    }
}

bool same_tree(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::Number:
            if (a.number != b.number) return false;
            break;
        case Node::Kind::Const:
            if (a.constant != b.constant) return false;
            break;
        case Node::Kind::Var:
            if (a.name != b.name) return false;
            break;
        case Node::Kind::Binary:
            if (a.op != b.op) return false;
            break;
        case Node::Kind::Call:
            if (a.fn != b.fn) return false;
            break;
        case Node::Kind::Neg: break;
    }
    if (a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!same_tree(*a.kids[i], *b.kids[i])) return false;
    return true;
}

void collect_vars(const Node& n, std::set<std::string>& out) {
    if (n.kind == Node::Kind::Var) out.insert(n.name);
    for (const auto& k : n.kids) collect_vars(*k, out);
}

}  // namespace

Expr::Expr() : Expr(std::make_shared<Node>(), {}) {}

Expr::Expr(std::shared_ptr<const Node> root, std::vector<std::string> vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

Expr Expr::parse(std::string_view source, std::vector<std::string> allowed_vars) {
    Parser p(source, allowed_vars);
    auto root = p.parse();
    return Expr(std::move(root), std::move(allowed_vars));
}

Expr Expr::constant(double value, std::vector<std::string> vars) {
    ExprBuilder b(std::move(vars));
    return b.build(b.number(value));
}

std::vector<std::string> Expr::free_variables() const {
    std::set<std::string> s;
    collect_vars(*root_, s);
    return {s.begin(), s.end()};
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
    std::vector<double> slots(vars_.size(), 0.0);
    for (const auto& name : free_variables()) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw MissingBinding(name);
        const auto slot = std::find(vars_.begin(), vars_.end(), name) - vars_.begin();
        slots[static_cast<std::size_t>(slot)] = it->second;
    }
    return eval(slots);
}

double Expr::eval(std::span<const double> slots) const {
    if (slots.size() < vars_.size()) throw MissingBinding(vars_[slots.size()]);
    return eval_node(*root_, slots);
}

std::string Expr::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

bool Expr::structurally_equal(const Expr& other) const { return same_tree(*root_, *other.root_); }

// ---------------------------------------------------------------------------

ExprBuilder::NodePtr ExprBuilder::number(double v) const {
    // the parser never produces negative literals, so neither do we
    if (!std::isfinite(v)) throw DomainError("expression literals must be finite");
    if (std::signbit(v)) return neg(number(-v));
    auto n = std::make_shared<Node>();
    n->number = v;
    return n;
}

ExprBuilder::NodePtr ExprBuilder::constant(Constant c) const {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Const;
    n->constant = c;
    return n;
}

ExprBuilder::NodePtr ExprBuilder::variable(const std::string& name) const {
    const auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw UnknownIdentifier(name, 0);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->slot = static_cast<std::size_t>(it - vars_.begin());
    n->name = name;
    return n;
}

ExprBuilder::NodePtr ExprBuilder::neg(NodePtr x) const {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Neg;
    n->kids = {std::move(x)};
    return n;
}

ExprBuilder::NodePtr ExprBuilder::binary(BinaryOp op, NodePtr l, NodePtr r) const {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->kids = {std::move(l), std::move(r)};
    return n;
}

ExprBuilder::NodePtr ExprBuilder::call(Function fn, std::vector<NodePtr> args) const {
    const auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                 [&](const FunctionInfo& f) { return f.fn == fn; });
    if (args.size() != it->arity) throw SyntaxError(std::string(it->name) + ": wrong arity", 0);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->fn = fn;
    n->kids = std::move(args);
    return n;
}

ExprBuilder::NodePtr ExprBuilder::import(const Expr& e) const {
    // Variables are looked up by name, so slots are remapped as needed.
    struct Rebase {
        const ExprBuilder& self;
        NodePtr operator()(const Node& n) const {
            if (n.kind == Node::Kind::Var) return self.variable(n.name);
            auto copy = std::make_shared<Node>(n);
            for (auto& k : copy->kids) k = (*this)(*k);
            return copy;
        }
    };
    return Rebase{*this}(e.root());
}

}  // namespace hilfer
