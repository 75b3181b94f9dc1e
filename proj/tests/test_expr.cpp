#include <doctest.h>

#include <cmath>
#include <random>

#include "hilfer/errors.hpp"
#include "hilfer/expr.hpp"
#include "hilfer/special.hpp"

using namespace hilfer;

namespace {

const std::vector<std::string> kTYD{"t", "y", "d"};

double ev(const std::string& s, std::map<std::string, double> b = {}) {
    std::vector<std::string> vars;
    for (const auto& [k, v] : b) vars.push_back(k);
    return Expr::parse(s, vars).eval(b);
}

ExprBuilder::NodePtr random_tree(const ExprBuilder& b, std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 2);
    switch (pick(rng)) {
        case 0: return b.number(std::uniform_real_distribution<double>(0.0, 10.0)(rng));
        case 1: return b.variable(kTYD[rng() % 3]);
        case 2: return b.constant(rng() % 2 ? Constant::Pi : Constant::E);
        case 3: return b.neg(random_tree(b, rng, depth - 1));
        case 4:
        case 5: {
            const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow};
            return b.binary(ops[rng() % 5], random_tree(b, rng, depth - 1), random_tree(b, rng, depth - 1));
        }
        default: {
            const Function fns[] = {Function::Sin, Function::Cos, Function::Tan, Function::Exp,
                                    Function::Log, Function::Sqrt, Function::Abs};
            if (rng() % 8 == 0)
                return b.call(Function::Mlf, {random_tree(b, rng, depth - 1), random_tree(b, rng, depth - 1)});
            return b.call(fns[rng() % 7], {random_tree(b, rng, depth - 1)});
        }
    }
}

}  // namespace

TEST_CASE("parse and evaluate the spec examples") {
    auto id = Expr::parse("t", {"t"});
    CHECK(id.eval({{"t", 0.25}}) == 0.25);

    auto f = Expr::parse("cos(t)/(10*e^(t+1)) * (sin(y) + d)", kTYD);
    CHECK(f.eval({{"t", 0.0}, {"y", 0.0}, {"d", 0.0}}) == 0.0);
    const double t = 0.3, y = 0.7, d = -0.2;
    CHECK(f.eval({{"t", t}, {"y", y}, {"d", d}}) ==
          doctest::Approx(std::cos(t) / (10 * std::exp(t + 1)) * (std::sin(y) + d)).epsilon(1e-15));

    CHECK(ev("t^2", {{"t", 3}}) == 9.0);
    CHECK(ev("sin(y)+d", {{"y", 0}, {"d", 0}}) == 0.0);
}

TEST_CASE("syntax errors carry the byte offset") {
    try {
        Expr::parse("t + * 2", {"t"});
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(Expr::parse("", {"t"}), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("(t", {"t"}), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("t)", {"t"}), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("sin(t, t)", {"t"}), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("1.2.3", {"t"}), SyntaxError);
}

TEST_CASE("unknown identifiers are named") {
    try {
        Expr::parse("t + y", {"t"});
        FAIL("expected UnknownIdentifier");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.name() == "y");
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(Expr::parse("foo(t)", {"t"}), UnknownIdentifier);
}

TEST_CASE("precedence and associativity") {
    CHECK(ev("2+3*4") == 14.0);
    CHECK(ev("2^3^2") == 512.0);
    CHECK(ev("-2^2") == -4.0);
    CHECK(ev("2^-1") == 0.5);
    CHECK(ev("8/4/2") == 1.0);
    CHECK(ev("8-4-2") == 2.0);
    CHECK(ev("(2+3)*4") == 20.0);
    CHECK(ev("1e-3*1E3") == 1.0);
    CHECK(ev("pi") == doctest::Approx(M_PI).epsilon(1e-16));
    CHECK(ev("e") == doctest::Approx(M_E).epsilon(1e-16));
}

TEST_CASE("functions") {
    CHECK(ev("abs(-3)") == 3.0);
    CHECK(ev("sqrt(16)") == 4.0);
    CHECK(ev("exp(0)") == 1.0);
    CHECK(ev("log(e)") == doctest::Approx(1.0));
    CHECK(ev("tan(0)") == 0.0);
    CHECK(ev("mlf(1, 1)") == doctest::Approx(M_E).epsilon(1e-14));
    CHECK(ev("mlf(1.5, t)", {{"t", 1.0 / 9}}) == mittag_leffler(1.5, 1.0 / 9));
}

TEST_CASE("domain violations raise instead of returning NaN") {
    CHECK_THROWS_AS(ev("1/0"), DomainError);
    CHECK_THROWS_AS(ev("log(0)"), DomainError);
    CHECK_THROWS_AS(ev("log(-1)"), DomainError);
    CHECK_THROWS_AS(ev("sqrt(-1)"), DomainError);
    CHECK_THROWS_AS(ev("(-8)^(1/3)"), DomainError);
    CHECK_THROWS_AS(ev("exp(1000)"), DomainError);
    CHECK_THROWS_AS(ev("mlf(-1, 1)"), DomainError);
}

TEST_CASE("missing bindings") {
    auto e = Expr::parse("t + y", {"t", "y"});
    CHECK_THROWS_AS(e.eval({{"t", 1.0}}), MissingBinding);
    // unused declared variables need no binding
    auto g = Expr::parse("2*t", {"t", "y"});
    CHECK(g.eval({{"t", 1.5}}) == 3.0);
    CHECK(g.free_variables() == std::vector<std::string>{"t"});
}

TEST_CASE("slot evaluation matches map evaluation") {
    auto f = Expr::parse("cos(t)/(10*e^(t+1)) * (sin(y) + d)", kTYD);
    const double slots[] = {0.4, -1.2, 0.05};
    CHECK(f.eval(slots) == f.eval({{"t", 0.4}, {"y", -1.2}, {"d", 0.05}}));
}

TEST_CASE("pretty-print round trip on fixed inputs") {
    for (const char* s : {"t", "-t", "2^3^2", "-2^2", "(1+t)*(y-d)/3", "mlf(1.5, (1/9)*t^1.5)",
                          "cos(t)/(10*e^(t+1)) * (sin(y) + d)", "1e-300", "0.1", "--t", "2^-t"}) {
        auto e = Expr::parse(s, kTYD);
        auto back = Expr::parse(e.to_string(), kTYD);
        CHECK_MESSAGE(back == e, s << " -> " << e.to_string());
        CHECK(back.to_string() == e.to_string());
    }
}

TEST_CASE("pretty-print round trip on random trees") {
    std::mt19937 rng(12345);
    ExprBuilder b(kTYD);
    for (int i = 0; i < 500; ++i) {
        auto e = b.build(random_tree(b, rng, 5));
        auto back = Expr::parse(e.to_string(), kTYD);
        REQUIRE_MESSAGE(back == e, e.to_string());
    }
}

TEST_CASE("structural equality distinguishes trees") {
    CHECK(Expr::parse("1+2+3", {}) != Expr::parse("1+(2+3)", {}));
    CHECK(Expr::parse("t*2", {"t"}) == Expr::parse("(t) * 2", {"t"}));
    CHECK(Expr::parse("t", {"t"}) != Expr::parse("y", {"y"}));
}

TEST_CASE("evaluation is deterministic") {
    auto f = Expr::parse("mlf(1.5, t) * sin(y)^2 + d/3", kTYD);
    const double a = f.eval({{"t", 0.3}, {"y", 0.2}, {"d", 1.0}});
    for (int i = 0; i < 10; ++i) CHECK(f.eval({{"t", 0.3}, {"y", 0.2}, {"d", 1.0}}) == a);
}
