#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pstrat/defset.hpp"
#include "pstrat/fixtures.hpp"
#include "pstrat/stratification.hpp"

using namespace pstrat;

namespace {

Point pt(std::initializer_list<Scalar> cs) {
    Point x{};
    int i = 0;
    for (Scalar c : cs) x[i++] = c;
    return x;
}

} // namespace

TEST_CASE("parses the fixture expressions") {
    auto parabola = parse("x2 - x1^2 = 0");
    REQUIRE(std::holds_alternative<AtomZero>(parabola->node));
    CHECK(std::get<AtomZero>(parabola->node).poly.total_degree() == 2);

    auto hyperbola = parse("x1*x2 - 9 = 0");
    REQUIRE(std::holds_alternative<AtomZero>(hyperbola->node));
    CHECK(std::get<AtomZero>(hyperbola->node).poly.total_degree() == 2);
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse("val(x1) >");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.expected == "INT");
    }
    CHECK_THROWS_AS(parse("x1 +"), SyntaxError);
    CHECK_THROWS_AS(parse("val(x1) >= 1 &"), SyntaxError);
    CHECK_THROWS_AS(parse("x1 = 3"), SyntaxError);
    CHECK_THROWS_AS(parse("y - 1 = 0"), UnknownVariableError);
    CHECK_THROWS_AS(parse("x9 = 0"), UnknownVariableError);
    CHECK_THROWS_AS(parse("x1^17 = 0"), DegreeOverflowError);
    CHECK_THROWS_AS(parse("(x1^9 + 1)*(x2^9 + x1) = 0"), DegreeOverflowError);
}

TEST_CASE("print / parse round trip") {
    std::vector<std::string> sources = {
        "x2 - x1^2 = 0",
        "x1*x2 - 9 = 0",
        "val(x1) >= 1 & val(x2) < 2",
        "!(x1 = 0) | val(x1 + x2) = 1 & rv(x2) = (1, 2)",
        "(x1 + 1)^2 - x2 = 0",
        "!(x1 = 0 | x2 = 0)",
    };
    for (const auto& src : sources) {
        SetExprPtr e = parse(src);
        std::string printed = print(e);
        SetExprPtr e2 = parse(printed);
        CHECK(print(e2) == printed);
    }
}

TEST_CASE("evaluate the parabola at p=3 m=2") {
    PadicContext ctx(3, 2, 2);
    auto res = evaluate(ctx, parse("x2 - x1^2 = 0"));
    CHECK(res.set.size() == 9);
    for (Scalar a = 0; a < 9; ++a) CHECK(res.set.contains(pt({a, Scalar(a * a % 9)})));
}

TEST_CASE("evaluate valuation atoms") {
    PadicContext ctx(3, 2, 1);
    auto res = evaluate(ctx, parse("val(x1) >= 1"));
    CHECK(res.set.size() == 3);
    CHECK(res.set.contains(pt({0})));
    CHECK(res.set.contains(pt({3})));
    CHECK(res.set.contains(pt({6})));

    // contradiction
    CHECK(evaluate(ctx, parse("x1 = 0 & val(x1) = 0")).set.empty());

    // clamped thresholds: >= m means "= 0"
    auto clamped = evaluate(ctx, parse("val(x1) >= 5"));
    CHECK(clamped.set.size() == 1);
    CHECK(clamped.set.contains(pt({0})));

    // other comparisons against clamped thresholds blow up on truncated zeros
    CHECK_THROWS_AS(evaluate(ctx, parse("val(x1) = 5")), PrecisionExhausted);
    CHECK_THROWS_AS(evaluate(ctx, parse("val(x1) > 5")), PrecisionExhausted);
    // ... but are fine when the value never vanishes (x^2+x+1 has valuation
    // at most 1 on Z/9)
    CHECK(evaluate(ctx, parse("val(x1^2 + x1 + 1) = 5 | val(x1) >= 0")).set.size() == 9);
}

TEST_CASE("evaluate rv atoms") {
    PadicContext ctx(3, 2, 1);
    auto res = evaluate(ctx, parse("rv(x1) = (0, 1)"));
    CHECK(res.set.size() == 3); // 1, 4, 7
    CHECK(res.set.contains(pt({1})));
    CHECK(res.set.contains(pt({4})));
    CHECK(res.set.contains(pt({7})));
    CHECK(evaluate(ctx, parse("rv(x1) = (1, 2)")).set.size() == 1); // only 6
    CHECK_THROWS_AS(evaluate(ctx, parse("rv(x1) = (5, 1)")), PrecisionExhausted);
    CHECK_THROWS_AS(evaluate(ctx, parse("rv(x1) = (0, 3)")), UsageError);
}

TEST_CASE("sensitivity flags and precision refinement") {
    // membership of points whose evaluation never used the truncation
    // convention is stable when m grows
    PadicContext coarse(3, 2, 2), fine(3, 3, 2);
    for (const std::string& src :
         {std::string("x2 - x1^2 = 0"), std::string("val(x1) >= 1 | x2 = 0")}) {
        SetExprPtr e = parse(src);
        auto lo = evaluate(coarse, e);
        auto hi = evaluate(fine, e);
        for (std::uint64_t r = 0; r < coarse.space_size(); ++r) {
            if (lo.sensitive[r]) continue;
            Point x = point_from_rank(coarse, r);
            bool member = lo.set.at(r);
            // all lifts of x mod p^2 to mod p^3
            for (Scalar a = 0; a < 3; ++a)
                for (Scalar b = 0; b < 3; ++b) {
                    Point y = pt({x[0] + 9 * a, x[1] + 9 * b});
                    CHECK(hi.set.contains(y) == member);
                }
        }
    }
}

TEST_CASE("dim_estimate") {
    PadicContext ctx(3, 2, 2);
    FiniteSet one(ctx);
    one.insert(pt({4, 7}));
    CHECK(dim_estimate(one) == 0);

    FiniteSet full(ctx);
    for (std::uint64_t r = 0; r < ctx.space_size(); ++r) full.set(r, true);
    CHECK(dim_estimate(full) == 2);

    Fixture fx = make_fixture("parabola", 3, 2);
    CHECK(dim_estimate(fx.set) == 1);
    // the x1-projection covers everything; the x2-projection misses
    // non-squares, verified directly
    std::vector<bool> seen(9, false);
    for (const auto& p : fx.set.points()) seen[p[1]] = true;
    bool all = true;
    for (bool s : seen) all = all && s;
    CHECK(!all);

    // monotone under inclusion
    FiniteSet sub(ctx);
    auto pts = fx.set.points();
    for (std::size_t i = 0; i < pts.size(); i += 2) sub.insert(pts[i]);
    CHECK(dim_estimate(sub) <= dim_estimate(fx.set));
    CHECK_THROWS_AS(dim_estimate(FiniteSet(ctx)), EmptySetError);
}

TEST_CASE("fixtures carry their reference stratifications") {
    for (const auto& name : fixture_names()) {
        Fixture fx = make_fixture(name);
        CHECK(fx.set.size() > 0);
        CHECK(fx.strat.labels.size() == ball_size(fx.ctx, whole_space(fx.ctx)));
    }
    Fixture par = make_fixture("parabola");
    CHECK(par.strat.label_at(par.ctx, pt({0, 0})) == 0);
    CHECK(par.strat.stratum(par.ctx, 0).size() == 1);
    Fixture ball = make_fixture("ball-in-K");
    CHECK(ball.strat.label_at(ball.ctx, pt({0})) == 0);
    CHECK(ball.strat.stratum(ball.ctx, 0).size() == 1);
    Fixture hyp = make_fixture("hyperbola");
    CHECK(hyp.strat.label_at(hyp.ctx, pt({0, 0})) == 0);
    CHECK(!hyp.set.contains(pt({0, 0})));
    CHECK_THROWS_AS(make_fixture("nonesuch"), UnknownFixtureError);
}

TEST_CASE("inclusion-pattern coloring from a family of sets") {
    PadicContext ctx(2, 2, 2);
    FiniteSet a(ctx), b(ctx);
    std::mt19937_64 rng(15);
    for (std::uint64_t r = 0; r < ctx.space_size(); ++r) {
        if (rng() % 2) a.set(r, true);
        if (rng() % 2) b.set(r, true);
    }
    Coloring chi = coloring_from_family(ctx, whole_space(ctx), {&a, &b});
    // two points share a color iff they lie in exactly the same family members
    for (std::uint64_t r = 0; r < ctx.space_size(); ++r)
        for (std::uint64_t s = 0; s < ctx.space_size(); ++s) {
            Point x = point_from_rank(ctx, r), y = point_from_rank(ctx, s);
            bool same_pattern = a.contains(x) == a.contains(y) && b.contains(x) == b.contains(y);
            CHECK((chi.color(x) == chi.color(y)) == same_pattern);
        }
}
