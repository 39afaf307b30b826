#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pstrat/fplin.hpp"
#include "pstrat/geometry.hpp"

using namespace pstrat;

namespace {

Point pt(std::initializer_list<Scalar> cs) {
    Point x{};
    int i = 0;
    for (Scalar c : cs) x[i++] = c;
    return x;
}

} // namespace

TEST_CASE("valuation of points") {
    PadicContext ctx(3, 4, 2);
    CHECK(point_val(ctx, pt({18, 27})) == 2);
    CHECK(point_val(ctx, pt({0, 0})) == PadicContext::infinity);

    PadicContext ctx2(2, 3, 2);
    CHECK(point_val(ctx2, pt({1, 4})) == 0);
}

TEST_CASE("rv of points") {
    PadicContext ctx(3, 4, 2);
    RvValue r = rv(ctx, pt({18, 27}));
    REQUIRE(!r.zero);
    CHECK(r.lambda == 2);
    auto u = fp_decode(ctx, r.unit);
    CHECK(u[0] == 2);
    CHECK(u[1] == 0);

    CHECK(rv(ctx, pt({0, 0})).zero);

    // rv((18,27)) == rv((18,54)): the difference (0,27) has valuation 3 > 2.
    // Brute-force the defining equivalence on both sides.
    Point a = pt({18, 27}), b = pt({18, 54});
    Point d = point_sub(ctx, a, b);
    bool equivalent = point_val(ctx, d) > point_val(ctx, a) || (point_is_zero(ctx, a) && point_is_zero(ctx, b));
    CHECK(equivalent);
    CHECK(rv(ctx, a) == rv(ctx, b));
}

TEST_CASE("dir of points") {
    PadicContext ctx(3, 4, 2);
    CHECK(dir(ctx, pt({3, 9})).rep == fp_encode(ctx, {1, 0, 0, 0}));
    CHECK(dir(ctx, pt({3, 3})).rep == fp_encode(ctx, {1, 1, 0, 0}));
    // scaling invariance
    Point x = pt({3, 9});
    CHECK(dir(ctx, point_scale(ctx, 2, x)) == dir(ctx, x));
    CHECK_THROWS_AS(dir(ctx, pt({0, 0})), ZeroVectorError);
}

TEST_CASE("matrix action on points and leading terms") {
    PadicContext ctx(3, 4, 2);
    IntMatrix id = IntMatrix::identity(ctx);
    Point x = pt({18, 27});
    CHECK(apply_matrix(ctx, id, x) == x);

    IntMatrix shear = id;
    shear.at(0, 1) = 1; // [[1,1],[0,1]]
    Point y = apply_matrix(ctx, shear, x);
    CHECK(y == pt({45, 27}));
    CHECK(point_val(ctx, y) == point_val(ctx, x));
    CHECK(matrix_unimodular(ctx, shear));

    IntMatrix bad = id;
    bad.at(0, 0) = 3; // v(det) = 1
    CHECK(!matrix_unimodular(ctx, bad));
    CHECK_THROWS_AS(apply_matrix_rv(ctx, bad, rv(ctx, x)), NotUnimodularError);

    // v(Mx) = v(x) over random points
    std::mt19937_64 rng(20240811);
    for (int it = 0; it < 200; ++it) {
        Point z = pt({Scalar(rng() % ctx.modulus()), Scalar(rng() % ctx.modulus())});
        CHECK(point_val(ctx, apply_matrix(ctx, shear, z)) == point_val(ctx, z));
    }
}

TEST_CASE("ultrametric and rv-sum determinacy, exhaustive at p=2 m=2 n=2") {
    PadicContext ctx(2, 2, 2);
    std::vector<Point> all;
    for (std::uint64_t r = 0; r < ctx.space_size(); ++r) all.push_back(point_from_rank(ctx, r));

    for (const auto& a : all)
        for (const auto& b : all) {
            int va = point_val(ctx, a), vb = point_val(ctx, b);
            int vs = point_val(ctx, point_add(ctx, a, b));
            CHECK(vs >= std::min(va, vb));
        }

    // if v(a1+a2) = min(v(a1),v(a2)), then rv(a1), rv(a2) determine rv(a1+a2)
    for (const auto& a1 : all)
        for (const auto& a2 : all) {
            int vs = point_val(ctx, point_add(ctx, a1, a2));
            if (vs != std::min(point_val(ctx, a1), point_val(ctx, a2))) continue;
            for (const auto& b1 : all)
                for (const auto& b2 : all) {
                    if (!(rv(ctx, b1) == rv(ctx, a1)) || !(rv(ctx, b2) == rv(ctx, a2))) continue;
                    CHECK(rv(ctx, point_add(ctx, b1, b2)) == rv(ctx, point_add(ctx, a1, a2)));
                }
        }
}

TEST_CASE("dir-pi and dir-scal, randomized at p=3 m=3") {
    PadicContext ctx(3, 3, 2);
    std::mt19937_64 rng(7);
    Projection pi{2, {0}};
    for (int it = 0; it < 1000; ++it) {
        Point a = pt({Scalar(rng() % ctx.modulus()), Scalar(rng() % ctx.modulus())});
        if (point_is_zero(ctx, a)) continue;
        // v(pi(a)) = v(a) iff the projected direction is nonzero
        int va = point_val(ctx, a);
        int vpa = scalar_val(ctx, a[0]);
        auto d = fp_decode(ctx, dir(ctx, a).rep);
        bool proj_nonzero = d[0] != 0;
        CHECK((vpa == va) == proj_nonzero);
        (void)pi;

        Point b = pt({Scalar(rng() % ctx.modulus()), Scalar(rng() % ctx.modulus())});
        if (point_is_zero(ctx, b)) continue;
        int vb = point_val(ctx, b);
        if (va + vb >= ctx.m()) continue; // threshold must stay below precision
        Scalar dot = point_dot(ctx, a, b);
        auto db = fp_decode(ctx, dir(ctx, b).rep);
        int fdot = 0;
        for (int i = 0; i < ctx.n(); ++i) fdot += d[std::size_t(i)] * db[std::size_t(i)];
        bool orthogonal = fdot % ctx.p() == 0;
        CHECK((scalar_val(ctx, dot) > va + vb) == orthogonal);
    }
}

TEST_CASE("GL_n(O) compatibility of rv") {
    PadicContext ctx(3, 3, 2);
    std::mt19937_64 rng(99);
    int found = 0;
    while (found < 100) {
        IntMatrix M;
        M.n = 2;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) M.at(i, j) = Scalar(rng() % ctx.modulus());
        if (!matrix_unimodular(ctx, M)) continue;
        ++found;
        Point x = pt({Scalar(rng() % ctx.modulus()), Scalar(rng() % ctx.modulus())});
        CHECK(rv(ctx, apply_matrix(ctx, M, x)) == apply_matrix_rv(ctx, M, rv(ctx, x)));
    }
}

TEST_CASE("subspaces over F_p") {
    PadicContext ctx2(2, 2, 2);
    auto lat2 = subspace_lattice(ctx2);
    CHECK(lat2[0].size() + lat2[1].size() + lat2[2].size() == 5);

    PadicContext ctx3(3, 2, 2);
    CHECK(all_lines(ctx3).size() == 4);

    Subspace e1 = subspace_span(ctx3, {{1, 0, 0, 0}});
    Subspace e2 = subspace_span(ctx3, {{0, 1, 0, 0}});
    CHECK(subspace_sum(ctx3, e1, e2) == subspace_full(ctx3));
    CHECK(subspace_intersect(ctx3, e1, e2) == subspace_zero(ctx3));

    Subspace diag = subspace_span(ctx3, {{1, 1, 0, 0}});
    CHECK(subspace_intersect(ctx3, subspace_full(ctx3), diag) == diag);
}

TEST_CASE("balls: children, nesting, smallest ball") {
    PadicContext ctx(3, 3, 2);
    Ball whole = whole_space(ctx);
    auto kids = children(ctx, whole);
    CHECK(kids.size() == 9);
    // children partition the parent
    std::uint64_t total = 0;
    for (const auto& k : kids) total += ball_size(ctx, k);
    CHECK(total == ball_size(ctx, whole));

    CHECK_THROWS_AS(children(ctx, ball_around(ctx, pt({0, 0}), 3)), AtMaxDepthError);

    Ball b = smallest_ball_containing(ctx, pt({0, 0}), pt({9, 0}));
    CHECK(b.depth == 2);
    CHECK(b.residue == pt({0, 0}));
    CHECK(smallest_ball_containing(ctx, pt({0, 0}), pt({1, 0})).depth == 0);
    CHECK_THROWS_AS(smallest_ball_containing(ctx, pt({1, 2}), pt({1, 2})), EqualPointsError);

    // trichotomy on a small context
    PadicContext c2(2, 2, 2);
    std::vector<Ball> balls;
    for (int depth = 0; depth <= 2; ++depth)
        for (std::uint64_t r = 0; r < ball_size(c2, whole_space(c2)); ++r) {
            Ball bb = ball_around(c2, point_from_rank(c2, r), depth);
            balls.push_back(bb);
        }
    for (const auto& a : balls)
        for (const auto& b2 : balls) {
            bool eq = a == b2;
            bool nested = ball_subset(c2, a, b2) || ball_subset(c2, b2, a);
            bool disj = true;
            for (std::uint64_t r = 0; r < ball_size(c2, a) && disj; ++r)
                if (ball_contains(c2, b2, ball_point(c2, a, r))) disj = false;
            CHECK((eq || nested || disj));
        }
}

TEST_CASE("exhibitions") {
    PadicContext ctx(3, 2, 2);
    Subspace e1 = subspace_span(ctx, {{1, 0, 0, 0}});
    auto ex = exhibitions(ctx, e1);
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].retained == std::vector<int>{0});

    CHECK(exhibitions(ctx, subspace_full(ctx)).size() == 1); // only the identity

    PadicContext c2(2, 2, 2);
    Subspace diag = subspace_span(c2, {{1, 1, 0, 0}});
    CHECK(exhibitions(c2, diag).size() == 2); // both coordinates qualify
}

TEST_CASE("canonical lifts") {
    PadicContext ctx(3, 2, 2);
    Subspace e1 = subspace_span(ctx, {{1, 0, 0, 0}});
    Lift L = canonical_lift(ctx, e1);
    auto els = lift_elements(ctx, L);
    CHECK(els.size() == 9);
    for (const auto& e : els) CHECK(e[1] == 0);

    Subspace zero = subspace_zero(ctx);
    CHECK(lift_elements(ctx, canonical_lift(ctx, zero)).size() == 1);

    // lift of span{(1,2)}: the residues of all elements lie in the span
    Subspace d12 = subspace_span(ctx, {{1, 2, 0, 0}});
    Lift L12 = canonical_lift(ctx, d12);
    for (const auto& e : lift_elements(ctx, L12)) {
        std::array<int, kMaxDim> res{};
        for (int i = 0; i < 2; ++i) res[std::size_t(i)] = int(e[i] % 3);
        if (res[0] == 0 && res[1] == 0) continue;
        CHECK(subspace_contains(ctx, d12, fp_encode(ctx, res)));
    }
    CHECK(lift_contains(ctx, d12, L12, pt({1, 2})));
    CHECK(lift_contains(ctx, d12, L12, pt({3, 6})));
    CHECK(!lift_contains(ctx, d12, L12, pt({1, 0})));
}
