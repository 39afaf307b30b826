#pragma once

#include <string>
#include <vector>

#include "pstrat/defset.hpp"
#include "pstrat/stratification.hpp"

namespace pstrat {

/// A named example set with its reference stratification.
struct Fixture {
    std::string name;
    PadicContext ctx;
    std::string expr_text;
    FiniteSet set;
    Stratification strat;    // reference stratification
    Stratification no_s0;    // the variant without the 0-dimensional stratum
    int declared_dim;        // declared dimension of the set
};

inline std::vector<std::string> fixture_names() {
    return {"parabola", "hyperbola", "ball-in-K", "cusp"};
}

/// Default working precision per fixture (chosen so the reference
/// stratification verifies).
inline void fixture_default_ctx(const std::string& name, int& p, int& m, int& n) {
    if (name == "parabola") { p = 3; m = 3; n = 2; }
    else if (name == "hyperbola") { p = 3; m = 4; n = 2; }
    else if (name == "ball-in-K") { p = 3; m = 3; n = 1; }
    else if (name == "cusp") { p = 3; m = 3; n = 2; }
    else throw UnknownFixtureError(name);
}

inline Fixture make_fixture(const std::string& name, int p, int m) {
    int dp, dm, dn;
    fixture_default_ctx(name, dp, dm, dn);
    PadicContext ctx(p > 0 ? p : dp, m > 0 ? m : dm, dn);
    Ball base = whole_space(ctx);

    std::string expr_text;
    Point origin{};
    int declared = 1;
    if (name == "parabola") {
        expr_text = "x2 - x1^2 = 0";
    } else if (name == "hyperbola") {
        std::uint64_t a = std::uint64_t(ctx.p()) * ctx.p();
        expr_text = "x1*x2 - " + std::to_string(a) + " = 0";
    } else if (name == "ball-in-K") {
        expr_text = "rv(x1) = (0, 1)";
    } else if (name == "cusp") {
        expr_text = "x2^2 - x1^3 = 0";
    } else {
        throw UnknownFixtureError(name);
    }

    FiniteSet X = evaluate(ctx, parse(expr_text)).set;

    // reference stratification: the origin in S_0, the set in S_1, the rest
    // in S_n
    auto ref_label = [&](const Point& x) {
        if (x == origin) return 0;
        if (X.contains(x)) return 1;
        return ctx.n();
    };
    auto no_s0_label = [&](const Point& x) { return X.contains(x) ? 1 : ctx.n(); };

    Fixture f{name, ctx, expr_text, X, make_stratification(ctx, base, ref_label),
              make_stratification(ctx, base, no_s0_label), declared};
    return f;
}

inline Fixture make_fixture(const std::string& name) { return make_fixture(name, 0, 0); }

} // namespace pstrat
