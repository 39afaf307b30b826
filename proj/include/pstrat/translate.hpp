#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pstrat/canon.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// Translatability.
//
// A coloring chi of a ball B is V-translatable when some leading-term-
// preserving bijection phi of B makes chi o phi invariant under translations
// along a lift of V.  Fixing an exhibition pi of V, it suffices to search
// fiber-respecting phi (node translations with zero component on the
// retained coordinates); the search propagates the constraint that the
// straightened coloring factors through the quotient of B by the lift.
// ---------------------------------------------------------------------------

struct TranslatabilityResult {
    bool ok = false;
    Risometry straightener;     // valid when ok
    std::string reject_filter;  // "fiber_riso" | "pointwise" | "search" when !ok
    std::string reject_detail;  // human-readable witness for filter rejections
};

namespace detail {

struct SigmaMap {
    // J-components of the unique lift element with given I-components.
    // sigma(w)_j = sum_k coeff_k(w) * basis[k][J[j]], where coeff solves the
    // pivot system A c = w.
    const PadicContext* ctx;
    std::vector<int> I, J;
    std::vector<Point> basis;

    std::vector<Scalar> jpart(const std::vector<Scalar>& w) const {
        std::size_t d = I.size();
        std::vector<std::vector<Scalar>> A(d, std::vector<Scalar>(d));
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t k = 0; k < d; ++k) A[r][k] = basis[k][I[r]];
        auto coeff = solve_unit_system(*ctx, A, w);
        std::vector<Scalar> out(J.size(), 0);
        for (std::size_t j = 0; j < J.size(); ++j) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < d; ++k)
                acc += std::uint64_t(coeff[k]) * basis[k][J[j]] % ctx->modulus();
            out[j] = Scalar(acc % ctx->modulus());
        }
        return out;
    }
};

} // namespace detail

/// Pointwise translatability with respect to an exhibition pi of V: every
/// point can be matched, over every base value, by a same-colored point whose
/// difference points along V.  A cheap necessary condition for
/// V-translatability; on failure the witness pair is reported.
inline bool pointwise_translatable(const PadicContext& ctx, const Coloring& chi, const Ball& b,
                                   const Subspace& V, const Projection& pi,
                                   std::string* witness = nullptr) {
    std::vector<int> I = pi.retained;
    std::uint64_t fiber_count = 1, fsz = 1;
    for (std::size_t i = 0; i < I.size(); ++i) fiber_count *= ctx.pow(ctx.m() - b.depth);
    for (int i = 0; i < ctx.n() - int(I.size()); ++i) fsz *= ctx.pow(ctx.m() - b.depth);

    // group ball points by fiber (projection values) and color
    std::uint64_t sz = ball_size(ctx, b);
    std::vector<Point> pts(static_cast<std::size_t>(sz));
    for (std::uint64_t r = 0; r < sz; ++r) pts[std::size_t(r)] = ball_point(ctx, b, r);

    auto fiber_key = [&](const Point& x) {
        std::uint64_t key = 0;
        for (int i : I) key = key * ctx.modulus() + x[i];
        return key;
    };
    std::map<std::uint64_t, std::map<ColorId, std::vector<const Point*>>> fibers;
    std::vector<std::uint64_t> fiber_keys;
    for (const auto& x : pts) {
        auto key = fiber_key(x);
        if (fibers.find(key) == fibers.end()) fiber_keys.push_back(key);
        fibers[key][chi.color(x)].push_back(&x);
    }
    std::sort(fiber_keys.begin(), fiber_keys.end());
    (void)fiber_count;
    (void)fsz;

    for (const auto& y : pts) {
        ColorId c = chi.color(y);
        std::uint64_t ykey = fiber_key(y);
        for (auto key : fiber_keys) {
            if (key == ykey) continue; // y' = y is allowed over the own base value
            bool found = false;
            auto it = fibers[key].find(c);
            if (it != fibers[key].end()) {
                for (const Point* yp : it->second) {
                    Point d = point_sub(ctx, y, *yp);
                    if (subspace_contains_dir(ctx, V, dir(ctx, d))) {
                        found = true;
                        break;
                    }
                }
            }
            if (!found) {
                if (witness)
                    *witness = "no match for " + point_str(ctx, y) + " over base value of fiber key " +
                               std::to_string(key);
                return false;
            }
        }
    }
    return true;
}

/// Decide V-translatability of chi on B and produce a straightener.
/// The lift defaults to the canonical one; the exhibition is the
/// lexicographically first.  Children are visited in lexicographic digit
/// order and node translations are tried from zero upward, so the first
/// solution found is deterministic.
inline TranslatabilityResult is_translatable(const PadicContext& ctx, const Coloring& chi_in,
                                             const Ball& b, const Subspace& V,
                                             const Lift* lift_opt = nullptr,
                                             bool use_prefilters = true) {
    TranslatabilityResult res;
    Coloring chi = chi_in.domain() == b ? chi_in : chi_in.restrict(b);

    int d = V.dim();
    if (d == 0 || b.depth >= ctx.m()) {
        res.ok = true;
        res.straightener = riso_identity(ctx, b);
        return res;
    }
    if (chi.is_constant()) {
        res.ok = true;
        res.straightener = riso_identity(ctx, b);
        return res;
    }
    if (d == ctx.n()) {
        // the only fiber-respecting bijection for the identity projection is
        // the identity, and full translatability means a constant coloring
        res.ok = false;
        res.reject_filter = "search";
        res.reject_detail = "coloring is not constant on the ball";
        return res;
    }

    Projection pi = exhibitions(ctx, V)[0];
    std::vector<int> I = pi.retained, J = pi.complement();
    Lift L = lift_opt ? *lift_opt : canonical_lift(ctx, V);
    detail::SigmaMap sigma{&ctx, I, J, L.basis};

    int levels = ctx.m() - b.depth;
    int nJ = int(J.size());
    std::uint64_t q = ctx.child_count();
    std::uint64_t qJ = 1;
    for (int j = 0; j < nJ; ++j) qJ *= std::uint64_t(ctx.p());
    std::uint64_t qI = q / qJ;

    // --- fibers, in lexicographic order of the I-digit path ---------------
    std::uint64_t fiber_count = 1;
    for (int lev = 0; lev < levels; ++lev) fiber_count *= qI;

    PadicContext ctxJ(ctx.p(), ctx.m(), nJ);
    Ball fiber_ball; // common J-ball of all fibers
    fiber_ball.depth = b.depth;
    for (int j = 0; j < nJ; ++j) fiber_ball.residue[j] = b.residue[J[std::size_t(j)]];

    auto fiber_I_digits = [&](std::uint64_t f) {
        // digits of fiber f at levels 0..levels-1, big-endian in the path rank
        std::vector<std::uint32_t> digs(static_cast<std::size_t>(levels), 0);
        for (int lev = levels - 1; lev >= 0; --lev) {
            digs[std::size_t(lev)] = std::uint32_t(f % qI);
            f /= qI;
        }
        return digs;
    };
    // note: fiber path rank is big-endian, so f's most significant digit is level 0

    auto fiber_point_I = [&](std::uint64_t f) {
        // I-coordinates of the fiber as scalars
        auto digs = fiber_I_digits(f);
        std::vector<Scalar> u(I.size(), 0);
        PadicContext ctxI(ctx.p(), ctx.m(), int(I.size()));
        for (int lev = 0; lev < levels; ++lev) {
            auto dd = fp_decode(ctxI, digs[std::size_t(lev)]);
            for (std::size_t i = 0; i < I.size(); ++i)
                u[i] += std::uint32_t(dd[i]) * ctx.pow(b.depth + lev);
        }
        for (std::size_t i = 0; i < I.size(); ++i) u[i] += b.residue[I[i]];
        return u;
    };

    auto full_point = [&](const std::vector<Scalar>& u, const Point& zJ) {
        Point x{};
        for (std::size_t i = 0; i < I.size(); ++i) x[I[i]] = u[i];
        for (std::size_t j = 0; j < J.size(); ++j) x[J[j]] = zJ[int(j)];
        return x;
    };

    // --- pre-filters -------------------------------------------------------
    if (use_prefilters) {
        // (a) all fibers pairwise equivalent as colored J-balls
        std::optional<CanonicalForm> first;
        for (std::uint64_t f = 0; f < fiber_count; ++f) {
            auto u = fiber_point_I(f);
            Coloring fc = Coloring::from_function(ctxJ, fiber_ball, [&](const Point& zJ) {
                return chi.color(full_point(u, zJ));
            });
            CanonicalForm cf = canonicalize(ctxJ, fc);
            if (!first) {
                first = cf;
            } else if (!(*first == cf)) {
                res.ok = false;
                res.reject_filter = "fiber_riso";
                res.reject_detail = "fibers are not pairwise equivalent as colored balls";
                return res;
            }
        }
        // (b) pointwise translatability
        std::string w;
        if (!pointwise_translatable(ctx, chi, b, V, pi, &w)) {
            res.ok = false;
            res.reject_filter = "pointwise";
            res.reject_detail = w;
            return res;
        }
    }

    // --- backtracking over node translations -------------------------------
    std::uint64_t node_count = riso_node_count(ctx, b.depth);
    std::vector<FpVec> labels(static_cast<std::size_t>(node_count), 0);
    std::vector<bool> assigned(static_cast<std::size_t>(node_count), false);

    // quotient pattern on the common fiber ball, indexed by local rank
    std::uint64_t fsz = ball_size(ctxJ, fiber_ball);
    std::vector<ColorId> g(static_cast<std::size_t>(fsz), 0);
    std::vector<bool> g_set(static_cast<std::size_t>(fsz), false);

    // J-translation candidates in lexicographic J-digit order, as full digit
    // vectors with zero I-part
    std::vector<FpVec> candidates;
    for (std::uint64_t tj = 0; tj < qJ; ++tj) {
        PadicContext cJ(ctx.p(), ctx.m(), std::max(1, nJ));
        auto dd = fp_decode(cJ, FpVec(tj));
        std::array<int, kMaxDim> full{};
        for (std::size_t j = 0; j < J.size(); ++j) full[std::size_t(J[j])] = dd[j];
        candidates.push_back(fp_encode(ctx, full));
    }

    struct Step {
        bool leaf;
        std::uint64_t node;                 // internal node id (when !leaf)
        std::vector<std::uint64_t> path;    // node ids along the leaf's path
        std::vector<FpVec> src_digits;      // source digit vectors along the path
        std::uint64_t q_rank;               // quotient index of the leaf
        std::vector<Scalar> u;              // fiber I-coordinates
    };

    // Per fiber: preorder steps (source side of everything is fixed).
    auto build_steps = [&](std::uint64_t f) {
        std::vector<Step> steps;
        auto digs = fiber_I_digits(f);
        auto u = fiber_point_I(f);
        // shift = sigma(u - u*) where u* is the base fiber's I-point
        auto u0 = fiber_point_I(0);
        std::vector<Scalar> w(I.size());
        for (std::size_t i = 0; i < I.size(); ++i) w[i] = scalar_sub(ctx, u[i], u0[i]);
        auto shift = sigma.jpart(w);

        std::function<void(int, std::uint64_t, std::vector<std::uint64_t>&, std::vector<FpVec>&)> gen =
            [&](int lev, std::uint64_t rank, std::vector<std::uint64_t>& path, std::vector<FpVec>& sdig) {
                if (lev == levels) {
                    Step s;
                    s.leaf = true;
                    s.path = path;
                    s.src_digits = sdig;
                    s.u = u;
                    // J-point of the leaf and its quotient index
                    Point zJ{};
                    for (int j = 0; j < nJ; ++j) zJ[j] = fiber_ball.residue[j];
                    for (int l = 0; l < levels; ++l) {
                        auto dd = fp_decode(ctx, sdig[std::size_t(l)]);
                        for (std::size_t j = 0; j < J.size(); ++j)
                            zJ[int(j)] += std::uint32_t(dd[J[j]]) * ctx.pow(b.depth + l);
                    }
                    Point qpt{};
                    for (int j = 0; j < nJ; ++j) qpt[j] = scalar_sub(ctx, zJ[j], shift[std::size_t(j)]);
                    s.q_rank = ball_rank(ctxJ, fiber_ball, qpt);
                    steps.push_back(std::move(s));
                    return;
                }
                std::uint64_t node = riso_level_offset(ctx, lev) + rank;
                Step s;
                s.leaf = false;
                s.node = node;
                steps.push_back(std::move(s));
                for (std::uint64_t tj = 0; tj < qJ; ++tj) {
                    PadicContext cJ(ctx.p(), ctx.m(), std::max(1, nJ));
                    auto dd = fp_decode(cJ, FpVec(tj));
                    std::array<int, kMaxDim> full{};
                    // combine fiber's I-digit at this level with the J-digit
                    auto idd = fp_decode(ctx, 0);
                    (void)idd;
                    {
                        PadicContext ctxI(ctx.p(), ctx.m(), int(std::max<std::size_t>(1, I.size())));
                        auto idig = fp_decode(ctxI, digs[std::size_t(lev)]);
                        for (std::size_t i = 0; i < I.size(); ++i) full[std::size_t(I[i])] = idig[i];
                    }
                    for (std::size_t j = 0; j < J.size(); ++j) full[std::size_t(J[j])] = dd[j];
                    FpVec fd = fp_encode(ctx, full);
                    path.push_back(node);
                    sdig.push_back(fd);
                    gen(lev + 1, rank * q + fd, path, sdig);
                    path.pop_back();
                    sdig.pop_back();
                }
            };
        std::vector<std::uint64_t> path;
        std::vector<FpVec> sdig;
        gen(0, 0, path, sdig);
        return steps;
    };

    std::vector<std::vector<Step>> fiber_steps;
    fiber_steps.reserve(static_cast<std::size_t>(fiber_count));
    for (std::uint64_t f = 0; f < fiber_count; ++f) fiber_steps.push_back(build_steps(f));

    std::function<bool(std::uint64_t, std::size_t)> run = [&](std::uint64_t f, std::size_t si) -> bool {
        if (f == fiber_count) return true;
        const auto& steps = fiber_steps[std::size_t(f)];
        if (si == steps.size()) return run(f + 1, 0);
        const Step& s = steps[si];
        if (!s.leaf) {
            if (assigned[std::size_t(s.node)]) return run(f, si + 1);
            for (FpVec t : candidates) {
                labels[std::size_t(s.node)] = t;
                assigned[std::size_t(s.node)] = true;
                if (run(f, si + 1)) return true;
                assigned[std::size_t(s.node)] = false;
            }
            return false;
        }
        // leaf: compute the image point's J-digits along the path
        Point img{};
        for (std::size_t i = 0; i < I.size(); ++i) img[I[i]] = s.u[i];
        for (int j = 0; j < nJ; ++j) img[J[std::size_t(j)]] = fiber_ball.residue[j];
        for (int lev = 0; lev < levels; ++lev) {
            FpVec dimg = fp_add(ctx, s.src_digits[std::size_t(lev)], labels[std::size_t(s.path[std::size_t(lev)])]);
            auto dd = fp_decode(ctx, dimg);
            for (std::size_t j = 0; j < J.size(); ++j)
                img[J[j]] += std::uint32_t(dd[J[j]]) * ctx.pow(b.depth + lev);
        }
        ColorId c = chi.color(img);
        if (g_set[std::size_t(s.q_rank)]) {
            if (g[std::size_t(s.q_rank)] != c) return false;
            return run(f, si + 1);
        }
        g[std::size_t(s.q_rank)] = c;
        g_set[std::size_t(s.q_rank)] = true;
        bool r = run(f, si + 1);
        if (!r) g_set[std::size_t(s.q_rank)] = false;
        return r;
    };

    if (run(0, 0)) {
        res.ok = true;
        res.straightener = Risometry{b, labels};
        return res;
    }
    res.ok = false;
    res.reject_filter = "search";
    res.reject_detail = "no fiber-respecting straightener exists";
    return res;
}

/// Maximal subspace in which chi is translatable on B: the sum of all
/// translatable lines.  When early_exit_dim >= 0 the scan stops as soon as
/// the accumulated span reaches that dimension.
inline Subspace tsp(const PadicContext& ctx, const Coloring& chi, const Ball& b,
                    int early_exit_dim = -1) {
    Subspace acc = subspace_zero(ctx);
    if (b.depth >= ctx.m()) return subspace_full(ctx);
    Coloring local = chi.domain() == b ? chi : chi.restrict(b);
    if (local.is_constant()) return subspace_full(ctx);
    for (const auto& line : all_lines(ctx)) {
        if (subspace_leq(ctx, line, acc)) continue;
        if (is_translatable(ctx, local, b, line).ok) acc = subspace_sum(ctx, acc, line);
        if (early_exit_dim >= 0 && acc.dim() >= early_exit_dim) break;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Translaters: compatible families of risometries realizing translatability
// fiberwise.
// ---------------------------------------------------------------------------

struct Translater {
    Ball domain;
    Projection pi;
    Subspace V;
    // alpha indexed by the rank of x in the I-ball pi(B - B) (lexicographic)
    std::vector<Risometry> alphas;
};

/// pi(B - B) as a list of I-coordinate vectors (elements of p^depth O^d).
inline std::vector<std::vector<Scalar>> translater_index(const PadicContext& ctx, const Ball& b,
                                                         const Projection& pi) {
    std::uint64_t count = 1;
    for (int i = 0; i < pi.dim(); ++i) count *= ctx.pow(ctx.m() - b.depth);
    std::vector<std::vector<Scalar>> xs;
    xs.reserve(static_cast<std::size_t>(count));
    std::uint32_t side = ctx.pow(ctx.m() - b.depth);
    for (std::uint64_t r = 0; r < count; ++r) {
        std::vector<Scalar> x(static_cast<std::size_t>(pi.dim()));
        std::uint64_t t = r;
        for (int i = pi.dim() - 1; i >= 0; --i) {
            x[std::size_t(i)] = Scalar(t % side) * ctx.pow(b.depth);
            t /= side;
        }
        xs.push_back(std::move(x));
    }
    return xs;
}

/// Build a translater from a fiber-respecting straightener, as
/// alpha_x = phi o (translation by the lift element over x) o phi^{-1}.
inline Translater translater_from_straightener(const PadicContext& ctx, const Ball& b,
                                               const Subspace& V, const Risometry& phi,
                                               const Lift* lift_opt = nullptr) {
    Projection pi = exhibitions(ctx, V)[0];
    Lift L = lift_opt ? *lift_opt : canonical_lift(ctx, V);
    detail::SigmaMap sigma{&ctx, pi.retained, pi.complement(), L.basis};
    Translater tr{b, pi, V, {}};
    Risometry phi_inv = riso_invert(ctx, phi);
    for (const auto& x : translater_index(ctx, b, pi)) {
        auto jpart = sigma.jpart(x);
        Point c{};
        for (std::size_t i = 0; i < pi.retained.size(); ++i) c[pi.retained[i]] = x[i];
        auto J = pi.complement();
        for (std::size_t j = 0; j < J.size(); ++j) c[J[j]] = jpart[j];
        Risometry tau = riso_translation(ctx, b, c);
        tr.alphas.push_back(riso_compose(ctx, phi, riso_compose(ctx, tau, phi_inv)));
    }
    return tr;
}

/// Check the four translater conditions for a coloring.
inline bool verify_translater(const PadicContext& ctx, const Translater& tr, const Coloring& chi,
                              std::string* why = nullptr) {
    auto xs = translater_index(ctx, tr.domain, tr.pi);
    std::uint64_t sz = ball_size(ctx, tr.domain);
    std::uint32_t side = ctx.pow(ctx.m() - tr.domain.depth);
    auto x_rank = [&](const std::vector<Scalar>& x) {
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < x.size(); ++i) r = r * side + x[i] / ctx.pow(tr.domain.depth);
        return r;
    };
    Coloring local = chi.domain() == tr.domain ? chi : chi.restrict(tr.domain);
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        const Risometry& a = tr.alphas[xi];
        for (std::uint64_t r = 0; r < sz; ++r) {
            Point z = ball_point(ctx, tr.domain, r);
            Point az = riso_apply(ctx, a, z);
            // (1) colors preserved
            if (local.color(az) != local.color(z)) {
                if (why) *why = "color broken at x-index " + std::to_string(xi) + " z=" + point_str(ctx, z);
                return false;
            }
            Point diff = point_sub(ctx, az, z);
            // (3) projection of the movement is x
            for (std::size_t i = 0; i < tr.pi.retained.size(); ++i)
                if (diff[tr.pi.retained[i]] != xs[xi][i]) {
                    if (why) *why = "projection broken at x-index " + std::to_string(xi);
                    return false;
                }
            // (4) movement points along V
            if (!point_is_zero(ctx, diff) && !subspace_contains_dir(ctx, tr.V, dir(ctx, diff))) {
                if (why) *why = "direction broken at x-index " + std::to_string(xi);
                return false;
            }
        }
    }
    // (2) composition law
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
        for (std::size_t yi = 0; yi < xs.size(); ++yi) {
            std::vector<Scalar> sum(xs[xi].size());
            for (std::size_t i = 0; i < sum.size(); ++i)
                sum[i] = scalar_add(ctx, xs[xi][i], xs[yi][i]);
            const Risometry& lhs = riso_compose(ctx, tr.alphas[xi], tr.alphas[yi]);
            const Risometry& rhs = tr.alphas[std::size_t(x_rank(sum))];
            if (!(lhs == rhs)) {
                // compare as point maps (normal forms are unique, but be safe)
                if (!(riso_to_point_map(ctx, lhs) == riso_to_point_map(ctx, rhs))) {
                    if (why) *why = "composition law broken";
                    return false;
                }
            }
        }
    return true;
}

} // namespace pstrat
