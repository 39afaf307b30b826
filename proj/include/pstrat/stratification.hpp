#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pstrat/translate.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// Stratifications: a partition of a base ball into strata S_0..S_n with
// declared dimensions, together with the verification of the translatability
// axioms, rainbows, reflection, a greedy stratifier, and the derived
// invariants (exceptional directions, the Whitney-style valuation sets,
// affine direction spaces).
// ---------------------------------------------------------------------------

struct Stratification {
    Ball base;
    std::vector<int> labels;        // stratum index per point, ball-local rank order
    std::vector<int> declared_dims; // declared dimension per stratum index 0..n

    int label_at(const PadicContext& ctx, const Point& x) const {
        return labels[std::size_t(ball_rank(ctx, base, x))];
    }

    /// Stratum labels as a coloring (ids are the stratum indices).
    Coloring label_coloring(const PadicContext& ctx) const {
        std::vector<ColorId> raw(labels.begin(), labels.end());
        return Coloring(ctx, base, std::move(raw));
    }

    std::vector<Point> stratum(const PadicContext& ctx, int i) const {
        std::vector<Point> out;
        for (std::uint64_t r = 0; r < labels.size(); ++r)
            if (labels[std::size_t(r)] == i) out.push_back(ball_point(ctx, base, r));
        return out;
    }

    FiniteSet stratum_set(const PadicContext& ctx, int i) const {
        FiniteSet s(ctx);
        for (std::uint64_t r = 0; r < labels.size(); ++r)
            if (labels[std::size_t(r)] == i) s.insert(ball_point(ctx, base, r));
        return s;
    }

    bool operator==(const Stratification&) const = default;
};

inline Stratification make_stratification(const PadicContext& ctx, const Ball& base,
                                          std::function<int(const Point&)> label) {
    Stratification s;
    s.base = base;
    std::uint64_t sz = ball_size(ctx, base);
    if (sz > kEnumerationCap) throw UsageError("base ball too large");
    s.labels.resize(static_cast<std::size_t>(sz));
    for (std::uint64_t r = 0; r < sz; ++r) {
        int l = label(ball_point(ctx, base, r));
        if (l < 0 || l > ctx.n()) throw UsageError("stratum label out of range");
        s.labels[std::size_t(r)] = l;
    }
    s.declared_dims.resize(static_cast<std::size_t>(ctx.n()) + 1);
    for (int i = 0; i <= ctx.n(); ++i) s.declared_dims[std::size_t(i)] = i;
    return s;
}

// ---------------------------------------------------------------------------
// Dimension estimate of a finite set: the largest d such that some
// d-coordinate projection of the set fully covers a ball coarser than a
// point.
// ---------------------------------------------------------------------------

inline int dim_estimate(const FiniteSet& X) {
    const PadicContext& ctx = X.ctx();
    if (X.empty()) throw EmptySetError("dim_estimate: empty set");
    for (int d = ctx.n(); d >= 1; --d) {
        // all index subsets of size d
        std::vector<int> idx(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) idx[std::size_t(i)] = i;
        while (true) {
            // project
            PadicContext ctxd(ctx.p(), ctx.m(), d);
            std::vector<bool> proj(ctxd.space_size(), false);
            for (const auto& x : X.points()) {
                Point y{};
                for (int i = 0; i < d; ++i) y[i] = x[idx[std::size_t(i)]];
                proj[point_rank(ctxd, y)] = true;
            }
            // does the projection contain a full ball of depth m-1?
            Ball whole = whole_space(ctxd);
            std::uint64_t nballs = 1;
            for (int i = 0; i < d; ++i) nballs *= ctxd.pow(ctxd.m() - 1);
            bool found = false;
            for (std::uint64_t r = 0; r < nballs && !found; ++r) {
                // ball of depth m-1 with residue index r
                Point res{};
                std::uint64_t t = r;
                for (int i = d - 1; i >= 0; --i) {
                    res[i] = Scalar(t % ctxd.pow(ctxd.m() - 1));
                    t /= ctxd.pow(ctxd.m() - 1);
                }
                Ball bb{ctxd.m() - 1, res};
                bool full = true;
                std::uint64_t bsz = ball_size(ctxd, bb);
                for (std::uint64_t rr = 0; rr < bsz; ++rr)
                    if (!proj[point_rank(ctxd, ball_point(ctxd, bb, rr))]) {
                        full = false;
                        break;
                    }
                found = full;
            }
            (void)whole;
            if (found) return d;
            int i = d - 1;
            while (i >= 0 && idx[std::size_t(i)] == ctx.n() - d + i) --i;
            if (i < 0) break;
            ++idx[std::size_t(i)];
            for (int j = i + 1; j < d; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Verification.
// ---------------------------------------------------------------------------

struct BallCheck {
    Ball ball;
    int required = 0;
    bool pass = false;
    int tsp_dim = 0;
    Subspace tsp_found;
    std::string filter; // rejection filter of the lex-least rejected line (on fail)
    std::string detail;
};

struct VerifyReport {
    bool pass = false;
    std::uint64_t checked_balls = 0;
    std::uint64_t skipped_balls = 0;
    std::vector<BallCheck> entries;  // all checked balls, traversal order
    std::vector<BallCheck> failures; // failing subset, traversal order
    std::vector<std::string> dim_warnings;

    const BallCheck* first_failure() const { return failures.empty() ? nullptr : &failures[0]; }
};

namespace detail {

/// Check one ball: does the span of translatable lines reach dimension j?
inline BallCheck check_ball(const PadicContext& ctx, const Coloring& pair, const Ball& b, int j) {
    BallCheck c;
    c.ball = b;
    c.required = j;
    if (j == 0) {
        c.pass = true;
        c.tsp_found = subspace_zero(ctx);
        c.tsp_dim = 0;
        return c;
    }
    Coloring local = pair.restrict(b);
    if (local.is_constant()) {
        c.pass = true;
        c.tsp_found = subspace_full(ctx);
        c.tsp_dim = ctx.n();
        return c;
    }
    Subspace acc = subspace_zero(ctx);
    std::string first_filter, first_detail;
    for (const auto& line : all_lines(ctx)) {
        if (subspace_leq(ctx, line, acc)) continue;
        TranslatabilityResult r = is_translatable(ctx, local, b, line);
        if (r.ok) {
            acc = subspace_sum(ctx, acc, line);
            if (acc.dim() >= j) break;
        } else if (first_filter.empty()) {
            first_filter = r.reject_filter;
            first_detail = r.reject_detail;
        }
    }
    c.tsp_found = acc;
    c.tsp_dim = acc.dim();
    c.pass = acc.dim() >= j;
    if (!c.pass) {
        c.filter = first_filter.empty() ? "search" : first_filter;
        c.detail = first_detail;
    }
    return c;
}

} // namespace detail

/// Verify the translatability axioms of a stratification against a side
/// coloring chi (use a constant coloring for the plain axioms).  All balls of
/// depths base.depth..m-1 inside the base are visited top-down; a ball is
/// skipped when an ancestor with the same required level passed.
inline VerifyReport verify_tstrat(const PadicContext& ctx, const Stratification& S,
                                  const Coloring& chi, int jobs = 1) {
    if (!(chi.domain() == S.base)) throw DomainMismatchError("verify_tstrat: coloring not on base ball");
    VerifyReport rep;
    rep.pass = true;

    // declared-dimension consistency and dimension estimates
    for (int i = 0; i <= ctx.n(); ++i) {
        if (S.declared_dims[std::size_t(i)] > i) {
            BallCheck c;
            c.ball = S.base;
            c.required = i;
            c.pass = false;
            c.filter = "declared_dim";
            c.detail = "declared dimension of stratum " + std::to_string(i) + " exceeds its index";
            rep.entries.push_back(c);
            rep.failures.push_back(c);
            rep.pass = false;
        }
        FiniteSet si = S.stratum_set(ctx, i);
        if (!si.empty()) {
            int est = dim_estimate(si);
            if (est > S.declared_dims[std::size_t(i)])
                rep.dim_warnings.push_back("stratum " + std::to_string(i) + ": projection estimate " +
                                           std::to_string(est) + " exceeds declared dimension " +
                                           std::to_string(S.declared_dims[std::size_t(i)]));
        }
    }

    Coloring pair = Coloring::product(S.label_coloring(ctx), chi);

    // minimal stratum per ball, bottom-up
    std::map<std::pair<int, std::uint64_t>, int> min_label;
    for (std::uint64_t r = 0; r < S.labels.size(); ++r) {
        Point x = ball_point(ctx, S.base, r);
        for (int depth = S.base.depth; depth <= ctx.m(); ++depth) {
            auto key = std::make_pair(depth, point_rank(ctx, ball_around(ctx, x, depth).residue));
            auto it = min_label.find(key);
            int l = S.labels[std::size_t(r)];
            if (it == min_label.end() || l < it->second) min_label[key] = l;
        }
    }

    std::map<std::pair<int, std::uint64_t>, int> passed; // ball -> required level that passed
    for (int depth = S.base.depth; depth < ctx.m(); ++depth) {
        // balls of this depth inside the base, in lexicographic residue order
        std::vector<Ball> balls;
        std::uint64_t count = 1;
        for (int i = 0; i < ctx.n(); ++i) count *= ctx.pow(depth - S.base.depth);
        for (std::uint64_t r = 0; r < count; ++r) {
            Ball outer{depth, S.base.residue};
            // enumerate residues extending the base residue
            std::uint64_t t = r;
            for (int i = ctx.n() - 1; i >= 0; --i) {
                outer.residue[i] =
                    S.base.residue[i] + Scalar(t % ctx.pow(depth - S.base.depth)) * ctx.pow(S.base.depth);
                t /= ctx.pow(depth - S.base.depth);
            }
            balls.push_back(outer);
        }
        std::sort(balls.begin(), balls.end(), [&](const Ball& a, const Ball& b) {
            return point_rank(ctx, a.residue) < point_rank(ctx, b.residue);
        });

        std::vector<std::optional<BallCheck>> results(balls.size());
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < balls.size(); ++i) {
            const Ball& b = balls[i];
            int j = min_label[{depth, point_rank(ctx, b.residue)}];
            bool skip = false;
            for (int e = S.base.depth; e < depth; ++e) {
                Ball anc = ball_around(ctx, b.residue, e);
                auto it = passed.find({e, point_rank(ctx, anc.residue)});
                if (it != passed.end() && it->second == j) {
                    skip = true;
                    break;
                }
            }
            if (skip)
                ++rep.skipped_balls;
            else
                todo.push_back(i);
        }

        auto work = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                std::size_t i = todo[k];
                int j = min_label[{depth, point_rank(ctx, balls[i].residue)}];
                results[i] = detail::check_ball(ctx, pair, balls[i], j);
            }
        };
        if (jobs <= 1 || todo.size() <= 1) {
            work(0, todo.size());
        } else {
            std::vector<std::thread> pool;
            std::size_t chunk = (todo.size() + std::size_t(jobs) - 1) / std::size_t(jobs);
            for (std::size_t lo = 0; lo < todo.size(); lo += chunk)
                pool.emplace_back(work, lo, std::min(lo + chunk, todo.size()));
            for (auto& th : pool) th.join();
        }

        for (std::size_t i = 0; i < balls.size(); ++i) {
            if (!results[i]) continue;
            const BallCheck& c = *results[i];
            ++rep.checked_balls;
            rep.entries.push_back(c);
            if (c.pass)
                passed[{depth, point_rank(ctx, c.ball.residue)}] = c.required;
            else {
                rep.failures.push_back(c);
                rep.pass = false;
            }
        }
    }
    return rep;
}

inline VerifyReport verify_tstrat(const PadicContext& ctx, const Stratification& S, int jobs = 1) {
    return verify_tstrat(ctx, S, Coloring::constant(ctx, S.base), jobs);
}

// ---------------------------------------------------------------------------
// Rainbow and reflection.
// ---------------------------------------------------------------------------

/// The rainbow of a stratification: points are colored by the tuple, over all
/// strata, of the sets of leading terms rv(x - S_i).  Ids are assigned by
/// first occurrence in lexicographic point order.
inline Coloring rainbow(const PadicContext& ctx, const Stratification& S) {
    std::uint64_t sz = ball_size(ctx, S.base);
    std::vector<std::vector<Point>> strata;
    for (int i = 0; i <= ctx.n(); ++i) strata.push_back(S.stratum(ctx, i));

    std::map<std::vector<std::vector<std::uint32_t>>, ColorId> ids;
    std::vector<ColorId> raw(static_cast<std::size_t>(sz));
    for (std::uint64_t r = 0; r < sz; ++r) {
        Point x = ball_point(ctx, S.base, r);
        std::vector<std::vector<std::uint32_t>> key;
        key.reserve(strata.size());
        for (const auto& si : strata) {
            std::vector<std::uint32_t> codes;
            codes.reserve(si.size());
            for (const auto& s : si) codes.push_back(rv_code(ctx, rv(ctx, point_sub(ctx, x, s))));
            std::sort(codes.begin(), codes.end());
            codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
            key.push_back(std::move(codes));
        }
        auto it = ids.find(key);
        if (it == ids.end()) it = ids.emplace(std::move(key), ColorId(ids.size())).first;
        raw[std::size_t(r)] = it->second;
    }
    return Coloring(ctx, S.base, std::move(raw));
}

/// Does every class of `fine` lie inside a class of `coarse`?
inline bool refines(const Coloring& fine, const Coloring& coarse) {
    if (!(fine.domain() == coarse.domain())) throw DomainMismatchError("refines: different domains");
    std::map<ColorId, ColorId> image;
    for (std::uint64_t r = 0; r < fine.size(); ++r) {
        auto it = image.find(fine.color_at_rank(r));
        if (it == image.end())
            image.emplace(fine.color_at_rank(r), coarse.color_at_rank(r));
        else if (it->second != coarse.color_at_rank(r))
            return false;
    }
    return true;
}

/// Reflection: adding chi to the stratum labels changes no translatability
/// space on any ball.  Requires the plain axioms to hold.
inline bool reflects(const PadicContext& ctx, const Stratification& S, const Coloring& chi,
                     Ball* witness = nullptr) {
    if (!verify_tstrat(ctx, S).pass) throw NotATStratificationError();
    Coloring labels = S.label_coloring(ctx);
    Coloring pair = Coloring::product(labels, chi);
    for (int depth = S.base.depth; depth < ctx.m(); ++depth) {
        std::uint64_t count = 1;
        for (int i = 0; i < ctx.n(); ++i) count *= ctx.pow(depth - S.base.depth);
        for (std::uint64_t r = 0; r < count; ++r) {
            Ball b{depth, S.base.residue};
            std::uint64_t t = r;
            for (int i = ctx.n() - 1; i >= 0; --i) {
                b.residue[i] =
                    S.base.residue[i] + Scalar(t % ctx.pow(depth - S.base.depth)) * ctx.pow(S.base.depth);
                t /= ctx.pow(depth - S.base.depth);
            }
            Coloring pl = pair.restrict(b);
            if (pl.is_constant()) continue;
            Subspace t1 = tsp(ctx, labels.restrict(b), b);
            Subspace t2 = tsp(ctx, pl, b);
            if (!(t1 == t2)) {
                if (witness) *witness = b;
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Induced stratification on a fiber.
// ---------------------------------------------------------------------------

struct FiberStratification {
    PadicContext ctx;  // reduced context in n - d variables
    Stratification strat;
    Projection pi;     // the exhibition used
    std::vector<Scalar> base_value; // the I-coordinates of the fiber
};

/// Restrict a verified stratification to a fiber of an exhibition of the
/// ball's translatability space; stratum indices drop by dim(tsp).
inline FiberStratification induced_fiber_strat(const PadicContext& ctx, const Stratification& S,
                                               const Ball& b, const Projection& pi, const Point& y) {
    if (!ball_subset(ctx, b, S.base)) throw DomainMismatchError("induced_fiber_strat: ball outside base");
    if (!ball_contains(ctx, b, y)) throw NotExhibitingError();

    Coloring labels = S.label_coloring(ctx).restrict(b);
    Subspace W = tsp(ctx, labels, b);
    if (!exhibits(ctx, pi, W)) throw NotExhibitingError();
    int d = W.dim();
    if (d == 0) {
        // fiber is the whole ball; relabel in place
        FiberStratification out{ctx, Stratification{}, pi, {}};
        out.strat = make_stratification(ctx, b, [&](const Point& x) { return S.label_at(ctx, x); });
        out.strat.declared_dims = S.declared_dims;
        return out;
    }
    if (d >= ctx.n()) throw UsageError("induced_fiber_strat: fiber is a single point");

    std::vector<int> J = pi.complement();
    PadicContext ctxJ(ctx.p(), ctx.m(), int(J.size()));
    Ball fiber_ball;
    fiber_ball.depth = b.depth;
    for (std::size_t j = 0; j < J.size(); ++j) fiber_ball.residue[int(j)] = b.residue[J[j]];
    std::vector<Scalar> u(pi.retained.size());
    for (std::size_t i = 0; i < pi.retained.size(); ++i) u[i] = y[pi.retained[i]];

    FiberStratification out{ctxJ, Stratification{}, pi, u};
    out.strat = make_stratification(ctxJ, fiber_ball, [&](const Point& zJ) {
        Point x{};
        for (std::size_t i = 0; i < pi.retained.size(); ++i) x[pi.retained[i]] = u[i];
        for (std::size_t j = 0; j < J.size(); ++j) x[J[j]] = zJ[int(j)];
        int l = S.label_at(ctx, x) - d;
        if (l < 0) throw NotExhibitingError();
        return l;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Greedy stratifier.
// ---------------------------------------------------------------------------

struct GreedyResult {
    bool ok = false;
    Stratification strat;
    VerifyReport last_report;
    int demotions = 0;
};

/// Initialize strata from the declared dimensions of the color classes, then
/// repeatedly demote the lexicographically least point of the lowest stratum
/// inside a failing ball.  Sound by construction: the result passed
/// verification when ok is true.
inline GreedyResult stratify_greedy(const PadicContext& ctx, const Coloring& chi,
                                    const std::map<ColorId, int>& declared_dims, int budget = 100,
                                    int jobs = 1) {
    GreedyResult out;
    Stratification S = make_stratification(ctx, chi.domain(), [&](const Point& x) {
        auto it = declared_dims.find(chi.color(x));
        if (it == declared_dims.end()) throw UsageError("stratify_greedy: color without declared dimension");
        if (it->second < 0 || it->second > ctx.n())
            throw UsageError("stratify_greedy: declared dimension out of range");
        return it->second;
    });
    for (int iter = 0;; ++iter) {
        VerifyReport rep = verify_tstrat(ctx, S, chi, jobs);
        if (rep.pass) {
            out.ok = true;
            out.strat = S;
            out.last_report = rep;
            out.demotions = iter;
            return out;
        }
        if (iter >= budget) {
            out.ok = false;
            out.strat = S;
            out.last_report = rep;
            out.demotions = iter;
            return out;
        }
        const BallCheck* f = rep.first_failure();
        if (f->filter == "declared_dim") {
            out.ok = false;
            out.strat = S;
            out.last_report = rep;
            out.demotions = iter;
            return out;
        }
        int j = f->required;
        // lexicographically least point of the lowest stratum inside the ball
        std::uint64_t bsz = ball_size(ctx, f->ball);
        std::optional<std::uint64_t> pick;
        for (std::uint64_t r = 0; r < bsz && !pick; ++r) {
            Point x = ball_point(ctx, f->ball, r);
            if (S.label_at(ctx, x) == j) pick = ball_rank(ctx, S.base, x);
        }
        if (!pick) pick = ball_rank(ctx, S.base, ball_point(ctx, f->ball, 0));
        S.labels[std::size_t(*pick)] = j - 1;
    }
}

// ---------------------------------------------------------------------------
// Small-changes enhancement.
// ---------------------------------------------------------------------------

/// Rebuild a stratification after changing it on a set X of declared
/// dimension dim_x, given a stratification T that reflects the old strata,
/// the coloring, and X.
inline Stratification enhance_small_changes(const PadicContext& ctx, const Stratification& S,
                                            const Stratification& T, const FiniteSet& X,
                                            const Coloring& chi, int dim_x) {
    if (!(S.base == T.base)) throw PreconditionFailed("S and T have different base balls");
    if (!(chi.domain() == S.base)) throw PreconditionFailed("chi not on the base ball");
    if (dim_x < 0 || dim_x > ctx.n()) throw PreconditionFailed("declared dimension of X out of range");

    // chi on X, a single fresh color off X
    Coloring chi_ext = Coloring::from_function(ctx, S.base, [&](const Point& p) {
        return X.contains(p) ? chi.color(p) + 1 : ColorId(0);
    });
    Coloring combined = Coloring::product(S.label_coloring(ctx), chi_ext);
    if (!verify_tstrat(ctx, T).pass) throw PreconditionFailed("T fails the stratification axioms");
    if (!reflects(ctx, T, combined))
        throw PreconditionFailed("T does not reflect the strata, the coloring and X");

    Stratification out = make_stratification(ctx, S.base, [&](const Point& x) {
        int tl = T.label_at(ctx, x);
        if (tl <= dim_x - 1) return tl;
        if (X.contains(x)) return dim_x;
        return std::max(S.label_at(ctx, x), dim_x);
    });
    return out;
}

// ---------------------------------------------------------------------------
// The one-variable skeleton: minimal points meeting every non-monochromatic
// ball.
// ---------------------------------------------------------------------------

inline std::vector<Point> minimal_T0(const PadicContext& ctx, const Coloring& chi) {
    if (ctx.n() != 1) throw UsageError("minimal_T0 requires n = 1");
    const Ball& base = chi.domain();
    std::vector<Point> out;
    for (int depth = base.depth; depth < ctx.m(); ++depth) {
        std::uint64_t count = 1;
        for (int i = 0; i < ctx.n(); ++i) count *= ctx.pow(depth - base.depth);
        for (std::uint64_t r = 0; r < count; ++r) {
            Ball b{depth, base.residue};
            b.residue[0] = base.residue[0] + Scalar(r) * ctx.pow(base.depth);
            Coloring local = chi.restrict(b);
            if (local.is_constant()) continue;
            bool minimal = true;
            if (depth + 1 <= ctx.m())
                for (const Ball& c : children(ctx, b))
                    if (!chi.restrict(c).is_constant()) {
                        minimal = false;
                        break;
                    }
            if (minimal) out.push_back(ball_point(ctx, b, 0));
        }
    }
    std::sort(out.begin(), out.end(),
              [&](const Point& a, const Point& b) { return point_rank(ctx, a) < point_rank(ctx, b); });
    return out;
}

// ---------------------------------------------------------------------------
// Exceptional leading terms: the set of xi for which the coloring fails to
// be translatable along dir(xi) on the ball x + rv^{-1}(xi).
// ---------------------------------------------------------------------------

struct KegelResult {
    std::vector<RvValue> xi;
    std::set<int> valuations;
};

inline KegelResult kegel_xi(const PadicContext& ctx, const Coloring& chi, const Point& x) {
    KegelResult out;
    for (int lambda = 0; lambda + 1 < ctx.m(); ++lambda) {
        for (FpVec u = 1; u < ctx.child_count(); ++u) {
            auto dd = fp_decode(ctx, u);
            Point center = x;
            for (int i = 0; i < ctx.n(); ++i)
                center[i] = scalar_add(ctx, center[i],
                                       scalar_mul(ctx, ctx.pow(lambda), Scalar(dd[std::size_t(i)])));
            Ball b = ball_around(ctx, center, lambda + 1);
            if (!ball_subset(ctx, b, chi.domain())) continue;
            Subspace V = subspace_span(ctx, {fp_decode(ctx, direction_of_unit(ctx, u).rep)});
            if (!is_translatable(ctx, chi.restrict(b), b, V).ok) {
                out.xi.push_back(RvValue{false, lambda, u});
                out.valuations.insert(lambda);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whitney-style exceptional valuations.
// ---------------------------------------------------------------------------

/// For a ball B meeting its lowest stratum S_d: the set of valuations L such
/// that some pair x' in B∩S_d, y' in B∩S_j (j > d) with v(x'-y') = L has its
/// direction outside the translatability space of the maximal ball around y'
/// inside S_{>=j}.
inline std::set<int> whitney_b_M(const PadicContext& ctx, const Stratification& S, const Ball& B,
                                 std::optional<int> d_opt = std::nullopt, bool assume_verified = false) {
    if (!assume_verified && !verify_tstrat(ctx, S).pass)
        throw NotVerifiedError("whitney_b_M: stratification fails verification");
    if (!ball_subset(ctx, B, S.base)) throw DomainMismatchError("whitney_b_M: ball outside base");

    std::uint64_t bsz = ball_size(ctx, B);
    int dmin = ctx.n() + 1;
    for (std::uint64_t r = 0; r < bsz; ++r)
        dmin = std::min(dmin, S.label_at(ctx, ball_point(ctx, B, r)));
    int d = d_opt ? *d_opt : dmin;
    if (d != dmin) throw NotVerifiedError("whitney_b_M: B does not meet S_d with the chosen d maximal");

    Coloring labels = S.label_coloring(ctx);
    std::map<std::pair<int, std::uint64_t>, Subspace> tsp_cache;
    auto tsp_of = [&](const Ball& b) -> const Subspace& {
        auto key = std::make_pair(b.depth, point_rank(ctx, b.residue));
        auto it = tsp_cache.find(key);
        if (it == tsp_cache.end()) it = tsp_cache.emplace(key, tsp(ctx, labels.restrict(b), b)).first;
        return it->second;
    };
    auto max_ball_in_upper = [&](const Point& y, int j) {
        Ball best = ball_around(ctx, y, ctx.m());
        for (int depth = ctx.m() - 1; depth >= S.base.depth; --depth) {
            Ball b = ball_around(ctx, y, depth);
            if (!ball_subset(ctx, b, S.base)) break;
            bool ok = true;
            std::uint64_t sz = ball_size(ctx, b);
            for (std::uint64_t r = 0; r < sz && ok; ++r)
                ok = S.label_at(ctx, ball_point(ctx, b, r)) >= j;
            if (!ok) break;
            best = b;
        }
        return best;
    };

    std::set<int> M;
    std::vector<Point> xs, ys;
    for (std::uint64_t r = 0; r < bsz; ++r) {
        Point p = ball_point(ctx, B, r);
        int l = S.label_at(ctx, p);
        if (l == d) xs.push_back(p);
        else if (l > d) ys.push_back(p);
    }
    for (const auto& xp : xs)
        for (const auto& yp : ys) {
            Point diff = point_sub(ctx, xp, yp);
            int lambda = point_val(ctx, diff);
            if (M.count(lambda)) continue;
            Ball bprime = max_ball_in_upper(yp, S.label_at(ctx, yp));
            const Subspace& W = tsp_of(bprime);
            if (!subspace_contains_dir(ctx, W, dir(ctx, diff))) M.insert(lambda);
        }
    return M;
}

// ---------------------------------------------------------------------------
// Affine direction spaces.
// ---------------------------------------------------------------------------

inline Subspace affdir(const PadicContext& ctx, const std::vector<Point>& C) {
    if (C.empty()) throw EmptySetError("affdir: empty set");
    std::vector<Direction> dirs;
    for (std::size_t i = 0; i < C.size(); ++i)
        for (std::size_t j = i + 1; j < C.size(); ++j) {
            Point d = point_sub(ctx, C[i], C[j]);
            if (!point_is_zero(ctx, d)) dirs.push_back(dir(ctx, d));
        }
    return span_of_directions(ctx, dirs);
}

/// Is the set sub-affine with the declared local dimension?  The affine
/// direction span must have exactly that dimension; the graph property
/// (every exhibition fiber meets the set at most once) holds automatically
/// and is re-checked as a safeguard.
inline bool is_subaffine(const PadicContext& ctx, const std::vector<Point>& C, int declared_dim) {
    Subspace V = affdir(ctx, C);
    if (V.dim() != declared_dim) return false;
    for (const auto& pi : exhibitions(ctx, V)) {
        std::map<std::uint64_t, int> seen;
        for (const auto& x : C) {
            std::uint64_t key = 0;
            for (int i : pi.retained) key = key * ctx.modulus() + x[i];
            if (++seen[key] > 1) return false;
        }
    }
    return true;
}

} // namespace pstrat
