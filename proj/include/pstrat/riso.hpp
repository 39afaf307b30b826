#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pstrat/finite_set.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// Risometries of a ball, in normal form.
//
// A bijection of a depth-d ball preserves leading terms of differences
// exactly when, at every internal node of the ball tree, it translates the
// child digit vector by a fixed amount.  We store that translation (an
// element of F_p^n, encoded as an FpVec) for every internal node; node depths
// run from the ball's depth to m-1.  Nodes are indexed level by level, with
// the digit path read as a big-endian number in base p^n.
// ---------------------------------------------------------------------------

/// Number of internal tree nodes of a ball of the given depth.
inline std::uint64_t riso_node_count(const PadicContext& ctx, int depth) {
    std::uint64_t q = ctx.child_count(), total = 0, level = 1;
    for (int lev = 0; lev < ctx.m() - depth; ++lev) {
        total += level;
        level *= q;
    }
    return total;
}

inline std::uint64_t riso_level_offset(const PadicContext& ctx, int lev) {
    std::uint64_t q = ctx.child_count(), off = 0, level = 1;
    for (int i = 0; i < lev; ++i) {
        off += level;
        level *= q;
    }
    return off;
}

struct Risometry {
    Ball domain;
    std::vector<FpVec> labels; // one digit-vector translation per internal node

    bool operator==(const Risometry&) const = default;
};

inline Risometry riso_identity(const PadicContext& ctx, const Ball& b) {
    return Risometry{b, std::vector<FpVec>(riso_node_count(ctx, b.depth), 0)};
}

inline Point riso_apply(const PadicContext& ctx, const Risometry& f, const Point& x) {
    if (!ball_contains(ctx, f.domain, x)) throw DomainMismatchError("riso_apply: point outside domain");
    int depth = f.domain.depth;
    int levels = ctx.m() - depth;
    std::uint64_t q = ctx.child_count();
    Point y = f.domain.residue;
    std::uint64_t path = 0, off = 0, width = 1;
    for (int lev = 0; lev < levels; ++lev) {
        int e = depth + lev;
        FpVec d = point_digit_vec(ctx, x, e);
        FpVec t = f.labels[std::size_t(off + path)];
        FpVec d2 = fp_add(ctx, d, t);
        auto dd = fp_decode(ctx, d2);
        for (int i = 0; i < ctx.n(); ++i)
            y[i] += std::uint32_t(dd[std::size_t(i)]) * ctx.pow(e);
        path = path * q + d;
        off += width;
        width *= q;
    }
    return y;
}

/// Composition: apply(compose(f, g), x) == apply(f, apply(g, x)).
inline Risometry riso_compose(const PadicContext& ctx, const Risometry& f, const Risometry& g) {
    if (!(f.domain == g.domain)) throw DomainMismatchError("riso_compose: different domains");
    Risometry h{g.domain, std::vector<FpVec>(g.labels.size(), 0)};
    int levels = ctx.m() - g.domain.depth;
    std::uint64_t q = ctx.child_count();
    std::function<void(int, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> walk =
        [&](int lev, std::uint64_t src, std::uint64_t img, std::uint64_t off, std::uint64_t width) {
            if (lev == levels) return;
            FpVec tg = g.labels[std::size_t(off + src)];
            FpVec tf = f.labels[std::size_t(off + img)];
            h.labels[std::size_t(off + src)] = fp_add(ctx, tg, tf);
            for (FpVec d = 0; d < q; ++d)
                walk(lev + 1, src * q + d, img * q + fp_add(ctx, d, tg), off + width, width * q);
        };
    walk(0, 0, 0, 0, 1);
    return h;
}

inline Risometry riso_invert(const PadicContext& ctx, const Risometry& f) {
    Risometry h{f.domain, std::vector<FpVec>(f.labels.size(), 0)};
    int levels = ctx.m() - f.domain.depth;
    std::uint64_t q = ctx.child_count();
    std::function<void(int, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> walk =
        [&](int lev, std::uint64_t src, std::uint64_t img, std::uint64_t off, std::uint64_t width) {
            if (lev == levels) return;
            FpVec t = f.labels[std::size_t(off + src)];
            h.labels[std::size_t(off + img)] = fp_neg(ctx, t);
            for (FpVec d = 0; d < q; ++d)
                walk(lev + 1, src * q + d, img * q + fp_add(ctx, d, t), off + width, width * q);
        };
    walk(0, 0, 0, 0, 1);
    return h;
}

/// Translation by c (which must map the ball to itself, i.e. v(c) >= depth)
/// as a risometry in normal form.  Digit-level carries depend only on the
/// node, so translations live in the group.
inline Risometry riso_translation(const PadicContext& ctx, const Ball& b, const Point& c) {
    if (point_val(ctx, c) < b.depth)
        throw DomainMismatchError("riso_translation: translation does not preserve the ball");
    Risometry h{b, std::vector<FpVec>(riso_node_count(ctx, b.depth), 0)};
    int levels = ctx.m() - b.depth;
    std::uint64_t q = ctx.child_count();
    // walk nodes carrying the node's residue point
    std::function<void(int, std::uint64_t, Point, std::uint64_t, std::uint64_t)> walk =
        [&](int lev, std::uint64_t rank, Point res, std::uint64_t off, std::uint64_t width) {
            if (lev == levels) return;
            int e = b.depth + lev;
            std::array<int, kMaxDim> lab{};
            for (int i = 0; i < ctx.n(); ++i) {
                // carry into digit e when the parts below level e wrap
                std::uint64_t sum = std::uint64_t(res[i] % ctx.pow(e)) + c[i] % ctx.pow(e);
                int carry = sum >= ctx.pow(e) ? 1 : 0;
                lab[std::size_t(i)] = (scalar_digit(ctx, c[i], e) + carry) % ctx.p();
            }
            h.labels[std::size_t(off + rank)] = fp_encode(ctx, lab);
            for (FpVec d = 0; d < q; ++d) {
                Point child = res;
                auto dd = fp_decode(ctx, d);
                for (int i = 0; i < ctx.n(); ++i)
                    child[i] += std::uint32_t(dd[std::size_t(i)]) * ctx.pow(e);
                walk(lev + 1, rank * q + d, child, off + width, width * q);
            }
        };
    walk(0, 0, b.residue, 0, 1);
    return h;
}

// ---------------------------------------------------------------------------
// Point maps on a ball (images indexed by source rank in the ball's
// lexicographic point order) and the structure theorem.
// ---------------------------------------------------------------------------

using PointMap = std::vector<std::uint32_t>;

inline PointMap riso_to_point_map(const PadicContext& ctx, const Risometry& f) {
    std::uint64_t sz = ball_size(ctx, f.domain);
    PointMap pm(static_cast<std::size_t>(sz));
    for (std::uint64_t r = 0; r < sz; ++r)
        pm[std::size_t(r)] =
            std::uint32_t(ball_rank(ctx, f.domain, riso_apply(ctx, f, ball_point(ctx, f.domain, r))));
    return pm;
}

inline bool point_map_bijective(const PointMap& pm) {
    std::vector<bool> seen(pm.size(), false);
    for (auto v : pm) {
        if (v >= pm.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

/// Direct definition check: does the bijection preserve leading terms of
/// differences for all pairs?
inline bool is_risometry(const PadicContext& ctx, const Ball& b, const PointMap& pm) {
    if (!point_map_bijective(pm)) throw NotBijectiveError();
    std::uint64_t sz = ball_size(ctx, b);
    std::vector<Point> pts(static_cast<std::size_t>(sz));
    for (std::uint64_t r = 0; r < sz; ++r) pts[std::size_t(r)] = ball_point(ctx, b, r);
    for (std::uint64_t r = 0; r < sz; ++r)
        for (std::uint64_t s = r + 1; s < sz; ++s) {
            RvValue a = rv(ctx, point_sub(ctx, pts[std::size_t(r)], pts[std::size_t(s)]));
            RvValue bb = rv(ctx, point_sub(ctx, pts[std::size_t(pm[std::size_t(r)])],
                                           pts[std::size_t(pm[std::size_t(s)])]));
            if (!(a == bb)) return false;
        }
    return true;
}

/// Structure theorem: every leading-term-preserving bijection of a ball is a
/// per-node digit translation, and the labels are read off the digits of the
/// images.  Throws NotRisometry when the extracted labels fail to reproduce
/// the map.
inline Risometry riso_decompose(const PadicContext& ctx, const Ball& b, const PointMap& pm) {
    if (!point_map_bijective(pm)) throw NotBijectiveError();
    int levels = ctx.m() - b.depth;
    std::uint64_t q = ctx.child_count();
    Risometry h{b, std::vector<FpVec>(riso_node_count(ctx, b.depth), 0)};
    // label(node) = digit_e(image of any point in the node) - digit_e(point)
    std::function<void(int, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> walk =
        [&](int lev, std::uint64_t rank, std::uint64_t least_rank, std::uint64_t off, std::uint64_t width) {
            if (lev == levels) return;
            int e = b.depth + lev;
            Point x = ball_point(ctx, b, least_rank);
            Point y = ball_point(ctx, b, pm[std::size_t(least_rank)]);
            h.labels[std::size_t(off + rank)] =
                fp_sub(ctx, point_digit_vec(ctx, y, e), point_digit_vec(ctx, x, e));
            // children: least point of child d has the same tail digits (zero)
            std::uint64_t side = ctx.pow(ctx.m() - b.depth);
            for (FpVec d = 0; d < q; ++d) {
                // least point of child: adjust digit e of least_rank
                Point cx = x;
                auto dd = fp_decode(ctx, d);
                for (int i = 0; i < ctx.n(); ++i)
                    cx[i] += std::uint32_t(dd[std::size_t(i)]) * ctx.pow(e);
                (void)side;
                walk(lev + 1, rank * q + d, ball_rank(ctx, b, cx), off + width, width * q);
            }
        };
    walk(0, 0, 0, 0, 1);
    if (!(riso_to_point_map(ctx, h) == pm)) throw NotRisometryError();
    return h;
}

} // namespace pstrat
