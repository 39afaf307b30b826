#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pstrat/riso.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// Canonical forms of colored balls.
//
// The recursive form chooses, at every node, the child translation whose
// tuple of recursively canonicalized children is lexicographically least;
// leaves encode the color id.  Two colored balls have equal forms exactly
// when one is the image of the other under a leading-term-preserving
// bijection that matches colors (checked against brute force in the tests).
// ---------------------------------------------------------------------------

struct CanonicalForm {
    std::vector<std::uint8_t> bytes;
    std::uint64_t digest = 0;

    bool operator==(const CanonicalForm&) const = default;
};

inline std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex_digest(std::uint64_t d) {
    static const char* hexd = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[std::size_t(i)] = hexd[d & 0xf];
        d >>= 4;
    }
    return s;
}

namespace detail {

inline void encode_color(std::vector<std::uint8_t>& out, ColorId c) {
    for (int i = 7; i >= 0; --i) out.push_back(std::uint8_t((c >> (8 * i)) & 0xff));
}

/// Bottom-up canonical encodings for all nodes of the colored ball tree.
/// When `chosen` is non-null, records the minimizing translation per node.
inline std::vector<std::uint8_t> canon_encode(const PadicContext& ctx, const Coloring& chi,
                                              std::vector<FpVec>* chosen) {
    const Ball& b = chi.domain();
    int levels = ctx.m() - b.depth;
    std::uint64_t q = ctx.child_count();
    if (chosen) chosen->assign(static_cast<std::size_t>(riso_node_count(ctx, b.depth)), 0);

    // encodings of the current level, one per node, all the same length
    std::vector<std::vector<std::uint8_t>> cur;
    std::uint64_t leaves = ball_size(ctx, b);
    // Build leaf encodings indexed by digit-path rank (which differs from the
    // lexicographic point rank when n > 1).
    {
        std::vector<std::vector<std::uint8_t>> by_path(static_cast<std::size_t>(leaves));
        for (std::uint64_t r = 0; r < leaves; ++r) {
            Point x = ball_point(ctx, b, r);
            std::uint64_t path = 0;
            for (int lev = 0; lev < levels; ++lev)
                path = path * q + point_digit_vec(ctx, x, b.depth + lev);
            std::vector<std::uint8_t> enc;
            encode_color(enc, chi.color_at_rank(r));
            by_path[std::size_t(path)] = std::move(enc);
        }
        cur = std::move(by_path);
    }

    for (int lev = levels - 1; lev >= 0; --lev) {
        std::uint64_t count = 1;
        for (int i = 0; i < lev; ++i) count *= q;
        std::uint64_t off = riso_level_offset(ctx, lev);
        std::vector<std::vector<std::uint8_t>> next(static_cast<std::size_t>(count));
        for (std::uint64_t node = 0; node < count; ++node) {
            std::vector<std::uint8_t> best;
            FpVec best_t = 0;
            for (FpVec t = 0; t < q; ++t) {
                std::vector<std::uint8_t> cand;
                cand.reserve(cur[std::size_t(node * q)].size() * std::size_t(q));
                for (FpVec d = 0; d < q; ++d) {
                    const auto& ch = cur[std::size_t(node * q + fp_add(ctx, d, t))];
                    cand.insert(cand.end(), ch.begin(), ch.end());
                }
                if (t == 0 || cand < best) {
                    best = std::move(cand);
                    best_t = t;
                }
            }
            if (chosen) (*chosen)[std::size_t(off + node)] = best_t;
            next[std::size_t(node)] = std::move(best);
        }
        cur = std::move(next);
    }
    return cur.empty() ? std::vector<std::uint8_t>{} : cur[0];
}

} // namespace detail

inline CanonicalForm canonicalize(const PadicContext& ctx, const Coloring& chi) {
    CanonicalForm f;
    f.bytes = detail::canon_encode(ctx, chi, nullptr);
    f.digest = fnv1a64(f.bytes);
    return f;
}

/// The risometry gamma with (chi o gamma) in canonical position: the plain
/// digit-tree reading of chi o gamma equals the canonical form.
inline Risometry canonizing_risometry(const PadicContext& ctx, const Coloring& chi) {
    std::vector<FpVec> chosen;
    detail::canon_encode(ctx, chi, &chosen);
    const Ball& b = chi.domain();
    int levels = ctx.m() - b.depth;
    std::uint64_t q = ctx.child_count();
    Risometry g = riso_identity(ctx, b);
    // source tree = canonical arrangement; track the image node in chi's tree
    std::function<void(int, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> walk =
        [&](int lev, std::uint64_t src, std::uint64_t img, std::uint64_t off, std::uint64_t width) {
            if (lev == levels) return;
            FpVec s = chosen[std::size_t(off + img)];
            g.labels[std::size_t(off + src)] = s;
            for (FpVec d = 0; d < q; ++d)
                walk(lev + 1, src * q + d, img * q + fp_add(ctx, d, s), off + width, width * q);
        };
    walk(0, 0, 0, 0, 1);
    return g;
}

// ---------------------------------------------------------------------------
// Leading-term-preserving maps between two balls of the same depth:
// a risometry of the source followed by the digit-aligning translation.
// ---------------------------------------------------------------------------

struct RisoMap {
    Ball from, to;
    Risometry riso; // on `from`

    bool operator==(const RisoMap&) const = default;
};

inline Point riso_map_apply(const PadicContext& ctx, const RisoMap& w, const Point& x) {
    Point y = riso_apply(ctx, w.riso, x);
    Point z;
    for (int i = 0; i < ctx.n(); ++i) z[i] = y[i] - w.from.residue[i] + w.to.residue[i];
    return z;
}

/// Decide whether two colored balls of equal depth are equivalent under
/// leading-term-preserving bijections matching colors; on success produce the
/// deterministic witness built from the canonizing maps.
inline std::optional<RisoMap> riso_equiv(const PadicContext& ctx, const Coloring& chi1,
                                         const Coloring& chi2) {
    if (chi1.domain().depth != chi2.domain().depth) throw DepthMismatchError();
    CanonicalForm f1 = canonicalize(ctx, chi1);
    CanonicalForm f2 = canonicalize(ctx, chi2);
    if (!(f1 == f2)) return std::nullopt;
    // w = gamma2 o tau o gamma1^{-1}, expressed as (riso on B1, then align)
    Risometry g1 = canonizing_risometry(ctx, chi1);
    Risometry g2 = canonizing_risometry(ctx, chi2);
    Risometry g2_on_b1 = g2;
    g2_on_b1.domain = chi1.domain();
    Risometry riso = riso_compose(ctx, g2_on_b1, riso_invert(ctx, g1));
    return RisoMap{chi1.domain(), chi2.domain(), riso};
}

} // namespace pstrat
