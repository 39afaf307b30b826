#pragma once

// Brute-force oracles used by the test and acceptance suites.  Everything in
// this header is independent of the search and canonicalization paths it is
// used to check: risometries are enumerated point by point straight from the
// definition, and translatability is decided by exhausting risometries and
// lift translations.

#include <functional>
#include <optional>
#include <vector>

#include "pstrat/canon.hpp"
#include "pstrat/geometry.hpp"

namespace pstrat::oracles {

/// All leading-term-preserving bijections of a ball, found by assigning
/// images in point order and pruning against every previously fixed pair.
inline std::vector<PointMap> enumerate_rv_bijections(const PadicContext& ctx, const Ball& b) {
    std::uint64_t n = ball_size(ctx, b);
    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (std::uint64_t r = 0; r < n; ++r) pts[std::size_t(r)] = ball_point(ctx, b, r);
    std::vector<std::vector<RvValue>> pair_rv(static_cast<std::size_t>(n), std::vector<RvValue>(static_cast<std::size_t>(n)));
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < n; ++j)
            pair_rv[std::size_t(i)][std::size_t(j)] =
                rv(ctx, point_sub(ctx, pts[std::size_t(i)], pts[std::size_t(j)]));

    std::vector<PointMap> out;
    PointMap cur(static_cast<std::size_t>(n), 0);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::function<void(std::uint64_t)> rec = [&](std::uint64_t i) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (std::uint64_t img = 0; img < n; ++img) {
            if (used[std::size_t(img)]) continue;
            bool ok = true;
            for (std::uint64_t j = 0; j < i && ok; ++j)
                ok = pair_rv[std::size_t(img)][std::size_t(cur[std::size_t(j)])] ==
                     pair_rv[std::size_t(i)][std::size_t(j)];
            if (!ok) continue;
            used[std::size_t(img)] = true;
            cur[std::size_t(i)] = std::uint32_t(img);
            rec(i + 1);
            used[std::size_t(img)] = false;
        }
    };
    rec(0);
    return out;
}

/// Is there a leading-term-preserving bijection of the common ball matching
/// chi2 o w = chi1?  Exhausts the enumerated group.
inline bool brute_force_riso_equiv(const PadicContext& ctx, const Coloring& chi1,
                                   const Coloring& chi2,
                                   const std::vector<PointMap>& group) {
    const Ball& b = chi1.domain();
    std::uint64_t n = ball_size(ctx, b);
    for (const auto& pm : group) {
        bool ok = true;
        for (std::uint64_t r = 0; r < n && ok; ++r)
            ok = chi2.color_at_rank(pm[std::size_t(r)]) == chi1.color_at_rank(r);
        if (ok) return true;
    }
    return false;
}

/// Straightener existence by exhaustion: some enumerated bijection phi makes
/// chi o phi invariant under translations along the lift.
inline bool brute_force_translatable(const PadicContext& ctx, const Coloring& chi, const Ball& b,
                                     const Subspace& V, const std::vector<PointMap>& group) {
    std::uint64_t n = ball_size(ctx, b);
    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (std::uint64_t r = 0; r < n; ++r) pts[std::size_t(r)] = ball_point(ctx, b, r);
    Lift L = canonical_lift(ctx, V);
    // lift translations that map the ball to itself
    std::vector<Point> moves;
    for (const auto& v : lift_elements(ctx, L))
        if (point_val(ctx, v) >= b.depth && !point_is_zero(ctx, v)) moves.push_back(v);

    for (const auto& pm : group) {
        bool inv = true;
        for (std::uint64_t r = 0; r < n && inv; ++r) {
            ColorId c = chi.color(pts[std::size_t(pm[std::size_t(r)])]);
            for (const auto& mv : moves) {
                Point y = point_add(ctx, pts[std::size_t(r)], mv);
                std::uint64_t r2 = ball_rank(ctx, b, y);
                if (chi.color(pts[std::size_t(pm[std::size_t(r2)])]) != c) {
                    inv = false;
                    break;
                }
            }
        }
        if (inv) return true;
    }
    return false;
}

} // namespace pstrat::oracles
