#pragma once

#include <algorithm>
#include <vector>

#include "pstrat/padic.hpp"

namespace pstrat {

// Linear algebra over F_p for n <= 4.  Subspaces are kept in reduced row
// echelon form, which makes them canonical: equal subspaces compare equal.

struct Subspace {
    int n = 0;
    std::vector<std::array<int, kMaxDim>> rows; // RREF basis, possibly empty

    int dim() const { return int(rows.size()); }
    bool operator==(const Subspace&) const = default;
};

namespace detail {

inline void rref(int p, int n, std::vector<std::array<int, kMaxDim>>& rows) {
    int lead = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (lead >= n) {
            rows.resize(r);
            break;
        }
        std::size_t pivot = r;
        while (rows[pivot][std::size_t(lead)] == 0) {
            ++pivot;
            if (pivot == rows.size()) {
                pivot = r;
                ++lead;
                if (lead == n) {
                    rows.resize(r);
                    return;
                }
            }
        }
        std::swap(rows[pivot], rows[r]);
        int inv = fp_inv_mod_p(p, rows[r][std::size_t(lead)]);
        for (int j = 0; j < n; ++j) rows[r][std::size_t(j)] = rows[r][std::size_t(j)] * inv % p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r) continue;
            int f = rows[i][std::size_t(lead)];
            if (f == 0) continue;
            for (int j = 0; j < n; ++j) {
                int v = rows[i][std::size_t(j)] - f * rows[r][std::size_t(j)];
                rows[i][std::size_t(j)] = ((v % p) + p) % p;
            }
        }
        ++lead;
    }
    // drop zero rows
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [n](const std::array<int, kMaxDim>& row) {
                                  for (int j = 0; j < n; ++j)
                                      if (row[std::size_t(j)] != 0) return false;
                                  return true;
                              }),
               rows.end());
}

} // namespace detail

inline Subspace subspace_span(const PadicContext& ctx, std::vector<std::array<int, kMaxDim>> rows) {
    for (auto& r : rows)
        for (int j = 0; j < ctx.n(); ++j) r[std::size_t(j)] = ((r[std::size_t(j)] % ctx.p()) + ctx.p()) % ctx.p();
    detail::rref(ctx.p(), ctx.n(), rows);
    return Subspace{ctx.n(), std::move(rows)};
}

inline Subspace subspace_zero(const PadicContext& ctx) { return Subspace{ctx.n(), {}}; }

inline Subspace subspace_full(const PadicContext& ctx) {
    std::vector<std::array<int, kMaxDim>> rows;
    for (int i = 0; i < ctx.n(); ++i) {
        std::array<int, kMaxDim> r{};
        r[std::size_t(i)] = 1;
        rows.push_back(r);
    }
    return Subspace{ctx.n(), rows};
}

inline bool subspace_contains(const PadicContext& ctx, const Subspace& V, FpVec vec) {
    auto d = fp_decode(ctx, vec);
    for (const auto& row : V.rows) {
        int lead = 0;
        while (lead < ctx.n() && row[std::size_t(lead)] == 0) ++lead;
        int f = d[std::size_t(lead)];
        if (f == 0) continue;
        for (int j = 0; j < ctx.n(); ++j)
            d[std::size_t(j)] = ((d[std::size_t(j)] - f * row[std::size_t(j)]) % ctx.p() + ctx.p()) % ctx.p();
    }
    for (int j = 0; j < ctx.n(); ++j)
        if (d[std::size_t(j)] != 0) return false;
    return true;
}

inline bool subspace_contains_dir(const PadicContext& ctx, const Subspace& V, const Direction& d) {
    return subspace_contains(ctx, V, d.rep);
}

inline Subspace subspace_sum(const PadicContext& ctx, const Subspace& a, const Subspace& b) {
    auto rows = a.rows;
    rows.insert(rows.end(), b.rows.begin(), b.rows.end());
    return subspace_span(ctx, std::move(rows));
}

/// Annihilator under the standard dot form (right kernel of the basis matrix).
inline Subspace subspace_annihilator(const PadicContext& ctx, const Subspace& V) {
    // Solve V.rows * x = 0 over F_p by enumerating a basis of the null space
    // from the RREF: free columns parametrize solutions.
    int n = ctx.n(), p = ctx.p();
    std::vector<int> pivot_col;
    for (const auto& row : V.rows) {
        int lead = 0;
        while (lead < n && row[std::size_t(lead)] == 0) ++lead;
        pivot_col.push_back(lead);
    }
    std::vector<std::array<int, kMaxDim>> basis;
    for (int c = 0; c < n; ++c) {
        if (std::find(pivot_col.begin(), pivot_col.end(), c) != pivot_col.end()) continue;
        std::array<int, kMaxDim> x{};
        x[std::size_t(c)] = 1;
        for (std::size_t r = 0; r < V.rows.size(); ++r)
            x[std::size_t(pivot_col[r])] = (p - V.rows[r][std::size_t(c)] % p) % p;
        basis.push_back(x);
    }
    return subspace_span(ctx, std::move(basis));
}

inline Subspace subspace_intersect(const PadicContext& ctx, const Subspace& a, const Subspace& b) {
    return subspace_annihilator(ctx, subspace_sum(ctx, subspace_annihilator(ctx, a), subspace_annihilator(ctx, b)));
}

inline bool subspace_leq(const PadicContext& ctx, const Subspace& a, const Subspace& b) {
    for (const auto& row : a.rows) {
        std::array<int, kMaxDim> r = row;
        if (!subspace_contains(ctx, b, fp_encode(ctx, r))) return false;
    }
    return true;
}

/// All lines of F_p^n as 1-dimensional subspaces, in lexicographic order of
/// their normalized representative.
inline std::vector<Subspace> all_lines(const PadicContext& ctx) {
    std::vector<Subspace> lines;
    std::vector<FpVec> seen;
    for (FpVec v = 1; v < ctx.child_count(); ++v) {
        Direction d = direction_of_unit(ctx, v);
        if (std::find(seen.begin(), seen.end(), d.rep) != seen.end()) continue;
        seen.push_back(d.rep);
        lines.push_back(subspace_span(ctx, {fp_decode(ctx, d.rep)}));
    }
    std::sort(lines.begin(), lines.end(), [](const Subspace& a, const Subspace& b) {
        return a.rows[0] < b.rows[0];
    });
    return lines;
}

/// The full subspace lattice of F_p^n, grouped by dimension
/// (result[d] lists all d-dimensional subspaces).
inline std::vector<std::vector<Subspace>> subspace_lattice(const PadicContext& ctx) {
    int n = ctx.n();
    std::vector<std::vector<Subspace>> by_dim(static_cast<std::size_t>(n) + 1);
    by_dim[0].push_back(subspace_zero(ctx));
    // grow spans line by line; dedup via canonical RREF
    std::vector<Subspace> frontier = {subspace_zero(ctx)};
    auto lines = all_lines(ctx);
    for (int d = 1; d <= n; ++d) {
        std::vector<Subspace> next;
        for (const auto& V : frontier)
            for (const auto& L : lines) {
                if (subspace_leq(ctx, L, V)) continue;
                Subspace W = subspace_sum(ctx, V, L);
                if (std::find(next.begin(), next.end(), W) == next.end()) next.push_back(W);
            }
        std::sort(next.begin(), next.end(), [](const Subspace& a, const Subspace& b) { return a.rows < b.rows; });
        by_dim[std::size_t(d)] = next;
        frontier = std::move(next);
    }
    return by_dim;
}

/// Span of a set of directions.
inline Subspace span_of_directions(const PadicContext& ctx, const std::vector<Direction>& dirs) {
    std::vector<std::array<int, kMaxDim>> rows;
    rows.reserve(dirs.size());
    for (const auto& d : dirs) rows.push_back(fp_decode(ctx, d.rep));
    return subspace_span(ctx, std::move(rows));
}

} // namespace pstrat
