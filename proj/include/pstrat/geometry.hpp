#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "pstrat/fplin.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// Balls.  A ball of depth d in O^n is a coset  residue + p^d O^n; depth-m
// balls are single points.  Any two balls are nested or disjoint.
// ---------------------------------------------------------------------------

struct Ball {
    int depth = 0;
    Point residue{}; // coordinates reduced mod p^depth

    bool operator==(const Ball&) const = default;
};

inline Ball whole_space(const PadicContext&) { return Ball{0, Point{}}; }

inline Ball ball_around(const PadicContext& ctx, const Point& x, int depth) {
    Ball b;
    b.depth = depth;
    for (int i = 0; i < ctx.n(); ++i) b.residue[i] = x[i] % ctx.pow(depth);
    return b;
}

inline bool ball_contains(const PadicContext& ctx, const Ball& b, const Point& x) {
    for (int i = 0; i < ctx.n(); ++i)
        if (x[i] % ctx.pow(b.depth) != b.residue[i]) return false;
    return true;
}

/// Number of points of the ball: p^{n (m - depth)}.
inline std::uint64_t ball_size(const PadicContext& ctx, const Ball& b) {
    std::uint64_t s = 1;
    for (int i = 0; i < ctx.n(); ++i) s *= ctx.pow(ctx.m() - b.depth);
    return s;
}

/// Nesting test: is a contained in b?
inline bool ball_subset(const PadicContext& ctx, const Ball& a, const Ball& b) {
    if (a.depth < b.depth) return false;
    for (int i = 0; i < ctx.n(); ++i)
        if (a.residue[i] % ctx.pow(b.depth) != b.residue[i]) return false;
    return true;
}

inline bool ball_disjoint(const PadicContext& ctx, const Ball& a, const Ball& b) {
    return !ball_subset(ctx, a, b) && !ball_subset(ctx, b, a);
}

/// The p^n sub-balls of depth+1, ordered lexicographically by the new digit
/// vector (first coordinate major).
inline std::vector<Ball> children(const PadicContext& ctx, const Ball& b) {
    if (b.depth >= ctx.m()) throw AtMaxDepthError();
    std::vector<Ball> out;
    out.reserve(ctx.child_count());
    for (FpVec d = 0; d < ctx.child_count(); ++d) {
        auto digits = fp_decode(ctx, d);
        Ball c;
        c.depth = b.depth + 1;
        for (int i = 0; i < ctx.n(); ++i)
            c.residue[i] = b.residue[i] + std::uint32_t(digits[std::size_t(i)]) * ctx.pow(b.depth);
        out.push_back(c);
    }
    return out;
}

/// Child of b containing x.
inline Ball child_containing(const PadicContext& ctx, const Ball& b, const Point& x) {
    return ball_around(ctx, x, b.depth + 1);
}

/// Smallest ball containing two distinct points: the closed ball of radius
/// v(x - y) around either.
inline Ball smallest_ball_containing(const PadicContext& ctx, const Point& x, const Point& y) {
    int v = point_val(ctx, point_sub(ctx, x, y));
    if (v == PadicContext::infinity) throw EqualPointsError();
    return ball_around(ctx, x, v);
}

/// Rank of a point inside a ball under lexicographic point order, and back.
inline std::uint64_t ball_rank(const PadicContext& ctx, const Ball& b, const Point& x) {
    std::uint64_t r = 0;
    std::uint32_t q = ctx.pow(b.depth);
    std::uint32_t side = ctx.pow(ctx.m() - b.depth);
    for (int i = 0; i < ctx.n(); ++i) r = r * side + (x[i] - b.residue[i]) / q;
    return r;
}

inline Point ball_point(const PadicContext& ctx, const Ball& b, std::uint64_t rank) {
    Point x;
    std::uint32_t q = ctx.pow(b.depth);
    std::uint32_t side = ctx.pow(ctx.m() - b.depth);
    for (int i = ctx.n() - 1; i >= 0; --i) {
        x[i] = b.residue[i] + std::uint32_t(rank % side) * q;
        rank /= side;
    }
    return x;
}

/// All points of the ball in lexicographic order.
inline std::vector<Point> ball_points(const PadicContext& ctx, const Ball& b) {
    std::uint64_t sz = ball_size(ctx, b);
    if (sz > kEnumerationCap) throw UsageError("ball too large to enumerate");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(sz));
    for (std::uint64_t r = 0; r < sz; ++r) pts.push_back(ball_point(ctx, b, r));
    return pts;
}

inline std::string ball_str(const PadicContext& ctx, const Ball& b) {
    return std::to_string(b.depth) + ":" + point_str(ctx, b.residue);
}

/// Stable ordering for ball-keyed maps and reports: depth first, then residue.
inline bool ball_less(const PadicContext& ctx, const Ball& a, const Ball& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return point_rank(ctx, a.residue) < point_rank(ctx, b.residue);
}

// ---------------------------------------------------------------------------
// Coordinate projections.
// ---------------------------------------------------------------------------

struct Projection {
    int n = 0;
    std::vector<int> retained; // strictly increasing indices in [0, n)

    int dim() const { return int(retained.size()); }
    std::vector<int> complement() const {
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (std::find(retained.begin(), retained.end(), i) == retained.end()) rest.push_back(i);
        return rest;
    }
    bool operator==(const Projection&) const = default;
};

/// Does pi-bar restrict to an isomorphism on V?
inline bool exhibits(const PadicContext& ctx, const Projection& pi, const Subspace& V) {
    if (pi.dim() != V.dim()) return false;
    // The projected basis must stay independent over F_p.
    std::vector<std::array<int, kMaxDim>> proj;
    for (const auto& row : V.rows) {
        std::array<int, kMaxDim> r{};
        for (int j = 0; j < pi.dim(); ++j) r[std::size_t(j)] = row[std::size_t(pi.retained[std::size_t(j)])];
        proj.push_back(r);
    }
    detail::rref(ctx.p(), pi.dim(), proj);
    return int(proj.size()) == V.dim();
}

/// All coordinate projections exhibiting V, ordered lexicographically by
/// retained index set.  Nonempty for every V (echelon pivots qualify).
inline std::vector<Projection> exhibitions(const PadicContext& ctx, const Subspace& V) {
    int n = ctx.n(), d = V.dim();
    std::vector<Projection> out;
    // enumerate index subsets of size d in lex order
    std::vector<int> idx(static_cast<std::size_t>(std::max(d, 0)));
    for (int i = 0; i < d; ++i) idx[std::size_t(i)] = i;
    if (d == 0) {
        out.push_back(Projection{n, {}});
        return out;
    }
    while (true) {
        Projection pi{n, idx};
        if (exhibits(ctx, pi, V)) out.push_back(pi);
        // next combination
        int i = d - 1;
        while (i >= 0 && idx[std::size_t(i)] == n - d + i) --i;
        if (i < 0) break;
        ++idx[std::size_t(i)];
        for (int j = i + 1; j < d; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lifts.  The canonical lift of a subspace V takes the reduced echelon basis
// with digits in {0..p-1} and spans it over Z/p^m; other lifts perturb the
// basis by multiples of p.
// ---------------------------------------------------------------------------

struct Lift {
    int dim = 0;
    std::vector<Point> basis; // rank-d free family, residues = echelon basis of V

    bool operator==(const Lift&) const = default;
};

inline Lift canonical_lift(const PadicContext& ctx, const Subspace& V) {
    Lift L;
    L.dim = V.dim();
    for (const auto& row : V.rows) {
        Point b{};
        for (int i = 0; i < ctx.n(); ++i) b[i] = Scalar(row[std::size_t(i)]);
        L.basis.push_back(b);
    }
    return L;
}

/// A lift perturbed by p * C for an integral matrix C (rows indexed like the
/// basis).  Residues are unchanged, so this is again a lift of V.
inline Lift perturbed_lift(const PadicContext& ctx, const Subspace& V, const std::vector<Point>& pert) {
    Lift L = canonical_lift(ctx, V);
    for (std::size_t k = 0; k < L.basis.size(); ++k)
        L.basis[k] = point_add(ctx, L.basis[k], point_scale(ctx, Scalar(ctx.p()), pert[k]));
    return L;
}

inline Point lift_combination(const PadicContext& ctx, const Lift& L, const std::vector<Scalar>& coeff) {
    Point x{};
    for (std::size_t k = 0; k < L.basis.size(); ++k)
        x = point_add(ctx, x, point_scale(ctx, coeff[k], L.basis[k]));
    return x;
}

/// Solve A c = y over Z/p^m for a square matrix whose reduction mod p is
/// invertible.  A is given by rows.
inline std::vector<Scalar> solve_unit_system(const PadicContext& ctx,
                                             std::vector<std::vector<Scalar>> A,
                                             std::vector<Scalar> y) {
    std::size_t d = A.size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        while (pivot < d && A[pivot][col] % ctx.p() == 0) ++pivot;
        if (pivot == d) throw UsageError("solve_unit_system: matrix not invertible mod p");
        std::swap(A[pivot], A[col]);
        std::swap(y[pivot], y[col]);
        Scalar inv = scalar_inv(ctx, A[col][col]);
        for (std::size_t j = 0; j < d; ++j) A[col][j] = scalar_mul(ctx, A[col][j], inv);
        y[col] = scalar_mul(ctx, y[col], inv);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col || A[r][col] == 0) continue;
            Scalar f = A[r][col];
            for (std::size_t j = 0; j < d; ++j)
                A[r][j] = scalar_sub(ctx, A[r][j], scalar_mul(ctx, f, A[col][j]));
            y[r] = scalar_sub(ctx, y[r], scalar_mul(ctx, f, y[col]));
        }
    }
    return y;
}

/// Membership test: solves for coefficients on the pivot coordinates (the
/// pivot submatrix is invertible mod p^m) and re-checks the combination.
inline bool lift_contains(const PadicContext& ctx, const Subspace& V, const Lift& L, const Point& x) {
    if (L.dim == 0) return point_is_zero(ctx, x);
    std::vector<int> pivots;
    for (std::size_t k = 0; k < L.basis.size(); ++k) {
        int lead = 0;
        while (lead < ctx.n() && V.rows[k][std::size_t(lead)] == 0) ++lead;
        pivots.push_back(lead);
    }
    std::vector<std::vector<Scalar>> A(static_cast<std::size_t>(L.dim), std::vector<Scalar>(static_cast<std::size_t>(L.dim)));
    std::vector<Scalar> y(static_cast<std::size_t>(L.dim));
    for (int r = 0; r < L.dim; ++r) {
        y[std::size_t(r)] = x[pivots[std::size_t(r)]];
        for (int k = 0; k < L.dim; ++k)
            A[std::size_t(r)][std::size_t(k)] = L.basis[std::size_t(k)][pivots[std::size_t(r)]];
    }
    auto coeff = solve_unit_system(ctx, A, y);
    return point_is_zero(ctx, point_sub(ctx, x, lift_combination(ctx, L, coeff)));
}

/// All p^{m*dim} elements of the lift (guarded by the enumeration cap).
inline std::vector<Point> lift_elements(const PadicContext& ctx, const Lift& L) {
    std::uint64_t count = 1;
    for (int k = 0; k < L.dim; ++k) count *= ctx.modulus();
    if (count > kEnumerationCap) throw UsageError("lift too large to enumerate");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<Scalar> coeff(static_cast<std::size_t>(L.dim), 0);
    for (std::uint64_t it = 0; it < count; ++it) {
        std::uint64_t t = it;
        for (int k = 0; k < L.dim; ++k) {
            coeff[std::size_t(k)] = Scalar(t % ctx.modulus());
            t /= ctx.modulus();
        }
        out.push_back(lift_combination(ctx, L, coeff));
    }
    std::sort(out.begin(), out.end(), [&](const Point& a, const Point& b) {
        return point_rank(ctx, a) < point_rank(ctx, b);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace pstrat
