#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pstrat/context.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// Scalars.  A scalar is an element of Z/p^m stored as a uint32 in [0, p^m).
// ---------------------------------------------------------------------------

using Scalar = std::uint32_t;

inline Scalar scalar_reduce(const PadicContext& ctx, std::int64_t v) {
    std::int64_t mod = ctx.modulus();
    std::int64_t r = v % mod;
    if (r < 0) r += mod;
    return Scalar(r);
}

inline Scalar scalar_add(const PadicContext& ctx, Scalar a, Scalar b) {
    std::uint64_t s = std::uint64_t(a) + b;
    std::uint64_t mod = ctx.modulus();
    return Scalar(s >= mod ? s - mod : s);
}

inline Scalar scalar_sub(const PadicContext& ctx, Scalar a, Scalar b) {
    return a >= b ? a - b : Scalar(a + ctx.modulus() - b);
}

inline Scalar scalar_neg(const PadicContext& ctx, Scalar a) {
    return a == 0 ? 0 : Scalar(ctx.modulus() - a);
}

inline Scalar scalar_mul(const PadicContext& ctx, Scalar a, Scalar b) {
    return Scalar((std::uint64_t(a) * b) % ctx.modulus());
}

/// Valuation of a scalar: the largest e <= m with p^e | a, reported as
/// PadicContext::infinity when a == 0 mod p^m.
inline int scalar_val(const PadicContext& ctx, Scalar a) {
    if (a == 0) return PadicContext::infinity;
    int v = 0;
    while (a % ctx.p() == 0) {
        a /= ctx.p();
        ++v;
    }
    return v;
}

/// Inverse of a unit mod p^m.
inline Scalar scalar_inv(const PadicContext& ctx, Scalar a) {
    if (a % ctx.p() == 0) throw UsageError("scalar_inv: not a unit");
    // extended Euclid on (a, p^m)
    std::int64_t t = 0, newt = 1;
    std::int64_t r = ctx.modulus(), newr = a;
    while (newr != 0) {
        std::int64_t q = r / newr;
        std::int64_t tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    return scalar_reduce(ctx, t);
}

/// Digit of a at level e (coefficient of p^e).
inline int scalar_digit(const PadicContext& ctx, Scalar a, int e) {
    return int((a / ctx.pow(e)) % ctx.p());
}

// ---------------------------------------------------------------------------
// Points of O^n = (Z/p^m)^n.
// ---------------------------------------------------------------------------

struct Point {
    std::array<Scalar, kMaxDim> c{};

    Scalar& operator[](int i) { return c[std::size_t(i)]; }
    Scalar operator[](int i) const { return c[std::size_t(i)]; }
    bool operator==(const Point&) const = default;
};

inline Point point_zero() { return Point{}; }

inline Point point_add(const PadicContext& ctx, const Point& a, const Point& b) {
    Point r;
    for (int i = 0; i < ctx.n(); ++i) r[i] = scalar_add(ctx, a[i], b[i]);
    return r;
}

inline Point point_sub(const PadicContext& ctx, const Point& a, const Point& b) {
    Point r;
    for (int i = 0; i < ctx.n(); ++i) r[i] = scalar_sub(ctx, a[i], b[i]);
    return r;
}

inline Point point_neg(const PadicContext& ctx, const Point& a) {
    Point r;
    for (int i = 0; i < ctx.n(); ++i) r[i] = scalar_neg(ctx, a[i]);
    return r;
}

inline Point point_scale(const PadicContext& ctx, Scalar s, const Point& a) {
    Point r;
    for (int i = 0; i < ctx.n(); ++i) r[i] = scalar_mul(ctx, s, a[i]);
    return r;
}

inline bool point_is_zero(const PadicContext& ctx, const Point& a) {
    for (int i = 0; i < ctx.n(); ++i)
        if (a[i] != 0) return false;
    return true;
}

/// Valuation under the maximum norm: min over coordinate valuations.
inline int point_val(const PadicContext& ctx, const Point& a) {
    int v = PadicContext::infinity;
    for (int i = 0; i < ctx.n(); ++i) {
        int vi = scalar_val(ctx, a[i]);
        if (vi < v) v = vi;
    }
    return v;
}

/// Standard scalar product.
inline Scalar point_dot(const PadicContext& ctx, const Point& a, const Point& b) {
    std::uint64_t acc = 0;
    for (int i = 0; i < ctx.n(); ++i) acc += std::uint64_t(a[i]) * b[i] % ctx.modulus();
    return Scalar(acc % ctx.modulus());
}

/// Lexicographic rank of a point inside the full space (first coordinate major).
inline std::uint64_t point_rank(const PadicContext& ctx, const Point& a) {
    std::uint64_t r = 0;
    for (int i = 0; i < ctx.n(); ++i) r = r * ctx.modulus() + a[i];
    return r;
}

inline Point point_from_rank(const PadicContext& ctx, std::uint64_t rank) {
    Point a;
    for (int i = ctx.n() - 1; i >= 0; --i) {
        a[i] = Scalar(rank % ctx.modulus());
        rank /= ctx.modulus();
    }
    return a;
}

inline std::string point_str(const PadicContext& ctx, const Point& a) {
    std::string s = "(";
    for (int i = 0; i < ctx.n(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + ")";
}

// ---------------------------------------------------------------------------
// Residue vectors over F_p, encoded as an index in [0, p^n)
// (first coordinate major, so index order = lexicographic order).
// ---------------------------------------------------------------------------

using FpVec = std::uint32_t;

inline FpVec fp_encode(const PadicContext& ctx, const std::array<int, kMaxDim>& d) {
    FpVec v = 0;
    for (int i = 0; i < ctx.n(); ++i) v = v * ctx.p() + std::uint32_t(d[std::size_t(i)]);
    return v;
}

inline std::array<int, kMaxDim> fp_decode(const PadicContext& ctx, FpVec v) {
    std::array<int, kMaxDim> d{};
    for (int i = ctx.n() - 1; i >= 0; --i) {
        d[std::size_t(i)] = int(v % ctx.p());
        v /= ctx.p();
    }
    return d;
}

inline FpVec fp_add(const PadicContext& ctx, FpVec a, FpVec b) {
    auto da = fp_decode(ctx, a), db = fp_decode(ctx, b);
    for (int i = 0; i < ctx.n(); ++i) da[std::size_t(i)] = (da[std::size_t(i)] + db[std::size_t(i)]) % ctx.p();
    return fp_encode(ctx, da);
}

inline FpVec fp_neg(const PadicContext& ctx, FpVec a) {
    auto d = fp_decode(ctx, a);
    for (int i = 0; i < ctx.n(); ++i) d[std::size_t(i)] = (ctx.p() - d[std::size_t(i)]) % ctx.p();
    return fp_encode(ctx, d);
}

inline FpVec fp_sub(const PadicContext& ctx, FpVec a, FpVec b) { return fp_add(ctx, a, fp_neg(ctx, b)); }

/// Digit vector of a point at level e, encoded as an FpVec.
inline FpVec point_digit_vec(const PadicContext& ctx, const Point& a, int e) {
    std::array<int, kMaxDim> d{};
    for (int i = 0; i < ctx.n(); ++i) d[std::size_t(i)] = scalar_digit(ctx, a[i], e);
    return fp_encode(ctx, d);
}

// ---------------------------------------------------------------------------
// Leading terms.  rv(x) of a nonzero point is the pair (valuation, residue of
// x / p^v), where the residue is a nonzero vector over F_p.  rv(0) = ZERO.
// ---------------------------------------------------------------------------

struct RvValue {
    bool zero = true;
    int lambda = 0;   // valuation, in [0, m-1] when !zero
    FpVec unit = 0;   // nonzero residue vector, encoded

    bool operator==(const RvValue&) const = default;
    bool operator<(const RvValue& o) const {
        if (zero != o.zero) return o.zero; // nonzero values sort before ZERO
        if (zero) return false;
        if (lambda != o.lambda) return lambda < o.lambda;
        return unit < o.unit;
    }
};

inline RvValue rv(const PadicContext& ctx, const Point& x) {
    int v = point_val(ctx, x);
    if (v == PadicContext::infinity) return RvValue{};
    std::array<int, kMaxDim> d{};
    for (int i = 0; i < ctx.n(); ++i) d[std::size_t(i)] = int((x[i] / ctx.pow(v)) % ctx.p());
    return RvValue{false, v, fp_encode(ctx, d)};
}

/// Dense code for an RvValue: 0 for ZERO, else 1 + lambda*(p^n - 1) + (unit - 1)
/// where nonzero units are indexed 1..p^n-1.
inline std::uint32_t rv_code(const PadicContext& ctx, const RvValue& r) {
    if (r.zero) return 0;
    return 1 + std::uint32_t(r.lambda) * (ctx.child_count() - 1) + (r.unit - 1);
}

inline std::uint32_t rv_code_count(const PadicContext& ctx) {
    return 1 + std::uint32_t(ctx.m()) * (ctx.child_count() - 1);
}

inline int rv_val(const RvValue& r) { return r.zero ? PadicContext::infinity : r.lambda; }

// ---------------------------------------------------------------------------
// Directions: lines in P^{n-1}(F_p), stored as the representative vector
// scaled so that its first nonzero coordinate is 1.
// ---------------------------------------------------------------------------

struct Direction {
    FpVec rep = 0; // normalized nonzero vector
    bool operator==(const Direction&) const = default;
    bool operator<(const Direction& o) const { return rep < o.rep; }
};

inline int fp_inv_mod_p(int p, int a) {
    // p <= 13; brute force
    for (int x = 1; x < p; ++x)
        if (a * x % p == 1) return x;
    throw UsageError("fp_inv_mod_p: not invertible");
}

inline Direction direction_of_unit(const PadicContext& ctx, FpVec unit) {
    auto d = fp_decode(ctx, unit);
    int lead = -1;
    for (int i = 0; i < ctx.n(); ++i)
        if (d[std::size_t(i)] != 0) {
            lead = i;
            break;
        }
    if (lead < 0) throw ZeroVectorError();
    int inv = fp_inv_mod_p(ctx.p(), d[std::size_t(lead)]);
    for (int i = 0; i < ctx.n(); ++i) d[std::size_t(i)] = d[std::size_t(i)] * inv % ctx.p();
    return Direction{fp_encode(ctx, d)};
}

inline Direction dir(const PadicContext& ctx, const Point& x) {
    RvValue r = rv(ctx, x);
    if (r.zero) throw ZeroVectorError();
    return direction_of_unit(ctx, r.unit);
}

inline Direction dir_rv(const PadicContext& ctx, const RvValue& r) {
    if (r.zero) throw ZeroVectorError();
    return direction_of_unit(ctx, r.unit);
}

// ---------------------------------------------------------------------------
// Integral matrices acting on points and leading terms.
// ---------------------------------------------------------------------------

struct IntMatrix {
    int n = 0;
    std::array<std::array<Scalar, kMaxDim>, kMaxDim> a{};

    static IntMatrix identity(const PadicContext& ctx) {
        IntMatrix m;
        m.n = ctx.n();
        for (int i = 0; i < m.n; ++i) m.a[std::size_t(i)][std::size_t(i)] = 1;
        return m;
    }
    Scalar at(int i, int j) const { return a[std::size_t(i)][std::size_t(j)]; }
    Scalar& at(int i, int j) { return a[std::size_t(i)][std::size_t(j)]; }
};

inline Scalar matrix_det(const PadicContext& ctx, const IntMatrix& M) {
    // Expansion by permutations; n <= 4.
    int n = M.n;
    std::array<int, kMaxDim> perm{};
    for (int i = 0; i < n; ++i) perm[std::size_t(i)] = i;
    std::int64_t det = 0;
    // iterate permutations
    std::vector<int> idx(perm.begin(), perm.begin() + n);
    std::sort(idx.begin(), idx.end());
    do {
        int sign = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (idx[std::size_t(i)] > idx[std::size_t(j)]) sign = -sign;
        std::uint64_t prod = 1;
        for (int i = 0; i < n; ++i) prod = prod * M.at(i, idx[std::size_t(i)]) % ctx.modulus();
        det += sign * std::int64_t(prod);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return scalar_reduce(ctx, det);
}

inline bool matrix_unimodular(const PadicContext& ctx, const IntMatrix& M) {
    return scalar_val(ctx, matrix_det(ctx, M)) == 0;
}

inline Point apply_matrix(const PadicContext& ctx, const IntMatrix& M, const Point& x) {
    Point y;
    for (int i = 0; i < ctx.n(); ++i) {
        std::uint64_t acc = 0;
        for (int j = 0; j < ctx.n(); ++j) acc += std::uint64_t(M.at(i, j)) * x[j] % ctx.modulus();
        y[i] = Scalar(acc % ctx.modulus());
    }
    return y;
}

/// Induced action on leading terms; defined only for unimodular matrices.
inline RvValue apply_matrix_rv(const PadicContext& ctx, const IntMatrix& M, const RvValue& r) {
    if (!matrix_unimodular(ctx, M)) throw NotUnimodularError();
    if (r.zero) return r;
    auto u = fp_decode(ctx, r.unit);
    std::array<int, kMaxDim> w{};
    for (int i = 0; i < ctx.n(); ++i) {
        int acc = 0;
        for (int j = 0; j < ctx.n(); ++j) acc += int(M.at(i, j) % ctx.p()) * u[std::size_t(j)];
        w[std::size_t(i)] = acc % ctx.p();
    }
    return RvValue{false, r.lambda, fp_encode(ctx, w)};
}

} // namespace pstrat
