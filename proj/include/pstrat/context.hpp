#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include "pstrat/errors.hpp"

namespace pstrat {

inline constexpr int kMaxDim = 4;
inline constexpr int kMaxPrec = 8;

// Hard cap on the number of points any whole-space enumeration may touch.
// Scalar arithmetic works for every valid context; set-level operations
// (evaluation, colorings, searches) refuse contexts beyond this size.
inline constexpr std::uint64_t kEnumerationCap = std::uint64_t(1) << 24;

/// Working context: arithmetic in (Z/p^m)^n with the p-adic valuation
/// truncated at m.  Valuations live in {0, ..., m-1} plus an infinity
/// token meaning "indistinguishable from zero at this precision".
class PadicContext {
public:
    PadicContext(int p, int m, int n) : p_(p), m_(m), n_(n) {
        if (!is_supported_prime(p)) throw UsageError("p must be a prime in [2, 13]");
        if (m < 1 || m > kMaxPrec) throw UsageError("precision m must be in [1, 8]");
        if (n < 1 || n > kMaxDim) throw UsageError("dimension n must be in [1, 4]");
        pow_[0] = 1;
        for (int e = 1; e <= m_; ++e) pow_[e] = pow_[e - 1] * std::uint32_t(p_);
        pn_ = 1;
        for (int i = 0; i < n_; ++i) pn_ *= std::uint32_t(p_);
        space_size_ = 1;
        for (int i = 0; i < n_; ++i) space_size_ *= std::uint64_t(pow_[m_]);
    }

    int p() const { return p_; }
    int m() const { return m_; }
    int n() const { return n_; }

    /// p^e for 0 <= e <= m.
    std::uint32_t pow(int e) const { return pow_[e]; }
    /// p^m, the scalar modulus.
    std::uint32_t modulus() const { return pow_[m_]; }
    /// p^n, the number of children of a ball.
    std::uint32_t child_count() const { return pn_; }
    /// p^{nm}, the number of points of the whole space O^n.
    std::uint64_t space_size() const { return space_size_; }

    /// Valuation value used for "zero at precision m".
    static constexpr int infinity = std::numeric_limits<int>::max();

    bool same(const PadicContext& o) const { return p_ == o.p_ && m_ == o.m_ && n_ == o.n_; }

    void require_same(const PadicContext& o, const char* where) const {
        if (!same(o)) throw DomainMismatchError(std::string(where) + ": mismatched contexts");
    }

    void require_enumerable() const {
        if (space_size_ > kEnumerationCap)
            throw UsageError("context too large to enumerate (p^(n*m) > 2^24); "
                             "reduce p, m or n for set-level operations");
    }

    std::string describe() const {
        return "p=" + std::to_string(p_) + " m=" + std::to_string(m_) + " n=" + std::to_string(n_);
    }

    static bool is_supported_prime(int p) {
        return p == 2 || p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
    }

private:
    int p_, m_, n_;
    std::array<std::uint32_t, kMaxPrec + 1> pow_{};
    std::uint32_t pn_ = 0;
    std::uint64_t space_size_ = 0;
};

} // namespace pstrat
