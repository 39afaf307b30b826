#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pstrat/geometry.hpp"

namespace pstrat {

/// A subset of O^n stored as a membership bitmap in lexicographic point
/// order over the whole space.
class FiniteSet {
public:
    explicit FiniteSet(const PadicContext& ctx) : ctx_(ctx), bits_(ctx.space_size(), false) {
        ctx.require_enumerable();
    }

    const PadicContext& ctx() const { return ctx_; }

    bool contains(const Point& x) const { return bits_[point_rank(ctx_, x)]; }
    void insert(const Point& x) { bits_[point_rank(ctx_, x)] = true; }
    void erase(const Point& x) { bits_[point_rank(ctx_, x)] = false; }
    void set(std::uint64_t rank, bool b) { bits_[rank] = b; }
    bool at(std::uint64_t rank) const { return bits_[rank]; }

    std::uint64_t size() const {
        std::uint64_t c = 0;
        for (bool b : bits_) c += b;
        return c;
    }
    bool empty() const { return size() == 0; }

    std::vector<Point> points() const {
        std::vector<Point> out;
        for (std::uint64_t r = 0; r < bits_.size(); ++r)
            if (bits_[r]) out.push_back(point_from_rank(ctx_, r));
        return out;
    }

    std::vector<Point> points_in(const Ball& b) const {
        std::vector<Point> out;
        std::uint64_t sz = ball_size(ctx_, b);
        for (std::uint64_t r = 0; r < sz; ++r) {
            Point x = ball_point(ctx_, b, r);
            if (contains(x)) out.push_back(x);
        }
        return out;
    }

    bool intersects(const Ball& b) const {
        std::uint64_t sz = ball_size(ctx_, b);
        for (std::uint64_t r = 0; r < sz; ++r)
            if (contains(ball_point(ctx_, b, r))) return true;
        return false;
    }

    bool is_subset_of(const FiniteSet& o) const {
        for (std::uint64_t r = 0; r < bits_.size(); ++r)
            if (bits_[r] && !o.bits_[r]) return false;
        return true;
    }

    bool operator==(const FiniteSet& o) const { return bits_ == o.bits_; }

private:
    PadicContext ctx_;
    std::vector<bool> bits_;
};

using ColorId = std::uint64_t;

/// A coloring of a ball: one color per point, stored in the ball's
/// lexicographic point order.  Ids are kept literally (restriction preserves
/// them); densify() renumbers by first occurrence when dense ids are wanted.
class Coloring {
public:
    Coloring(const PadicContext& ctx, const Ball& domain, std::vector<ColorId> raw)
        : ctx_(ctx), domain_(domain), colors_(std::move(raw)) {
        if (colors_.size() != ball_size(ctx, domain))
            throw DomainMismatchError("coloring size does not match ball size");
    }

    template <typename F>
    static Coloring from_function(const PadicContext& ctx, const Ball& domain, F&& f) {
        std::uint64_t sz = ball_size(ctx, domain);
        if (sz > kEnumerationCap) throw UsageError("ball too large for a coloring");
        std::vector<ColorId> raw(static_cast<std::size_t>(sz));
        for (std::uint64_t r = 0; r < sz; ++r) raw[std::size_t(r)] = f(ball_point(ctx, domain, r));
        return Coloring(ctx, domain, std::move(raw));
    }

    static Coloring constant(const PadicContext& ctx, const Ball& domain) {
        return from_function(ctx, domain, [](const Point&) { return ColorId(0); });
    }

    static Coloring indicator(const FiniteSet& X, const Ball& domain) {
        return from_function(X.ctx(), domain,
                             [&](const Point& x) { return ColorId(X.contains(x) ? 1 : 0); });
    }

    /// Product coloring (chi1, chi2); pair ids are combined injectively.
    static Coloring product(const Coloring& a, const Coloring& b) {
        a.ctx().require_same(b.ctx(), "Coloring::product");
        if (!(a.domain() == b.domain())) throw DomainMismatchError("product: different domains");
        std::map<std::pair<ColorId, ColorId>, ColorId> pair_ids;
        std::vector<ColorId> raw(a.colors_.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            auto key = std::make_pair(a.colors_[i], b.colors_[i]);
            auto it = pair_ids.find(key);
            if (it == pair_ids.end()) {
                // stable id independent of traversal: lexicographic code of the pair
                it = pair_ids.emplace(key, 0).first;
            }
            raw[i] = 0; // filled below once the code table is complete
        }
        ColorId next = 0;
        for (auto& kv : pair_ids) kv.second = next++;
        for (std::size_t i = 0; i < raw.size(); ++i)
            raw[i] = pair_ids[{a.colors_[i], b.colors_[i]}];
        return Coloring(a.ctx(), a.domain(), std::move(raw));
    }

    const PadicContext& ctx() const { return ctx_; }
    const Ball& domain() const { return domain_; }

    ColorId color_at_rank(std::uint64_t r) const { return colors_[std::size_t(r)]; }
    ColorId color(const Point& x) const { return colors_[std::size_t(ball_rank(ctx_, domain_, x))]; }

    std::uint64_t size() const { return colors_.size(); }

    bool is_constant() const {
        for (auto c : colors_)
            if (c != colors_[0]) return false;
        return true;
    }

    /// Distinct ids in increasing order.
    std::vector<ColorId> palette() const {
        std::vector<ColorId> ids(colors_);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }

    /// Renumber colors 0,1,... by first occurrence in point order.
    Coloring densify() const {
        std::map<ColorId, ColorId> remap;
        std::vector<ColorId> raw(colors_.size());
        for (std::size_t i = 0; i < colors_.size(); ++i) {
            auto it = remap.find(colors_[i]);
            if (it == remap.end()) it = remap.emplace(colors_[i], ColorId(remap.size())).first;
            raw[i] = it->second;
        }
        return Coloring(ctx_, domain_, std::move(raw));
    }

    /// Restriction to a sub-ball; color ids are preserved.
    Coloring restrict(const Ball& b) const {
        if (!ball_subset(ctx_, b, domain_)) throw DomainMismatchError("restrict: not a sub-ball");
        return from_function(ctx_, b, [&](const Point& x) { return color(x); });
    }

    /// Points of one color class.
    std::vector<Point> cls(ColorId c) const {
        std::vector<Point> out;
        for (std::uint64_t r = 0; r < colors_.size(); ++r)
            if (colors_[std::size_t(r)] == c) out.push_back(ball_point(ctx_, domain_, r));
        return out;
    }

    bool operator==(const Coloring& o) const { return domain_ == o.domain_ && colors_ == o.colors_; }

    const std::vector<ColorId>& raw() const { return colors_; }

private:
    PadicContext ctx_;
    Ball domain_;
    std::vector<ColorId> colors_;
};

/// The partition-by-membership-vector construction: a family of sets over a
/// ball becomes one coloring whose classes are the atoms of the family.
inline Coloring coloring_from_family(const PadicContext& ctx, const Ball& domain,
                                     const std::vector<const FiniteSet*>& family) {
    return Coloring::from_function(ctx, domain, [&](const Point& x) {
        ColorId bits = 0;
        for (std::size_t i = 0; i < family.size(); ++i)
            bits |= ColorId(family[i]->contains(x)) << i;
        return bits;
    });
}

} // namespace pstrat
