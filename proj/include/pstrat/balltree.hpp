#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pstrat/stratification.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// The tree of balls meeting a set, its skeleton along the 0-dimensional
// stratum, and the valuation-matrix invariants of the side branches.
// ---------------------------------------------------------------------------

struct BallTree {
    struct Node {
        Ball ball;
        int parent = -1;
        std::vector<int> children;
    };
    std::vector<Node> nodes; // node 0 is the root

    int size() const { return int(nodes.size()); }
};

/// All balls of depths 0..m meeting X, linked parent to child in
/// lexicographic child order.
inline BallTree build_tree(const FiniteSet& X) {
    const PadicContext& ctx = X.ctx();
    if (X.empty()) throw EmptySetError("build_tree: empty set");
    BallTree t;
    std::function<int(const Ball&, int)> grow = [&](const Ball& b, int parent) {
        int idx = int(t.nodes.size());
        t.nodes.push_back(BallTree::Node{b, parent, {}});
        if (b.depth < ctx.m())
            for (const Ball& c : children(ctx, b))
                if (X.intersects(c)) {
                    int ci = grow(c, idx);
                    t.nodes[static_cast<std::size_t>(idx)].children.push_back(ci);
                }
        return idx;
    };
    grow(whole_space(ctx), -1);
    return t;
}

/// Node indices of the sub-poset of balls meeting S0 (the skeleton
/// T(S0) ∩ T(X)); empty when S0 is empty.
inline std::vector<int> skeleton(const PadicContext& ctx, const BallTree& t,
                                 const std::vector<Point>& s0) {
    std::vector<int> out;
    for (int i = 0; i < t.size(); ++i) {
        const Ball& b = t.nodes[static_cast<std::size_t>(i)].ball;
        for (const auto& p : s0)
            if (ball_contains(ctx, b, p)) {
                out.push_back(i);
                break;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Valuation matrices up to simultaneous row/column permutation.  The matrix
// of pairwise valuations of a point tuple is an ultrametric profile; its
// canonical form is computed from the cluster tree of the points, which is
// invariant under any re-enumeration.
// ---------------------------------------------------------------------------

struct ValMatrix {
    int size = 0;
    std::vector<std::vector<int>> entries; // v(a_i - a_j), with m standing in for infinity

    bool operator==(const ValMatrix&) const = default;
    bool operator<(const ValMatrix& o) const {
        if (size != o.size) return size < o.size;
        return entries < o.entries;
    }
};

namespace detail {

/// Canonical leaf order of a point tuple: cluster by depth, order clusters by
/// (size, recursive encoding), recurse.
inline std::vector<std::uint8_t> cluster_encode(const PadicContext& ctx, std::vector<Point>& pts,
                                                int depth) {
    std::vector<std::uint8_t> enc;
    if (pts.size() <= 1 || depth >= ctx.m()) {
        enc.push_back(std::uint8_t(pts.size()));
        return enc;
    }
    // split into depth+1 clusters
    std::map<std::uint64_t, std::vector<Point>> clusters;
    for (const auto& p : pts) clusters[point_rank(ctx, ball_around(ctx, p, depth + 1).residue)].push_back(p);
    std::vector<std::pair<std::vector<std::uint8_t>, std::vector<Point>>> parts;
    for (auto& [k, cl] : clusters) {
        auto sub = cl;
        auto e = cluster_encode(ctx, sub, depth + 1);
        parts.emplace_back(std::move(e), std::move(sub));
    }
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
        return a.first < b.first;
    });
    enc.push_back(0xfe);
    enc.push_back(std::uint8_t(parts.size()));
    pts.clear();
    for (auto& [e, cl] : parts) {
        enc.insert(enc.end(), e.begin(), e.end());
        pts.insert(pts.end(), cl.begin(), cl.end());
    }
    enc.push_back(0xff);
    return enc;
}

} // namespace detail

inline ValMatrix val_matrix(const PadicContext& ctx, std::vector<Point> pts) {
    // reorder canonically, then read the matrix off
    detail::cluster_encode(ctx, pts, 0);
    ValMatrix mm;
    mm.size = int(pts.size());
    mm.entries.assign(pts.size(), std::vector<int>(pts.size(), ctx.m()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            int v = point_val(ctx, point_sub(ctx, pts[i], pts[j]));
            mm.entries[i][j] = v == PadicContext::infinity ? ctx.m() : v;
        }
    return mm;
}

// ---------------------------------------------------------------------------
// Side branches: maximal balls disjoint from S_0, their fibers and matrices.
// ---------------------------------------------------------------------------

struct SideBranch {
    Ball ball;
    ValMatrix matrix;
};

/// Maximal balls inside the base that avoid S_0 (and meet X when X is given).
inline std::vector<Ball> branch_balls(const PadicContext& ctx, const Stratification& S,
                                      const FiniteSet* X) {
    std::vector<Point> s0 = S.stratum(ctx, 0);
    std::vector<Ball> out;
    std::function<void(const Ball&)> split = [&](const Ball& b) {
        bool meets_s0 = false;
        for (const auto& p : s0)
            if (ball_contains(ctx, b, p)) meets_s0 = true;
        if (!meets_s0) {
            if (!X || X->intersects(b)) out.push_back(b);
            return;
        }
        if (b.depth < ctx.m())
            for (const Ball& c : children(ctx, b)) split(c);
    };
    split(S.base);
    return out;
}

/// For every side branch: the canonical valuation matrix of S_1 on one
/// exhibition fiber.  Independence from the fiber choice is asserted.
inline std::vector<SideBranch> side_branch_invariants(const PadicContext& ctx, const FiniteSet& X,
                                                      const Stratification& S,
                                                      bool assume_verified = false) {
    if (!assume_verified && !verify_tstrat(ctx, S).pass)
        throw NotVerifiedError("side_branch_invariants: stratification fails verification");
    Coloring labels = S.label_coloring(ctx);
    std::vector<SideBranch> out;
    for (const Ball& b : branch_balls(ctx, S, &X)) {
        Subspace W = tsp(ctx, labels.restrict(b), b);
        // first line inside the translatability space
        std::optional<Subspace> line;
        for (const auto& l : all_lines(ctx))
            if (subspace_leq(ctx, l, W)) {
                line = l;
                break;
            }
        if (!line) throw NotVerifiedError("side_branch_invariants: no translatable line on a branch");
        Projection pi = exhibitions(ctx, *line)[0];
        int keep = pi.retained[0];

        // group S_1 points of the branch by the retained coordinate
        std::map<Scalar, std::vector<Point>> fibers;
        std::uint64_t bsz = ball_size(ctx, b);
        std::vector<Scalar> base_values;
        std::uint32_t side = ctx.pow(ctx.m() - b.depth);
        for (std::uint32_t k = 0; k < side; ++k)
            base_values.push_back(b.residue[keep] + k * ctx.pow(b.depth));
        for (auto v : base_values) fibers[v] = {};
        for (std::uint64_t r = 0; r < bsz; ++r) {
            Point p = ball_point(ctx, b, r);
            if (S.label_at(ctx, p) == 1) fibers[p[keep]].push_back(p);
        }
        ValMatrix first = val_matrix(ctx, fibers[base_values[0]]);
        for (auto v : base_values) {
            if (!(val_matrix(ctx, fibers[v]) == first))
                throw NotVerifiedError("side_branch_invariants: matrix depends on the fiber choice");
        }
        out.push_back(SideBranch{b, first});
    }
    std::sort(out.begin(), out.end(),
              [&](const SideBranch& a, const SideBranch& b2) { return ball_less(ctx, a.ball, b2.ball); });
    return out;
}

// ---------------------------------------------------------------------------
// Level report.
// ---------------------------------------------------------------------------

struct LevelReport {
    bool consistent = false;
    int dim_x = 0;
    std::string verdict;
    int skeleton_nodes = 0;
    int skeleton_bifurcations = 0;
    std::map<int, ValMatrix> matrix_by_depth; // branch depth -> common matrix
    int affine_pieces = 0;                    // pieces of depth -> entry-list map
    std::optional<std::pair<Ball, Ball>> counter_witness;
};

inline LevelReport level_report(const PadicContext& ctx, const FiniteSet& X,
                                const Stratification& S, bool assume_verified = false) {
    if (!assume_verified && !verify_tstrat(ctx, S).pass)
        throw NotVerifiedError("level_report: stratification fails verification");
    LevelReport rep;

    // declared dimension of X under S: the largest stratum index X meets
    rep.dim_x = 0;
    for (const auto& p : X.points()) rep.dim_x = std::max(rep.dim_x, S.label_at(ctx, p));

    BallTree t = build_tree(X);
    auto skel = skeleton(ctx, t, S.stratum(ctx, 0));
    rep.skeleton_nodes = int(skel.size());
    for (int i : skel) {
        int cnt = 0;
        for (int c : t.nodes[static_cast<std::size_t>(i)].children)
            if (std::find(skel.begin(), skel.end(), c) != skel.end()) ++cnt;
        if (cnt >= 2) ++rep.skeleton_bifurcations;
    }

    if (rep.dim_x == 0) {
        rep.consistent = true;
        rep.verdict = "consistent with level <= 0";
        return rep;
    }

    auto branches = side_branch_invariants(ctx, X, S, true);
    std::map<int, std::vector<const SideBranch*>> by_depth;
    for (const auto& br : branches) by_depth[br.ball.depth].push_back(&br);
    for (auto& [depth, list] : by_depth) {
        for (const auto* br : list)
            if (!(br->matrix == list[0]->matrix)) {
                rep.consistent = false;
                rep.verdict = "matrices differ within depth " + std::to_string(depth);
                rep.counter_witness = std::make_pair(list[0]->ball, br->ball);
                return rep;
            }
        rep.matrix_by_depth[depth] = list[0]->matrix;
    }

    // piecewise-affine dependence of the sorted entry lists on the depth
    std::vector<std::pair<int, std::vector<int>>> seq;
    for (const auto& [depth, mm] : rep.matrix_by_depth) {
        std::vector<int> flat;
        for (const auto& row : mm.entries)
            for (int e : row) flat.push_back(e);
        std::sort(flat.begin(), flat.end());
        seq.emplace_back(depth, std::move(flat));
    }
    int pieces = seq.empty() ? 0 : 1;
    for (std::size_t i = 2; i < seq.size(); ++i) {
        const auto& [d0, v0] = seq[i - 2];
        const auto& [d1, v1] = seq[i - 1];
        const auto& [d2, v2] = seq[i];
        bool collinear = v0.size() == v1.size() && v1.size() == v2.size() && d1 - d0 == d2 - d1;
        if (collinear)
            for (std::size_t k = 0; k < v0.size(); ++k)
                if (v1[k] - v0[k] != v2[k] - v1[k]) {
                    collinear = false;
                    break;
                }
        if (!collinear) ++pieces;
    }
    rep.affine_pieces = pieces;
    rep.consistent = true;
    rep.verdict = "consistent with level <= " + std::to_string(rep.dim_x);
    return rep;
}

// ---------------------------------------------------------------------------
// Export.
// ---------------------------------------------------------------------------

inline std::string export_tree(const PadicContext& ctx, const BallTree& t, const std::string& format) {
    if (format == "dot") {
        std::string s = "digraph balltree {\n";
        for (int i = 0; i < t.size(); ++i)
            s += "  n" + std::to_string(i) + " [label=\"" +
                 ball_str(ctx, t.nodes[static_cast<std::size_t>(i)].ball) + "\"];\n";
        for (int i = 0; i < t.size(); ++i)
            for (int c : t.nodes[static_cast<std::size_t>(i)].children)
                s += "  n" + std::to_string(i) + " -> n" + std::to_string(c) + ";\n";
        s += "}\n";
        return s;
    }
    if (format == "json") {
        std::function<std::string(int)> render = [&](int i) {
            const auto& node = t.nodes[static_cast<std::size_t>(i)];
            std::string s = "{\"ball\":{\"depth\":" + std::to_string(node.ball.depth) + ",\"residue\":[";
            for (int k = 0; k < ctx.n(); ++k)
                s += (k ? "," : "") + std::to_string(node.ball.residue[k]);
            s += "]},\"children\":[";
            for (std::size_t c = 0; c < node.children.size(); ++c)
                s += (c ? "," : "") + render(node.children[c]);
            s += "]}";
            return s;
        };
        return render(0) + "\n";
    }
    throw UnknownFormatError(format);
}

} // namespace pstrat
