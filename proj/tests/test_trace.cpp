#include <gtest/gtest.h>

#include <fbc/strata.hpp>
#include <fbc/trace.hpp>

#include "support.hpp"

using namespace fbc;
using fbc::testing::ex2;

namespace {

struct Ex2Trace {
    GraphMap phi = ex2();
    std::vector<double> w;
    ImmersedWall W;
    Ex2Trace(int L = 3) {
        auto st = analyze_strata(phi, compute_maximal_filtration(phi));
        w = edge_weights(phi.graph(), st);
        W = build_immersed_wall(phi, canonical_busts(phi, st).points, L);
    }
    BallComplex ball(double R) const { return build_ball(phi, w, {}, R); }
    Piece seed(const BallComplex& b) const { return seed_piece(W, b.base_key, PointV::at_vertex(0)); }
};

BallPoint root_of(const GraphMap& phi, const Piece& p) {
    BallPoint x = p.point;
    for (int i = 0; i < p.depth; ++i) x = flow_step(phi, x).point;
    return x;
}

}  // namespace

TEST(LiftWall, SmallBallTruncates) {
    Ex2Trace s;
    auto b = s.ball(3);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    EXPECT_TRUE(t.truncated);
    EXPECT_EQ(t.pieces.size(), 15u);
}

TEST(LiftWall, CountsMatchRecount) {
    Ex2Trace s;
    auto b = s.ball(5);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    EXPECT_EQ(t.pieces.size(), 46u);
    // Recount: nuclei are link-components of non-tunnel pieces, tunnels are (copy, root) pairs.
    int P = static_cast<int>(t.pieces.size());
    std::vector<std::vector<int>> adj(P);
    for (auto [x, y] : t.links) {
        if (t.pieces[x].kind == Piece::tunnel || t.pieces[y].kind == Piece::tunnel) continue;
        adj[x].push_back(y);
        adj[y].push_back(x);
    }
    std::vector<bool> seen(P, false);
    int nuclei = 0;
    std::set<std::pair<int, BallPoint>> tunnels;
    for (int k = 0; k < P; ++k) {
        if (t.pieces[k].kind == Piece::tunnel) {
            tunnels.insert({t.pieces[k].index, root_of(s.phi, t.pieces[k])});
            continue;
        }
        if (seen[k]) continue;
        ++nuclei;
        std::vector<int> st{k};
        seen[k] = true;
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (int y : adj[x])
                if (!seen[y]) {
                    seen[y] = true;
                    st.push_back(y);
                }
        }
    }
    EXPECT_EQ(t.nuclei, nuclei);
    EXPECT_EQ(t.tunnels, static_cast<int>(tunnels.size()));
}

TEST(LiftWall, IndependentOfSeedOnTheSameComponent) {
    Ex2Trace s;
    auto b = s.ball(5);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    for (std::size_t k = 0; k < t.pieces.size(); k += 7) {
        auto u = lift_wall(s.phi, s.W, b, t.pieces[k]);
        EXPECT_EQ(u.pieces, t.pieces);
        EXPECT_EQ(u.crossings, t.crossings);
    }
}

TEST(LiftWall, SeedOffWallRejected) {
    Ex2Trace s;
    EXPECT_THROW(seed_piece(s.W, {}, PointV{-1, 0, Rational(2, 3)}), DomainError);
}

TEST(LiftWall, LiftedCocycleEvenAndMutationDetected) {
    Ex2Trace s;
    auto b = s.ball(5);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    EXPECT_TRUE(lifted_cocycle(s.phi, b, t).odd_cells.empty());
    int mutated = 0;
    for (const auto& p : t.pieces) {
        if (p.kind != Piece::tunnel || p.depth != 0) continue;
        auto m = remove_tunnel_lift(s.phi, s.W, b, t, p.index, p.point);
        EXPECT_FALSE(lifted_cocycle(s.phi, b, m).odd_cells.empty());
        ++mutated;
    }
    EXPECT_GT(mutated, 0);
}

TEST(Knockouts, PartitionNonRootPieces) {
    Ex2Trace s;
    auto b = s.ball(5);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    int count = 0;
    auto k = knockouts(t, &count);
    EXPECT_GT(count, 1);
    std::set<int> used;
    for (std::size_t i = 0; i < k.size(); ++i) {
        bool root = t.pieces[i].kind == Piece::tunnel && t.pieces[i].depth == 0;
        EXPECT_EQ(k[i] < 0, root);
        if (k[i] >= 0) used.insert(k[i]);
    }
    EXPECT_EQ(static_cast<int>(used.size()), count);
}

TEST(Approximate, AcyclicAtModerateRadius) {
    Ex2Trace s;
    auto b = s.ball(7);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    auto A = approximate(s.phi, s.W, b, t, s.w);
    EXPECT_FALSE(A.nodes.empty());
    EXPECT_TRUE(A.acyclic());
}

TEST(Approximate, TunnelBecomesForwardPathFromRoot) {
    Ex2Trace s;
    auto b = s.ball(7);
    auto t = lift_wall(s.phi, s.W, b, s.seed(b));
    auto A = approximate(s.phi, s.W, b, t, s.w);
    std::set<std::pair<int, int>> mids;
    for (const auto& e : A.edges)
        if (e.midsegment) mids.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
    int checked = 0;
    for (const auto& p : t.pieces) {
        if (p.kind != Piece::tunnel || p.depth != 0) continue;
        BallPoint x = normalize(p.point);
        bool inside = true;
        std::vector<int> path;
        for (int k = 0; k <= s.W.L && inside; ++k) {
            if (!point_in_ball(b, x)) inside = false;
            path.push_back(A.find(x));
            x = normalize(flow_step(s.phi, x).point);
        }
        if (!inside) continue;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            ASSERT_GE(path[k], 0);
            EXPECT_TRUE(mids.count({std::min(path[k], path[k + 1]), std::max(path[k], path[k + 1])}));
        }
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(Distortion, EmptyWhenNoPairs) {
    Ex2Trace s;
    auto b = s.ball(3);
    Approximation A;
    EXPECT_EQ(distortion_report(A, b, s.w, 10).pairs, 0);
    A.nodes.push_back({b.base_key, -1, 0});
    EXPECT_EQ(distortion_report(A, b, s.w, 0).pairs, 0);
}

TEST(Distortion, ForwardPathIsIsometric) {
    Ex2Trace s;
    auto b = s.ball(8);
    Approximation A;
    VertexKey k = move_down(s.phi, move_down(s.phi, b.base_key));
    for (int i = 0; i < 5; ++i) {
        A.nodes.push_back({k, -1, 0});
        k = move_up(s.phi, k);
    }
    for (int i = 0; i + 1 < 5; ++i) A.edges.push_back({i, i + 1, 1.0, true});
    auto r = distortion_report(A, b, s.w, 20);
    EXPECT_GT(r.pairs, 0);
    EXPECT_DOUBLE_EQ(r.kappa1, 1.0);
    EXPECT_DOUBLE_EQ(r.kappa2, 0.0);
}
