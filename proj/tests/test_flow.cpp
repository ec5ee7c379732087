#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include <fbc/flow.hpp>

#include "oracles.hpp"
#include "support.hpp"

using namespace fbc;
using namespace fbc::testing;

namespace {

PointV pt(const GraphMap& phi, const std::string& e, long num, long den) {
    return PointV::interior(phi.graph().edge_by_name(e), Rational(num, den));
}

std::vector<double> ex2_weights() { return {1.0, (1.0 + std::sqrt(5.0)) / 2.0}; }

Stratum ex2_stratum(const GraphMap& f2) { return analyze_strata(f2, compute_maximal_filtration(f2))[0]; }

int occurrences(const GraphMap& phi, int edge) {
    int c = 0;
    for (int j = 0; j < phi.graph().num_edges(); ++j)
        for (int x : phi.image(2 * j).edges) c += undirected(x) == undirected(edge);
    return c;
}

}  // namespace

TEST(FlowStep, Examples) {
    GraphMap f2 = ex2();
    EXPECT_EQ(flow_step(f2, pt(f2, "a", 1, 2)).point, pt(f2, "b", 1, 2));
    EXPECT_EQ(flow_step(f2, pt(f2, "b", 1, 4)).point, pt(f2, "a", 1, 2));
    auto v = flow_step(f2, PointV::at_vertex(0));
    EXPECT_TRUE(v.point.is_vertex());
    EXPECT_FALSE(v.singular);
    auto hit = flow_step(f2, pt(f2, "b", 1, 2));
    EXPECT_TRUE(hit.singular);
    EXPECT_TRUE(hit.point.is_vertex());
}

TEST(FlowStep, InverseLetterFlipsPosition) {
    GraphMap f = rose_map({"a", "b"}, {"aB", "b"});
    // (a, 3/4): 2*3/4 = 3/2 lands in the second letter B at 1/2 -> (b, 1/2)
    EXPECT_EQ(flow_step(f, pt(f, "a", 3, 4)).point, pt(f, "b", 1, 2));
    EXPECT_EQ(flow_step(f, pt(f, "a", 5, 8)).point, pt(f, "b", 3, 4));
}

TEST(Preimages, Examples) {
    GraphMap f2 = ex2();
    auto pb = preimages(f2, pt(f2, "b", 1, 3));
    ASSERT_EQ(pb.size(), 2u);
    EXPECT_EQ(pb[0], pt(f2, "a", 1, 3));
    EXPECT_EQ(pb[1], pt(f2, "b", 2, 3));
    EXPECT_EQ(preimages(f2, pt(f2, "a", 1, 3)).size(), 1u);
    GraphMap f1 = ex1();
    EXPECT_EQ(preimages(f1, pt(f1, "a", 1, 3)).size(), 2u);
    EXPECT_THROW(preimages(f2, PointV::at_vertex(0)), DomainError);
}

TEST(Preimages, CountsMatchOccurrencesOnRandomPoints) {
    std::mt19937 rng(53);
    for (int t = 0; t < 200; ++t) {
        GraphMap phi = random_rose_map(rng, 2 + t % 2, 4);
        int e = 2 * std::uniform_int_distribution<int>(0, phi.graph().num_edges() - 1)(rng);
        long den = std::uniform_int_distribution<long>(1000, 5000)(rng) * 2 + 1;
        long num = std::uniform_int_distribution<long>(1, den - 1)(rng);
        PointV p = PointV::interior(e, Rational(num, den));
        auto pre = preimages(phi, p);
        EXPECT_EQ(static_cast<int>(pre.size()), occurrences(phi, e));
        for (auto& q : pre) EXPECT_EQ(flow_step(phi, q).point, p);
    }
}

TEST(Tunnel, Examples) {
    GraphMap f2 = ex2();
    PointV r = pt(f2, "b", 1, 3);
    EXPECT_EQ(tunnel(f2, r, 0).nodes.size(), 1u);
    EXPECT_EQ(tunnel(f2, r, 1).leaves().size(), 2u);
    EXPECT_EQ(tunnel(f2, r, 2).leaves().size(), 3u);
}

TEST(Tunnel, LeafCountMatchesIteratedOccurrences) {
    std::mt19937 rng(59);
    for (int t = 0; t < 40; ++t) {
        GraphMap phi = random_rose_map(rng, 2, 3);
        int L = 1 + t % 3;
        int e = 2 * (t % 2);
        PointV p = PointV::interior(e, Rational(2 * t + 1, 2 * t + 211));
        Tunnel T = tunnel(phi, p, L);
        int count = 0;
        for (int j = 0; j < phi.graph().num_edges(); ++j)
            for (int x : iterate_unreduced(phi, 2 * j, L).edges) count += undirected(x) == undirected(e);
        EXPECT_EQ(static_cast<int>(T.leaves().size()), count);
        for (auto& n : T.nodes) {
            EXPECT_EQ(n.children.size(), preimages(phi, n.point).size() * (n.depth < L ? 1 : 0));
            if (n.parent >= 0) EXPECT_EQ(flow_step(phi, n.point).point, T.nodes[n.parent].point);
        }
    }
}

TEST(Periodic, Examples) {
    GraphMap f2 = ex2();
    auto r3 = periodic_points(f2, 0, 3);
    ASSERT_EQ(r3.points.size(), 1u);
    EXPECT_EQ(r3.points[0].point, pt(f2, "a", 2, 3));
    PointV x = r3.points[0].point;
    std::vector<PointV> orbit{x};
    for (int i = 0; i < 3; ++i) orbit.push_back(flow_step(f2, orbit.back()).point);
    EXPECT_EQ(orbit[1], pt(f2, "b", 2, 3));
    EXPECT_EQ(orbit[2], pt(f2, "b", 1, 3));
    EXPECT_EQ(orbit[3], x);
    EXPECT_TRUE(periodic_points(f2, 0, 1).points.empty());
    GraphMap f1 = ex1();
    for (int m = 1; m <= 3; ++m) {
        auto r = periodic_points(f1, 0, m);
        EXPECT_TRUE(r.points.empty());
        EXPECT_TRUE(r.periodic_edge);
    }
}

TEST(Periodic, MatchesBruteForceEnumeration) {
    // Frozen from exhaustive search over s = i/D, D < 60.
    GraphMap f2 = ex2();
    auto ss = [&](int e, int m) {
        std::vector<std::string> out;
        for (auto& p : periodic_points(f2, e, m).points) out.push_back(to_string(p.point.s));
        return out;
    };
    EXPECT_EQ(ss(2, 3), (std::vector<std::string>{"1/3", "2/3"}));
    EXPECT_EQ(ss(0, 4), (std::vector<std::string>{"6/7"}));
    EXPECT_EQ(ss(2, 4), (std::vector<std::string>{"3/7", "5/7", "6/7"}));
    EXPECT_EQ(ss(0, 5), (std::vector<std::string>{"2/7", "4/7", "14/15"}));
    EXPECT_EQ(ss(2, 5).size(), 7u);
    EXPECT_TRUE(ss(0, 2).empty());
}

TEST(Periodic, OrbitsCloseExactly) {
    std::mt19937 rng(61);
    for (int t = 0; t < 30; ++t) {
        GraphMap phi = random_rose_map(rng, 2, 3);
        for (int m = 1; m <= 4; ++m)
            for (auto& pp : periodic_points(phi, 0, m).points) {
                PointV q = pp.point;
                for (int i = 0; i < m; ++i) q = flow_step(phi, q).point;
                EXPECT_EQ(q, pp.point);
            }
    }
}

TEST(BallFlow, AgreesWithProjectedFlow) {
    GraphMap f2 = ex2();
    std::mt19937 rng(67);
    for (int t = 0; t < 100; ++t) {
        VertexKey v{std::uniform_int_distribution<long>(-2, 2)(rng), random_reduced(f2.graph(), rng, t % 5).edges};
        int e = 2 * (t % 2);
        BallPoint p{v, e, Rational(2 * t + 1, 2 * t + 203)};
        auto st = flow_step(f2, p);
        EXPECT_EQ(st.point.v.h, v.h + 1);
        EXPECT_EQ(project(f2, st.point), flow_step(f2, project(f2, p)).point);
        auto pre = preimages(f2, p);
        EXPECT_EQ(pre.size(), preimages(f2, project(f2, p)).size());
        for (auto& q : pre) EXPECT_EQ(flow_step(f2, q).point, p);
    }
}

TEST(LeafTrace, Examples) {
    GraphMap f2 = ex2();
    auto ball = build_ball(f2, ex2_weights(), {}, 5);
    BallPoint p{ball.base_key, 0, Rational(2, 3)};
    auto t0 = leaf_trace(f2, ball, p, 0, 0);
    EXPECT_EQ(t0.nodes.size(), 1u);
    auto t3 = leaf_trace(f2, ball, p, 3, 0);
    ASSERT_EQ(t3.nodes.size(), 4u);
    EXPECT_EQ(project(f2, t3.nodes[3].point), project(f2, p));
    EXPECT_EQ(t3.nodes[3].point.v.h, 3);
    // back-tree from a point in b matches the tunnel of depth 2 level by level
    BallPoint q{ball.base_key, 2, Rational(1, 3)};
    auto tb = leaf_trace(f2, ball, q, 0, 2);
    Tunnel T = tunnel(f2, project(f2, q), 2);
    EXPECT_FALSE(tb.truncated);
    EXPECT_EQ(tb.nodes.size(), T.nodes.size());
    // one outgoing midsegment per non-top node
    for (std::size_t i = 1; i < tb.nodes.size(); ++i) {
        ASSERT_GE(tb.nodes[i].next, 0);
        EXPECT_EQ(flow_step(f2, tb.nodes[i].point).point, tb.nodes[tb.nodes[i].next].point);
        EXPECT_EQ(tb.nodes[tb.nodes[i].next].level, tb.nodes[i].level + 1);
    }
    auto far = leaf_trace(f2, ball, p, 9, 0);
    EXPECT_TRUE(far.truncated);
}

TEST(LeafIntersections, Examples) {
    GraphMap f2 = ex2();
    auto ball = build_ball(f2, ex2_weights(), {}, 4);
    int o = ball.find(ball.base_key);
    BallPoint p{ball.base_key, 0, Rational(2, 3)};
    std::vector<BallPoint> sigma{p};
    for (int i = 0; i < 3; ++i) sigma.push_back(flow_step(f2, sigma.back()).point);
    int oa = ball.vertical(o, 0);
    auto one = leaf_intersections(f2, ball, sigma, {o, oa});
    EXPECT_EQ(one.points.size(), 1u);
    EXPECT_TRUE(one.odd);
    int oA = ball.vertical(o, 1);
    auto none = leaf_intersections(f2, ball, sigma, {o, oA});
    EXPECT_TRUE(none.points.empty());
    EXPECT_FALSE(none.odd);

    // sampled geodesics: count by comparing group labels of edge endpoints
    std::mt19937 rng(71);
    for (int t = 0; t < 20; ++t) {
        int y = std::uniform_int_distribution<int>(0, ball.num_vertices() - 1)(rng);
        auto g = geodesic_in_ball(ball, o, y);
        auto got = leaf_intersections(f2, ball, sigma, g.vertices);
        std::size_t count = 0;
        for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i) {
            auto lx = ball.label(f2, g.vertices[i]), ly = ball.label(f2, g.vertices[i + 1]);
            for (auto& s : sigma) {
                auto a = element_of(f2, s.v), b = element_of(f2, move_vertical(s.v, s.edge));
                if ((a == lx && b == ly) || (a == ly && b == lx)) ++count;
            }
        }
        EXPECT_EQ(got.points.size(), count);
    }
}

TEST(StratumMeasure, MatchesBruteForceLimit) {
    GraphMap f2 = ex2();
    Stratum s = ex2_stratum(f2);
    StratumMeasure mu(f2, s);
    // lambda^-n * omega-length of the letters of phi^n(e) whose source subinterval lies in [0, x], n = 24
    std::function<double(int, double, double, double, int)> walk = [&](int e, double lo, double hi, double x, int n) {
        if (lo >= x) return 0.0;
        if (n == 0) return hi <= x ? s.weight(e) : 0.0;
        const auto& img = f2.image(e).edges;
        double k = static_cast<double>(img.size()), acc = 0;
        for (std::size_t j = 0; j < img.size(); ++j) {
            double a = lo + (hi - lo) * j / k, b = lo + (hi - lo) * (j + 1) / k;
            acc += walk(img[j], a, b, x, n - 1);
        }
        return acc / s.lambda;
    };
    auto brute = [&](int e, double x) { return walk(e, 0.0, 1.0, x, 24); };
    for (auto [num, den] : std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {1, 2}, {3, 7}, {5, 11}}) {
        EXPECT_NEAR(mu.cdf(0, Rational(num, den)), brute(0, double(num) / den), 1e-3);
        EXPECT_NEAR(mu.cdf(2, Rational(num, den)), brute(2, double(num) / den), 1e-3);
    }
    EXPECT_NEAR(mu.cdf(2, Rational(1)), s.weight(2), 1e-12);
}

TEST(RTree, Examples) {
    GraphMap f2 = ex2();
    Stratum s = ex2_stratum(f2);
    BallPoint p{VertexKey{0, {}}, 0, Rational(2, 3)};
    auto zero = rtree_distance_estimate(f2, s, p, p, 10);
    for (double d : zero.sequence) EXPECT_EQ(d, 0.0);

    // two preimages of one point share a leaf: distance vanishes after one step
    BallPoint top{VertexKey{1, {}}, 2, Rational(1, 3)};
    auto pre = preimages(f2, top);
    ASSERT_EQ(pre.size(), 2u);
    auto same = rtree_distance_estimate(f2, s, pre[0], pre[1], 6);
    EXPECT_GT(same.sequence[0], 0.0);
    for (std::size_t n = 1; n < same.sequence.size(); ++n) EXPECT_NEAR(same.sequence[n], 0.0, 1e-12);

    BallPoint q{VertexKey{0, {2}}, 0, Rational(2, 3)};
    auto r = rtree_distance_estimate(f2, s, p, q, 12);
    for (std::size_t n = 0; n + 1 < r.sequence.size(); ++n) {
        EXPECT_LE(r.sequence[n + 1], r.sequence[n] + 1e-12);
        EXPECT_GT(r.sequence[n + 1], 0.0);
    }
}

TEST(RTree, NonincreasingOnRandomPairs) {
    GraphMap f2 = ex2();
    Stratum s = ex2_stratum(f2);
    std::mt19937 rng(73);
    for (int t = 0; t < 60; ++t) {
        BallPoint p{VertexKey{0, random_reduced(f2.graph(), rng, t % 4).edges}, 2 * (t % 2), Rational(t + 1, 2 * t + 7)};
        BallPoint q{VertexKey{0, random_reduced(f2.graph(), rng, t % 3).edges}, 2 * ((t / 2) % 2), Rational(2 * t + 1, 4 * t + 9)};
        auto r = rtree_distance_estimate(f2, s, p, q, 8);
        for (std::size_t n = 0; n + 1 < r.sequence.size(); ++n) {
            EXPECT_LE(r.sequence[n + 1], r.sequence[n] + 1e-12);
            EXPECT_GE(r.sequence[n + 1], 0.0);
        }
    }
}
