#include <gtest/gtest.h>

#include <fbc/strata.hpp>
#include <fbc/walls.hpp>

#include "oracles.hpp"
#include "support.hpp"

using namespace fbc;
using fbc::testing::ex1;
using fbc::testing::ex2;

namespace {

const oracle::Sub kEx2{{'a', "b"}, {'b', "ab"}};

std::vector<PointV> canonical(const GraphMap& phi) {
    return canonical_busts(phi, analyze_strata(phi, compute_maximal_filtration(phi))).points;
}

PointV pt(const GraphMap& phi, const std::string& e, long num, long den) {
    return {-1, phi.graph().edge_by_name(e), Rational(num, den)};
}

// Flow on (letter, position) computed from the substitution strings alone.
std::pair<char, Rational> oracle_flow(const oracle::Sub& m, std::pair<char, Rational> p) {
    const std::string& w = m.at(p.first);
    long k = static_cast<long>(w.size());
    Rational x = p.second * k;
    long j = floor_of(x).convert_to<long>();
    Rational r = x - j;
    char c = w[j];
    if (std::islower(static_cast<unsigned char>(c))) return {c, r};
    return {static_cast<char>(std::tolower(c)), 1 - r};
}

// Points mapping onto (d, s) after L steps: each edge is cut into equal parts per letter of its image,
// recursively, and an occurrence of d at the bottom pulls s back through the composed affine maps.
void expand(const oracle::Sub& m, char x, const Rational& a, const Rational& c, int depth, char top, char d,
            const Rational& s, std::vector<std::pair<char, Rational>>& out) {
    if (depth == 0) {
        if (x == d) out.push_back({top, a * s + c});
        return;
    }
    const std::string& w = m.at(x);
    long k = static_cast<long>(w.size());
    for (long j = 0; j < k; ++j) {
        char y = w[j];
        if (std::islower(static_cast<unsigned char>(y))) expand(m, y, a / k, a * Rational(j, k) + c, depth - 1, top, d, s, out);
        else expand(m, static_cast<char>(std::tolower(y)), -a / k, a * Rational(j + 1, k) + c, depth - 1, top, d, s, out);
    }
}

std::vector<std::pair<char, Rational>> oracle_preimages(const oracle::Sub& m, char d, const Rational& s, int L) {
    std::vector<std::pair<char, Rational>> out;
    for (auto& [x, img] : m) expand(m, x, 1, 0, L, x, d, s, out);
    std::sort(out.begin(), out.end());
    return out;
}

// Assembly-then-scan: build the wall graph straight from bust positions on a rose.
struct AssembledWall {
    int nuclei = 0, components = 0;
    std::map<int, int> types;  // type -> count (trivial nuclei counted under 1)
};

AssembledWall assemble(const GraphMap& phi, const BustSet& B) {
    const Graph& g = phi.graph();
    std::map<int, std::vector<std::pair<Rational, int>>> on;  // edge -> (position, primary index or -1)
    std::set<PointV> all;
    for (int i = 0; i < B.size(); ++i) {
        all.insert(B.primary[i]);
        for (const auto& q : B.secondary[i]) all.insert(q);
    }
    for (const auto& p : all) {
        int prim = -1;
        for (int i = 0; i < B.size(); ++i)
            if (B.primary[i] == p) prim = i;
        on[p.edge].push_back({p.s, prim});
    }
    // Node ids: 0 = the vertex, then pieces, then extras, then tunnels.
    std::map<std::pair<int, int>, int> piece;  // (edge, k)
    int next = 1;
    for (int e = 0; e < g.num_oriented(); e += 2) {
        auto& l = on[e];
        std::sort(l.begin(), l.end());
        for (std::size_t k = 0; k <= l.size(); ++k) piece[{e, static_cast<int>(k)}] = next++;
    }
    std::vector<int> parent(next + 3 * B.size() + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    auto join = [&](int x, int y) { parent[root(x)] = root(y); };
    AssembledWall out;
    for (int e = 0; e < g.num_oriented(); e += 2) {
        auto& l = on[e];
        join(piece[{e, 0}], 0);
        join(piece[{e, static_cast<int>(l.size())}], 0);
        for (std::size_t k = 1; k < l.size(); ++k) {
            ++out.nuclei;
            // A root sits at the left end of a primary, and at its right end unless it is periodic.
            int p = l[k - 1].second, q = l[k].second;
            bool root = q >= 0 || (p >= 0 && !B.periodic[p]);
            out.types[root ? 1 : 2]++;
        }
    }
    ++out.nuclei;
    out.types[3]++;
    auto end = [&](const PointV& p, bool right) {
        auto& l = on[p.edge];
        int k = 0;
        while (l[k].first != p.s) ++k;
        return piece[{p.edge, k + (right ? 1 : 0)}];
    };
    int extra = next, tun = next + B.size();
    for (int i = 0; i < B.size(); ++i) {
        int left = tun + 2 * i, right = left + 1;
        join(left, end(B.primary[i], false));
        for (const auto& q : B.secondary[i]) join(left, end(q, true));
        if (B.periodic[i]) {
            ++out.nuclei;
            out.types[1]++;
            join(right, extra + i);
            for (const auto& q : B.secondary[i])
                if (!(q == B.primary[i])) join(right, end(q, false));
        } else {
            join(right, end(B.primary[i], true));
            for (const auto& q : B.secondary[i]) join(right, end(q, false));
        }
    }
    std::set<int> comps;
    for (int x = 0; x < next; ++x) comps.insert(root(x));
    for (int i = 0; i < B.size(); ++i)
        if (B.periodic[i]) comps.insert(root(extra + i));
    out.components = static_cast<int>(comps.size());
    return out;
}

}  // namespace

TEST(CanonicalBusts, Ex2PeriodThreeOrbit) {
    GraphMap phi = ex2();
    auto c = canonical_busts(phi, analyze_strata(phi, compute_maximal_filtration(phi)));
    ASSERT_EQ(c.points.size(), 2u);
    EXPECT_EQ(c.points[0], pt(phi, "a", 2, 3));
    EXPECT_EQ(c.points[1], pt(phi, "b", 1, 3));
    EXPECT_EQ(c.periods, (std::vector<int>{3, 3}));
    EXPECT_EQ(c.lcm, 3);
    // Oracle orbit: exact period 3 for both.
    for (auto start : {std::pair<char, Rational>{'a', Rational(2, 3)}, {'b', Rational(1, 3)}}) {
        auto p = start;
        for (int n = 1; n <= 3; ++n) {
            p = oracle_flow(kEx2, p);
            EXPECT_EQ(p == start, n == 3);
        }
    }
}

TEST(CanonicalBusts, NoExponentialStratumGivesNothing) {
    GraphMap phi = fbc::testing::rose_aut({"a", "b"}, {"a", "b"}, {"a", "b"});
    EXPECT_TRUE(canonical(phi).empty());
}

TEST(CanonicalBusts, AffineFixedPoint) {
    // a -> aab stretches a by 3 with a fixed point where s = 3s - 1, i.e. s = 1/2.
    GraphMap phi = fbc::testing::rose_map({"a", "b"}, {"aab", "b"});
    auto c = canonical(phi);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0], pt(phi, "a", 1, 2));
}

TEST(SecondaryBusts, MatchOccurrenceOracle) {
    GraphMap phi = ex2();
    auto prim = canonical(phi);
    for (int L : {1, 2, 3, 4}) {
        for (const auto& d : prim) {
            auto sec = secondary_busts(phi, {d}, L);
            char letter = phi.graph().name(d.edge)[0];
            auto want = oracle_preimages(kEx2, letter, d.s, L);
            ASSERT_EQ(sec.size(), want.size()) << "L=" << L;
            for (std::size_t i = 0; i < sec.size(); ++i) {
                EXPECT_EQ(phi.graph().name(sec[i].edge)[0], want[i].first);
                EXPECT_EQ(sec[i].s, want[i].second);
            }
        }
    }
}

TEST(SecondaryBusts, PeriodicBustIsItsOwnSecondary) {
    GraphMap phi = ex2();
    auto sec = secondary_busts(phi, {pt(phi, "a", 2, 3)}, 3);
    EXPECT_NE(std::find(sec.begin(), sec.end(), pt(phi, "a", 2, 3)), sec.end());
    EXPECT_EQ(secondary_busts(phi, {pt(phi, "b", 1, 3)}, 1).size(), 2u);
}

TEST(SecondaryBusts, UnhitEdgeHasNone) {
    // c appears in no image.
    GraphMap phi = fbc::testing::rose_map({"a", "b", "c"}, {"ab", "a", "a"});
    EXPECT_TRUE(secondary_busts(phi, {pt(phi, "c", 1, 3)}, 1).empty());
}

TEST(SecondaryBusts, SingularPreimageNamesTheVertex) {
    GraphMap phi = ex2();
    try {
        make_busts(phi, {pt(phi, "a", 1, 2)}, 3);
        FAIL() << "expected a degenerate bust";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("vertex"), std::string::npos);
    }
}

TEST(EFlat, RoseWithOneBustPerLoop) {
    Graph g = make_rose({"a", "b", "c"});
    std::vector<BustPoint> busts;
    for (int e = 0; e < 6; e += 2) busts.push_back({{-1, e, Rational(1, 2)}});
    auto f = build_eflat(g, busts);
    ASSERT_EQ(f.nuclei.size(), 1u);
    EXPECT_EQ(f.nuclei[0].vertices.size(), 1u);
    EXPECT_EQ(f.nuclei[0].segments.size(), 6u);  // 2 * #edges stubs
}

TEST(EFlat, ThetaGraphComponentScan) {
    Graph g;
    int u = g.add_vertex("u"), v = g.add_vertex("v");
    for (auto n : {"x", "y", "z"}) g.add_edge(n, u, v);
    auto one = build_eflat(g, {{{-1, 0, Rational(1, 2)}}});
    EXPECT_EQ(one.nuclei.size(), 1u);
    auto two = build_eflat(g, {{{-1, 0, Rational(1, 3)}}, {{-1, 0, Rational(2, 3)}}});
    EXPECT_EQ(two.nuclei.size(), 2u);
}

TEST(EFlat, NoBusts) {
    Graph g = make_rose({"a", "b"});
    auto f = build_eflat(g, {});
    EXPECT_EQ(f.nuclei.size(), 1u);
    EXPECT_EQ(f.segments.size(), 2u);
}

TEST(EFlat, CoincidingBustsRejected) {
    Graph g = make_rose({"a"});
    BustPoint p{{-1, 0, Rational(1, 2)}};
    EXPECT_THROW(build_eflat(g, {p, p}), DomainError);
}

TEST(ImmersedWall, Ex2MatchesAssemblyOracle) {
    GraphMap phi = ex2();
    for (int L : {3, 6}) {
        auto B = make_busts(phi, canonical(phi), L);
        auto W = build_immersed_wall(phi, B);
        auto oracle = assemble(phi, B);
        EXPECT_EQ(static_cast<int>(W.eflat.nuclei.size()), oracle.nuclei) << "L=" << L;
        EXPECT_EQ(W.num_components, oracle.components) << "L=" << L;
        EXPECT_EQ(W.num_tunnels(), 2 * B.size());
        std::map<int, int> types;
        for (const auto& n : classify_nuclei(W)) types[n.type]++;
        EXPECT_EQ(types, oracle.types) << "L=" << L;
    }
}

TEST(ImmersedWall, Ex2CanonicalFrozenCounts) {
    GraphMap phi = ex2();
    auto W = build_immersed_wall(phi, canonical(phi), 3);
    EXPECT_EQ(W.eflat.nuclei.size(), 9u);
    EXPECT_EQ(W.num_components, 1);
    EXPECT_EQ(W.num_tunnels(), 4);
    std::vector<int> types;
    std::vector<bool> trivial;
    for (const auto& n : classify_nuclei(W)) {
        types.push_back(n.type);
        trivial.push_back(n.trivial);
    }
    EXPECT_EQ(types, (std::vector<int>{3, 1, 2, 1, 2, 2, 2, 1, 1}));
    EXPECT_EQ(std::count(trivial.begin(), trivial.end(), true), 2);
}

TEST(ImmersedWall, PeriodicWiringAtExtraVertex) {
    GraphMap phi = ex2();
    auto W = build_immersed_wall(phi, canonical(phi), 3);
    for (int i = 0; i < W.busts.size(); ++i) {
        ASSERT_TRUE(W.busts.periodic[i]);
        const Attach& r = W.root_attach[2 * i + 1];
        EXPECT_TRUE(r.extra);
        EXPECT_EQ(r.primary, i);
        int self = 0;
        for (const auto& [node, a] : W.leaf_attach[2 * i + 1])
            if (a.extra) {
                EXPECT_EQ(W.tree(2 * i + 1).nodes[node].point, W.busts.primary[i]);
                ++self;
            }
        EXPECT_EQ(self, 1);
    }
}

TEST(ImmersedWall, LeafAttachmentBijection) {
    GraphMap phi = ex2();
    int built = 0;
    for (int L : {1, 2, 3, 4, 5, 6}) {
        ImmersedWall W;
        try {
            W = build_immersed_wall(phi, canonical(phi), L);
        } catch (const DomainError&) {
            continue;  // the two canonical orbits meet at some depths
        }
        ++built;
        int leaves = 0, extras = 0;
        for (int c = 0; c < W.num_tunnels(); ++c) {
            leaves += static_cast<int>(W.leaf_attach[c].size());
            for (auto& [n, a] : W.leaf_attach[c]) extras += a.extra;
        }
        int ends = 0;
        for (const auto& b : W.eflat.busts) ends += b.secondary_of >= 0 ? 2 : 0;
        int periodic = static_cast<int>(std::count(W.busts.periodic.begin(), W.busts.periodic.end(), true));
        EXPECT_EQ(leaves, ends) << "L=" << L;
        EXPECT_EQ(extras, periodic) << "L=" << L;
        // Every end vertex carries exactly one tunnel end.
        EXPECT_EQ(W.end_attach.size(), 2 * W.eflat.busts.size()) << "L=" << L;
    }
    EXPECT_GE(built, 2);
}

TEST(ImmersedWall, NoBustsIsDegenerate) {
    GraphMap phi = ex2();
    auto W = build_immersed_wall(phi, std::vector<PointV>{}, 3);
    EXPECT_TRUE(W.degenerate);
    EXPECT_EQ(W.num_tunnels(), 0);
    auto r = cocycle_check(phi, W);
    EXPECT_TRUE(r.even());
    // E alone meets each 2-cell boundary on its two horizontal sides.
    for (int c : r.cell_crossings) EXPECT_EQ(c % 2, 0);
}

TEST(Separation, CanonicalAtThreeAndFailureAtOne) {
    GraphMap phi = ex2();
    auto good = bust_separation_check(phi, make_busts(phi, canonical(phi), 3));
    EXPECT_TRUE(good.all);
    EXPECT_FALSE(good.first_failure.has_value());
    auto bad = bust_separation_check(phi, make_busts(phi, canonical(phi), 1));
    EXPECT_FALSE(bad.all);
    EXPECT_TRUE(bad.first_failure.has_value());
}

TEST(Cocycle, CanonicalWallEvenAndTwoSided) {
    GraphMap phi = ex2();
    auto r = cocycle_check(phi, build_immersed_wall(phi, canonical(phi), 3));
    EXPECT_TRUE(r.even());
    EXPECT_TRUE(r.two_sided());
    EXPECT_EQ(r.cycles, 8);
}

TEST(Cocycle, EvenOnRandomValidBusts) {
    GraphMap phi = ex2();
    std::mt19937 rng(5);
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        long den = std::uniform_int_distribution<long>(5, 40)(rng);
        long na = std::uniform_int_distribution<long>(1, den - 1)(rng);
        long nb = std::uniform_int_distribution<long>(1, den - 1)(rng);
        int L = std::uniform_int_distribution<int>(1, 3)(rng);
        ImmersedWall W;
        try {
            W = build_immersed_wall(phi, {pt(phi, "a", na, den), pt(phi, "b", nb, den)}, L);
        } catch (const DomainError&) {
            continue;
        }
        ++built;
        EXPECT_TRUE(cocycle_check(phi, W).even()) << na << "/" << den << " " << nb << "/" << den << " L=" << L;
    }
    EXPECT_GT(built, 20);
}

TEST(Cocycle, TunnelDeletionAtLevelOfX) {
    GraphMap phi = ex2();
    // At L = 3 the transition matrix cubed is the identity mod 2, so a deleted tunnel's
    // leaves and root hit every edge an even number of times: invisible in X.
    auto W3 = build_immersed_wall(phi, canonical(phi), 3);
    for (int c = 0; c < W3.num_tunnels(); ++c) EXPECT_TRUE(cocycle_check(phi, delete_tunnel(W3, c)).even());
    // With one primary at L = 1 or 2 the same mutation is seen directly.
    for (int L : {1, 2}) {
        auto W = build_immersed_wall(phi, {pt(phi, "a", 2, 3)}, L);
        for (int c = 0; c < W.num_tunnels(); ++c) EXPECT_FALSE(cocycle_check(phi, delete_tunnel(W, c)).even()) << L;
    }
}

TEST(Zones, Ex2CanonicalFrozen) {
    GraphMap phi = ex2();
    auto zones = exceptional_zones(phi, build_immersed_wall(phi, canonical(phi), 3));
    ASSERT_EQ(zones.size(), 9u);
    std::vector<int> exceptional, degenerate;
    for (const auto& z : zones) {
        if (z.exceptional) exceptional.push_back(z.nucleus);
        if (z.degenerate) degenerate.push_back(z.nucleus);
    }
    EXPECT_EQ(exceptional, (std::vector<int>{1, 3, 7, 8}));
    EXPECT_EQ(degenerate, (std::vector<int>{7, 8}));
    EXPECT_FALSE(zones[1].narrow);
    EXPECT_TRUE(zones[3].narrow);
    EXPECT_EQ(zones[1].first_vertex_level, 2);
}

TEST(Zones, AllOutgoingIsNotExceptional) {
    GraphMap phi = ex2();
    auto W = build_immersed_wall(phi, canonical(phi), 3);
    auto info = classify_nuclei(W);
    for (const auto& z : exceptional_zones(phi, W))
        if (info[z.nucleus].incoming == 0) EXPECT_FALSE(z.exceptional);
}

TEST(ClassifyNuclei, Ex1WithoutExponentialEdgeBust) {
    GraphMap phi = ex1();
    auto W = build_immersed_wall(phi, canonical(phi), 2);
    for (const auto& n : classify_nuclei(W)) EXPECT_GE(n.type, 1);
}
