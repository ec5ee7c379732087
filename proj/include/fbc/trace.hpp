#pragma once

#include <queue>
#include <random>
#include <tuple>

#include "walls.hpp"

namespace fbc {

// A piece of the wall inside one 2-cell of the ball.
//   segment: E-segment `index` of E-flat in the cell based at `point.v`
//   tunnel:  vertical piece of tunnel copy `index` at depth `depth` through the node `point`
//            (depth 0 runs from the root down to the bottom edge, depth L from the top edge down to a leaf)
//   extra:   a lift of the extra vertex of primary `index`, at `point`
struct Piece {
    enum Kind { segment, tunnel, extra };
    Kind kind = segment;
    int index = 0;
    int depth = 0;
    BallPoint point;

    int edge(const EFlat& f) const { return kind == segment ? f.segments[index].edge : point.edge; }
    auto tie() const { return std::tie(kind, index, depth, point.v, point.edge, point.s); }
    bool operator==(const Piece& o) const { return tie() == o.tie(); }
    bool operator<(const Piece& o) const { return tie() < o.tie(); }
};

struct WallTrace {
    std::vector<Piece> pieces;
    std::vector<std::pair<int, int>> links;  // adjacent pieces (indices into pieces)
    std::map<int, int> crossings;            // ball edge id -> number of wall points on it
    bool truncated = false;                  // some neighbour lies outside the ball
    int nuclei = 0, tunnels = 0;

    int index_of(const Piece& p) const {
        auto it = std::lower_bound(pieces.begin(), pieces.end(), p);
        return it != pieces.end() && *it == p ? static_cast<int>(it - pieces.begin()) : -1;
    }
};

namespace detail {

inline BallPoint flow_n(const GraphMap& phi, BallPoint p, int n) {
    for (int i = 0; i < n; ++i) p = flow_step(phi, p).point;
    return p;
}

inline std::vector<Piece> vertex_star(const EFlat& f, const VertexKey& u) {
    std::vector<Piece> out;
    for (int s = 0; s < static_cast<int>(f.segments.size()); ++s) {
        const auto& seg = f.segments[s];
        if (seg.lo < 0) out.push_back({Piece::segment, s, 0, {u, seg.edge, 0}});
        if (seg.hi < 0) out.push_back({Piece::segment, s, 0, {move_vertical(u, inv(seg.edge)), seg.edge, 0}});
    }
    return out;
}

}  // namespace detail

inline std::vector<Piece> piece_neighbours(const GraphMap& phi, const ImmersedWall& w, const Piece& p) {
    const EFlat& f = w.eflat;
    std::vector<Piece> out;
    auto attached = [&](const Attach& a, const BallPoint& at) {
        if (a.extra) {
            out.push_back({Piece::extra, a.primary, 0, at});
            return;
        }
        int s = f.end_segment.at({a.bust, static_cast<int>(a.side)});
        out.push_back({Piece::segment, s, 0, {at.v, f.segments[s].edge, 0}});
    };
    auto end_piece = [&](int bust, Side side, const BallPoint& at) {
        auto [copy, node] = w.end_attach.at({bust, static_cast<int>(side)});
        if (w.deleted[copy]) return;
        out.push_back({Piece::tunnel, copy, node == 0 ? 0 : w.L, at});
    };
    switch (p.kind) {
        case Piece::segment: {
            const auto& seg = f.segments[p.index];
            const VertexKey& v = p.point.v;
            if (seg.lo < 0) {
                for (auto& q : detail::vertex_star(f, v))
                    if (!(q == p)) out.push_back(q);
            } else {
                end_piece(seg.lo, Side::right, {v, seg.edge, seg.x0});
            }
            if (seg.hi < 0) {
                for (auto& q : detail::vertex_star(f, move_vertical(v, seg.edge)))
                    if (!(q == p)) out.push_back(q);
            } else {
                end_piece(seg.hi, Side::left, {v, seg.edge, seg.x1});
            }
            break;
        }
        case Piece::tunnel: {
            if (p.depth == 0)
                attached(w.root_attach[p.index], p.point);
            else
                out.push_back({Piece::tunnel, p.index, p.depth - 1, flow_step(phi, p.point).point});
            if (p.depth == w.L) {
                PointV x = project(phi, p.point);
                const Tunnel& t = w.tree(p.index);
                for (auto& [n, a] : w.leaf_attach[p.index])
                    if (t.nodes[n].point == x) attached(a, p.point);
            } else {
                for (auto& y : preimages(phi, p.point)) out.push_back({Piece::tunnel, p.index, p.depth + 1, y});
            }
            break;
        }
        case Piece::extra: {
            int c = 2 * p.index + 1;
            if (!w.deleted[c]) {
                out.push_back({Piece::tunnel, c, 0, p.point});
                out.push_back({Piece::tunnel, c, w.L, p.point});
            }
            break;
        }
    }
    return out;
}

inline bool piece_in_ball(const BallComplex& b, const EFlat& f, const Piece& p) {
    int v = b.find(p.point.v);
    return v >= 0 && b.cell_at(v, p.edge(f)) >= 0;
}

// The E-segment through an interior point of E in the cell (v, e) at height v.h + 1/2.
inline Piece seed_piece(const ImmersedWall& w, const VertexKey& v, const PointV& x) {
    if (x.is_vertex()) {
        for (int s = 0; s < static_cast<int>(w.eflat.segments.size()); ++s)
            if (w.eflat.segments[s].lo < 0) return {Piece::segment, s, 0, {v, w.eflat.segments[s].edge, 0}};
        throw DomainError("lift_wall: seed off wall");
    }
    for (int s = 0; s < static_cast<int>(w.eflat.segments.size()); ++s) {
        const auto& seg = w.eflat.segments[s];
        if (seg.edge == x.edge && seg.x0 < x.s && x.s < seg.x1) return {Piece::segment, s, 0, {v, seg.edge, 0}};
    }
    throw DomainError("lift_wall: seed off wall (a bust)");
}

inline void compute_crossings(const GraphMap& phi, const ImmersedWall& w, const BallComplex& b, WallTrace& t) {
    const EFlat& f = w.eflat;
    t.crossings.clear();
    std::set<VertexKey> evertices;
    std::set<std::tuple<int, int, BallPoint>> nodes;
    for (const auto& p : t.pieces) {
        if (p.kind == Piece::segment) {
            const auto& seg = f.segments[p.index];
            if (seg.lo < 0) evertices.insert(p.point.v);
            if (seg.hi < 0) evertices.insert(move_vertical(p.point.v, seg.edge));
        } else if (p.kind == Piece::tunnel) {
            if (p.depth < w.L) nodes.insert({p.index, p.depth, p.point});
            if (p.depth > 0) nodes.insert({p.index, p.depth - 1, flow_step(phi, p.point).point});
        }
    }
    for (const auto& u : evertices) {
        int v = b.find(u);
        int id = v >= 0 ? b.horizontal_edge_id(v) : -1;
        if (id >= 0) t.crossings[id]++;
    }
    for (const auto& [c, d, x] : nodes) {
        int v = b.find(x.v);
        int id = v >= 0 ? b.vertical_edge_id(v, x.edge) : -1;
        if (id >= 0) t.crossings[id]++;
    }
}

inline WallTrace lift_wall(const GraphMap& phi, const ImmersedWall& w, const BallComplex& b, const Piece& seed) {
    require_rose(phi, "lift_wall");
    const EFlat& f = w.eflat;
    if (!piece_in_ball(b, f, seed)) throw DomainError("lift_wall: seed outside the ball");
    WallTrace t;
    std::map<Piece, int> id;
    std::vector<Piece> order{seed};
    id[seed] = 0;
    std::vector<std::pair<int, int>> links;
    for (std::size_t k = 0; k < order.size(); ++k) {
        Piece p = order[k];
        for (const auto& q : piece_neighbours(phi, w, p)) {
            if (!piece_in_ball(b, f, q)) {
                t.truncated = true;
                continue;
            }
            auto [it, fresh] = id.emplace(q, static_cast<int>(order.size()));
            if (fresh) order.push_back(q);
            if (static_cast<int>(k) < it->second) links.push_back({static_cast<int>(k), it->second});
        }
    }
    std::vector<int> rank(order.size());
    t.pieces = order;
    std::sort(t.pieces.begin(), t.pieces.end());
    for (std::size_t k = 0; k < order.size(); ++k) rank[k] = t.index_of(order[k]);
    for (auto [x, y] : links) t.links.push_back({std::min(rank[x], rank[y]), std::max(rank[x], rank[y])});
    std::sort(t.links.begin(), t.links.end());
    t.links.erase(std::unique(t.links.begin(), t.links.end()), t.links.end());

    // Nuclei: segment pieces joined at E-vertices, and extra vertices. Tunnels: copies with a root point.
    int P = static_cast<int>(t.pieces.size());
    std::vector<int> parent(P);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (auto [x, y] : t.links)
        if (t.pieces[x].kind == Piece::segment && t.pieces[y].kind == Piece::segment) parent[root(x)] = root(y);
    std::set<int> nuc;
    std::set<std::pair<int, BallPoint>> roots;
    for (int k = 0; k < P; ++k) {
        const Piece& p = t.pieces[k];
        if (p.kind != Piece::tunnel) nuc.insert(root(k));
        if (p.kind == Piece::tunnel) roots.insert({p.index, detail::flow_n(phi, p.point, p.depth)});
    }
    t.nuclei = static_cast<int>(nuc.size());
    t.tunnels = static_cast<int>(roots.size());
    compute_crossings(phi, w, b, t);
    return t;
}

// Remove every piece of the tunnel copy `copy` rooted at `root` (a mutation for the lifted cocycle check).
inline WallTrace remove_tunnel_lift(const GraphMap& phi, const ImmersedWall& w, const BallComplex& b, WallTrace t,
                                    int copy, const BallPoint& root) {
    std::vector<Piece> keep;
    for (const auto& p : t.pieces)
        if (!(p.kind == Piece::tunnel && p.index == copy && detail::flow_n(phi, p.point, p.depth) == root))
            keep.push_back(p);
    t.pieces = keep;
    t.links.clear();
    compute_crossings(phi, w, b, t);
    return t;
}

// Crossings on the boundary of every ball 2-cell, counted as the boundary loop passes its edges.
struct LiftedCocycle {
    std::vector<int> odd_cells;  // indices into ball.cells
    int cells = 0;
};

inline LiftedCocycle lifted_cocycle(const GraphMap& phi, const BallComplex& b, const WallTrace& t) {
    LiftedCocycle r;
    auto count = [&](int id) {
        auto it = t.crossings.find(id);
        return it == t.crossings.end() ? 0 : it->second;
    };
    for (int c = 0; c < static_cast<int>(b.cells.size()); ++c) {
        const auto& cell = b.cells[c];
        int v = cell.base, e = cell.edge;
        int w = b.vertical(v, e);
        int total = count(b.vertical_edge_id(v, e)) + count(b.horizontal_edge_id(v)) + count(b.horizontal_edge_id(w));
        int at = b.up(v);
        for (int f : phi.image(e).edges) {
            int next = b.vertical(at, f);
            total += forward(f) ? count(b.vertical_edge_id(at, f)) : count(b.vertical_edge_id(next, inv(f)));
            at = next;
        }
        ++r.cells;
        if (total % 2) r.odd_cells.push_back(c);
    }
    return r;
}

// Knockouts: components of the trace once the root pieces (just below each nucleus-carrying level) are cut.
inline std::vector<int> knockouts(const WallTrace& t, int* count = nullptr) {
    int P = static_cast<int>(t.pieces.size());
    std::vector<int> parent(P);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    auto is_root = [&](int k) { return t.pieces[k].kind == Piece::tunnel && t.pieces[k].depth == 0; };
    for (auto [x, y] : t.links)
        if (!is_root(x) && !is_root(y)) parent[root(x)] = root(y);
    std::map<int, int> ids;
    std::vector<int> out(P, -1);
    for (int k = 0; k < P; ++k)
        if (!is_root(k)) out[k] = ids.emplace(root(k), static_cast<int>(ids.size())).first->second;
    if (count) *count = static_cast<int>(ids.size());
    return out;
}

// ---------------------------------------------------------------------------
// Approximation: the trace pushed forward by L - 1/2. Nucleus pieces become edge intervals L levels up,
// tunnels become the forward path of length L from the point below their root.

struct ApproxEdge {
    int a = 0, b = 0;
    double length = 0;
    bool midsegment = false;
};

struct Approximation {
    std::vector<BallPoint> nodes;  // normalized, sorted
    std::vector<ApproxEdge> edges;
    bool clipped = false;
    int cycle_edges = 0;

    bool acyclic() const { return cycle_edges == 0; }
    int find(const BallPoint& p) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), p);
        return it != nodes.end() && *it == p ? static_cast<int>(it - nodes.begin()) : -1;
    }
};

struct BallInterval {
    VertexKey v;
    int edge;  // forward
    Rational lo, hi;
};

inline std::vector<BallInterval> flow_ball_intervals(const GraphMap& phi, const std::vector<BallInterval>& in) {
    std::vector<BallInterval> out;
    for (const auto& iv : in) {
        const auto& im = phi.image(iv.edge).edges;
        long k = static_cast<long>(im.size());
        Rational a = iv.lo * k, b = iv.hi * k;
        VertexKey at = move_up(phi, iv.v);
        for (long j = 0; j < k; ++j) {
            VertexKey next = move_vertical(at, im[j]);
            if (Rational(j + 1) > a && Rational(j) < b) {
                Rational lo = std::max(a, Rational(j)) - j, hi = std::min(b, Rational(j + 1)) - j;
                if (forward(im[j]))
                    out.push_back({at, im[j], lo, hi});
                else
                    out.push_back({next, inv(im[j]), 1 - hi, 1 - lo});
            }
            at = next;
        }
    }
    return out;
}

inline Approximation approximate(const GraphMap& phi, const ImmersedWall& w, const BallComplex& b,
                                 const WallTrace& t, const std::vector<double>& weights) {
    const EFlat& f = w.eflat;
    Approximation A;
    std::map<std::pair<VertexKey, int>, std::vector<std::pair<Rational, Rational>>> cover;
    std::set<std::pair<BallPoint, BallPoint>> mids;
    std::set<std::pair<int, BallPoint>> roots;
    auto on_ball_edge = [&](const VertexKey& v, int e) {
        int x = b.find(v);
        return x >= 0 && b.vertical_edge_id(x, e) >= 0;
    };
    auto point_ok = [&](const BallPoint& p) {
        BallPoint q = normalize(p);
        return q.is_vertex() ? b.contains(q.v) : on_ball_edge(q.v, q.edge);
    };
    for (const auto& p : t.pieces) {
        if (p.kind == Piece::segment) {
            const auto& seg = f.segments[p.index];
            std::vector<BallInterval> cur{{p.point.v, seg.edge, seg.x0, seg.x1}};
            for (int i = 0; i < w.L; ++i) cur = flow_ball_intervals(phi, cur);
            for (const auto& iv : cur) {
                if (!on_ball_edge(iv.v, iv.edge)) {
                    A.clipped = true;
                    continue;
                }
                cover[{iv.v, iv.edge}].push_back({iv.lo, iv.hi});
            }
        } else if (p.kind == Piece::tunnel) {
            roots.insert({p.index, detail::flow_n(phi, p.point, p.depth)});
        }
    }
    for (const auto& [c, r] : roots) {
        BallPoint x = r;
        for (int i = 0; i < w.L; ++i) {
            BallPoint y = flow_step(phi, x).point;
            if (point_ok(x) && point_ok(y))
                mids.insert({normalize(x), normalize(y)});
            else
                A.clipped = true;
            x = y;
        }
    }
    // Nodes: interval ends, midsegment ends, and every point where a midsegment meets a covered edge.
    std::set<BallPoint> pts;
    std::map<std::pair<VertexKey, int>, std::set<Rational>> cuts;
    auto add_point = [&](const BallPoint& p) {
        BallPoint q = normalize(p);
        pts.insert(q);
        if (!q.is_vertex()) cuts[{q.v, q.edge}].insert(q.s);
    };
    for (auto& [key, ivs] : cover)
        for (auto& [lo, hi] : ivs) {
            add_point({key.first, key.second, lo});
            add_point({key.first, key.second, hi});
        }
    for (auto& [x, y] : mids) {
        add_point(x);
        add_point(y);
    }
    A.nodes.assign(pts.begin(), pts.end());
    std::set<std::pair<int, int>> seen;
    auto add_edge = [&](const BallPoint& x, const BallPoint& y, double len, bool mid) {
        int a = A.find(normalize(x)), c = A.find(normalize(y));
        if (a == c) return;
        if (!seen.insert({std::min(a, c), std::max(a, c)}).second) return;
        A.edges.push_back({std::min(a, c), std::max(a, c), len, mid});
    };
    for (auto& [key, ivs] : cover) {
        std::sort(ivs.begin(), ivs.end());
        const auto& cs = cuts[key];
        double om = weights[undirected(key.second)];
        for (auto& [lo, hi] : ivs) {
            Rational prev = lo;
            for (auto it = cs.upper_bound(lo); it != cs.end() && *it <= hi; ++it) {
                add_edge({key.first, key.second, prev}, {key.first, key.second, *it}, om * to_double(*it - prev), false);
                prev = *it;
            }
        }
    }
    for (auto& [x, y] : mids) add_edge(x, y, 1.0, true);
    std::sort(A.edges.begin(), A.edges.end(), [](const ApproxEdge& x, const ApproxEdge& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    std::vector<int> parent(A.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (const auto& e : A.edges) {
        int ra = root(e.a), rb = root(e.b);
        if (ra == rb)
            ++A.cycle_edges;
        else
            parent[ra] = rb;
    }
    return A;
}

// ---------------------------------------------------------------------------
// Distortion: intrinsic distance in the approximation against distance in the ball 1-skeleton
// subdivided at approximation points and carrying the approximation's midsegments.

struct DistortionReport {
    int pairs = 0;
    double kappa1 = 1.0, kappa2 = 0.0;  // multiplicative / additive envelope
    double max_ratio = 0, max_excess = 0;
};

namespace detail {

inline std::vector<double> dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj, int s) {
    std::vector<double> d(adj.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d[v]) continue;
        for (auto [u, wt] : adj[v])
            if (dv + wt < d[u]) {
                d[u] = dv + wt;
                pq.push({d[u], u});
            }
    }
    return d;
}

}  // namespace detail

inline DistortionReport distortion_report(const Approximation& A, const BallComplex& b,
                                          const std::vector<double>& weights, int N, std::uint64_t seed = 1) {
    DistortionReport rep;
    if (N <= 0 || A.nodes.empty()) return rep;
    int n = static_cast<int>(A.nodes.size());
    std::vector<std::vector<std::pair<int, double>>> ga(n);
    for (const auto& e : A.edges) {
        ga[e.a].push_back({e.b, e.length});
        ga[e.b].push_back({e.a, e.length});
    }
    // Augmented ball graph: ball vertices, then approximation points interior to edges.
    int V = b.num_vertices();
    std::vector<int> aug_of(n, -1);
    std::vector<std::vector<std::pair<int, double>>> gx(V);
    for (int v = 0; v < V; ++v) gx[v] = b.neighbours(v);
    std::map<std::pair<int, int>, std::vector<std::pair<Rational, int>>> on_edge;
    for (int k = 0; k < n; ++k) {
        const BallPoint& p = A.nodes[k];
        int v = b.find(p.v);
        if (v < 0) continue;
        if (p.is_vertex()) {
            aug_of[k] = v;
        } else if (b.vertical(v, p.edge) >= 0) {
            aug_of[k] = static_cast<int>(gx.size());
            gx.emplace_back();
            on_edge[{v, p.edge}].push_back({p.s, aug_of[k]});
        }
    }
    for (auto& [key, list] : on_edge) {
        std::sort(list.begin(), list.end());
        double om = weights[undirected(key.second)];
        int prev = key.first;
        Rational at = 0;
        for (auto& [s, id] : list) {
            double wt = om * to_double(s - at);
            gx[prev].push_back({id, wt});
            gx[id].push_back({prev, wt});
            prev = id;
            at = s;
        }
        int end = b.vertical(key.first, key.second);
        double wt = om * to_double(1 - at);
        gx[prev].push_back({end, wt});
        gx[end].push_back({prev, wt});
    }
    for (const auto& e : A.edges)
        if (e.midsegment && aug_of[e.a] >= 0 && aug_of[e.b] >= 0) {
            gx[aug_of[e.a]].push_back({aug_of[e.b], 1.0});
            gx[aug_of[e.b]].push_back({aug_of[e.a], 1.0});
        }
    std::vector<int> deep;
    for (int k = 0; k < n; ++k) {
        int v = b.find(A.nodes[k].v);
        if (aug_of[k] >= 0 && v >= 0 && b.dist[v] <= b.radius / 2) deep.push_back(k);
    }
    if (deep.size() < 2) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, deep.size() - 1);
    std::map<int, std::vector<double>> da_cache, dx_cache;
    for (int t = 0; t < N; ++t) {
        int x = deep[pick(rng)], y = deep[pick(rng)];
        if (x == y) continue;
        if (!da_cache.count(x)) da_cache[x] = detail::dijkstra(ga, x);
        if (!dx_cache.count(x)) dx_cache[x] = detail::dijkstra(gx, aug_of[x]);
        double da = da_cache[x][y], dx = dx_cache[x][aug_of[y]];
        if (!std::isfinite(da) || !std::isfinite(dx) || dx <= 0) continue;
        ++rep.pairs;
        rep.max_ratio = std::max(rep.max_ratio, da / dx);
        rep.max_excess = std::max(rep.max_excess, da - dx);
    }
    rep.kappa1 = std::max(1.0, rep.max_ratio);
    rep.kappa2 = std::max(0.0, rep.max_excess);
    return rep;
}

}  // namespace fbc
