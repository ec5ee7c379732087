#pragma once

#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "rational.hpp"
#include "torus.hpp"

namespace fbc {

// Vertices of the universal cover are addressed level-locally: (h, w) is the
// element t^{-h} w, i.e. w is a reduced word in the level tree at height h.
// Moving up replaces w by Phi(w); moving down by Phi^{-1}(w).
struct VertexKey {
    long h = 0;
    Word w;

    bool operator==(const VertexKey&) const = default;
    auto operator<=>(const VertexKey&) const = default;
};

struct VertexKeyHash {
    std::size_t operator()(const VertexKey& k) const {
        std::size_t s = std::hash<long>()(k.h) * 0x9e3779b97f4a7c15ULL;
        for (int x : k.w) s = (s ^ static_cast<std::size_t>(x + 1)) * 0x100000001b3ULL;
        return s;
    }
};

inline VertexKey key_of(const GraphMap& phi, const GroupElement& x) {
    return {-x.n, phi_power(phi, x.u, -x.n)};
}

inline GroupElement element_of(const GraphMap& phi, const VertexKey& k) {
    return {phi_power(phi, k.w, -k.h), -k.h};
}

inline VertexKey move_vertical(const VertexKey& k, int e) { return {k.h, mul_words(k.w, {e})}; }
inline VertexKey move_up(const GraphMap& phi, const VertexKey& k) { return {k.h + 1, phi_power(phi, k.w, 1)}; }
inline VertexKey move_down(const GraphMap& phi, const VertexKey& k) { return {k.h - 1, phi_power(phi, k.w, -1)}; }

struct BallEdge {
    int from = 0, to = 0;
    bool horizontal = false;
    int label = 0;  // forward edge id (vertical) or vertex of V (horizontal)
    double weight = 1.0;
};

struct BallCell {
    int base = 0;   // vertex index of the bottom-left corner
    int edge = 0;   // forward edge id
};

struct BallOptions {
    std::size_t vertex_cap = 1000000;
    bool allow_partial = false;
};

class BallComplex {
public:
    double radius = 0;
    GroupElement base;
    VertexKey base_key;
    bool truncated = false;  // vertex cap reached with allow_partial

    std::vector<VertexKey> keys;    // sorted by (h, w)
    std::vector<double> dist;       // from base
    std::vector<BallEdge> edges;
    std::vector<BallCell> cells;

    int num_vertices() const { return static_cast<int>(keys.size()); }

    int find(const VertexKey& k) const {
        auto it = index_.find(k);
        return it == index_.end() ? -1 : it->second;
    }
    bool contains(const VertexKey& k) const { return index_.count(k) > 0; }

    // Neighbour along oriented vertical edge e, or -1.
    int vertical(int v, int e) const { return vert_[v][e]; }
    int up(int v) const { return up_[v]; }
    int down(int v) const { return down_[v]; }
    int cell_at(int v, int e) const {
        auto it = cell_index_.find({v, e});
        return it == cell_index_.end() ? -1 : it->second;
    }
    // Index into `edges` of the vertical edge (v, forward e) or horizontal edge above v.
    int vertical_edge_id(int v, int fwd) const {
        auto it = edge_index_.find({v, fwd});
        return it == edge_index_.end() ? -1 : it->second;
    }
    int horizontal_edge_id(int v) const {
        auto it = edge_index_.find({v, -1});
        return it == edge_index_.end() ? -1 : it->second;
    }

    // Adjacency over the 1-skeleton: (neighbour, weight).
    const std::vector<std::pair<int, double>>& neighbours(int v) const { return adj_[v]; }

    GroupElement label(const GraphMap& phi, int v) const { return element_of(phi, keys[v]); }

    void finalize(const GraphMap& phi, const std::vector<double>& weights);

private:
    std::unordered_map<VertexKey, int, VertexKeyHash> index_;
    std::vector<std::vector<int>> vert_;
    std::vector<int> up_, down_;
    std::map<std::pair<int, int>, int> cell_index_, edge_index_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
};

inline void BallComplex::finalize(const GraphMap& phi, const std::vector<double>& weights) {
    const Graph& g = phi.graph();
    int n = num_vertices();
    index_.clear();
    for (int v = 0; v < n; ++v) index_[keys[v]] = v;
    vert_.assign(n, std::vector<int>(g.num_oriented(), -1));
    up_.assign(n, -1);
    down_.assign(n, -1);
    adj_.assign(n, {});
    edges.clear();
    cells.clear();
    cell_index_.clear();
    edge_index_.clear();
    for (int v = 0; v < n; ++v) {
        for (int e = 0; e < g.num_oriented(); ++e) vert_[v][e] = find(move_vertical(keys[v], e));
        up_[v] = find(move_up(phi, keys[v]));
    }
    for (int v = 0; v < n; ++v)
        if (up_[v] >= 0) down_[up_[v]] = v;
    for (int v = 0; v < n; ++v) {
        for (int e = 0; e < g.num_oriented(); e += 2) {
            int w = vert_[v][e];
            if (w < 0) continue;
            edge_index_[{v, e}] = static_cast<int>(edges.size());
            edges.push_back({v, w, false, e, weights[undirected(e)]});
            adj_[v].push_back({w, weights[undirected(e)]});
            adj_[w].push_back({v, weights[undirected(e)]});
        }
        if (up_[v] >= 0) {
            edge_index_[{v, -1}] = static_cast<int>(edges.size());
            edges.push_back({v, up_[v], true, 0, 1.0});
            adj_[v].push_back({up_[v], 1.0});
            adj_[up_[v]].push_back({v, 1.0});
        }
    }
    // A 2-cell is kept only when every corner of its boundary is present.
    for (int v = 0; v < n; ++v)
        for (int e = 0; e < g.num_oriented(); e += 2) {
            int w = vert_[v][e];
            if (w < 0 || up_[v] < 0 || up_[w] < 0) continue;
            int at = up_[v];
            bool ok = true;
            for (int f : phi.image(e).edges) {
                at = vert_[at][f];
                if (at < 0) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            cell_index_[{v, e}] = static_cast<int>(cells.size());
            cells.push_back({v, e});
        }
}

inline BallComplex build_ball(const GraphMap& phi, const std::vector<double>& weights, const GroupElement& base,
                              double R, const BallOptions& opt = {}) {
    require_rose(phi, "build_ball");
    if (R < 0) throw DomainError("build_ball: negative radius");
    const Graph& g = phi.graph();
    const double eps = 1e-9;
    BallComplex b;
    b.radius = R;
    b.base = base;
    b.base_key = key_of(phi, base);

    std::unordered_map<VertexKey, double, VertexKeyHash> best;
    std::unordered_map<VertexKey, bool, VertexKeyHash> done;
    using Item = std::pair<double, VertexKey>;
    auto cmp = [](const Item& x, const Item& y) { return x.first > y.first || (x.first == y.first && y.second < x.second); };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    best[b.base_key] = 0;
    pq.push({0.0, b.base_key});
    std::vector<std::pair<VertexKey, double>> order;
    while (!pq.empty()) {
        auto [d, k] = pq.top();
        pq.pop();
        if (done[k]) continue;
        done[k] = true;
        order.push_back({k, d});
        if (order.size() > opt.vertex_cap) {
            if (!opt.allow_partial)
                throw ResourceError("build_ball: vertex cap " + std::to_string(opt.vertex_cap) + " exceeded");
            b.truncated = true;
            order.pop_back();
            break;
        }
        auto relax = [&](const VertexKey& nk, double w) {
            double nd = d + w;
            if (nd > R + eps) return;
            auto it = best.find(nk);
            if (it != best.end() && it->second <= nd) return;
            best[nk] = nd;
            pq.push({nd, nk});
        };
        for (int e = 0; e < g.num_oriented(); ++e) relax(move_vertical(k, e), weights[undirected(e)]);
        if (d + 1 <= R + eps) {
            relax(move_up(phi, k), 1.0);
            relax(move_down(phi, k), 1.0);
        }
    }
    std::sort(order.begin(), order.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (auto& [k, d] : order) {
        b.keys.push_back(k);
        b.dist.push_back(d);
    }
    b.finalize(phi, weights);
    return b;
}

struct BallPath {
    std::vector<int> vertices;
    double length = 0;
};

inline std::vector<double> ball_distances(const BallComplex& b, int src, std::vector<int>* parent = nullptr) {
    std::vector<double> d(b.num_vertices(), std::numeric_limits<double>::infinity());
    if (parent) parent->assign(b.num_vertices(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    d[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d[v]) continue;
        for (auto [w, wt] : b.neighbours(v))
            if (dv + wt < d[w]) {
                d[w] = dv + wt;
                if (parent) (*parent)[w] = v;
                pq.push({d[w], w});
            }
    }
    return d;
}

// Shortest path inside the ball; an upper bound for the ambient distance.
inline BallPath geodesic_in_ball(const BallComplex& b, int x, int y) {
    std::vector<int> parent;
    auto d = ball_distances(b, x, &parent);
    if (d[y] == std::numeric_limits<double>::infinity()) throw DomainError("geodesic_in_ball: vertices not connected");
    BallPath p;
    p.length = d[y];
    for (int v = y; v != -1; v = parent[v]) p.vertices.push_back(v);
    std::reverse(p.vertices.begin(), p.vertices.end());
    return p;
}

inline long height(const BallComplex& b, int v) { return b.keys[v].h; }

// Heights of the other cell types: vertical edges sit at their level,
// horizontal edges and 2-cells are addressed by their mid-slice.
inline Rational edge_height(const BallComplex& b, const BallEdge& e) {
    return e.horizontal ? Rational(2 * b.keys[e.from].h + 1, 2) : Rational(b.keys[e.from].h);
}
inline Rational cell_height(const BallComplex& b, const BallCell& c) { return Rational(2 * b.keys[c.base].h + 1, 2); }

}  // namespace fbc
