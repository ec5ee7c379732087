#pragma once

#include <cstdint>
#include <optional>

#include "trace.hpp"

namespace fbc {

// delta is supplied by the user; nothing here estimates it.
struct CuttingConfig {
    double delta = 1.0;
    std::optional<int> M;  // nullopt: infinite threshold
    int N = 1;
    double xi = 0.0;

    double kappa() const { return 2 * delta + xi; }
    void validate() const {
        if (delta < 0 || xi < 0 || N < 0 || (M && *M < 0)) throw DomainError("CuttingConfig: negative parameter");
    }
};

// Ball edge joining two adjacent vertices, or -1.
inline int edge_between(const GraphMap& phi, const BallComplex& b, int u, int w) {
    if (u < 0 || w < 0) return -1;
    if (b.up(u) == w) return b.horizontal_edge_id(u);
    if (b.down(u) == w) return b.horizontal_edge_id(w);
    for (int e = 0; e < phi.graph().num_oriented(); ++e)
        if (b.vertical(u, e) == w) return forward(e) ? b.vertical_edge_id(u, e) : b.vertical_edge_id(w, inv(e));
    return -1;
}

inline void require_path(const GraphMap& phi, const BallComplex& b, const std::vector<int>& path, const char* who) {
    if (path.empty()) throw DomainError(std::string(who) + ": empty path");
    for (int v : path)
        if (v < 0 || v >= b.num_vertices()) throw DomainError(std::string(who) + ": vertex outside the ball");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (edge_between(phi, b, path[i], path[i + 1]) < 0)
            throw DomainError(std::string(who) + ": vertices not adjacent at step " + std::to_string(i));
}

inline int crossings_on(const WallTrace& t, int edge) {
    auto it = t.crossings.find(edge);
    return it == t.crossings.end() ? 0 : it->second;
}

// Paths run through ball vertices and the wall never meets a vertex,
// so every contact with the trace is a transverse crossing of an edge interior.
struct Crossing {
    int count = 0;
    bool odd() const { return count % 2 != 0; }
};

inline Crossing crossing_parity(const GraphMap& phi, const BallComplex& b, const std::vector<int>& path,
                                const WallTrace& t) {
    require_path(phi, b, path, "crossing_parity");
    Crossing c;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        c.count += crossings_on(t, edge_between(phi, b, path[i], path[i + 1]));
    return c;
}

struct SideAssignment {
    std::vector<int> cls;    // class per ball vertex; classes numbered by their least vertex
    int classes = 0;
    bool consistent = true;  // no odd edge has both ends in one class
    int odd_edges = 0;

    bool two_sided() const { return classes == 2; }
    // 0 = left (the class of the least vertex), 1 = right.
    int side(int v) const { return cls.at(v); }
};

// Classes of the graph obtained by deleting the edges flagged odd.
inline SideAssignment side_assignment_from_parity(const BallComplex& b, const std::vector<bool>& odd) {
    int n = b.num_vertices();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (std::size_t id = 0; id < b.edges.size(); ++id)
        if (!odd[id]) {
            int x = root(b.edges[id].from), y = root(b.edges[id].to);
            if (x != y) parent[std::max(x, y)] = std::min(x, y);
        }
    SideAssignment s;
    s.cls.assign(n, -1);
    std::map<int, int> number;
    for (int v = 0; v < n; ++v) {  // vertices are sorted, so first appearance is the least vertex
        auto [it, fresh] = number.emplace(root(v), s.classes);
        if (fresh) ++s.classes;
        s.cls[v] = it->second;
    }
    for (std::size_t id = 0; id < b.edges.size(); ++id)
        if (odd[id]) {
            ++s.odd_edges;
            if (s.cls[b.edges[id].from] == s.cls[b.edges[id].to]) s.consistent = false;
        }
    return s;
}

inline SideAssignment side_assignment(const BallComplex& b, const WallTrace& t) {
    if (t.pieces.empty()) throw DomainError("side_assignment: empty trace");
    std::vector<bool> odd(b.edges.size(), false);
    for (auto [id, c] : t.crossings) odd[id] = c % 2 != 0;
    return side_assignment_from_parity(b, odd);
}

// A halfspace given directly by membership; used for synthetic wallspaces.
inline SideAssignment halfspace(const BallComplex& b, const std::function<bool(int)>& inside) {
    SideAssignment s;
    int n = b.num_vertices();
    s.cls.assign(n, 0);
    if (n == 0) return s;
    bool first = inside(0);
    for (int v = 0; v < n; ++v) s.cls[v] = inside(v) == first ? 0 : 1;
    s.classes = *std::max_element(s.cls.begin(), s.cls.end()) + 1;
    return s;
}

// Ball-scale stand-in for separation at infinity.
inline bool cut_check(const SideAssignment& s, int x, int y) {
    if (!s.two_sided()) throw DomainError("cut_check: side assignment has " + std::to_string(s.classes) + " classes");
    return s.side(x) != s.side(y);
}

inline bool is_embedded(const std::vector<int>& path) {
    std::set<int> seen(path.begin(), path.end());
    return seen.size() == path.size();
}

// Chronological loop erasure.
inline std::vector<int> loop_erase(const std::vector<int>& path) {
    std::vector<int> out;
    std::map<int, std::size_t> at;
    for (int v : path) {
        auto it = at.find(v);
        if (it != at.end()) {
            for (std::size_t k = it->second + 1; k < out.size(); ++k) at.erase(out[k]);
            out.resize(it->second + 1);
            continue;
        }
        at[v] = out.size();
        out.push_back(v);
    }
    return out;
}

inline std::vector<int> push_crop(const GraphMap& phi, const BallComplex& b, const std::vector<int>& path, int p) {
    require_path(phi, b, path, "push_crop");
    if (p < 0) throw DomainError("push_crop: negative depth");
    if (!is_embedded(path)) throw DomainError("push_crop: path not embedded");
    if (p == 0) return path;
    auto lift = [&](const VertexKey& k) {
        int v = b.find(k);
        if (v < 0) throw DomainError("push_crop: flow exits the ball");
        return v;
    };
    auto up = [&](VertexKey k) {
        for (int i = 0; i < p; ++i) k = move_up(phi, k);
        return k;
    };
    std::vector<int> image{lift(up(b.keys[path[0]]))};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const VertexKey& from = b.keys[path[i]];
        const VertexKey& to = b.keys[path[i + 1]];
        if (from.h != to.h) {
            image.push_back(lift(up(to)));
            continue;
        }
        Word letter = mul_words(inverse_word(from.w), to.w);
        VertexKey at = up(from);
        for (int f : phi_power(phi, letter, p)) {
            at = move_vertical(at, f);
            image.push_back(lift(at));
        }
    }
    return loop_erase(image);
}

// Longest run of a forward path staying within kappa of the path, over seeds near the path.
struct Deviation {
    int fellow_travel = 0;
    int witness = -1;  // seed vertex of the best forward path
    bool leaflike = false;
};

inline Deviation deviation_classify(const GraphMap& phi, const BallComplex& b, const std::vector<int>& path,
                                    const CuttingConfig& cfg) {
    require_path(phi, b, path, "deviation_classify");
    cfg.validate();
    int n = b.num_vertices();
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int v : path) {
        d[v] = 0;
        pq.push({0.0, v});
    }
    while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d[v]) continue;
        for (auto [w, wt] : b.neighbours(v))
            if (dv + wt < d[w]) {
                d[w] = dv + wt;
                pq.push({d[w], w});
            }
    }
    const double eps = 1e-12, k = cfg.kappa();
    Deviation r;
    for (int s = 0; s < n; ++s) {
        if (d[s] > k + eps) continue;
        int len = 0;
        for (int v = b.up(s); v >= 0 && d[v] <= k + eps; v = b.up(v)) ++len;
        if (len > r.fellow_travel || r.witness < 0) {
            r.fellow_travel = len;
            r.witness = s;
        }
    }
    r.leaflike = cfg.M && r.fellow_travel >= *cfg.M;
    return r;
}

// Lifted augmentation. A point of the cover of X_L is written (y, r): y a point at a level in LZ and
// 0 <= r < L, standing for the slice at time r above y; it lies over the point flow_r(y).
struct LiftedPoint {
    BallPoint y;
    int r = 0;
    bool operator==(const LiftedPoint&) const = default;
};

struct LiftStep {
    enum Kind { edge, backtrack };
    Kind kind = edge;
    LiftedPoint from, to;
    int apex = -1;   // backtrack: ball vertex at the next multiple of L
    int length = 0;  // backtrack: height climbed
};

struct LiftedAugmentation {
    std::vector<LiftStep> steps;
    int backtracks = 0;
    std::vector<int> projected;  // the path in X: the input with each backtrack spliced in
};

namespace detail {

inline long floor_div(long a, long L) { return a >= 0 ? a / L : -((-a + L - 1) / L); }

inline BallPoint flow_points(const GraphMap& phi, BallPoint p, int n) {
    for (int i = 0; i < n; ++i) p = flow_step(phi, p).point;
    return normalize(p);
}

// Occurrences of a forward vertical edge under r backward flow steps, as affine maps of its parameter.
struct Occurrence {
    VertexKey v;
    int edge = 0;
    Rational a = 1, c = 0;  // parameter t on the top edge sits at a t + c
};

inline std::vector<Occurrence> occurrences(const GraphMap& phi, const Occurrence& top, int r) {
    std::vector<Occurrence> cur{top};
    const Graph& g = phi.graph();
    for (int step = 0; step < r; ++step) {
        std::vector<Occurrence> next;
        for (const auto& o : cur)
            for (int f : g.edges_by_name()) {
                const auto& im = phi.image(f).edges;
                long k = static_cast<long>(im.size());
                Word prefix;
                for (long j = 0; j < k; ++j) {
                    Word through = mul_words(prefix, {im[j]});
                    if (im[j] == o.edge)
                        next.push_back({{o.v.h - 1, phi_power(phi, mul_words(o.v.w, inverse_word(prefix)), -1)}, f,
                                        o.a / k, (Rational(j) + o.c) / k});
                    else if (im[j] == inv(o.edge))
                        next.push_back({{o.v.h - 1, phi_power(phi, mul_words(o.v.w, inverse_word(through)), -1)}, f,
                                        -o.a / k, (Rational(j + 1) - o.c) / k});
                    prefix = through;
                }
            }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace detail

inline LiftedAugmentation lifted_augmentation(const GraphMap& phi, const BallComplex& b, const std::vector<int>& path,
                                              int L) {
    require_path(phi, b, path, "lifted_augmentation");
    if (L < 1) throw DomainError("lifted_augmentation: L must be positive");
    auto need = [&](const VertexKey& k) {
        int v = b.find(k);
        if (v < 0) throw DomainError("lifted_augmentation: ball too small");
        return v;
    };
    auto down = [&](VertexKey k, long n) {
        for (long i = 0; i < n; ++i) k = move_down(phi, k);
        return k;
    };
    auto canonical = [&](int v) {
        const VertexKey& k = b.keys[v];
        int r = static_cast<int>(k.h - detail::floor_div(k.h, L) * L);
        return LiftedPoint{{down(k, r), -1, 0}, r};
    };

    LiftedAugmentation out;
    out.projected.push_back(path[0]);
    auto splice = [&](int x, const LiftedPoint& from, const LiftedPoint& to) {
        if (from == to) return;
        BallPoint a = detail::flow_points(phi, from.y, L), c = detail::flow_points(phi, to.y, L);
        if (!(a == c) || !a.is_vertex()) throw StructuralError("lifted_augmentation: lifts do not share an apex");
        LiftStep s{LiftStep::backtrack, from, to, need(a.v), L - from.r};
        out.steps.push_back(s);
        ++out.backtracks;
        std::vector<int> climb{x};
        for (int i = 0; i < s.length; ++i) climb.push_back(b.up(climb.back()));
        if (climb.back() != s.apex) throw DomainError("lifted_augmentation: ball too small");
        for (std::size_t i = 1; i < climb.size(); ++i) out.projected.push_back(climb[i]);
        for (std::size_t i = climb.size() - 1; i-- > 0;) out.projected.push_back(climb[i]);
    };

    LiftedPoint cur = canonical(path[0]);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        int x = path[i], z = path[i + 1];
        const VertexKey &kx = b.keys[x], &kz = b.keys[z];
        LiftedPoint next;
        if (kz.h == kx.h + 1) {
            next = {cur.y, cur.r + 1};
            if (next.r == L) next = {{kz, -1, 0}, 0};
        } else if (kz.h == kx.h - 1) {
            if (cur.r == 0) {
                next = {{down(kz, L - 1), -1, 0}, L - 1};
            } else if (detail::flow_points(phi, cur.y, cur.r - 1) == BallPoint{kz, -1, 0}) {
                next = {cur.y, cur.r - 1};
            } else {
                LiftedPoint c = canonical(x);
                splice(x, cur, c);
                cur = c;
                next = {cur.y, cur.r - 1};
            }
        } else if (cur.r == 0) {
            next = {{kz, -1, 0}, 0};
        } else {
            Word letter = mul_words(inverse_word(kx.w), kz.w);
            int e = letter.at(0);
            detail::Occurrence top = forward(e) ? detail::Occurrence{kx, e, 1, 0} : detail::Occurrence{kz, inv(e), -1, 1};
            std::vector<std::pair<LiftedPoint, LiftedPoint>> cands;
            for (const auto& o : detail::occurrences(phi, top, cur.r)) {
                BallPoint s0 = normalize(ball_point(o.v, o.edge, o.c));
                BallPoint s1 = normalize(ball_point(o.v, o.edge, o.a + o.c));
                cands.push_back({{s0, cur.r}, {s1, cur.r}});
            }
            if (cands.empty()) throw StructuralError("lifted_augmentation: edge has no lift");
            std::sort(cands.begin(), cands.end(), [](const auto& p, const auto& q) {
                return std::tie(p.first.y, p.second.y) < std::tie(q.first.y, q.second.y);
            });
            auto it = std::find_if(cands.begin(), cands.end(), [&](const auto& p) { return p.first == cur; });
            if (it == cands.end()) {
                splice(x, cur, cands.front().first);
                it = cands.begin();
            }
            next = it->second;
        }
        for (const auto& q : {next.y})
            if (!point_in_ball(b, q)) throw DomainError("lifted_augmentation: ball too small");
        out.steps.push_back({LiftStep::edge, cur, next});
        out.projected.push_back(z);
        cur = next;
    }
    return out;
}

// Removes the spliced backtracks again; should return the input path.
inline std::vector<int> cancel_backtracks(const std::vector<int>& path) {
    std::vector<int> out;
    for (int v : path) {
        if (out.size() >= 2 && out[out.size() - 2] == v) {
            out.pop_back();
            continue;
        }
        out.push_back(v);
    }
    return out;
}

// Dual cube complex of finitely many halfspace systems, from the side vectors realized by ball vertices.
struct Cube {
    int base = 0;             // vertex index of the corner with all cube walls on side 0
    std::vector<int> walls;
    int dim() const { return static_cast<int>(walls.size()); }
};

struct DualCubeComplex {
    int walls = 0;
    std::vector<std::vector<int>> vertices;  // realized side vectors, sorted
    std::vector<std::pair<int, int>> edges;
    std::vector<Cube> cubes;                 // dimension >= 2
    std::vector<int> vertex_of;              // ball vertex -> complex vertex

    int count(int dim) const {
        if (dim == 0) return static_cast<int>(vertices.size());
        if (dim == 1) return static_cast<int>(edges.size());
        return static_cast<int>(std::count_if(cubes.begin(), cubes.end(), [&](const Cube& c) { return c.dim() == dim; }));
    }
    bool connected() const {
        int n = static_cast<int>(vertices.size());
        if (n == 0) return true;
        std::vector<std::vector<int>> adj(n);
        for (auto [x, y] : edges) {
            adj[x].push_back(y);
            adj[y].push_back(x);
        }
        std::vector<bool> seen(n, false);
        std::vector<int> st{0};
        seen[0] = true;
        int c = 1;
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (int y : adj[x])
                if (!seen[y]) {
                    seen[y] = true;
                    ++c;
                    st.push_back(y);
                }
        }
        return c == n;
    }
};

inline DualCubeComplex dual_cube_complex(const std::vector<SideAssignment>& sides) {
    const int W = static_cast<int>(sides.size());
    if (W > 16) throw ResourceError("dual_cube_complex: at most 16 walls");
    for (int i = 0; i < W; ++i)
        if (!sides[i].two_sided())
            throw DomainError("dual_cube_complex: wall " + std::to_string(i) + " has " +
                              std::to_string(sides[i].classes) + " classes");
    for (int i = 0; i < W; ++i)
        for (int j = i + 1; j < W; ++j) {
            if (sides[i].cls.size() != sides[j].cls.size())
                throw DomainError("dual_cube_complex: walls over different balls");
            if (sides[i].cls == sides[j].cls)
                throw DomainError("dual_cube_complex: walls " + std::to_string(i) + " and " + std::to_string(j) +
                                  " overlap");
        }
    DualCubeComplex D;
    D.walls = W;
    std::size_t n = W ? sides[0].cls.size() : 0;
    std::map<std::uint32_t, int> index;
    std::vector<std::uint32_t> mask_of(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::uint32_t m = 0;
        for (int i = 0; i < W; ++i)
            if (sides[i].cls[v]) m |= 1u << i;
        mask_of[v] = m;
        index.emplace(m, 0);
    }
    std::vector<std::uint32_t> masks;
    for (auto& [m, k] : index) masks.push_back(m);
    // Sorted lexicographically as vectors: compare bit 0 first.
    auto as_vector = [&](std::uint32_t m) {
        std::vector<int> x(W);
        for (int i = 0; i < W; ++i) x[i] = (m >> i) & 1;
        return x;
    };
    std::sort(masks.begin(), masks.end(), [&](auto x, auto y) { return as_vector(x) < as_vector(y); });
    for (std::size_t k = 0; k < masks.size(); ++k) {
        index[masks[k]] = static_cast<int>(k);
        D.vertices.push_back(as_vector(masks[k]));
    }
    for (std::size_t v = 0; v < n; ++v) D.vertex_of.push_back(index[mask_of[v]]);
    for (std::size_t k = 0; k < masks.size(); ++k)
        for (int i = 0; i < W; ++i) {
            std::uint32_t o = masks[k] ^ (1u << i);
            auto it = index.find(o);
            if (it != index.end() && static_cast<int>(k) < it->second) D.edges.push_back({static_cast<int>(k), it->second});
        }
    std::sort(D.edges.begin(), D.edges.end());
    for (std::size_t k = 0; k < masks.size(); ++k)
        for (std::uint32_t S = 1; S < (1u << W); ++S) {
            if (std::popcount(S) < 2 || (masks[k] & S)) continue;
            bool all = true;
            for (std::uint32_t T = S;; T = (T - 1) & S) {
                if (!index.count(masks[k] | T)) {
                    all = false;
                    break;
                }
                if (T == 0) break;
            }
            if (!all) continue;
            Cube c{static_cast<int>(k), {}};
            for (int i = 0; i < W; ++i)
                if (S >> i & 1) c.walls.push_back(i);
            D.cubes.push_back(c);
        }
    std::sort(D.cubes.begin(), D.cubes.end(),
              [](const Cube& x, const Cube& y) { return std::tie(x.walls, x.base) < std::tie(y.walls, y.base); });
    return D;
}

}  // namespace fbc
