#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ball.hpp"
#include "rational.hpp"
#include "strata.hpp"

namespace fbc {

// A point of V: a vertex, or an interior point s in (0,1) of a forward edge.
struct PointV {
    int vertex = -1;
    int edge = -1;
    Rational s;

    static PointV at_vertex(int v) { return {v, -1, 0}; }
    static PointV interior(int e, Rational s) {
        if (!forward(e)) return {-1, inv(e), 1 - s};
        return {-1, e, std::move(s)};
    }
    bool is_vertex() const { return edge < 0; }
    bool operator==(const PointV&) const = default;
};

inline bool operator<(const PointV& x, const PointV& y) {
    if (x.edge != y.edge) return x.edge < y.edge;
    if (x.vertex != y.vertex) return x.vertex < y.vertex;
    return x.s < y.s;
}

inline std::string format_point(const Graph& g, const PointV& p) {
    if (p.is_vertex()) return g.vertex_id(p.vertex);
    return "(" + g.name(p.edge) + "," + to_string(p.s) + ")";
}

struct FlowStep {
    PointV point;
    bool singular = false;  // landed on a vertex
};

// Vertex reached after the first j letters of the unreduced image of e.
inline int image_vertex(const GraphMap& phi, int e, std::size_t j) {
    const auto& im = phi.image(e);
    return j == 0 ? im.start : phi.graph().dst(im.edges[j - 1]);
}

inline FlowStep flow_step(const GraphMap& phi, const PointV& p) {
    if (p.is_vertex()) return {PointV::at_vertex(phi.vertex_image(p.vertex)), false};
    const auto& im = phi.image(p.edge).edges;
    Rational x = p.s * static_cast<long>(im.size());
    long j = floor_of(x).convert_to<long>();
    Rational r = x - j;
    if (r == 0) return {PointV::at_vertex(image_vertex(phi, p.edge, j)), true};
    return {PointV::interior(im[j], r), false};
}

// All (e, s) with flow_step(e, s) = p, ordered by edge name then position.
inline std::vector<PointV> preimages(const GraphMap& phi, const PointV& p) {
    if (p.is_vertex()) throw DomainError("preimages: point must be interior to an edge");
    const Graph& g = phi.graph();
    std::vector<PointV> out;
    for (int e : g.edges_by_name()) {
        const auto& im = phi.image(e).edges;
        long k = static_cast<long>(im.size());
        std::vector<PointV> here;
        for (long j = 0; j < k; ++j) {
            if (im[j] == p.edge) here.push_back({-1, e, (Rational(j) + p.s) / k});
            else if (im[j] == inv(p.edge)) here.push_back({-1, e, (Rational(j + 1) - p.s) / k});
        }
        std::sort(here.begin(), here.end());
        out.insert(out.end(), here.begin(), here.end());
    }
    return out;
}

struct TunnelNode {
    PointV point;
    int depth = 0;
    int parent = -1;
    std::vector<int> children;
};

struct Tunnel {
    int depth = 0;
    std::vector<TunnelNode> nodes;  // node 0 is the root

    std::vector<int> leaves() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].depth == depth) out.push_back(static_cast<int>(i));
        return out;
    }
};

inline Tunnel tunnel(const GraphMap& phi, const PointV& root, int L) {
    if (L < 0) throw DomainError("tunnel: negative depth");
    if (root.is_vertex()) throw DomainError("tunnel: root must be interior (regular)");
    Tunnel t;
    t.depth = L;
    t.nodes.push_back({root, 0, -1, {}});
    std::size_t level_begin = 0;
    for (int d = 1; d <= L; ++d) {
        std::size_t level_end = t.nodes.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (auto& q : preimages(phi, t.nodes[i].point)) {
                t.nodes[i].children.push_back(static_cast<int>(t.nodes.size()));
                t.nodes.push_back({q, d, static_cast<int>(i), {}});
            }
        level_begin = level_end;
    }
    return t;
}

struct PeriodicPoint {
    PointV point;
    int period = 1;
};

struct PeriodicResult {
    std::vector<PeriodicPoint> points;
    bool periodic_edge = false;  // some itinerary returns by the identity branch
};

// Affine itinerary search: each step applies s -> k s - j (or its flip) on one branch.
inline PeriodicResult periodic_points(const GraphMap& phi, int e, int m) {
    if (m < 1) throw DomainError("periodic_points: period must be positive");
    if (!forward(e)) e = inv(e);
    PeriodicResult res;
    std::vector<PointV> found;
    struct Frame {
        int edge;
        Rational alpha, beta, lo, hi;
    };
    std::function<void(const Frame&, int)> rec = [&](const Frame& f, int steps) {
        if (steps == m) {
            if (f.edge != e) return;
            if (f.alpha == 1) {
                if (f.beta == 0) res.periodic_edge = true;
                return;
            }
            Rational s = f.beta / (1 - f.alpha);
            if (s > f.lo && s < f.hi) found.push_back({-1, e, s});
            return;
        }
        const auto& im = phi.image(f.edge).edges;
        long k = static_cast<long>(im.size());
        for (long j = 0; j < k; ++j) {
            // j/k < alpha s + beta < (j+1)/k
            Rational a = (Rational(j, k) - f.beta) / f.alpha;
            Rational b = (Rational(j + 1, k) - f.beta) / f.alpha;
            if (f.alpha < 0) std::swap(a, b);
            Rational lo = std::max(a, f.lo), hi = std::min(b, f.hi);
            if (!(lo < hi)) continue;
            Frame n;
            n.lo = lo;
            n.hi = hi;
            if (forward(im[j])) {
                n.edge = im[j];
                n.alpha = f.alpha * k;
                n.beta = f.beta * k - j;
            } else {
                n.edge = inv(im[j]);
                n.alpha = -f.alpha * k;
                n.beta = 1 - (f.beta * k - j);
            }
            rec(n, steps + 1);
        }
    };
    rec({e, 1, 0, 0, 1}, 0);
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (auto& p : found) {
        int period = 0;
        PointV q = p;
        bool singular = false;
        for (int i = 1; i <= m; ++i) {
            auto st = flow_step(phi, q);
            if (st.singular) {
                singular = true;
                break;
            }
            q = st.point;
            if (q == p) {
                period = i;
                break;
            }
        }
        if (!singular && period == m) res.points.push_back({p, m});
    }
    return res;
}

// ---------------------------------------------------------------------------
// Points in a ball: `v` is the source corner of the forward vertical edge `edge`.

struct BallPoint {
    VertexKey v;
    int edge = -1;  // -1: the point is the vertex v
    Rational s;

    bool is_vertex() const { return edge < 0; }
    bool operator==(const BallPoint&) const = default;
};

inline bool operator<(const BallPoint& x, const BallPoint& y) {
    if (x.v != y.v) return x.v < y.v;
    if (x.edge != y.edge) return x.edge < y.edge;
    return x.s < y.s;
}

inline BallPoint ball_point(const VertexKey& v, int e, const Rational& s) {
    if (forward(e)) return {v, e, s};
    return {move_vertical(v, e), inv(e), 1 - s};
}

inline BallPoint normalize(const BallPoint& p) {
    if (p.is_vertex()) return p;
    if (p.s == 0) return {p.v, -1, 0};
    if (p.s == 1) return {move_vertical(p.v, p.edge), -1, 0};
    return p;
}

inline PointV project(const GraphMap&, const BallPoint& p) {
    if (p.is_vertex()) return PointV::at_vertex(0);
    return {-1, p.edge, p.s};
}

struct BallFlowStep {
    BallPoint point;
    bool singular = false;
};

inline BallFlowStep flow_step(const GraphMap& phi, const BallPoint& p) {
    VertexKey top = move_up(phi, p.v);
    if (p.is_vertex()) return {{top, -1, 0}, false};
    const auto& im = phi.image(p.edge).edges;
    Rational x = p.s * static_cast<long>(im.size());
    long j = floor_of(x).convert_to<long>();
    Rational r = x - j;
    VertexKey at = top;
    for (long i = 0; i < j; ++i) at = move_vertical(at, im[i]);
    if (r == 0) return {{at, -1, 0}, true};
    return {ball_point(at, im[j], r), false};
}

// Flow-preimages one level down, ordered by edge name then position.
inline std::vector<BallPoint> preimages(const GraphMap& phi, const BallPoint& p) {
    if (p.is_vertex()) throw DomainError("preimages: point must be interior to an edge");
    const Graph& g = phi.graph();
    std::vector<BallPoint> out;
    for (int e : g.edges_by_name()) {
        const auto& im = phi.image(e).edges;
        long k = static_cast<long>(im.size());
        Word prefix;
        std::vector<BallPoint> here;
        for (long j = 0; j < k; ++j) {
            Word through = mul_words(prefix, {im[j]});
            if (im[j] == p.edge) {
                Word w = phi_power(phi, mul_words(p.v.w, inverse_word(prefix)), -1);
                here.push_back({{p.v.h - 1, w}, e, (Rational(j) + p.s) / k});
            } else if (im[j] == inv(p.edge)) {
                Word w = phi_power(phi, mul_words(p.v.w, inverse_word(through)), -1);
                here.push_back({{p.v.h - 1, w}, e, (Rational(j + 1) - p.s) / k});
            }
            prefix = through;
        }
        std::sort(here.begin(), here.end(), [](const BallPoint& x, const BallPoint& y) { return x.s < y.s; });
        out.insert(out.end(), here.begin(), here.end());
    }
    return out;
}

inline bool point_in_ball(const BallComplex& b, const BallPoint& p) {
    int v = b.find(p.v);
    if (v < 0) return false;
    return p.is_vertex() || b.vertical_edge_id(v, p.edge) >= 0;
}

struct LeafNode {
    BallPoint point;
    int next = -1;    // node reached by the outgoing midsegment
    int level = 0;    // height relative to the base point
};

struct LeafTrace {
    std::vector<LeafNode> nodes;  // node 0 is the base point
    bool truncated = false;
    bool singular = false;
};

inline LeafTrace leaf_trace(const GraphMap& phi, const BallComplex& b, const BallPoint& p, int F, int B) {
    if (!point_in_ball(b, p)) throw DomainError("leaf_trace: base point not in ball");
    LeafTrace t;
    t.nodes.push_back({p, -1, 0});
    int cur = 0;
    for (int i = 1; i <= F; ++i) {
        auto st = flow_step(phi, t.nodes[cur].point);
        if (!point_in_ball(b, st.point)) {
            t.truncated = true;
            break;
        }
        t.singular = t.singular || st.singular;
        t.nodes.push_back({st.point, -1, i});
        t.nodes[cur].next = static_cast<int>(t.nodes.size()) - 1;
        cur = static_cast<int>(t.nodes.size()) - 1;
    }
    if (p.is_vertex()) {
        if (B > 0) t.truncated = true;  // vertex leaves branch into vertex stars; not traced
        return t;
    }
    std::vector<int> frontier{0};
    for (int d = 1; d <= B; ++d) {
        std::vector<int> next;
        for (int i : frontier)
            for (auto& q : preimages(phi, t.nodes[i].point)) {
                if (!point_in_ball(b, q)) {
                    t.truncated = true;
                    continue;
                }
                t.nodes.push_back({q, i, -d});
                next.push_back(static_cast<int>(t.nodes.size()) - 1);
            }
        frontier = next;
    }
    return t;
}

struct Intersection {
    std::vector<BallPoint> points;
    bool odd = false;
};

// sigma: consecutive points of a forward path; gamma: vertex path in the ball.
// Only points of sigma on vertical edges can meet the 1-skeleton.
inline Intersection leaf_intersections(const GraphMap& phi, const BallComplex& b, const std::vector<BallPoint>& sigma,
                                       const std::vector<int>& gamma) {
    Intersection out;
    for (std::size_t i = 0; i + 1 < gamma.size(); ++i) {
        int x = gamma[i], y = gamma[i + 1];
        for (auto& p : sigma) {
            if (p.is_vertex()) {
                if (b.find(p.v) == x || b.find(p.v) == y)
                    throw DomainError("leaf_intersections: degenerate contact at a vertex");
                continue;
            }
            int src = b.find(p.v);
            int dst = b.find(move_vertical(p.v, p.edge));
            if ((src == x && dst == y) || (src == y && dst == x)) out.points.push_back(p);
        }
    }
    (void)phi;
    for (auto& p : sigma)
        if (p.is_vertex() && (b.find(p.v) == gamma.front() || b.find(p.v) == gamma.back()))
            throw DomainError("leaf_intersections: path endpoint lies on sigma");
    out.odd = out.points.size() % 2 == 1;
    return out;
}

// ---------------------------------------------------------------------------
// R-tree pseudometric estimate for an exponential stratum.

// Invariant transverse measure: mu_e([0,s]) with mu_e([0,1]) = omega_e, so that
// phi stretches every S^i interval by exactly lambda.
class StratumMeasure {
public:
    StratumMeasure(const GraphMap& phi, const Stratum& s) : phi_(phi), s_(s) {
        if (s.kind != StratumKind::exponential) throw DomainError("stratum measure needs an exponential stratum");
        depth_ = std::min(5000, static_cast<int>(std::ceil(36.0 / std::log(s.lambda))) + 2);
    }

    double weight(int e) const { return s_.contains(e) ? s_.weight(e) : 0.0; }

    // mu of [0, s] on forward edge e.
    double cdf(int e, const Rational& s) const { return cdf_rec(e, s, depth_); }

    double point_to_src(const BallPoint& p) const { return p.is_vertex() ? 0.0 : cdf(p.edge, p.s); }
    double point_to_dst(const BallPoint& p) const { return p.is_vertex() ? 0.0 : weight(p.edge) - cdf(p.edge, p.s); }

    double word_length(const Word& w) const {
        double t = 0;
        for (int x : w) t += weight(x);
        return t;
    }

private:
    double cdf_rec(int e, const Rational& s, int depth) const {
        double we = weight(e);
        if (we == 0.0) return 0.0;
        if (depth == 0) return to_double(s) * we;
        const auto& im = phi_.image(e).edges;
        Rational x = s * static_cast<long>(im.size());
        long j = floor_of(x).convert_to<long>();
        Rational r = x - j;
        double acc = 0;
        for (long i = 0; i < j && i < static_cast<long>(im.size()); ++i) acc += weight(im[i]);
        if (r != 0) {
            int f = im[j];
            if (forward(f)) acc += cdf_rec(f, r, depth - 1);
            else acc += weight(f) - cdf_rec(inv(f), 1 - r, depth - 1);
        }
        return acc / s_.lambda;
    }

    const GraphMap& phi_;
    const Stratum& s_;
    int depth_ = 0;
};

inline double tree_distance(const StratumMeasure& mu, const BallPoint& p, const BallPoint& q) {
    if (p.v.h != q.v.h) throw DomainError("tree distance needs points at a common height");
    if (!p.is_vertex() && !q.is_vertex() && p.v == q.v && p.edge == q.edge)
        return std::abs(mu.point_to_src(p) - mu.point_to_src(q));
    auto ends = [&](const BallPoint& x) {
        std::vector<std::pair<Word, double>> out{{x.v.w, mu.point_to_src(x)}};
        if (!x.is_vertex()) out.push_back({mul_words(x.v.w, {x.edge}), mu.point_to_dst(x)});
        return out;
    };
    double best = std::numeric_limits<double>::infinity();
    for (auto& [wp, dp] : ends(p))
        for (auto& [wq, dq] : ends(q)) best = std::min(best, dp + dq + mu.word_length(mul_words(inverse_word(wp), wq)));
    return best;
}

struct RTreeEstimate {
    std::vector<double> sequence;
    double value = 0;
    double gap = 0;  // d_0 - d_N
};

inline RTreeEstimate rtree_distance_estimate(const GraphMap& phi, const Stratum& s, const BallPoint& p,
                                             const BallPoint& q, int N) {
    StratumMeasure mu(phi, s);
    RTreeEstimate r;
    BallPoint a = normalize(p), b = normalize(q);
    double scale = 1;
    for (int n = 0; n <= N; ++n) {
        r.sequence.push_back(tree_distance(mu, a, b) / scale);
        a = normalize(flow_step(phi, a).point);
        b = normalize(flow_step(phi, b).point);
        scale *= s.lambda;
    }
    r.value = r.sequence.back();
    r.gap = r.sequence.front() - r.value;
    return r;
}

}  // namespace fbc
