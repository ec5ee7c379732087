#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "filtration.hpp"
#include "graph.hpp"

namespace fbc {

class GraphMap {
public:
    GraphMap(Graph g, std::vector<int> vertex_map, std::vector<EdgePath> edge_images)
        : g_(std::move(g)), vmap_(std::move(vertex_map)), img_(std::move(edge_images)) {
        if (static_cast<int>(vmap_.size()) != g_.num_vertices())
            throw StructuralError("vertex map must cover every vertex");
        if (static_cast<int>(img_.size()) != g_.num_edges())
            throw StructuralError("edge map must cover every edge");
        for (int j = 0; j < g_.num_edges(); ++j) {
            const EdgePath& p = img_[j];
            int e = 2 * j;
            if (p.empty()) throw StructuralError("image of " + g_.name(e) + " is empty");
            check_path(g_, p);
            if (p.start != vmap_[g_.src(e)] || path_end(g_, p) != vmap_[g_.dst(e)])
                throw StructuralError("image of " + g_.name(e) + " has wrong endpoints");
        }
        for (std::size_t j = 0; j < img_.size(); ++j) inv_img_.push_back(fbc::inverse(g_, img_[j]));
    }

    const Graph& graph() const { return g_; }
    int vertex_image(int v) const { return vmap_.at(v); }
    const std::vector<int>& vertex_map() const { return vmap_; }

    const EdgePath& image(int e) const {
        return forward(e) ? img_.at(undirected(e)) : inv_img_.at(undirected(e));
    }

    // Optional pi_1 inverse (roses only): images of the forward generators.
    void set_inverse(std::vector<EdgePath> inv_images);
    bool has_inverse() const { return inverse_.has_value(); }
    const EdgePath& inverse_image(int e) const {
        if (!inverse_) throw InverseRequired();
        return forward(e) ? (*inverse_)[undirected(e)] : (*inverse_inv_)[undirected(e)];
    }

private:
    Graph g_;
    std::vector<int> vmap_;
    std::vector<EdgePath> img_, inv_img_;
    std::optional<std::vector<EdgePath>> inverse_, inverse_inv_;
};

inline EdgePath apply_map(const GraphMap& phi, const EdgePath& p) {
    const Graph& g = phi.graph();
    check_path(g, p);
    EdgePath q{phi.vertex_image(p.start), {}};
    for (int e : p.edges) {
        const auto& im = phi.image(e).edges;
        q.edges.insert(q.edges.end(), im.begin(), im.end());
    }
    return q;
}

// Substitute then reduce, letter by letter, so intermediate words never blow up.
inline EdgePath apply_tight(const GraphMap& phi, const EdgePath& p) {
    EdgePath q{phi.vertex_image(p.start), {}};
    for (int e : p.edges)
        for (int f : phi.image(e).edges) append_reduced(q.edges, f);
    return q;
}

inline EdgePath iterate_tight(const GraphMap& phi, const EdgePath& p, int n) {
    if (n < 0) throw DomainError("iterate_tight: negative exponent");
    EdgePath q = tighten(phi.graph(), p);
    for (int i = 0; i < n; ++i) q = apply_tight(phi, q);
    return q;
}

// Unreduced n-fold substitution of a single oriented edge.
inline EdgePath iterate_unreduced(const GraphMap& phi, int e, int n) {
    EdgePath q{phi.graph().src(e), {e}};
    for (int i = 0; i < n; ++i) q = apply_map(phi, q);
    return q;
}

inline EdgePath apply_inverse_tight(const GraphMap& phi, const EdgePath& p) {
    if (!phi.graph().is_rose()) throw DomainError("inverse map is supported on roses only");
    EdgePath q{0, {}};
    for (int e : p.edges)
        for (int f : phi.inverse_image(e).edges) append_reduced(q.edges, f);
    return q;
}

inline void GraphMap::set_inverse(std::vector<EdgePath> inv_images) {
    if (!g_.is_rose()) throw DomainError("inverse_map is supported on roses only");
    if (static_cast<int>(inv_images.size()) != g_.num_edges())
        throw StructuralError("inverse map must cover every edge");
    std::vector<EdgePath> ii;
    for (auto& p : inv_images) {
        check_path(g_, p);
        ii.push_back(fbc::inverse(g_, p));
    }
    inverse_ = std::move(inv_images);
    inverse_inv_ = std::move(ii);
    for (int j = 0; j < g_.num_edges(); ++j) {
        EdgePath x{0, {2 * j}};
        if (apply_tight(*this, apply_inverse_tight(*this, x)) != x ||
            apply_inverse_tight(*this, apply_tight(*this, x)) != x) {
            inverse_.reset();
            inverse_inv_.reset();
            throw StructuralError("inverse_map is not inverse to edge_map at generator " + g_.name(2 * j));
        }
    }
}

using Direction = int;
using Turn = std::pair<Direction, Direction>;

inline Turn make_turn(Direction a, Direction b) { return a < b ? Turn{a, b} : Turn{b, a}; }

inline std::vector<Direction> direction_map(const GraphMap& phi) {
    std::vector<Direction> d(phi.graph().num_oriented());
    for (int e = 0; e < phi.graph().num_oriented(); ++e) d[e] = phi.image(e).edges.front();
    return d;
}

// First common direction of the D-orbits of a and b, if they ever meet.
inline std::optional<Direction> turn_collision(const std::vector<Direction>& D, Direction a, Direction b) {
    std::set<std::pair<Direction, Direction>> seen;
    while (a != b) {
        if (!seen.insert({a, b}).second) return std::nullopt;
        a = D[a];
        b = D[b];
    }
    return a;
}

inline std::set<Turn> illegal_turns(const GraphMap& phi) {
    const Graph& g = phi.graph();
    auto D = direction_map(phi);
    std::set<Turn> out;
    for (int a = 0; a < g.num_oriented(); ++a)
        for (int b = a + 1; b < g.num_oriented(); ++b)
            if (g.src(a) == g.src(b) && turn_collision(D, a, b)) out.insert({a, b});
    return out;
}

// Turns taken at the interior vertices of p.
inline std::vector<Turn> turns_taken(const EdgePath& p) {
    std::vector<Turn> t;
    for (std::size_t i = 1; i < p.edges.size(); ++i) t.push_back(make_turn(inv(p.edges[i - 1]), p.edges[i]));
    return t;
}

inline bool path_legal(const GraphMap& phi, const EdgePath& p) {
    auto D = direction_map(phi);
    for (auto [a, b] : turns_taken(p))
        if (turn_collision(D, a, b)) return false;
    return true;
}

// i-legal: collisions are tolerated when the colliding edge lies in V^{i-1}.
inline bool path_legal(const GraphMap& phi, const EdgePath& p, const Filtration& f, int i) {
    if (i < 1 || i > f.height()) throw DomainError("filtration index out of range: " + std::to_string(i));
    auto D = direction_map(phi);
    for (auto [a, b] : turns_taken(p)) {
        auto c = turn_collision(D, a, b);
        if (c && !f.in_level(*c, i - 1)) return false;
    }
    return true;
}

}  // namespace fbc
