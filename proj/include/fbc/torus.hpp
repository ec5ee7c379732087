#pragma once

#include <string>
#include <vector>

#include "graph_map.hpp"

namespace fbc {

// A letter of a 2-cell boundary: vertical (an oriented edge of V) or horizontal t_v^{+-1}.
struct CellLetter {
    bool horizontal = false;
    int id = 0;     // oriented edge id, or vertex id for t
    int sign = 1;   // only meaningful for horizontal letters

    bool operator==(const CellLetter&) const = default;
};

struct TwoCell {
    int edge = 0;               // forward edge id of V
    std::vector<int> top;       // phi^L(e), unreduced
    std::vector<CellLetter> boundary;
};

struct MappingTorusComplex {
    int power = 1;
    int num_vertices = 0;       // 0-cells
    int num_vertical = 0;       // vertical 1-cells
    int num_horizontal = 0;     // t_v, one per 0-cell
    std::vector<int> t_target;  // t_v runs from v to phi^L(v)
    std::vector<TwoCell> cells;

    int euler_characteristic() const {
        return num_vertices - (num_vertical + num_horizontal) + static_cast<int>(cells.size());
    }
};

inline MappingTorusComplex build_torus_L(const GraphMap& phi, int L) {
    if (L < 1) throw DomainError("build_torus_L: L must be at least 1");
    const Graph& g = phi.graph();
    MappingTorusComplex x;
    x.power = L;
    x.num_vertices = g.num_vertices();
    x.num_vertical = g.num_edges();
    x.num_horizontal = g.num_vertices();
    for (int v = 0; v < g.num_vertices(); ++v) {
        int w = v;
        for (int i = 0; i < L; ++i) w = phi.vertex_image(w);
        x.t_target.push_back(w);
    }
    for (int j = 0; j < g.num_edges(); ++j) {
        int e = 2 * j;
        TwoCell c;
        c.edge = e;
        c.top = iterate_unreduced(phi, e, L).edges;
        c.boundary.push_back({true, g.src(e), -1});
        c.boundary.push_back({false, e, 1});
        c.boundary.push_back({true, g.dst(e), 1});
        for (auto it = c.top.rbegin(); it != c.top.rend(); ++it) c.boundary.push_back({false, inv(*it), 1});
        x.cells.push_back(c);
    }
    return x;
}

inline MappingTorusComplex build_torus(const GraphMap& phi) { return build_torus_L(phi, 1); }

// Walks a boundary word in the 1-skeleton; true when it closes up.
inline bool boundary_closed(const GraphMap& phi, const MappingTorusComplex& x, const TwoCell& c) {
    const Graph& g = phi.graph();
    int at = x.t_target[g.src(c.edge)];
    int start = at;
    for (auto& l : c.boundary) {
        if (l.horizontal) {
            int from = l.sign > 0 ? l.id : x.t_target[l.id];
            int to = l.sign > 0 ? x.t_target[l.id] : l.id;
            if (from != at) return false;
            at = to;
        } else {
            if (g.src(l.id) != at) return false;
            at = g.dst(l.id);
        }
    }
    return at == start;
}

inline std::string format_boundary(const Graph& g, const TwoCell& c) {
    std::string s;
    for (auto& l : c.boundary) {
        if (!s.empty()) s += ' ';
        if (l.horizontal) s += (l.sign > 0 ? "t" : "T");
        else s += g.name(l.id);
    }
    return s;
}

// ---------------------------------------------------------------------------
// G = F x|_Phi Z on a rose: elements u t^n with t f t^{-1} = Phi(f).

using Word = std::vector<int>;

inline Word reduce_word(const Word& w) {
    Word out;
    for (int x : w) append_reduced(out, x);
    return out;
}

inline Word inverse_word(const Word& w) {
    Word out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inv(*it));
    return out;
}

inline Word mul_words(const Word& a, const Word& b) {
    Word out = a;
    for (int x : b) append_reduced(out, x);
    return out;
}

inline void require_rose(const GraphMap& phi, const char* what) {
    if (!phi.graph().is_rose()) throw DomainError(std::string(what) + " needs a rose");
}

// Phi^n(w), tight; negative n uses the loaded inverse.
inline Word phi_power(const GraphMap& phi, Word w, long n) {
    EdgePath p{0, std::move(w)};
    if (n >= 0) {
        for (long i = 0; i < n; ++i) p = apply_tight(phi, p);
    } else {
        if (!phi.has_inverse()) throw InverseRequired();
        for (long i = 0; i < -n; ++i) p = apply_inverse_tight(phi, p);
    }
    return p.edges;
}

struct GroupElement {
    Word u;
    long n = 0;

    bool operator==(const GroupElement&) const = default;
    auto operator<=>(const GroupElement&) const = default;
};

inline GroupElement multiply(const GraphMap& phi, const GroupElement& x, const GroupElement& y) {
    return {mul_words(x.u, phi_power(phi, y.u, x.n)), x.n + y.n};
}

inline GroupElement group_inverse(const GraphMap& phi, const GroupElement& x) {
    return {phi_power(phi, inverse_word(x.u), -x.n), -x.n};
}

inline std::string format_element(const Graph& g, const GroupElement& x) {
    std::string s = "(" + format_letters(g, x.u) + ", " + std::to_string(x.n) + ")";
    return s;
}

// Group words: generator names, uppercase inverses, and t / T / t^-1 / t⁻¹.
inline GroupElement normal_form(const GraphMap& phi, const std::string& word) {
    require_rose(phi, "normal_form");
    const Graph& g = phi.graph();
    if (g.has_edge_name("t") || g.has_edge_name("T"))
        throw DomainError("normal_form: an edge named t clashes with the stable letter");
    std::vector<std::string> tokens;
    bool spaced = std::any_of(word.begin(), word.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    static const std::vector<std::string> t_inv = {"t^-1", "t⁻¹"};
    std::size_t i = 0;
    while (i < word.size()) {
        if (std::isspace(static_cast<unsigned char>(word[i]))) {
            ++i;
            continue;
        }
        std::string tok;
        for (auto& ti : t_inv)
            if (word.compare(i, ti.size(), ti) == 0) tok = "T";
        if (!tok.empty()) {
            i += (word.compare(i, 4, "t^-1") == 0) ? 4 : std::string("t⁻¹").size();
        } else if (word[i] == 't' || word[i] == 'T') {
            tok = std::string(1, word[i]);
            ++i;
        } else {
            std::size_t best = 0;
            for (auto& [n, e] : g.name_table())
                if (n.size() > best && word.compare(i, n.size(), n) == 0 &&
                    (!spaced || i + n.size() == word.size() || std::isspace(static_cast<unsigned char>(word[i + n.size()])) ||
                     word.compare(i + n.size(), 1, "^") == 0))
                    best = n.size();
            if (!best) throw StructuralError("cannot parse group word '" + word + "' at offset " + std::to_string(i));
            tok = word.substr(i, best);
            i += best;
            for (auto& suffix : {std::string("^-1"), std::string("⁻¹")})
                if (word.compare(i, suffix.size(), suffix) == 0) {
                    tok = g.name(inv(g.edge_by_name(tok)));
                    i += suffix.size();
                    break;
                }
        }
        tokens.push_back(tok);
    }
    GroupElement acc;
    for (auto& tok : tokens) {
        GroupElement y;
        if (tok == "t") y.n = 1;
        else if (tok == "T") y.n = -1;
        else y.u = {g.edge_by_name(tok)};
        acc = multiply(phi, acc, y);
    }
    return acc;
}

}  // namespace fbc
