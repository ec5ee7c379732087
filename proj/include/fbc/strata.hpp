#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "filtration.hpp"
#include "graph_map.hpp"

namespace fbc {

using Matrix = std::vector<std::vector<long long>>;

enum class StratumKind { zero, polynomial, exponential };

inline const char* kind_name(StratumKind k) {
    switch (k) {
        case StratumKind::zero: return "zero";
        case StratumKind::polynomial: return "polynomial";
        default: return "exponential";
    }
}

struct PFData {
    StratumKind kind = StratumKind::zero;
    double lambda = 0.0;  // 0 for zero strata
    std::vector<double> omega;
    int iterations = 0;
};

struct Stratum {
    int index = 0;
    std::vector<int> edges;  // forward ids, sorted by name
    Matrix matrix;
    StratumKind kind = StratumKind::zero;
    double lambda = 0.0;
    std::vector<double> omega;  // aligned with edges

    double weight(int e) const {
        for (std::size_t k = 0; k < edges.size(); ++k)
            if (undirected(edges[k]) == undirected(e)) return omega[k];
        throw DomainError("edge is not in stratum " + std::to_string(index));
    }
    bool contains(int e) const {
        for (int f : edges)
            if (undirected(f) == undirected(e)) return true;
        return false;
    }
};

struct FiltrationNotMaximal : DomainError {
    FiltrationNotMaximal()
        : DomainError("filtration not maximal: reducible nonzero transition matrix (use compute_maximal_filtration)") {}
};

inline std::vector<int> sorted_by_name(const Graph& g, std::vector<int> es) {
    std::sort(es.begin(), es.end(), [&](int x, int y) { return g.name(x) < g.name(y); });
    return es;
}

inline Matrix transition_matrix(const GraphMap& phi, const Filtration& f, int i) {
    const Graph& g = phi.graph();
    auto es = sorted_by_name(g, f.stratum(i));
    Matrix m(es.size(), std::vector<long long>(es.size(), 0));
    for (std::size_t j = 0; j < es.size(); ++j)
        for (int x : phi.image(es[j]).edges)
            for (std::size_t k = 0; k < es.size(); ++k)
                if (undirected(x) == undirected(es[k])) ++m[j][k];
    return m;
}

// Tarjan on an adjacency list; components come out in reverse topological order.
inline std::vector<std::vector<int>> strong_components(const std::vector<std::vector<int>>& adj) {
    int n = static_cast<int>(adj.size()), counter = 0;
    std::vector<int> idx(n, -1), low(n, 0), stack;
    std::vector<bool> on(n, false);
    std::vector<std::vector<int>> comps;
    std::function<void(int)> dfs = [&](int v) {
        idx[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (int w : adj[v]) {
            if (idx[w] < 0) {
                dfs(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], idx[w]);
            }
        }
        if (low[v] == idx[v]) {
            std::vector<int> c;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = false;
                c.push_back(w);
            } while (w != v);
            std::sort(c.begin(), c.end());
            comps.push_back(c);
        }
    };
    for (int v = 0; v < n; ++v)
        if (idx[v] < 0) dfs(v);
    return comps;
}

inline bool support_irreducible(const Matrix& m) {
    std::vector<std::vector<int>> adj(m.size());
    for (std::size_t j = 0; j < m.size(); ++j)
        for (std::size_t k = 0; k < m.size(); ++k)
            if (m[j][k] > 0) adj[j].push_back(static_cast<int>(k));
    return strong_components(adj).size() == 1;
}

// Strata ordered so that every edge's image lies in its own or earlier strata;
// ties between independent components broken by least edge name.
inline Filtration compute_maximal_filtration(const GraphMap& phi) {
    const Graph& g = phi.graph();
    int n = g.num_edges();
    std::vector<std::vector<int>> adj(n);
    for (int j = 0; j < n; ++j) {
        for (int x : phi.image(2 * j).edges) adj[j].push_back(undirected(x));
        std::sort(adj[j].begin(), adj[j].end());
        adj[j].erase(std::unique(adj[j].begin(), adj[j].end()), adj[j].end());
    }
    auto comps = strong_components(adj);
    std::vector<int> comp_of(n);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (int v : comps[c]) comp_of[v] = static_cast<int>(c);
    auto min_name = [&](int c) {
        std::string best;
        for (int v : comps[c])
            if (best.empty() || g.name(2 * v) < best) best = g.name(2 * v);
        return best;
    };
    // Kahn's algorithm on the condensation, dependencies first.
    int C = static_cast<int>(comps.size());
    std::vector<std::set<int>> deps(C);
    for (int j = 0; j < n; ++j)
        for (int k : adj[j])
            if (comp_of[k] != comp_of[j]) deps[comp_of[j]].insert(comp_of[k]);
    std::vector<bool> placed(C, false);
    Filtration f;
    for (int round = 0; round < C; ++round) {
        int pick = -1;
        for (int c = 0; c < C; ++c) {
            if (placed[c]) continue;
            bool ready = std::all_of(deps[c].begin(), deps[c].end(), [&](int d) { return placed[d]; });
            if (ready && (pick < 0 || min_name(c) < min_name(pick))) pick = c;
        }
        placed[pick] = true;
        std::vector<int> es;
        for (int v : comps[pick]) es.push_back(2 * v);
        f.strata.push_back(sorted_by_name(g, es));
    }
    return f;
}

inline PFData classify_stratum(const Matrix& m) {
    std::size_t n = m.size();
    for (auto& row : m)
        if (row.size() != n) throw DomainError("transition matrix must be square");
    PFData out;
    bool zero = true;
    for (auto& row : m)
        for (long long x : row) {
            if (x < 0) throw DomainError("transition matrix must be nonnegative");
            if (x) zero = false;
        }
    if (zero) {
        out.kind = StratumKind::zero;
        out.omega.assign(n, 1.0);
        return out;
    }
    if (!support_irreducible(m)) throw FiltrationNotMaximal();

    // Irreducible with all row sums 1 is a cyclic permutation: PF value exactly 1.
    bool perm = std::all_of(m.begin(), m.end(), [](const std::vector<long long>& row) {
        long long s = 0;
        for (long long x : row) s += x;
        return s == 1;
    });
    if (perm) {
        out.kind = StratumKind::polynomial;
        out.lambda = 1.0;
        out.omega.assign(n, 1.0);
        return out;
    }

    // Power iteration on M + I, which is primitive whenever M is irreducible.
    std::vector<double> v(n, 1.0), w(n);
    double mu = 0.0;
    for (int it = 1; it <= 10000; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = v[j];
            for (std::size_t k = 0; k < n; ++k) s += static_cast<double>(m[j][k]) * v[k];
            w[j] = s;
        }
        double norm = *std::max_element(w.begin(), w.end());
        for (auto& x : w) x /= norm;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) delta = std::max(delta, std::abs(w[j] - v[j]));
        bool done = std::abs(norm - mu) <= 1e-12 * norm && delta <= 1e-12;
        mu = norm;
        v = w;
        out.iterations = it;
        if (done) break;
    }
    // Rayleigh-style estimate from the converged vector.
    double num = 0, den = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < n; ++k) s += static_cast<double>(m[j][k]) * v[k];
        num += s * v[j];
        den += v[j] * v[j];
    }
    out.lambda = num / den;
    out.kind = out.lambda > 1.0 ? StratumKind::exponential : StratumKind::polynomial;
    double lo = *std::min_element(v.begin(), v.end());
    for (auto& x : v) x /= lo;
    out.omega = v;
    return out;
}

inline std::vector<Stratum> analyze_strata(const GraphMap& phi, const Filtration& f) {
    std::vector<Stratum> out;
    for (int i = 1; i <= f.height(); ++i) {
        Stratum s;
        s.index = i;
        s.edges = sorted_by_name(phi.graph(), f.stratum(i));
        s.matrix = transition_matrix(phi, f, i);
        PFData pf = classify_stratum(s.matrix);
        s.kind = pf.kind;
        s.lambda = pf.lambda;
        s.omega = pf.omega;
        out.push_back(s);
    }
    return out;
}

// Per-edge weights omega_e (indexed by forward edge number) for the ball metric.
inline std::vector<double> edge_weights(const Graph& g, const std::vector<Stratum>& strata) {
    std::vector<double> w(g.num_edges(), 1.0);
    for (auto& s : strata)
        for (std::size_t k = 0; k < s.edges.size(); ++k) w[undirected(s.edges[k])] = s.omega[k];
    return w;
}

inline bool filtration_invariant(const GraphMap& phi, const Filtration& f, int* bad_level = nullptr, int* bad_edge = nullptr) {
    for (int i = 1; i <= f.height(); ++i)
        for (int k = 1; k <= i; ++k)
            for (int e : f.stratum(k))
                for (int x : phi.image(e).edges)
                    if (!f.in_level(x, i)) {
                        if (bad_level) *bad_level = i;
                        if (bad_edge) *bad_edge = e;
                        return false;
                    }
    return true;
}

}  // namespace fbc
