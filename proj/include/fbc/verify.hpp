#pragma once

#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "strata.hpp"

namespace fbc {

enum class AxiomStatus { verified, violated, unknown_up_to_bound };

inline const char* status_name(AxiomStatus s) {
    switch (s) {
        case AxiomStatus::verified: return "verified";
        case AxiomStatus::violated: return "violated";
        default: return "unknown-up-to-bound";
    }
}

struct AxiomResult {
    std::string id;
    AxiomStatus status = AxiomStatus::verified;
    std::string witness;  // set when violated
    int bound = 0;        // set when unknown-up-to-bound
    std::string note;
};

struct VerificationReport {
    std::vector<AxiomResult> axioms;

    bool ok() const {
        for (auto& a : axioms)
            if (a.status == AxiomStatus::violated) return false;
        return true;
    }
    const AxiomResult& get(const std::string& id) const {
        for (auto& a : axioms)
            if (a.id == id) return a;
        throw DomainError("no axiom " + id);
    }
};

namespace detail {

inline std::vector<Stratum> strata_of(const GraphMap& phi, const Filtration& f) { return analyze_strata(phi, f); }

// Depth-first enumeration of reduced paths with edges accepted by `allow`.
// Returns false when some path of length `bound` still had an extension, i.e. the search was cut off.
template <class Allow, class Visit>
bool enumerate_paths(const Graph& g, int start, int bound, Allow allow, Visit visit) {
    bool exhaustive = true;
    EdgePath p{start, {}};
    std::function<bool(int)> rec = [&](int at) -> bool {
        for (int e = 0; e < g.num_oriented(); ++e) {
            if (g.src(e) != at || !allow(e)) continue;
            if (!p.edges.empty() && e == inv(p.edges.back())) continue;
            if (static_cast<int>(p.edges.size()) == bound) {
                exhaustive = false;
                return true;
            }
            p.edges.push_back(e);
            bool go = visit(p);
            if (go) go = rec(g.dst(e));
            p.edges.pop_back();
            if (!go) return false;
        }
        return true;
    };
    rec(start);
    return exhaustive;
}

}  // namespace detail

inline VerificationReport verify_rtt(const GraphMap& phi, const Filtration& f, int path_bound) {
    const Graph& g = phi.graph();
    VerificationReport rep;
    auto strata = detail::strata_of(phi, f);
    auto D = direction_map(phi);

    AxiomResult c1{"rtt.1"};
    int bl = 0, be = 0;
    if (!filtration_invariant(phi, f, &bl, &be)) {
        c1.status = AxiomStatus::violated;
        c1.witness = "V^" + std::to_string(bl) + " not invariant at edge " + g.name(be);
    }
    rep.axioms.push_back(c1);

    AxiomResult c2{"rtt.2"};
    for (auto& s : strata) {
        if (s.kind != StratumKind::exponential) continue;
        for (int e : s.edges) {
            const auto& im = phi.image(e).edges;
            if (!s.contains(im.front()) || !s.contains(im.back())) {
                c2.status = AxiomStatus::violated;
                c2.witness = g.name(e);
                break;
            }
        }
        if (c2.status == AxiomStatus::violated) break;
    }
    rep.axioms.push_back(c2);

    AxiomResult c3{"rtt.3"};
    bool cut = false;
    for (auto& s : strata) {
        if (s.kind != StratumKind::exponential || s.index == 1) continue;
        int lower = s.index - 1;
        auto low_vs = f.vertices_of_level(g, lower);
        std::set<int> ends;
        for (int e : s.edges)
            for (int v : {g.src(e), g.dst(e)})
                if (low_vs.count(v)) ends.insert(v);
        for (int v : ends) {
            bool full = detail::enumerate_paths(
                g, v, path_bound, [&](int e) { return f.in_level(e, lower); },
                [&](const EdgePath& p) {
                    if (!ends.count(path_end(g, p))) return true;
                    if (iterate_tight(phi, p, 1).empty()) {
                        c3.status = AxiomStatus::violated;
                        c3.witness = format_path(g, p);
                        return false;
                    }
                    return true;
                });
            if (!full) cut = true;
            if (c3.status == AxiomStatus::violated) break;
        }
        if (c3.status == AxiomStatus::violated) break;
    }
    if (c3.status != AxiomStatus::violated && cut) {
        c3.status = AxiomStatus::unknown_up_to_bound;
        c3.bound = path_bound;
    }
    rep.axioms.push_back(c3);

    // Condition 4 reduces to turns: each phi(e) must be i-legal, and every legal
    // S^i turn must map to an i-legal turn.
    AxiomResult c4{"rtt.4"};
    auto i_legal_turn = [&](int a, int b, int i) {
        auto c = turn_collision(D, a, b);
        return !c || f.in_level(*c, i - 1);
    };
    for (auto& s : strata) {
        if (s.kind != StratumKind::exponential || c4.status == AxiomStatus::violated) continue;
        for (int e : s.edges) {
            EdgePath im = phi.image(e);
            for (auto [a, b] : turns_taken(im))
                if (!i_legal_turn(a, b, s.index)) {
                    c4.status = AxiomStatus::violated;
                    c4.witness = format_path(g, EdgePath{g.src(e), {e}});
                }
        }
        std::vector<int> dirs;
        for (int e : s.edges) {
            dirs.push_back(e);
            dirs.push_back(inv(e));
        }
        for (std::size_t x = 0; x < dirs.size(); ++x)
            for (std::size_t y = x + 1; y < dirs.size(); ++y) {
                int a = dirs[x], b = dirs[y];
                if (g.src(a) != g.src(b) || turn_collision(D, a, b)) continue;
                if (!i_legal_turn(D[a], D[b], s.index)) {
                    c4.status = AxiomStatus::violated;
                    c4.witness = format_path(g, EdgePath{g.dst(inv(a)), {inv(a), b}});
                }
            }
    }
    rep.axioms.push_back(c4);
    return rep;
}

struct NielsenPath {
    EdgePath path;
    int period = 1;
};

// Reduced paths with tighten(phi^k(P)) = P for some k <= max_iter, shortest first.
inline std::vector<NielsenPath> find_nielsen_paths(const GraphMap& phi, int max_len, int max_iter) {
    if (max_len < 1 || max_iter < 1) throw DomainError("find_nielsen_paths: bounds must be positive");
    const Graph& g = phi.graph();
    std::vector<std::vector<NielsenPath>> by_len(max_len + 1);
    for (int v = 0; v < g.num_vertices(); ++v)
        detail::enumerate_paths(
            g, v, max_len, [](int) { return true; },
            [&](const EdgePath& p) {
                EdgePath q = p;
                for (int k = 1; k <= max_iter; ++k) {
                    q = apply_tight(phi, q);
                    if (q == p) {
                        by_len[p.size()].push_back({p, k});
                        break;
                    }
                }
                return true;
            });
    std::vector<NielsenPath> out;
    for (auto& l : by_len) {
        std::sort(l.begin(), l.end(), [](const NielsenPath& x, const NielsenPath& y) { return x.path < y.path; });
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

struct ImprovedBounds {
    int nielsen_max_len = 4;
    int nielsen_max_iter = 6;
};

inline bool matrix_primitive(const Matrix& m) {
    std::size_t n = m.size();
    std::vector<std::vector<bool>> p(n, std::vector<bool>(n)), a(n, std::vector<bool>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) a[j][k] = p[j][k] = m[j][k] > 0;
    std::size_t bound = (n - 1) * (n - 1) + 1;
    for (std::size_t pow = 1; pow <= bound; ++pow) {
        bool all = true;
        for (auto& row : p)
            for (bool x : row) all = all && x;
        if (all) return true;
        std::vector<std::vector<bool>> q(n, std::vector<bool>(n, false));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l)
                if (p[j][l])
                    for (std::size_t k = 0; k < n; ++k)
                        if (a[l][k]) q[j][k] = true;
        p = q;
    }
    return false;
}

inline VerificationReport verify_improved(const GraphMap& phi, const Filtration& f, const ImprovedBounds& bounds = {}) {
    const Graph& g = phi.graph();
    VerificationReport rep;
    auto strata = detail::strata_of(phi, f);
    int h = f.height();

    AxiomResult c1{"irtt.1"};
    for (auto& s : strata)
        if (s.kind == StratumKind::zero &&
            (s.index == h || strata[s.index].kind != StratumKind::exponential)) {
            c1.status = AxiomStatus::violated;
            c1.witness = "S^" + std::to_string(s.index);
            break;
        }
    rep.axioms.push_back(c1);

    // Zero strata must be exactly the union of the tree components of V^i.
    AxiomResult c2{"irtt.2"};
    for (auto& s : strata) {
        if (s.kind != StratumKind::zero) continue;
        int i = s.index;
        std::vector<int> parent(g.num_vertices());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        std::vector<int> lvl;
        for (int j = 0; j < g.num_edges(); ++j)
            if (f.in_level(2 * j, i)) lvl.push_back(2 * j);
        for (int e : lvl) parent[find(g.src(e))] = find(g.dst(e));
        std::map<int, int> nv, ne;
        for (int v : f.vertices_of_level(g, i)) ++nv[find(v)];
        for (int e : lvl) ++ne[find(g.src(e))];
        std::set<int> tree_edges;
        for (int e : lvl)
            if (ne[find(g.src(e))] == nv[find(g.src(e))] - 1) tree_edges.insert(e);
        std::set<int> zs(s.edges.begin(), s.edges.end());
        if (tree_edges != zs) {
            c2.status = AxiomStatus::violated;
            c2.witness = "S^" + std::to_string(i);
            break;
        }
    }
    rep.axioms.push_back(c2);

    AxiomResult c3{"irtt.3"};
    std::vector<std::string> periodic_edges;
    for (auto& s : strata) {
        if (s.kind != StratumKind::polynomial) continue;
        std::string who = "S^" + std::to_string(s.index);
        if (s.edges.size() != 1) {
            c3.status = AxiomStatus::violated;
            c3.witness = who + " has more than one edge";
            break;
        }
        int e = s.edges[0];
        const auto& im = phi.image(e).edges;
        EdgePath tail{g.dst(e), std::vector<int>(im.begin() + 1, im.end())};
        bool ok = im.front() == e && phi.vertex_image(g.dst(e)) == g.dst(e) && path_end(g, tail) == g.dst(e);
        for (int x : tail.edges) ok = ok && f.in_level(x, s.index - 1);
        if (!ok) {
            c3.status = AxiomStatus::violated;
            c3.witness = g.name(e);
            break;
        }
        if (tail.empty()) periodic_edges.push_back(g.name(e));
    }
    if (!periodic_edges.empty()) {
        c3.note = "periodic edges:";
        for (auto& n : periodic_edges) c3.note += " " + n;
    }
    rep.axioms.push_back(c3);

    AxiomResult c4{"irtt.4"};
    c4.note = "eg-aperiodic read as primitivity of each exponential transition matrix";
    for (auto& s : strata)
        if (s.kind == StratumKind::exponential && !matrix_primitive(s.matrix)) {
            c4.status = AxiomStatus::violated;
            c4.witness = "S^" + std::to_string(s.index);
            break;
        }
    rep.axioms.push_back(c4);

    AxiomResult c5{"irtt.5"};
    for (auto& np : find_nielsen_paths(phi, bounds.nielsen_max_len, bounds.nielsen_max_iter))
        if (np.period > 1) {
            c5.status = AxiomStatus::violated;
            c5.witness = format_path(g, np.path) + " has period " + std::to_string(np.period);
            break;
        }
    if (c5.status != AxiomStatus::violated) {
        c5.status = AxiomStatus::unknown_up_to_bound;
        c5.bound = bounds.nielsen_max_len;
        c5.note = "iterations <= " + std::to_string(bounds.nielsen_max_iter);
    }
    rep.axioms.push_back(c5);
    return rep;
}

inline std::vector<double> edge_weight_limit_check(const GraphMap& phi, const Stratum& s, int e, int n) {
    if (s.kind != StratumKind::exponential) throw DomainError("edge_weight_limit_check needs an exponential stratum");
    if (!s.contains(e)) throw DomainError("edge " + phi.graph().name(e) + " is not in stratum " + std::to_string(s.index));
    std::vector<double> out;
    EdgePath p{phi.graph().src(e), {e}};
    for (int m = 0; m <= n; ++m) {
        double len = 0;
        for (int x : p.edges)
            if (s.contains(x)) len += s.weight(x);
        out.push_back(len / std::pow(s.lambda, m));
        p = apply_tight(phi, p);
    }
    return out;
}

struct SplitPoint {
    int position = 0;  // cut between letters position-1 and position
    bool persistent = false;
};

struct SplitResult {
    EdgePath path;  // tighten(phi^{n0}(P))
    std::vector<SplitPoint> points;
};

inline SplitResult split_path(const GraphMap& phi, const EdgePath& p, int bound, int n0 = 0) {
    const Graph& g = phi.graph();
    SplitResult r;
    r.path = iterate_tight(phi, p, n0);
    const auto& q = r.path.edges;
    for (std::size_t j = 1; j < q.size(); ++j) {
        EdgePath a{r.path.start, std::vector<int>(q.begin(), q.begin() + j)};
        EdgePath b{g.dst(q[j - 1]), std::vector<int>(q.begin() + j, q.end())};
        bool keep = true;
        for (int n = 1; n <= bound && keep; ++n) {
            a = apply_tight(phi, a);
            b = apply_tight(phi, b);
            if (!a.empty() && !b.empty() && a.edges.back() == inv(b.edges.front())) keep = false;
        }
        r.points.push_back({static_cast<int>(j), keep});
    }
    return r;
}

struct AtoroidalWitness {
    std::vector<int> word;  // cyclically reduced, least rotation
    int power = 1;
};

struct AtoroidalResult {
    std::optional<AtoroidalWitness> periodic;  // Phi^k(w) conjugate to w
    std::optional<AtoroidalWitness> inverted;  // Phi^k(w) conjugate to w^-1
    int word_bound = 0, iter_bound = 0;
};

inline std::vector<int> cyclic_reduce(std::vector<int> w) {
    std::size_t i = 0, j = w.size();
    while (j - i >= 2 && w[i] == inv(w[j - 1])) {
        ++i;
        --j;
    }
    return std::vector<int>(w.begin() + i, w.begin() + j);
}

inline bool is_rotation(const std::vector<int>& x, const std::vector<int>& y) {
    if (x.size() != y.size()) return false;
    if (x.empty()) return true;
    std::vector<int> xx = x;
    xx.insert(xx.end(), x.begin(), x.end());
    return std::search(xx.begin(), xx.end(), y.begin(), y.end()) != xx.end();
}

inline AtoroidalResult atoroidal_heuristic(const GraphMap& phi, int word_bound, int iter_bound) {
    const Graph& g = phi.graph();
    if (!g.is_rose()) throw DomainError("atoroidal_heuristic needs a rose (pi_1 marking)");
    if (word_bound < 1 || iter_bound < 1) throw DomainError("atoroidal_heuristic: bounds must be positive");
    AtoroidalResult res{std::nullopt, std::nullopt, word_bound, iter_bound};
    int n = g.num_oriented();
    // Letters ordered a < A < b < B < ...
    std::vector<int> order;
    for (int e : g.edges_by_name()) {
        order.push_back(e);
        order.push_back(inv(e));
    }
    for (int len = 1; len <= word_bound; ++len) {
        std::vector<int> digits(len, 0);
        while (true) {
            std::vector<int> w(len);
            for (int i = 0; i < len; ++i) w[i] = order[digits[i]];
            bool ok = is_reduced(EdgePath{0, w}) && (len == 1 || w.front() != inv(w.back()));
            if (ok) {
                std::vector<int> rank(len);
                for (int i = 0; i < len; ++i) rank[i] = digits[i];
                for (int r = 1; r < len && ok; ++r) {
                    std::vector<int> rot(rank.begin() + r, rank.end());
                    rot.insert(rot.end(), rank.begin(), rank.begin() + r);
                    if (rot < rank) ok = false;
                }
            }
            if (ok) {
                EdgePath p{0, w};
                EdgePath winv = inverse(g, p);
                for (int k = 1; k <= iter_bound; ++k) {
                    p = apply_tight(phi, p);
                    auto c = cyclic_reduce(p.edges);
                    if (!res.periodic && is_rotation(c, w)) res.periodic = AtoroidalWitness{w, k};
                    if (!res.inverted && is_rotation(c, winv.edges)) res.inverted = AtoroidalWitness{w, k};
                }
                if (res.periodic && res.inverted) return res;
            }
            int i = len - 1;
            while (i >= 0 && ++digits[i] == n) digits[i--] = 0;
            if (i < 0) break;
        }
    }
    return res;
}

}  // namespace fbc
