#pragma once

#include <map>
#include <numeric>
#include <set>

#include "flow.hpp"

namespace fbc {

// ---------------------------------------------------------------------------
// Busts

struct BustCandidates {
    std::vector<PointV> points;
    std::vector<int> periods;
    long lcm = 1;
};

// One periodic interior point per exponential edge: smallest period, then smallest position.
inline BustCandidates canonical_busts(const GraphMap& phi, const std::vector<Stratum>& strata, int max_period = 8) {
    const Graph& g = phi.graph();
    BustCandidates out;
    std::vector<int> exp_edges;
    for (const auto& s : strata)
        if (s.kind == StratumKind::exponential) exp_edges.insert(exp_edges.end(), s.edges.begin(), s.edges.end());
    exp_edges = sorted_by_name(g, exp_edges);
    for (int e : exp_edges) {
        bool found = false;
        for (int m = 1; m <= max_period && !found; ++m) {
            auto r = periodic_points(phi, e, m);
            if (r.points.empty()) continue;
            out.points.push_back(r.points.front().point);
            out.periods.push_back(m);
            out.lcm = std::lcm(out.lcm, static_cast<long>(m));
            found = true;
        }
        if (!found)
            throw DomainError("canonical_busts: no periodic regular point in edge " + g.name(e) + " up to period " +
                              std::to_string(max_period));
    }
    return out;
}

struct BustSet {
    int L = 1;
    std::vector<PointV> primary;
    std::vector<bool> periodic;               // phi^L(d_i) == d_i
    std::vector<Tunnel> tunnels;              // depth-L tunnel rooted at d_i
    std::vector<std::vector<PointV>> secondary;  // leaves of tunnels[i], sorted

    int size() const { return static_cast<int>(primary.size()); }
};

inline BustSet make_busts(const GraphMap& phi, const std::vector<PointV>& primary, int L) {
    if (L < 1) throw DomainError("busts: tunnel length must be at least 1");
    const Graph& g = phi.graph();
    BustSet b;
    b.L = L;
    b.primary = primary;
    std::vector<std::vector<PointV>> orbits;
    for (const auto& d : primary) {
        if (d.is_vertex() || d.s <= 0 || d.s >= 1) throw DomainError("busts: primary bust must be interior");
        std::vector<PointV> orbit{d};
        for (int n = 0; n < L; ++n) {
            auto st = flow_step(phi, orbit.back());
            if (st.singular)
                throw DomainError("busts: " + format_point(g, d) + " is not regular, step " + std::to_string(n + 1) +
                                  " hits vertex " + g.vertex_id(st.point.vertex));
            orbit.push_back(st.point);
        }
        b.periodic.push_back(orbit.back() == d);
        orbits.push_back(orbit);
        b.tunnels.push_back(tunnel(phi, d, L));
        std::vector<PointV> sec;
        for (int n : b.tunnels.back().leaves()) sec.push_back(b.tunnels.back().nodes[n].point);
        std::sort(sec.begin(), sec.end());
        b.secondary.push_back(sec);
    }
    for (std::size_t i = 0; i < orbits.size(); ++i)
        for (std::size_t j = i + 1; j < orbits.size(); ++j)
            for (int n = 0; n <= L; ++n)
                if (orbits[i][n] == orbits[j][n])
                    throw DomainError("busts: forward orbits of " + format_point(g, primary[i]) + " and " +
                                      format_point(g, primary[j]) + " meet after " + std::to_string(n) + " steps");
    return b;
}

inline std::vector<PointV> secondary_busts(const GraphMap& phi, const std::vector<PointV>& primary, int L) {
    BustSet b = make_busts(phi, primary, L);
    std::vector<PointV> out;
    for (const auto& s : b.secondary) out.insert(out.end(), s.begin(), s.end());
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// E-flat: E cut open at the busts.

struct BustPoint {
    PointV p;
    int primary = -1;       // i when p = d_i
    int secondary_of = -1;  // i when p is a leaf of the tunnel at d_i
    int leaf = -1;          // that leaf's node index
};

enum class Side { left, right };  // left: the end of the piece before the bust; right: after it

struct Segment {
    int edge = 0;  // forward
    Rational x0, x1;
    int lo = -1, hi = -1;  // bust at x0 / x1, -1 for a vertex of E
};

struct Nucleus {
    std::vector<int> segments;
    std::vector<int> vertices;
    int extra = -1;  // primary index for an extra vertex
};

struct EFlat {
    std::vector<BustPoint> busts;
    std::vector<Segment> segments;
    std::vector<Nucleus> nuclei;
    std::vector<int> segment_nucleus, vertex_nucleus;
    std::map<int, int> extra_nucleus;  // primary -> nucleus of its extra vertex
    std::map<std::pair<int, int>, int> end_segment;  // (bust, side) -> segment

    int bust_at(const PointV& p) const {
        for (std::size_t i = 0; i < busts.size(); ++i)
            if (busts[i].p == p) return static_cast<int>(i);
        return -1;
    }
};

inline EFlat build_eflat(const Graph& g, const std::vector<BustPoint>& busts, const std::vector<int>& extras = {}) {
    EFlat f;
    f.busts = busts;
    std::set<PointV> seen;
    for (const auto& b : busts) {
        if (b.p.is_vertex() || b.p.s <= 0 || b.p.s >= 1) throw DomainError("build_eflat: bust must be interior");
        if (!seen.insert(b.p).second) throw DomainError("build_eflat: coinciding busts at " + format_point(g, b.p));
    }
    std::vector<std::vector<int>> on(g.num_edges());
    for (std::size_t i = 0; i < busts.size(); ++i) on[undirected(busts[i].p.edge)].push_back(static_cast<int>(i));
    for (int j = 0; j < g.num_edges(); ++j) {
        auto& l = on[j];
        std::sort(l.begin(), l.end(), [&](int x, int y) { return busts[x].p.s < busts[y].p.s; });
        Rational at = 0;
        int lo = -1;
        for (std::size_t k = 0; k <= l.size(); ++k) {
            int hi = k < l.size() ? l[k] : -1;
            Rational to = hi >= 0 ? busts[hi].p.s : Rational(1);
            int id = static_cast<int>(f.segments.size());
            f.segments.push_back({2 * j, at, to, lo, hi});
            if (lo >= 0) f.end_segment[{lo, static_cast<int>(Side::right)}] = id;
            if (hi >= 0) f.end_segment[{hi, static_cast<int>(Side::left)}] = id;
            at = to;
            lo = hi;
        }
    }
    int S = static_cast<int>(f.segments.size()), V = g.num_vertices();
    std::vector<int> parent(S + V);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    auto join = [&](int x, int y) { parent[root(x)] = root(y); };
    for (int s = 0; s < S; ++s) {
        const auto& seg = f.segments[s];
        if (seg.lo < 0) join(s, S + g.src(seg.edge));
        if (seg.hi < 0) join(s, S + g.dst(seg.edge));
    }
    std::map<int, int> comp;
    f.segment_nucleus.assign(S, -1);
    f.vertex_nucleus.assign(V, -1);
    auto nucleus_of = [&](int x) {
        int r = root(x);
        auto it = comp.find(r);
        if (it != comp.end()) return it->second;
        int id = static_cast<int>(f.nuclei.size());
        f.nuclei.push_back({});
        comp[r] = id;
        return id;
    };
    for (int v = 0; v < V; ++v) {
        int n = nucleus_of(S + v);
        f.vertex_nucleus[v] = n;
        f.nuclei[n].vertices.push_back(v);
    }
    for (int s = 0; s < S; ++s) {
        int n = nucleus_of(s);
        f.segment_nucleus[s] = n;
        f.nuclei[n].segments.push_back(s);
    }
    for (int i : extras) {
        f.extra_nucleus[i] = static_cast<int>(f.nuclei.size());
        f.nuclei.push_back({{}, {}, i});
    }
    return f;
}

// ---------------------------------------------------------------------------
// Immersed wall

struct Attach {
    bool extra = false;
    int bust = -1;  // end vertex (bust, side) unless extra
    Side side = Side::left;
    int primary = -1;  // extra vertex index
};

struct ImmersedWall {
    int L = 1;
    BustSet busts;
    EFlat eflat;
    std::vector<int> primary_bust;  // d_i -> index into eflat.busts
    // Tunnel copies: 2i is the left copy at d_i, 2i + 1 the right copy.
    std::vector<Attach> root_attach;
    std::vector<std::map<int, Attach>> leaf_attach;  // leaf node -> attachment
    std::map<std::pair<int, int>, std::pair<int, int>> end_attach;  // (bust, side) -> (copy, node; 0 is the root)
    std::vector<bool> deleted;
    std::vector<int> nucleus_component, tunnel_component;
    int num_components = 0;
    bool degenerate = false;  // no busts: the wall is E itself

    int num_tunnels() const { return static_cast<int>(root_attach.size()); }
    const Tunnel& tree(int copy) const { return busts.tunnels[copy / 2]; }
    int nucleus_of_end(int bust, Side side) const {
        return eflat.segment_nucleus[eflat.end_segment.at({bust, static_cast<int>(side)})];
    }
    int nucleus_of(const Attach& a) const {
        return a.extra ? eflat.extra_nucleus.at(a.primary) : nucleus_of_end(a.bust, a.side);
    }
};

inline ImmersedWall build_immersed_wall(const GraphMap& phi, const BustSet& busts) {
    const Graph& g = phi.graph();
    ImmersedWall w;
    w.L = busts.L;
    w.busts = busts;
    int r = busts.size();
    std::map<PointV, BustPoint> pts;
    std::vector<int> extras;
    for (int i = 0; i < r; ++i) {
        auto& bp = pts[busts.primary[i]];
        if (bp.primary >= 0) throw DomainError("build_immersed_wall: repeated primary bust");
        bp.p = busts.primary[i];
        bp.primary = i;
        if (busts.periodic[i]) extras.push_back(i);
    }
    for (int i = 0; i < r; ++i)
        for (int n : busts.tunnels[i].leaves()) {
            const PointV& p = busts.tunnels[i].nodes[n].point;
            auto& bp = pts[p];
            bp.p = p;
            if (bp.secondary_of >= 0 || (bp.primary >= 0 && bp.primary != i))
                throw DomainError("build_immersed_wall: busts of distinct primaries coincide at " + format_point(g, p));
            bp.secondary_of = i;
            bp.leaf = n;
        }
    std::vector<BustPoint> list;
    for (auto& [p, bp] : pts) list.push_back(bp);
    w.eflat = build_eflat(g, list, extras);
    w.degenerate = r == 0;
    w.primary_bust.resize(r);
    for (int i = 0; i < r; ++i) w.primary_bust[i] = w.eflat.bust_at(busts.primary[i]);

    auto end = [](int b, Side s) { return Attach{false, b, s, -1}; };
    auto extra = [](int i) { return Attach{true, -1, Side::left, i}; };
    for (int i = 0; i < r; ++i) {
        const Tunnel& t = busts.tunnels[i];
        int self = w.primary_bust[i];
        for (int c = 0; c < 2; ++c) {
            bool right = c == 1;
            bool periodic_right = right && busts.periodic[i];
            w.root_attach.push_back(periodic_right ? extra(i) : end(self, right ? Side::right : Side::left));
            std::map<int, Attach> leaves;
            for (int n : t.leaves()) {
                int b = w.eflat.bust_at(t.nodes[n].point);
                if (periodic_right && b == self)
                    leaves[n] = extra(i);
                else
                    leaves[n] = end(b, right ? Side::left : Side::right);
            }
            w.leaf_attach.push_back(leaves);
        }
    }
    int T = w.num_tunnels();
    w.deleted.assign(T, false);
    auto claim = [&](const Attach& a, int copy, int node) {
        if (a.extra) return;
        auto key = std::make_pair(a.bust, static_cast<int>(a.side));
        if (!w.end_attach.emplace(key, std::make_pair(copy, node)).second)
            throw StructuralError("build_immersed_wall: end vertex attached twice");
    };
    for (int c = 0; c < T; ++c) {
        claim(w.root_attach[c], c, 0);
        for (auto& [n, a] : w.leaf_attach[c]) claim(a, c, n);
    }
    if (w.end_attach.size() != 2 * w.eflat.busts.size())
        throw StructuralError("build_immersed_wall: some end vertex has no tunnel");

    int N = static_cast<int>(w.eflat.nuclei.size());
    std::vector<int> parent(N + T);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (int c = 0; c < T; ++c) {
        parent[root(N + c)] = root(w.nucleus_of(w.root_attach[c]));
        for (auto& [n, a] : w.leaf_attach[c]) parent[root(N + c)] = root(w.nucleus_of(a));
    }
    std::map<int, int> comp;
    auto id = [&](int x) { return comp.emplace(root(x), static_cast<int>(comp.size())).first->second; };
    for (int n = 0; n < N; ++n) w.nucleus_component.push_back(id(n));
    for (int c = 0; c < T; ++c) w.tunnel_component.push_back(id(N + c));
    w.num_components = static_cast<int>(comp.size());
    return w;
}

inline ImmersedWall build_immersed_wall(const GraphMap& phi, const std::vector<PointV>& primary, int L) {
    return build_immersed_wall(phi, make_busts(phi, primary, L));
}

inline ImmersedWall delete_tunnel(ImmersedWall w, int copy) {
    w.deleted.at(copy) = true;
    return w;
}

// ---------------------------------------------------------------------------
// Each primary bust against each vertex (and extra targets): separated when a secondary bust other
// than d_i itself cuts every path in E between them.

struct SeparationReport {
    std::vector<std::vector<bool>> separated;  // primary x (vertices then extra targets)
    bool all = true;
    std::optional<std::pair<int, int>> first_failure;
};

inline SeparationReport bust_separation_check(const GraphMap& phi, const BustSet& busts,
                                              const std::vector<PointV>& extra_targets = {}) {
    const Graph& g = phi.graph();
    SeparationReport rep;
    for (int i = 0; i < busts.size(); ++i) {
        std::vector<BustPoint> cuts;
        for (int j = 0; j < busts.size(); ++j)
            for (const auto& p : busts.secondary[j])
                if (p != busts.primary[i]) cuts.push_back({p});
        cuts.push_back({busts.primary[i]});
        EFlat f = build_eflat(g, cuts);
        int b = f.bust_at(busts.primary[i]);
        int home = f.segment_nucleus[f.end_segment.at({b, 0})];
        std::vector<bool> row;
        for (int v = 0; v < g.num_vertices(); ++v) row.push_back(f.vertex_nucleus[v] != home);
        for (const auto& t : extra_targets) {
            if (t.is_vertex()) {
                row.push_back(f.vertex_nucleus[t.vertex] != home);
                continue;
            }
            bool sep = true;
            for (int s = 0; s < static_cast<int>(f.segments.size()); ++s) {
                const auto& seg = f.segments[s];
                if (seg.edge == t.edge && seg.x0 <= t.s && t.s <= seg.x1 && f.segment_nucleus[s] == home) sep = false;
            }
            row.push_back(sep);
        }
        for (std::size_t k = 0; k < row.size(); ++k)
            if (!row[k] && rep.all) {
                rep.all = false;
                rep.first_failure = std::make_pair(i, static_cast<int>(k));
            }
        rep.separated.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Nucleus zoology

struct NucleusInfo {
    int nucleus = 0;
    int type = 0;  // 1, 2 or 3
    bool trivial = false;
    int primary_ends = 0, secondary_ends = 0;  // root-attached / leaf-attached
    int incoming = 0, outgoing = 0;
};

inline std::vector<std::pair<int, Side>> nucleus_ends(const ImmersedWall& w, int n) {
    std::vector<std::pair<int, Side>> out;
    for (int s : w.eflat.nuclei[n].segments) {
        const auto& seg = w.eflat.segments[s];
        if (seg.lo >= 0) out.push_back({seg.lo, Side::right});
        if (seg.hi >= 0) out.push_back({seg.hi, Side::left});
    }
    return out;
}

inline std::vector<NucleusInfo> classify_nuclei(const ImmersedWall& w) {
    std::vector<NucleusInfo> out;
    for (int n = 0; n < static_cast<int>(w.eflat.nuclei.size()); ++n) {
        const Nucleus& nu = w.eflat.nuclei[n];
        NucleusInfo info;
        info.nucleus = n;
        if (nu.extra >= 0) {
            info.type = 1;
            info.trivial = true;
            info.incoming = info.outgoing = 1;
            out.push_back(info);
            continue;
        }
        for (auto [b, side] : nucleus_ends(w, n)) {
            bool root = w.end_attach.at({b, static_cast<int>(side)}).second == 0;
            (root ? info.primary_ends : info.secondary_ends)++;
            (root ? info.incoming : info.outgoing)++;
        }
        if (!nu.vertices.empty() && info.primary_ends == 0)
            info.type = 3;
        else if (nu.vertices.empty() && info.primary_ends == 1 && info.secondary_ends == 1)
            info.type = 1;
        else if (nu.vertices.empty() && info.primary_ends == 0 && info.secondary_ends == 2)
            info.type = 2;
        else
            throw StructuralError("classify_nuclei: nucleus " + std::to_string(n) + " matches no type (" +
                                  std::to_string(info.primary_ends) + " primary ends, " +
                                  std::to_string(info.secondary_ends) + " secondary ends, " +
                                  std::to_string(nu.vertices.size()) + " vertices)");
        out.push_back(info);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cocycle and holonomy. The wall meets the 2-cell R_e in horizontal E-segments at height 1/2 and in
// vertical tunnel pieces; each piece endpoint on the boundary of R_e is one crossing.

struct CocycleReport {
    std::vector<int> cell_crossings;  // per undirected edge
    std::vector<int> odd_cells;
    int cycles = 0;
    std::vector<int> nontrivial_cycles;  // index of the closing relation
    bool even() const { return odd_cells.empty(); }
    bool two_sided() const { return nontrivial_cycles.empty(); }
};

// Letter of phi(edge of p) that the midsegment through p ends on: +1 forward, -1 inverse.
inline int midsegment_sign(const GraphMap& phi, const PointV& p) {
    const auto& im = phi.image(p.edge).edges;
    long j = floor_of(p.s * static_cast<long>(im.size())).convert_to<long>();
    return forward(im[j]) ? 1 : -1;
}

inline CocycleReport cocycle_check(const GraphMap& phi, const ImmersedWall& w) {
    const Graph& g = phi.graph();
    CocycleReport rep;
    rep.cell_crossings.assign(g.num_edges(), 0);
    const auto& segs = w.eflat.segments;
    for (const auto& s : segs) rep.cell_crossings[undirected(s.edge)] += (s.lo < 0) + (s.hi < 0);
    int L = w.L, T = w.num_tunnels();
    for (int c = 0; c < T; ++c) {
        if (w.deleted[c]) continue;
        for (const auto& n : w.tree(c).nodes) {
            int cross = n.depth == 0 || n.depth == L ? 1 : 2;
            rep.cell_crossings[undirected(n.point.edge)] += cross;
        }
    }
    for (int e = 0; e < g.num_edges(); ++e)
        if (rep.cell_crossings[e] % 2) rep.odd_cells.push_back(e);

    // Normals: +y for E-segments, +x (cell coordinate) for tunnel pieces.
    int S = static_cast<int>(segs.size());
    std::vector<int> offset(T + 1, S);
    for (int c = 0; c < T; ++c) offset[c + 1] = offset[c] + static_cast<int>(w.tree(c).nodes.size());
    struct Rel {
        int a, b, sign;
    };
    std::vector<Rel> rels;
    std::map<int, int> first_at_vertex;
    for (int s = 0; s < S; ++s)
        for (int v : {segs[s].lo < 0 ? g.src(segs[s].edge) : -1, segs[s].hi < 0 ? g.dst(segs[s].edge) : -1}) {
            if (v < 0) continue;
            auto [it, fresh] = first_at_vertex.emplace(v, s);
            if (!fresh) rels.push_back({it->second, s, 1});
        }
    auto corner = [](Side side, bool down) { return (side == Side::left) == down ? 1 : -1; };
    std::map<int, std::vector<int>> at_extra;
    for (int c = 0; c < T; ++c) {
        if (w.deleted[c]) continue;
        const Tunnel& t = w.tree(c);
        for (std::size_t n = 1; n < t.nodes.size(); ++n)
            rels.push_back({offset[c] + t.nodes[n].parent, offset[c] + static_cast<int>(n),
                            midsegment_sign(phi, t.nodes[n].point)});
        auto hook = [&](const Attach& a, int node, bool down) {
            if (a.extra) {
                at_extra[a.primary].push_back(offset[c] + node);
                return;
            }
            int s = w.eflat.end_segment.at({a.bust, static_cast<int>(a.side)});
            rels.push_back({s, offset[c] + node, corner(a.side, down)});
        };
        hook(w.root_attach[c], 0, true);
        for (auto& [n, a] : w.leaf_attach[c]) hook(a, n, false);
    }
    for (auto& [i, ps] : at_extra)
        for (std::size_t k = 1; k < ps.size(); ++k) rels.push_back({ps[0], ps[k], 1});

    int P = offset[T];
    std::vector<std::vector<std::pair<int, int>>> adj(P);
    for (int k = 0; k < static_cast<int>(rels.size()); ++k) {
        adj[rels[k].a].push_back({rels[k].b, k});
        adj[rels[k].b].push_back({rels[k].a, k});
    }
    std::vector<int> sign(P, 0);
    std::vector<bool> tree_rel(rels.size(), false);
    int comps = 0;
    for (int s = 0; s < P; ++s) {
        if (sign[s]) continue;
        ++comps;
        sign[s] = 1;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (auto [y, k] : adj[x])
                if (!sign[y]) {
                    sign[y] = sign[x] * rels[k].sign;
                    tree_rel[k] = true;
                    stack.push_back(y);
                }
        }
    }
    for (int k = 0; k < static_cast<int>(rels.size()); ++k) {
        if (tree_rel[k]) continue;
        ++rep.cycles;
        if (sign[rels[k].a] * rels[k].sign != sign[rels[k].b]) rep.nontrivial_cycles.push_back(k);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Discrepancy zones, one per nucleus. A zone is exceptional when a tunnel-approximation bounds it
// (a primary end or an extra vertex), and narrow when flowing the nucleus j steps meets no vertex for
// 1 <= j <= 3L/4.

struct Zone {
    int nucleus = 0;
    bool exceptional = false;
    bool degenerate = false;
    bool narrow = true;
    int first_vertex_level = -1;  // least j with a vertex inside, -1 if none in the window
};

struct EdgeInterval {
    int edge;  // forward
    Rational lo, hi;
};

// Image of open edge intervals under one flow step; sets `vertex` when the image passes a vertex.
inline std::vector<EdgeInterval> flow_intervals(const GraphMap& phi, const std::vector<EdgeInterval>& in, bool& vertex) {
    std::vector<EdgeInterval> out;
    for (const auto& iv : in) {
        const auto& im = phi.image(iv.edge).edges;
        long k = static_cast<long>(im.size());
        Rational a = iv.lo * k, b = iv.hi * k;
        long ja = floor_of(a).convert_to<long>();
        for (long j = ja; j < k && Rational(j) < b; ++j) {
            Rational lo = std::max(a, Rational(j)) - j, hi = std::min(b, Rational(j + 1)) - j;
            if (Rational(j) > a) vertex = true;
            if (forward(im[j]))
                out.push_back({im[j], lo, hi});
            else
                out.push_back({inv(im[j]), 1 - hi, 1 - lo});
        }
    }
    return out;
}

inline std::vector<Zone> exceptional_zones(const GraphMap& phi, const ImmersedWall& w) {
    std::vector<Zone> out;
    int window = (3 * w.L) / 4;
    for (int n = 0; n < static_cast<int>(w.eflat.nuclei.size()); ++n) {
        const Nucleus& nu = w.eflat.nuclei[n];
        Zone z;
        z.nucleus = n;
        if (nu.extra >= 0) {
            z.exceptional = z.degenerate = true;
            out.push_back(z);
            continue;
        }
        for (auto [b, side] : nucleus_ends(w, n))
            if (w.end_attach.at({b, static_cast<int>(side)}).second == 0) z.exceptional = true;
        if (!nu.vertices.empty()) {
            z.narrow = window < 1;
            z.first_vertex_level = window >= 1 ? 1 : -1;
            out.push_back(z);
            continue;
        }
        std::vector<EdgeInterval> cur;
        for (int s : nu.segments) cur.push_back({w.eflat.segments[s].edge, w.eflat.segments[s].x0, w.eflat.segments[s].x1});
        for (int j = 1; j <= window; ++j) {
            bool vertex = false;
            cur = flow_intervals(phi, cur, vertex);
            if (vertex) {
                z.narrow = false;
                z.first_vertex_level = j;
                break;
            }
        }
        out.push_back(z);
    }
    return out;
}

}  // namespace fbc
