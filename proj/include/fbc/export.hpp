#pragma once

#include <sstream>

#include "cutting.hpp"
#include "io.hpp"
#include "strata.hpp"
#include "verify.hpp"

namespace fbc {

inline json header(const std::string& cmd) { return {{"schema", "fbc/" + cmd + "/v1"}}; }

inline json point_json(const Graph& g, const PointV& p) {
    if (p.is_vertex()) return {{"vertex", g.vertex_id(p.vertex)}};
    return {{"edge", g.name(p.edge)}, {"s", to_string(p.s)}};
}

inline json key_json(const Graph& g, const VertexKey& k) { return {{"h", k.h}, {"w", format_letters(g, k.w)}}; }

inline json ball_point_json(const Graph& g, const BallPoint& p) {
    json j = key_json(g, p.v);
    if (!p.is_vertex()) {
        j["edge"] = g.name(p.edge);
        j["s"] = to_string(p.s);
    }
    return j;
}

inline json strata_json(const GraphMap& phi, const std::vector<Stratum>& strata) {
    const Graph& g = phi.graph();
    json out = json::array();
    for (const auto& s : strata) {
        json edges = json::array();
        for (int e : s.edges) edges.push_back(g.name(e));
        json j{{"index", s.index}, {"kind", kind_name(s.kind)}, {"edges", edges}, {"matrix", s.matrix}};
        if (s.kind == StratumKind::exponential) {
            j["lambda"] = s.lambda;
            j["omega"] = s.omega;
        }
        out.push_back(j);
    }
    return out;
}

inline json report_json(const VerificationReport& r) {
    json out = json::array();
    for (const auto& a : r.axioms) {
        json j{{"id", a.id}, {"status", status_name(a.status)}};
        if (!a.witness.empty()) j["witness"] = a.witness;
        if (a.bound) j["bound"] = a.bound;
        if (!a.note.empty()) j["note"] = a.note;
        out.push_back(j);
    }
    return out;
}

inline json wall_json(const GraphMap& phi, const ImmersedWall& w) {
    const Graph& g = phi.graph();
    json j;
    j["L"] = w.L;
    json prim = json::array();
    for (int i = 0; i < w.busts.size(); ++i) {
        json sec = json::array();
        for (const auto& q : w.busts.secondary[i]) sec.push_back(point_json(g, q));
        prim.push_back({{"point", point_json(g, w.busts.primary[i])},
                        {"periodic", static_cast<bool>(w.busts.periodic[i])},
                        {"secondary", sec}});
    }
    j["primary"] = prim;
    json nuclei = json::array();
    auto info = classify_nuclei(w);
    for (std::size_t n = 0; n < w.eflat.nuclei.size(); ++n) {
        const auto& nu = w.eflat.nuclei[n];
        json segs = json::array();
        for (int s : nu.segments) {
            const auto& seg = w.eflat.segments[s];
            segs.push_back({{"edge", g.name(seg.edge)}, {"from", to_string(seg.x0)}, {"to", to_string(seg.x1)}});
        }
        json x{{"id", n}, {"type", info[n].type}, {"trivial", info[n].trivial}, {"segments", segs},
               {"incoming", info[n].incoming}, {"outgoing", info[n].outgoing}};
        if (!nu.vertices.empty()) x["vertices"] = nu.vertices.size();
        if (nu.extra >= 0) x["extra_of"] = nu.extra;
        nuclei.push_back(x);
    }
    j["nuclei"] = nuclei;
    j["tunnels"] = w.num_tunnels();
    j["components"] = w.num_components;
    j["degenerate"] = w.degenerate;
    return j;
}

inline std::string wall_dot(const GraphMap& phi, const ImmersedWall& w) {
    const Graph& g = phi.graph();
    std::ostringstream o;
    o << "graph wall {\n";
    for (std::size_t n = 0; n < w.eflat.nuclei.size(); ++n) {
        const auto& nu = w.eflat.nuclei[n];
        o << "  subgraph cluster_n" << n << " {\n    label=\"nucleus " << n << "\";\n";
        if (nu.extra >= 0) o << "    x" << nu.extra << " [label=\"extra " << nu.extra << "\"];\n";
        for (int s : nu.segments) {
            const auto& seg = w.eflat.segments[s];
            o << "    s" << s << " [shape=box,label=\"" << g.name(seg.edge) << "[" << to_string(seg.x0) << ","
              << to_string(seg.x1) << "]\"];\n";
        }
        o << "  }\n";
    }
    auto target = [&](const Attach& a) {
        if (a.extra) return "x" + std::to_string(a.primary);
        return "s" + std::to_string(w.eflat.end_segment.at({a.bust, static_cast<int>(a.side)}));
    };
    for (int c = 0; c < w.num_tunnels(); ++c) {
        if (w.deleted[c]) continue;
        const Tunnel& t = w.tree(c);
        for (std::size_t k = 0; k < t.nodes.size(); ++k) {
            o << "  t" << c << "_" << k << " [shape=point];\n";
            if (t.nodes[k].parent >= 0) o << "  t" << c << "_" << t.nodes[k].parent << " -- t" << c << "_" << k << ";\n";
        }
        o << "  t" << c << "_0 -- " << target(w.root_attach[c]) << " [style=bold];\n";
        for (const auto& [node, a] : w.leaf_attach[c]) o << "  t" << c << "_" << node << " -- " << target(a) << ";\n";
    }
    o << "}\n";
    return o.str();
}

inline json dual_json(const DualCubeComplex& D) {
    json cubes = json::array();
    for (const auto& c : D.cubes) cubes.push_back({{"dim", c.dim()}, {"base", c.base}, {"walls", c.walls}});
    json edges = json::array();
    for (auto [x, y] : D.edges) edges.push_back({x, y});
    return {{"walls", D.walls},
            {"vertices", D.vertices},
            {"edges", edges},
            {"cubes", cubes},
            {"counts", {D.count(0), D.count(1), D.count(2), D.count(3)}},
            {"connected", D.connected()}};
}

inline std::string dual_dot(const DualCubeComplex& D) {
    std::ostringstream o;
    o << "graph dual {\n";
    for (std::size_t k = 0; k < D.vertices.size(); ++k) {
        o << "  v" << k << " [label=\"";
        for (int b : D.vertices[k]) o << b;
        o << "\"];\n";
    }
    for (auto [x, y] : D.edges) o << "  v" << x << " -- v" << y << ";\n";
    o << "}\n";
    return o.str();
}

}  // namespace fbc
