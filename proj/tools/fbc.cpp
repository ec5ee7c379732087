#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include <fbc/fbc.hpp>

using namespace fbc;

namespace {

enum Exit { ok = 0, violated = 1, usage = 2, resource = 3 };

struct Options {
    std::string input, out, format = "json", point;
    int L = 3, bound = 4, iter = 2, samples = 20, steps = 3, period = 0;
    double radius = -1, delta = 1.0;
    std::uint64_t seed = 1;
    std::vector<std::string> walls;
};

struct Context {
    Automorphism aut;
    Filtration filt;
    std::vector<Stratum> strata;
    std::vector<double> weights;

    const GraphMap& phi() const { return aut.map; }
};

Context load(const Options& o) {
    Context c{load_automorphism(o.input), {}, {}, {}};
    c.filt = c.aut.filtration ? *c.aut.filtration : compute_maximal_filtration(c.aut.map);
    c.strata = analyze_strata(c.aut.map, c.filt);
    c.weights = edge_weights(c.aut.map.graph(), c.strata);
    return c;
}

double radius_of(const Options& o) { return o.radius >= 0 ? o.radius : 3.0 * o.L; }

PointV parse_point(const Graph& g, const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw DomainError("--point expects edge:s, e.g. a:2/3");
    Rational r = parse_rational(s.substr(colon + 1));
    if (r <= 0 || r >= 1) throw DomainError("--point must be interior");
    return PointV::interior(g.edge_by_name(s.substr(0, colon)), r);
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw StructuralError("cannot write " + o.out);
    f << text;
}

void emit(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

ImmersedWall canonical_wall(const Context& c, int L) {
    auto busts = canonical_busts(c.phi(), c.strata);
    return build_immersed_wall(c.phi(), busts.points, L);
}

int cmd_analyze(const Options& o) {
    auto c = load(o);
    json j = header("analyze");
    j["edges"] = c.phi().graph().num_edges();
    j["strata"] = strata_json(c.phi(), c.strata);
    emit(o, j);
    return ok;
}

int cmd_verify(const Options& o) {
    auto c = load(o);
    auto rtt = verify_rtt(c.phi(), c.filt, o.bound);
    auto imp = verify_improved(c.phi(), c.filt, {o.bound, std::max(1, o.iter)});
    json j = header("verify");
    j["rtt"] = report_json(rtt);
    j["improved"] = report_json(imp);
    j["ok"] = rtt.ok() && imp.ok();
    emit(o, j);
    return rtt.ok() && imp.ok() ? ok : violated;
}

int cmd_torus(const Options& o) {
    auto c = load(o);
    auto x = build_torus_L(c.phi(), o.L);
    json cells = json::array();
    for (const auto& cell : x.cells) cells.push_back(format_boundary(c.phi().graph(), cell));
    json j = header("torus");
    j["L"] = o.L;
    j["vertices"] = x.num_vertices;
    j["vertical_edges"] = x.num_vertical;
    j["horizontal_edges"] = x.num_horizontal;
    j["cells"] = cells;
    j["euler_characteristic"] = x.euler_characteristic();
    emit(o, j);
    return x.euler_characteristic() == 0 ? ok : violated;
}

int cmd_ball(const Options& o) {
    auto c = load(o);
    auto b = build_ball(c.phi(), c.weights, {}, radius_of(o));
    int horizontal = 0;
    for (const auto& e : b.edges) horizontal += e.horizontal;
    json j = header("ball");
    j["radius"] = b.radius;
    j["vertices"] = b.num_vertices();
    j["vertical_edges"] = static_cast<int>(b.edges.size()) - horizontal;
    j["horizontal_edges"] = horizontal;
    j["cells"] = b.cells.size();
    j["truncated"] = b.truncated;
    emit(o, j);
    return ok;
}

int cmd_wall(const Options& o) {
    auto c = load(o);
    auto W = canonical_wall(c, o.L);
    if (o.format == "dot") {
        emit(o, wall_dot(c.phi(), W));
        return ok;
    }
    auto co = cocycle_check(c.phi(), W);
    auto sep = bust_separation_check(c.phi(), W.busts);
    json zones = json::array();
    for (const auto& z : exceptional_zones(c.phi(), W))
        zones.push_back({{"nucleus", z.nucleus}, {"exceptional", z.exceptional}, {"degenerate", z.degenerate},
                         {"narrow", z.narrow}, {"first_vertex_level", z.first_vertex_level}});
    json j = header("wall");
    j["wall"] = wall_json(c.phi(), W);
    j["cocycle"] = {{"even", co.even()}, {"odd_cells", co.odd_cells}, {"cycles", co.cycles},
                    {"nontrivial_cycles", co.nontrivial_cycles.size()}};
    j["separation"] = {{"all", sep.all}};
    if (sep.first_failure) j["separation"]["first_failure"] = {sep.first_failure->first, sep.first_failure->second};
    j["zones"] = zones;
    emit(o, j);
    return co.even() && co.two_sided() ? ok : violated;
}

struct Lifted {
    BallComplex ball;
    WallTrace trace;
};

Lifted lift(const Context& c, const ImmersedWall& W, const Options& o) {
    Lifted l{build_ball(c.phi(), c.weights, {}, radius_of(o)), {}};
    l.trace = lift_wall(c.phi(), W, l.ball, seed_piece(W, l.ball.base_key, PointV::at_vertex(0)));
    return l;
}

json trace_json(const WallTrace& t) {
    return {{"pieces", t.pieces.size()}, {"nuclei", t.nuclei}, {"tunnels", t.tunnels}, {"truncated", t.truncated}};
}

int cmd_approx(const Options& o) {
    auto c = load(o);
    auto W = canonical_wall(c, o.L);
    auto l = lift(c, W, o);
    auto A = approximate(c.phi(), W, l.ball, l.trace, c.weights);
    auto d = distortion_report(A, l.ball, c.weights, o.samples, o.seed);
    json j = header("approx");
    j["seed"] = o.seed;
    j["trace"] = trace_json(l.trace);
    j["approximation"] = {{"nodes", A.nodes.size()}, {"edges", A.edges.size()}, {"cycle_edges", A.cycle_edges},
                          {"acyclic", A.acyclic()}, {"clipped", A.clipped}};
    j["distortion"] = {{"pairs", d.pairs}, {"kappa1", d.kappa1}, {"kappa2", d.kappa2}};
    emit(o, j);
    return A.acyclic() ? ok : violated;
}

int cmd_cut(const Options& o) {
    auto c = load(o);
    auto W = canonical_wall(c, o.L);
    auto l = lift(c, W, o);
    auto sa = side_assignment(l.ball, l.trace);
    auto lc = lifted_cocycle(c.phi(), l.ball, l.trace);
    json j = header("cut");
    j["seed"] = o.seed;
    j["trace"] = trace_json(l.trace);
    j["classes"] = sa.classes;
    j["consistent"] = sa.consistent;
    j["odd_cells"] = lc.odd_cells.size();
    CuttingConfig cfg;
    cfg.delta = o.delta;
    cfg.M = o.bound;
    int mismatches = 0, sampled = 0, leaflike = 0;
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> pick(0, l.ball.num_vertices() - 1);
    for (; sampled < o.samples; ++sampled) {
        int x = pick(rng), y = pick(rng);
        auto p = geodesic_in_ball(l.ball, x, y);
        leaflike += deviation_classify(c.phi(), l.ball, p.vertices, cfg).leaflike;
        if (sa.two_sided()) mismatches += crossing_parity(c.phi(), l.ball, p.vertices, l.trace).odd() != cut_check(sa, x, y);
    }
    j["delta"] = o.delta;
    j["leaflike_paths"] = leaflike;
    j["sampled_paths"] = sampled;
    j["parity_mismatches"] = mismatches;
    emit(o, j);
    return sa.two_sided() && mismatches == 0 ? ok : violated;
}

// Synthetic halfspaces: "h>=k", "first=x", "last=x" (x a letter, uppercase for the inverse).
SideAssignment synthetic(const GraphMap& phi, const BallComplex& b, const std::string& spec) {
    const Graph& g = phi.graph();
    if (spec.rfind("h>=", 0) == 0) {
        long k = std::stol(spec.substr(3));
        return halfspace(b, [&](int v) { return b.keys[v].h >= k; });
    }
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw DomainError("bad wall spec: " + spec);
    std::string kind = spec.substr(0, eq);
    int e = g.edge_by_name(spec.substr(eq + 1));
    if (kind == "first") return halfspace(b, [&](int v) { return !b.keys[v].w.empty() && b.keys[v].w.front() == e; });
    if (kind == "last") return halfspace(b, [&](int v) { return !b.keys[v].w.empty() && b.keys[v].w.back() == e; });
    throw DomainError("bad wall spec: " + spec);
}

int cmd_dual(const Options& o) {
    auto c = load(o);
    if (o.walls.empty()) throw DomainError("dual needs at least one --wall");
    auto b = build_ball(c.phi(), c.weights, {}, o.radius >= 0 ? o.radius : 3.0);
    std::vector<SideAssignment> sides;
    for (const auto& w : o.walls) sides.push_back(synthetic(c.phi(), b, w));
    auto D = dual_cube_complex(sides);
    if (o.format == "dot") {
        emit(o, dual_dot(D));
        return ok;
    }
    json j = header("dual");
    j["walls"] = o.walls;
    j["complex"] = dual_json(D);
    emit(o, j);
    return ok;
}

int cmd_nielsen(const Options& o) {
    auto c = load(o);
    json paths = json::array();
    for (const auto& p : find_nielsen_paths(c.phi(), o.bound, std::max(1, o.iter)))
        paths.push_back({{"path", format_path(c.phi().graph(), p.path)}, {"period", p.period}});
    json j = header("nielsen");
    j["max_len"] = o.bound;
    j["max_iter"] = o.iter;
    j["paths"] = paths;
    emit(o, j);
    return ok;
}

int cmd_atoroidal(const Options& o) {
    auto c = load(o);
    auto r = atoroidal_heuristic(c.phi(), o.bound, o.iter);
    const Graph& g = c.phi().graph();
    auto witness = [&](const std::optional<AtoroidalWitness>& w) -> json {
        if (!w) return nullptr;
        return {{"word", format_letters(g, w->word)}, {"power", w->power}};
    };
    json j = header("atoroidal");
    j["word_bound"] = o.bound;
    j["iter_bound"] = o.iter;
    j["periodic"] = witness(r.periodic);
    j["inverted"] = witness(r.inverted);
    j["verdict"] = r.periodic || r.inverted ? "witness" : "no-witness-up-to-bounds";
    emit(o, j);
    return r.periodic || r.inverted ? violated : ok;
}

int cmd_flow(const Options& o) {
    auto c = load(o);
    const Graph& g = c.phi().graph();
    if (o.point.empty()) throw DomainError("flow needs --point");
    PointV p = parse_point(g, o.point);
    json orbit = json::array();
    PointV x = p;
    orbit.push_back(point_json(g, x));
    for (int i = 0; i < o.steps && !x.is_vertex(); ++i) {
        x = flow_step(c.phi(), x).point;
        orbit.push_back(point_json(g, x));
    }
    json j = header("flow");
    j["orbit"] = orbit;
    auto t = tunnel(c.phi(), p, o.L);
    json leaves = json::array();
    for (int k : t.leaves()) leaves.push_back(point_json(g, t.nodes[k].point));
    j["tunnel"] = {{"depth", o.L}, {"nodes", t.nodes.size()}, {"leaves", leaves}};
    if (o.period > 0) {
        auto per = periodic_points(c.phi(), p.edge, o.period);
        json pts = json::array();
        for (const auto& q : per.points) pts.push_back({{"point", point_json(g, q.point)}, {"period", q.period}});
        j["periodic"] = {{"period", o.period}, {"points", pts}, {"periodic_edge", per.periodic_edge}};
    }
    emit(o, j);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-by-cyclic walls: analysis, walls, separation"};
    app.require_subcommand(1);
    Options o;
    std::map<std::string, std::function<int(const Options&)>> cmds{
        {"analyze", cmd_analyze}, {"verify", cmd_verify},   {"torus", cmd_torus},     {"ball", cmd_ball},
        {"wall", cmd_wall},       {"approx", cmd_approx},   {"cut", cmd_cut},         {"dual", cmd_dual},
        {"nielsen", cmd_nielsen}, {"atoroidal", cmd_atoroidal}, {"flow", cmd_flow}};
    std::map<std::string, std::string> help{
        {"analyze", "strata and Perron-Frobenius data"},
        {"verify", "relative train track and improved checks"},
        {"torus", "mapping torus cell structure"},
        {"ball", "ball in the universal cover"},
        {"wall", "canonical wall: zoology, cocycle, zones"},
        {"approx", "wall trace approximation and distortion"},
        {"cut", "side assignment and parity checks"},
        {"dual", "dual cube complex of synthetic halfspaces"},
        {"nielsen", "bounded Nielsen path search"},
        {"atoroidal", "bounded periodic conjugacy class search"},
        {"flow", "orbits, tunnels, periodic points"}};
    for (auto& [name, fn] : cmds) {
        auto* sub = app.add_subcommand(name, help[name]);
        sub->add_option("--input", o.input, "automorphism JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output file (default stdout)");
        sub->add_option("-L", o.L, "tunnel length / power")->check(CLI::Range(1, 64));
        sub->add_option("--radius", o.radius, "ball radius (default 3L)")->check(CLI::Range(0.0, 64.0));
        sub->add_option("--delta", o.delta, "hyperbolicity constant")->check(CLI::NonNegativeNumber);
        sub->add_option("--bound", o.bound, "length bound")->check(CLI::Range(1, 12));
        sub->add_option("--iter", o.iter, "iteration bound")->check(CLI::Range(1, 64));
        sub->add_option("--samples", o.samples, "sampled pairs or paths")->check(CLI::Range(0, 100000));
        sub->add_option("--format", o.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
        sub->add_option("--seed", o.seed, "random seed");
        if (name == "flow") {
            sub->add_option("--point", o.point, "edge:s");
            sub->add_option("--steps", o.steps)->check(CLI::Range(0, 1000));
            sub->add_option("--period", o.period)->check(CLI::Range(0, 16));
        }
        if (name == "dual") sub->add_option("--wall", o.walls, "h>=k, first=x or last=x");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }
    std::string name = app.get_subcommands().front()->get_name();
    try {
        return cmds.at(name)(o);
    } catch (const SchemaError& e) {
        std::cerr << json{{"error", "schema"}, {"pointer", e.pointer}, {"message", e.what()}}.dump() << "\n";
        return usage;
    } catch (const ResourceError& e) {
        std::cerr << json{{"error", "resource"}, {"message", e.what()}}.dump() << "\n";
        return resource;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "domain"}, {"message", e.what()}}.dump() << "\n";
        return usage;
    }
}
