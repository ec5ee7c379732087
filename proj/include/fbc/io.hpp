#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "filtration.hpp"
#include "graph_map.hpp"

namespace fbc {

using nlohmann::json;

// Input validation failure; `pointer` is an RFC 6901 JSON pointer into the document.
struct SchemaError : StructuralError {
    std::string pointer;
    SchemaError(std::string ptr, const std::string& msg)
        : StructuralError(ptr + ": " + msg), pointer(std::move(ptr)) {}
};

struct Automorphism {
    GraphMap map;
    std::optional<Filtration> filtration;
};

namespace detail {

inline std::string ptr_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

inline const json& need(const json& j, const std::string& key, const std::string& at) {
    if (!j.is_object()) throw SchemaError(at, "expected object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(at + "/" + key, "missing required field");
    return *it;
}

inline std::string need_string(const json& j, const std::string& at) {
    if (!j.is_string()) throw SchemaError(at, "expected string");
    return j.get<std::string>();
}

inline EdgePath word_at(const Graph& g, const json& j, const std::string& at, int start) {
    std::string w = need_string(j, at);
    try {
        return parse_path(g, w, start);
    } catch (const StructuralError& e) {
        throw SchemaError(at, e.what());
    }
}

}  // namespace detail

inline Automorphism automorphism_from_json(const json& doc) {
    using namespace detail;
    if (!doc.is_object()) throw SchemaError("", "expected top-level object");
    Graph g;
    const json& vs = need(doc, "vertices", "");
    if (!vs.is_array() || vs.empty()) throw SchemaError("/vertices", "expected nonempty array");
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::string at = "/vertices/" + std::to_string(i);
        try {
            g.add_vertex(need_string(vs[i], at));
        } catch (const SchemaError&) {
            throw;
        } catch (const StructuralError& e) {
            throw SchemaError(at, e.what());
        }
    }
    const json& es = need(doc, "edges", "");
    if (!es.is_array() || es.empty()) throw SchemaError("/edges", "expected nonempty array");
    for (std::size_t i = 0; i < es.size(); ++i) {
        std::string at = "/edges/" + std::to_string(i);
        std::string n = need_string(need(es[i], "name", at), at + "/name");
        std::string s = need_string(need(es[i], "src", at), at + "/src");
        std::string d = need_string(need(es[i], "dst", at), at + "/dst");
        try {
            g.add_edge(n, g.vertex(s), g.vertex(d));
        } catch (const StructuralError& e) {
            throw SchemaError(at, e.what());
        }
    }

    std::vector<int> vmap(g.num_vertices(), -1);
    const json& vm = need(doc, "vertex_map", "");
    if (!vm.is_object()) throw SchemaError("/vertex_map", "expected object");
    for (auto& [k, v] : vm.items()) {
        std::string at = "/vertex_map/" + ptr_escape(k);
        try {
            vmap[g.vertex(k)] = g.vertex(need_string(v, at));
        } catch (const SchemaError&) {
            throw;
        } catch (const StructuralError& e) {
            throw SchemaError(at, e.what());
        }
    }
    for (int v = 0; v < g.num_vertices(); ++v)
        if (vmap[v] < 0) throw SchemaError("/vertex_map/" + ptr_escape(g.vertex_id(v)), "missing image");

    auto edge_table = [&](const json& m, const std::string& where) {
        if (!m.is_object()) throw SchemaError(where, "expected object");
        std::vector<EdgePath> imgs(g.num_edges());
        std::vector<bool> seen(g.num_edges(), false);
        for (auto& [k, v] : m.items()) {
            std::string at = where + "/" + ptr_escape(k);
            if (!g.has_edge_name(k) || !forward(g.edge_by_name(k)))
                throw SchemaError(at, "unknown edge name");
            int j = undirected(g.edge_by_name(k));
            imgs[j] = word_at(g, v, at, 0);
            seen[j] = true;
        }
        for (int j = 0; j < g.num_edges(); ++j)
            if (!seen[j]) throw SchemaError(where + "/" + ptr_escape(g.name(2 * j)), "missing image");
        return imgs;
    };

    auto imgs = edge_table(need(doc, "edge_map", ""), "/edge_map");
    std::optional<GraphMap> map;
    try {
        map.emplace(g, vmap, imgs);
    } catch (const StructuralError& e) {
        throw SchemaError("/edge_map", e.what());
    }
    if (doc.contains("inverse_map")) {
        auto inv_imgs = edge_table(doc["inverse_map"], "/inverse_map");
        try {
            map->set_inverse(inv_imgs);
        } catch (const std::runtime_error& e) {
            throw SchemaError("/inverse_map", e.what());
        }
    }

    std::optional<Filtration> filt;
    if (doc.contains("filtration")) {
        const json& fl = doc["filtration"];
        if (!fl.is_array()) throw SchemaError("/filtration", "expected array of edge-name arrays");
        Filtration f;
        for (std::size_t i = 0; i < fl.size(); ++i) {
            std::string at = "/filtration/" + std::to_string(i);
            if (!fl[i].is_array() || fl[i].empty()) throw SchemaError(at, "expected nonempty array");
            std::vector<int> s;
            for (std::size_t k = 0; k < fl[i].size(); ++k) {
                std::string at2 = at + "/" + std::to_string(k);
                std::string n = need_string(fl[i][k], at2);
                if (!g.has_edge_name(n) || !forward(g.edge_by_name(n))) throw SchemaError(at2, "unknown edge name");
                int e = g.edge_by_name(n);
                if (f.level_of(e) || std::find(s.begin(), s.end(), e) != s.end())
                    throw SchemaError(at2, "edge listed twice");
                s.push_back(e);
            }
            f.strata.push_back(s);
        }
        for (int j = 0; j < g.num_edges(); ++j)
            if (!f.level_of(2 * j)) throw SchemaError("/filtration", "edge " + g.name(2 * j) + " not covered");
        filt = f;
    }
    return {std::move(*map), filt};
}

inline Automorphism load_automorphism(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return automorphism_from_json(doc);
}

inline Automorphism parse_automorphism(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return automorphism_from_json(doc);
}

inline json automorphism_to_json(const Automorphism& a) {
    const Graph& g = a.map.graph();
    json doc;
    doc["vertices"] = json::array();
    for (int v = 0; v < g.num_vertices(); ++v) doc["vertices"].push_back(g.vertex_id(v));
    doc["edges"] = json::array();
    for (int j = 0; j < g.num_edges(); ++j)
        doc["edges"].push_back({{"name", g.name(2 * j)}, {"src", g.vertex_id(g.src(2 * j))}, {"dst", g.vertex_id(g.dst(2 * j))}});
    for (int v = 0; v < g.num_vertices(); ++v) doc["vertex_map"][g.vertex_id(v)] = g.vertex_id(a.map.vertex_image(v));
    for (int j = 0; j < g.num_edges(); ++j) doc["edge_map"][g.name(2 * j)] = format_path(g, a.map.image(2 * j));
    if (a.map.has_inverse())
        for (int j = 0; j < g.num_edges(); ++j)
            doc["inverse_map"][g.name(2 * j)] = format_path(g, a.map.inverse_image(2 * j));
    if (a.filtration) {
        doc["filtration"] = json::array();
        for (auto& s : a.filtration->strata) {
            json l = json::array();
            for (int e : s) l.push_back(g.name(e));
            doc["filtration"].push_back(l);
        }
    }
    return doc;
}

}  // namespace fbc
