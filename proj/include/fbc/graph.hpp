#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fbc {

// Oriented edges are stored in pairs: 2j is the j-th edge as given, 2j+1 its inverse.
struct EdgeRecord {
    std::string name;
    int src = 0;
    int dst = 0;
};

inline int inv(int e) { return e ^ 1; }
inline int undirected(int e) { return e >> 1; }
inline bool forward(int e) { return (e & 1) == 0; }

inline std::string upper_name(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

class Graph {
public:
    Graph() = default;

    int add_vertex(const std::string& id) {
        if (vertex_index_.count(id)) throw StructuralError("duplicate vertex id: " + id);
        vertex_index_[id] = static_cast<int>(vertices_.size());
        vertices_.push_back(id);
        return static_cast<int>(vertices_.size()) - 1;
    }

    int add_edge(const std::string& name, int src, int dst) {
        if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
            throw StructuralError("edge names must start with a lowercase letter: '" + name + "'");
        if (upper_name(name) == name)
            throw StructuralError("edge name has no distinct inverse spelling: " + name);
        if (src < 0 || dst < 0 || src >= num_vertices() || dst >= num_vertices())
            throw StructuralError("edge endpoint out of range: " + name);
        std::string iname = upper_name(name);
        if (edge_index_.count(name) || edge_index_.count(iname))
            throw StructuralError("duplicate edge name: " + name);
        int id = static_cast<int>(edges_.size());
        edges_.push_back({name, src, dst});
        edges_.push_back({iname, dst, src});
        edge_index_[name] = id;
        edge_index_[iname] = id + 1;
        return id;
    }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()) / 2; }
    int num_oriented() const { return static_cast<int>(edges_.size()); }

    const std::string& vertex_id(int v) const { return vertices_.at(v); }
    const EdgeRecord& edge(int e) const { return edges_.at(e); }
    const std::string& name(int e) const { return edges_.at(e).name; }
    int src(int e) const { return edges_[e].src; }
    int dst(int e) const { return edges_[e].dst; }

    int vertex(const std::string& id) const {
        auto it = vertex_index_.find(id);
        if (it == vertex_index_.end()) throw StructuralError("unknown vertex: " + id);
        return it->second;
    }
    bool has_edge_name(const std::string& n) const { return edge_index_.count(n) > 0; }
    int edge_by_name(const std::string& n) const {
        auto it = edge_index_.find(n);
        if (it == edge_index_.end()) throw StructuralError("unknown edge: " + n);
        return it->second;
    }

    bool is_rose() const { return num_vertices() == 1; }

    // Forward edge ids sorted by name.
    std::vector<int> edges_by_name() const {
        std::vector<int> out;
        for (int j = 0; j < num_edges(); ++j) out.push_back(2 * j);
        std::sort(out.begin(), out.end(), [&](int x, int y) { return name(x) < name(y); });
        return out;
    }

    // Oriented edges leaving v.
    std::vector<int> out_edges(int v) const {
        std::vector<int> out;
        for (int e = 0; e < num_oriented(); ++e)
            if (src(e) == v) out.push_back(e);
        return out;
    }

    const std::map<std::string, int>& name_table() const { return edge_index_; }

private:
    std::vector<std::string> vertices_;
    std::vector<EdgeRecord> edges_;
    std::map<std::string, int> vertex_index_;
    std::map<std::string, int> edge_index_;
};

inline Graph make_rose(const std::vector<std::string>& names) {
    Graph g;
    g.add_vertex("v");
    for (auto& n : names) g.add_edge(n, 0, 0);
    return g;
}

struct EdgePath {
    int start = 0;
    std::vector<int> edges;

    bool empty() const { return edges.empty(); }
    std::size_t size() const { return edges.size(); }
    bool operator==(const EdgePath&) const = default;
    auto operator<=>(const EdgePath&) const = default;
};

inline int path_end(const Graph& g, const EdgePath& p) {
    return p.edges.empty() ? p.start : g.dst(p.edges.back());
}

inline void check_path(const Graph& g, const EdgePath& p) {
    if (p.start < 0 || p.start >= g.num_vertices()) throw StructuralError("path start out of range");
    int at = p.start;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        int e = p.edges[i];
        if (e < 0 || e >= g.num_oriented()) throw StructuralError("path edge out of range");
        if (g.src(e) != at)
            throw StructuralError("endpoint mismatch at position " + std::to_string(i));
        at = g.dst(e);
    }
}

inline bool is_reduced(const EdgePath& p) {
    for (std::size_t i = 1; i < p.edges.size(); ++i)
        if (p.edges[i] == inv(p.edges[i - 1])) return false;
    return true;
}

inline EdgePath inverse(const Graph& g, const EdgePath& p) {
    EdgePath q{path_end(g, p), {}};
    for (auto it = p.edges.rbegin(); it != p.edges.rend(); ++it) q.edges.push_back(inv(*it));
    return q;
}

// Appends with free reduction at the seam only; caller keeps both halves reduced.
inline void append_reduced(std::vector<int>& acc, int e) {
    if (!acc.empty() && acc.back() == inv(e)) acc.pop_back();
    else acc.push_back(e);
}

inline EdgePath tighten(const Graph& g, const EdgePath& p) {
    check_path(g, p);
    EdgePath q{p.start, {}};
    q.edges.reserve(p.edges.size());
    for (int e : p.edges) append_reduced(q.edges, e);
    return q;
}

inline EdgePath concat(const Graph& g, const EdgePath& p, const EdgePath& q) {
    if (path_end(g, p) != q.start) throw StructuralError("concat: endpoint mismatch");
    EdgePath r = p;
    r.edges.insert(r.edges.end(), q.edges.begin(), q.edges.end());
    return r;
}

// Word syntax: whitespace-separated tokens, or (with no whitespace) greedy
// longest match against edge names; uppercase spelling denotes the inverse.
inline std::vector<int> parse_letters(const Graph& g, const std::string& word) {
    std::vector<int> out;
    bool spaced = std::any_of(word.begin(), word.end(),
                              [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (spaced) {
        std::size_t i = 0;
        while (i < word.size()) {
            while (i < word.size() && std::isspace(static_cast<unsigned char>(word[i]))) ++i;
            std::size_t j = i;
            while (j < word.size() && !std::isspace(static_cast<unsigned char>(word[j]))) ++j;
            if (j > i) out.push_back(g.edge_by_name(word.substr(i, j - i)));
            i = j;
        }
        return out;
    }
    std::size_t i = 0;
    while (i < word.size()) {
        std::size_t best = 0;
        int best_e = -1;
        for (auto& [n, e] : g.name_table())
            if (n.size() > best && word.compare(i, n.size(), n) == 0) {
                best = n.size();
                best_e = e;
            }
        if (best_e < 0) throw StructuralError("cannot parse word '" + word + "' at offset " + std::to_string(i));
        out.push_back(best_e);
        i += best;
    }
    return out;
}

inline EdgePath parse_path(const Graph& g, const std::string& word, int start_if_empty = 0) {
    EdgePath p{start_if_empty, parse_letters(g, word)};
    if (!p.edges.empty()) p.start = g.src(p.edges.front());
    check_path(g, p);
    return p;
}

inline bool needs_spaces(const Graph& g) {
    for (int j = 0; j < g.num_edges(); ++j)
        if (g.name(2 * j).size() != 1) return true;
    return false;
}

inline std::string format_letters(const Graph& g, const std::vector<int>& letters) {
    std::string s;
    bool sp = needs_spaces(g);
    for (std::size_t i = 0; i < letters.size(); ++i) {
        if (sp && i) s += ' ';
        s += g.name(letters[i]);
    }
    return s;
}

inline std::string format_path(const Graph& g, const EdgePath& p) { return format_letters(g, p.edges); }

}  // namespace fbc
