#pragma once

#include <random>
#include <string>
#include <vector>

#include <fbc/graph_map.hpp>
#include <fbc/io.hpp>

namespace fbc::testing {

inline GraphMap rose_map(const std::vector<std::string>& names, const std::vector<std::string>& images) {
    Graph g = make_rose(names);
    std::vector<EdgePath> imgs;
    for (auto& w : images) imgs.push_back(parse_path(g, w));
    return GraphMap(g, {0}, imgs);
}

inline GraphMap rose_aut(const std::vector<std::string>& names, const std::vector<std::string>& images,
                         const std::vector<std::string>& inverses) {
    GraphMap m = rose_map(names, images);
    std::vector<EdgePath> inv;
    for (auto& w : inverses) inv.push_back(parse_path(m.graph(), w));
    m.set_inverse(inv);
    return m;
}

inline GraphMap ex1() { return rose_aut({"a", "b"}, {"a", "ba"}, {"a", "bA"}); }
inline GraphMap ex2() { return rose_aut({"a", "b"}, {"b", "ab"}, {"bA", "a"}); }

inline std::string data_file(const std::string& n) { return std::string(FBC_DATA_DIR) + "/" + n; }

inline EdgePath random_path(const Graph& g, std::mt19937& rng, int len) {
    EdgePath p{0, {}};
    std::uniform_int_distribution<int> pick(0, g.num_oriented() - 1);
    int at = 0;
    for (int i = 0; i < len; ++i) {
        std::vector<int> out = g.out_edges(at);
        int e = out[std::uniform_int_distribution<int>(0, static_cast<int>(out.size()) - 1)(rng)];
        p.edges.push_back(e);
        at = g.dst(e);
    }
    (void)pick;
    return p;
}

inline EdgePath random_reduced(const Graph& g, std::mt19937& rng, int len) {
    EdgePath p{0, {}};
    int at = 0;
    while (static_cast<int>(p.edges.size()) < len) {
        std::vector<int> out = g.out_edges(at);
        int e = out[std::uniform_int_distribution<int>(0, static_cast<int>(out.size()) - 1)(rng)];
        if (!p.edges.empty() && e == inv(p.edges.back())) continue;
        p.edges.push_back(e);
        at = g.dst(e);
    }
    return p;
}

// Random self-map of a rose of the given rank (not necessarily invertible).
inline GraphMap random_rose_map(std::mt19937& rng, int rank, int max_len) {
    std::vector<std::string> names;
    for (int i = 0; i < rank; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    Graph g = make_rose(names);
    std::vector<EdgePath> imgs;
    for (int i = 0; i < rank; ++i) {
        int len = std::uniform_int_distribution<int>(1, max_len)(rng);
        imgs.push_back(random_reduced(g, rng, len));
    }
    return GraphMap(g, {0}, imgs);
}

}  // namespace fbc::testing
