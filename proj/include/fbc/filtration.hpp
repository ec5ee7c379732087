#pragma once

#include <set>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace fbc {

// strata[i-1] holds the forward edge ids of S^i; V^i is the union of the first i strata.
struct Filtration {
    std::vector<std::vector<int>> strata;

    int height() const { return static_cast<int>(strata.size()); }

    // 0 when e is in no stratum.
    int level_of(int e) const {
        int u = undirected(e);
        for (std::size_t i = 0; i < strata.size(); ++i)
            for (int f : strata[i])
                if (undirected(f) == u) return static_cast<int>(i) + 1;
        return 0;
    }

    bool in_level(int e, int i) const {
        int l = level_of(e);
        return l >= 1 && l <= i;
    }

    const std::vector<int>& stratum(int i) const {
        if (i < 1 || i > height()) throw DomainError("stratum index out of range: " + std::to_string(i));
        return strata[i - 1];
    }

    std::set<int> vertices_of_level(const Graph& g, int i) const {
        std::set<int> vs;
        for (int k = 1; k <= i && k <= height(); ++k)
            for (int e : strata[k - 1]) {
                vs.insert(g.src(e));
                vs.insert(g.dst(e));
            }
        return vs;
    }
};

}  // namespace fbc
