#pragma once

#include <cstdint>

#include "logiq/graph.hpp"

namespace logiq {

struct FoSolution {
    VertexTuple tuple;
    double value = 0;
    int certificate = 2; // f(OPT) <= certificate * value
    int disjunct = -1;
    std::uint64_t oracle_calls = 0;
    std::uint64_t search_nodes = 0;
    double elapsed_ms = 0;
};

namespace detail {

// Higher value wins, then the lexicographically smaller tuple.
inline bool better_solution(double value, const VertexTuple& tuple, double best_value, const VertexTuple& best_tuple) {
    if (value != best_value) return value > best_value;
    return tuple < best_tuple;
}

// Set of assigned vertices; -1 entries are skipped.
inline VertexSet image(const VertexTuple& t) {
    VertexSet s;
    for (Vertex v : t)
        if (v >= 0) s.push_back(v);
    return make_vertex_set(std::move(s));
}

} // namespace detail
} // namespace logiq
