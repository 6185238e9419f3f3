#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logiq/error.hpp"

namespace logiq {

// Vertices are dense 0-based ids. Text formats use 1-based ids.
using Vertex = int;

// Sorted, duplicate-free vertex ids.
using VertexSet = std::vector<Vertex>;

// Ordered vertex ids; repeats allowed.
using VertexTuple = std::vector<Vertex>;

// Hop distance; std::nullopt encodes INFINITE (different components).
using Distance = std::optional<int>;

inline VertexSet make_vertex_set(std::vector<Vertex> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool contains(const VertexSet& s, Vertex v) {
    return std::binary_search(s.begin(), s.end(), v);
}

// Simple undirected graph. Immutable after construction.
class Graph {
public:
    Graph() = default;

    // Self-loops are rejected; duplicate edges are merged.
    Graph(int n, const std::vector<std::pair<Vertex, Vertex>>& edges) : n_(n), adj_(static_cast<std::size_t>(n)) {
        if (n < 0) throw InvalidArgument("negative vertex count");
        for (auto [u, v] : edges) {
            check(u);
            check(v);
            if (u == v) throw InvalidArgument("self-loop at vertex " + std::to_string(u + 1));
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& list : adj_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v : adj_[u])
                if (u < v) edges_.emplace_back(u, v);
    }

    int size() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    // Each edge once, as (u, v) with u < v, in lexicographic order.
    const std::vector<std::pair<Vertex, Vertex>>& edges() const noexcept { return edges_; }

    const std::vector<Vertex>& neighbors(Vertex v) const {
        check(v);
        return adj_[v];
    }

    int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

    int max_degree() const {
        int d = 0;
        for (const auto& list : adj_) d = std::max(d, static_cast<int>(list.size()));
        return d;
    }

    bool adjacent(Vertex u, Vertex v) const {
        const auto& list = neighbors(u);
        return std::binary_search(list.begin(), list.end(), v);
    }

    bool valid(Vertex v) const noexcept { return v >= 0 && v < n_; }

    void check(Vertex v) const {
        if (!valid(v)) throw InvalidArgument("vertex id " + std::to_string(v + 1) + " out of range 1.." + std::to_string(n_));
    }

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    int n_ = 0;
    std::vector<std::vector<Vertex>> adj_;
    std::vector<std::pair<Vertex, Vertex>> edges_;
};

// Directed graph without self-loops. In- and out-neighbor lists are sorted by id.
class DirectedGraph {
public:
    DirectedGraph() = default;

    DirectedGraph(int n, const std::vector<std::pair<Vertex, Vertex>>& arcs)
        : n_(n), in_(static_cast<std::size_t>(n)), out_(static_cast<std::size_t>(n)) {
        for (auto [u, v] : arcs) {
            if (u < 0 || u >= n || v < 0 || v >= n) throw InvalidArgument("arc endpoint out of range");
            if (u == v) throw InvalidArgument("self-loop arc at vertex " + std::to_string(u + 1));
            out_[u].push_back(v);
            in_[v].push_back(u);
        }
        for (auto* lists : {&in_, &out_})
            for (auto& list : *lists) {
                std::sort(list.begin(), list.end());
                list.erase(std::unique(list.begin(), list.end()), list.end());
            }
    }

    int size() const noexcept { return n_; }

    const std::vector<Vertex>& in_neighbors(Vertex v) const { return in_.at(static_cast<std::size_t>(v)); }
    const std::vector<Vertex>& out_neighbors(Vertex v) const { return out_.at(static_cast<std::size_t>(v)); }

    bool has_arc(Vertex u, Vertex v) const {
        const auto& list = out_neighbors(u);
        return std::binary_search(list.begin(), list.end(), v);
    }

    std::size_t arc_count() const {
        std::size_t m = 0;
        for (const auto& list : out_) m += list.size();
        return m;
    }

    // Arcs (tail, head) in lexicographic order.
    std::vector<std::pair<Vertex, Vertex>> arcs() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v : out_[u]) out.emplace_back(u, v);
        return out;
    }

    int max_in_degree() const {
        int d = 0;
        for (const auto& list : in_) d = std::max(d, static_cast<int>(list.size()));
        return d;
    }

private:
    int n_ = 0;
    std::vector<std::vector<Vertex>> in_;
    std::vector<std::vector<Vertex>> out_;
};

// Parses the line-oriented graph format:
//   c <comment>
//   p <n> <m>
//   e <u> <v>      (1-based, m lines)
// Duplicate edges are merged and reported through `warnings` when given.
inline Graph load_graph(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::optional<int> n;
    std::size_t declared_m = 0;
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::set<std::pair<Vertex, Vertex>> seen;
    std::size_t listed = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "c") continue;
        if (tag == "p") {
            if (n) throw ParseError("duplicate 'p' header", line_no);
            long long nv = 0, mv = 0;
            if (!(ls >> nv >> mv) || nv < 0 || mv < 0) throw ParseError("malformed header, expected 'p <n> <m>'", line_no);
            std::string extra;
            if (ls >> extra) throw ParseError("unexpected token '" + extra + "' in header", line_no);
            n = static_cast<int>(nv);
            declared_m = static_cast<std::size_t>(mv);
            continue;
        }
        if (tag == "e") {
            if (!n) throw ParseError("edge before 'p' header", line_no);
            long long u = 0, v = 0;
            if (!(ls >> u >> v)) throw ParseError("malformed edge, expected 'e <u> <v>'", line_no);
            std::string extra;
            if (ls >> extra) throw ParseError("unexpected token '" + extra + "' in edge line", line_no);
            if (u < 1 || u > *n || v < 1 || v > *n)
                throw ParseError("vertex id out of range 1.." + std::to_string(*n), line_no);
            if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u), line_no);
            ++listed;
            std::pair<Vertex, Vertex> key{static_cast<Vertex>(std::min(u, v) - 1), static_cast<Vertex>(std::max(u, v) - 1)};
            if (!seen.insert(key).second) {
                if (warnings)
                    warnings->push_back("line " + std::to_string(line_no) + ": duplicate edge " + std::to_string(u) + " " +
                                        std::to_string(v) + " ignored");
                continue;
            }
            edges.push_back(key);
            continue;
        }
        throw ParseError("unknown line tag '" + tag + "'", line_no);
    }
    if (!n) throw ParseError("missing 'p <n> <m>' header");
    if (warnings && listed != declared_m)
        warnings->push_back("header declares " + std::to_string(declared_m) + " edges, found " + std::to_string(listed));
    return Graph(*n, edges);
}

inline std::string write_graph(const Graph& g) {
    std::ostringstream out;
    out << "p " << g.size() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << "e " << u + 1 << ' ' << v + 1 << '\n';
    return out.str();
}

// Multi-source BFS. Entries are -1 for unreachable vertices or beyond `limit` hops (limit < 0: unbounded).
inline std::vector<int> bfs_hops(const Graph& g, const std::vector<Vertex>& sources, int limit = -1) {
    std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
    std::deque<Vertex> queue;
    for (Vertex s : sources) {
        g.check(s);
        if (dist[s] != 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        Vertex u = queue.front();
        queue.pop_front();
        if (limit >= 0 && dist[u] >= limit) continue;
        for (Vertex w : g.neighbors(u))
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
    }
    return dist;
}

inline Distance distance(const Graph& g, Vertex u, Vertex v) {
    g.check(v);
    int d = bfs_hops(g, {u})[v];
    if (d < 0) return std::nullopt;
    return d;
}

// True iff distance(u, v) <= r. INFINITE never satisfies the bound.
inline bool within(const Distance& d, int r) { return d.has_value() && *d <= r; }

// N(ū, r): every vertex within r hops of some entry of the tuple.
inline VertexSet neighborhood(const Graph& g, const VertexTuple& centers, int r) {
    if (r < 0) throw InvalidArgument("negative neighborhood radius");
    auto dist = bfs_hops(g, centers, r);
    VertexSet out;
    for (Vertex v = 0; v < g.size(); ++v)
        if (dist[v] >= 0) out.push_back(v);
    return out;
}

struct InducedSubgraph {
    Graph graph;
    std::vector<Vertex> to_original;   // subgraph id -> original id
    std::vector<Vertex> from_original; // original id -> subgraph id, -1 when absent

    Vertex map(Vertex original) const {
        Vertex v = from_original.at(static_cast<std::size_t>(original));
        if (v < 0) throw InvalidArgument("vertex " + std::to_string(original + 1) + " not in induced subgraph");
        return v;
    }
};

inline InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& keep) {
    InducedSubgraph sub;
    sub.from_original.assign(static_cast<std::size_t>(g.size()), -1);
    for (Vertex v : keep) {
        g.check(v);
        if (sub.from_original[v] >= 0) continue;
        sub.from_original[v] = static_cast<Vertex>(sub.to_original.size());
        sub.to_original.push_back(v);
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (auto [u, v] : g.edges())
        if (sub.from_original[u] >= 0 && sub.from_original[v] >= 0) edges.emplace_back(sub.from_original[u], sub.from_original[v]);
    sub.graph = Graph(static_cast<int>(sub.to_original.size()), edges);
    return sub;
}

// Repeated minimum-degree peeling (ties: lowest id). Returns the peeling order.
inline std::vector<Vertex> degeneracy_order(const Graph& g) {
    const int n = g.size();
    std::vector<int> deg(static_cast<std::size_t>(n));
    std::set<std::pair<int, Vertex>> queue;
    for (Vertex v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        queue.emplace(deg[v], v);
    }
    std::vector<bool> removed(static_cast<std::size_t>(n), false);
    std::vector<Vertex> order;
    order.reserve(static_cast<std::size_t>(n));
    while (!queue.empty()) {
        auto [d, v] = *queue.begin();
        queue.erase(queue.begin());
        removed[v] = true;
        order.push_back(v);
        for (Vertex w : g.neighbors(v)) {
            if (removed[w]) continue;
            queue.erase({deg[w], w});
            --deg[w];
            queue.emplace(deg[w], w);
        }
    }
    return order;
}

// Orients every edge from the later-peeled endpoint to the earlier-peeled one, so the
// maximum in-degree equals the degeneracy.
inline DirectedGraph degeneracy_orientation(const Graph& g) {
    auto order = degeneracy_order(g);
    std::vector<int> rank(static_cast<std::size_t>(g.size()));
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    std::vector<std::pair<Vertex, Vertex>> arcs;
    arcs.reserve(g.edge_count());
    for (auto [u, v] : g.edges()) {
        if (rank[u] > rank[v])
            arcs.emplace_back(u, v);
        else
            arcs.emplace_back(v, u);
    }
    return DirectedGraph(g.size(), arcs);
}

namespace graphs {

inline Graph path(int n) {
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, e);
}

inline Graph cycle(int n) {
    if (n < 3) return path(n);
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
}

// Center 0, leaves 1..n-1.
inline Graph star(int n) {
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
    return Graph(n, e);
}

inline Graph complete(int n) {
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph(n, e);
}

inline Graph empty(int n) { return Graph(n, {}); }

} // namespace graphs

} // namespace logiq
