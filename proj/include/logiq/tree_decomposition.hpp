#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logiq/error.hpp"
#include "logiq/graph.hpp"

namespace logiq {

struct TreeDecomposition {
    std::vector<VertexSet> bags;                 // node -> B(t)
    std::vector<std::pair<int, int>> tree_edges; // undirected edges between nodes

    std::size_t node_count() const { return bags.size(); }

    int width() const {
        int w = -1;
        for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
        return w;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(bags.size());
        for (auto [a, b] : tree_edges) {
            adj.at(static_cast<std::size_t>(a)).push_back(b);
            adj.at(static_cast<std::size_t>(b)).push_back(a);
        }
        for (auto& l : adj) std::sort(l.begin(), l.end());
        return adj;
    }
};

struct DecompositionViolation {
    enum class Kind { NotATree, UncoveredVertex, UncoveredEdge, DisconnectedOccurrence, BadVertex };
    Kind kind;
    std::string message;
    std::vector<int> witness; // vertex ids, edge endpoints, or node ids depending on kind
};

namespace detail {

// True iff `edges` forms a tree over `count` nodes.
inline bool is_tree(std::size_t count, const std::vector<std::pair<int, int>>& edges) {
    if (count == 0) return edges.empty();
    if (edges.size() != count - 1) return false;
    std::vector<int> parent(count);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= count || static_cast<std::size_t>(b) >= count) return false;
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return true;
}

// Nodes whose bag contains v must induce a connected subtree. Returns the offending node set or empty.
inline std::vector<int> disconnected_occurrence(const TreeDecomposition& td, const std::vector<std::vector<int>>& adj, Vertex v) {
    std::vector<int> holders;
    for (std::size_t t = 0; t < td.bags.size(); ++t)
        if (contains(td.bags[t], v)) holders.push_back(static_cast<int>(t));
    if (holders.size() <= 1) return {};
    std::vector<bool> seen(td.bags.size(), false);
    std::vector<int> stack{holders.front()};
    seen[holders.front()] = true;
    std::size_t reached = 0;
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        ++reached;
        for (int s : adj[t])
            if (!seen[s] && contains(td.bags[s], v)) {
                seen[s] = true;
                stack.push_back(s);
            }
    }
    if (reached == holders.size()) return {};
    return holders;
}

} // namespace detail

// Checks the three tree-decomposition conditions; an empty result means valid.
inline std::vector<DecompositionViolation> validate(const Graph& g, const TreeDecomposition& td) {
    using Kind = DecompositionViolation::Kind;
    std::vector<DecompositionViolation> out;
    if (!detail::is_tree(td.bags.size(), td.tree_edges)) {
        out.push_back({Kind::NotATree, "decomposition nodes do not form a tree", {}});
        return out;
    }
    for (std::size_t t = 0; t < td.bags.size(); ++t)
        for (Vertex v : td.bags[t])
            if (!g.valid(v)) {
                out.push_back({Kind::BadVertex, "bag " + std::to_string(t + 1) + " holds unknown vertex " + std::to_string(v + 1),
                               {static_cast<int>(t), v}});
                return out;
            }
    std::vector<bool> covered(static_cast<std::size_t>(g.size()), false);
    for (const auto& b : td.bags)
        for (Vertex v : b) covered[v] = true;
    for (Vertex v = 0; v < g.size(); ++v)
        if (!covered[v]) out.push_back({Kind::UncoveredVertex, "vertex " + std::to_string(v + 1) + " is in no bag", {v}});
    for (auto [u, v] : g.edges()) {
        bool ok = std::any_of(td.bags.begin(), td.bags.end(), [&](const VertexSet& b) { return contains(b, u) && contains(b, v); });
        if (!ok)
            out.push_back({Kind::UncoveredEdge, "edge " + std::to_string(u + 1) + "-" + std::to_string(v + 1) + " is in no bag", {u, v}});
    }
    auto adj = td.adjacency();
    for (Vertex v = 0; v < g.size(); ++v) {
        auto holders = detail::disconnected_occurrence(td, adj, v);
        if (!holders.empty())
            out.push_back({Kind::DisconnectedOccurrence,
                           "bags containing vertex " + std::to_string(v + 1) + " are not connected", holders});
    }
    return out;
}

// Min-fill elimination (ties: lowest id). Always valid; width is an upper bound on treewidth.
inline TreeDecomposition min_fill_decomposition(const Graph& g) {
    const int n = g.size();
    TreeDecomposition td;
    if (n == 0) {
        td.bags.push_back({});
        return td;
    }
    std::vector<std::set<Vertex>> adj(static_cast<std::size_t>(n));
    for (auto [u, v] : g.edges()) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    std::vector<bool> gone(static_cast<std::size_t>(n), false);
    std::vector<Vertex> order;
    std::vector<int> position(static_cast<std::size_t>(n), -1);

    auto fill_in = [&](Vertex v) {
        std::size_t missing = 0;
        for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
            for (auto b = std::next(a); b != adj[v].end(); ++b)
                if (!adj[*a].count(*b)) ++missing;
        return missing;
    };

    for (int step = 0; step < n; ++step) {
        Vertex best = -1;
        std::size_t best_fill = 0;
        for (Vertex v = 0; v < n; ++v) {
            if (gone[v]) continue;
            std::size_t f = fill_in(v);
            if (best < 0 || f < best_fill) {
                best = v;
                best_fill = f;
            }
        }
        VertexSet bag(adj[best].begin(), adj[best].end());
        bag.push_back(best);
        td.bags.push_back(make_vertex_set(bag));
        for (auto a = adj[best].begin(); a != adj[best].end(); ++a)
            for (auto b = std::next(a); b != adj[best].end(); ++b) {
                adj[*a].insert(*b);
                adj[*b].insert(*a);
            }
        for (Vertex w : adj[best]) adj[w].erase(best);
        gone[best] = true;
        position[best] = step;
        order.push_back(best);
    }

    // Bag i (eliminating order[i]) attaches to the bag of its earliest-eliminated later neighbor.
    std::vector<int> roots;
    for (int i = 0; i < n; ++i) {
        Vertex v = order[i];
        int parent = -1;
        for (Vertex w : td.bags[i])
            if (w != v && (parent < 0 || position[w] < parent)) parent = position[w];
        if (parent < 0)
            roots.push_back(i);
        else
            td.tree_edges.emplace_back(i, parent);
    }
    for (std::size_t i = 1; i < roots.size(); ++i) td.tree_edges.emplace_back(roots[i - 1], roots[i]);
    return td;
}

// PACE-style text: "s td <nodes> <width+1> <n>", "b <node> <v...>", then "<a> <b>" tree edges. 1-based ids.
inline TreeDecomposition load_decomposition(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t nodes = 0;
    long long max_bag = 0, n = 0;
    TreeDecomposition td;
    std::vector<bool> bag_seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        if (tag == "s") {
            std::string kind;
            long long count = 0;
            if (header || !(ls >> kind >> count >> max_bag >> n) || kind != "td" || count < 0)
                throw ParseError("malformed 's td <nodes> <width+1> <n>' header", line_no);
            header = true;
            nodes = static_cast<std::size_t>(count);
            td.bags.assign(nodes, {});
            bag_seen.assign(nodes, false);
            continue;
        }
        if (!header) throw ParseError("content before 's td' header", line_no);
        if (tag == "b") {
            long long id = 0;
            if (!(ls >> id) || id < 1 || static_cast<std::size_t>(id) > nodes) throw ParseError("bad bag id", line_no);
            if (bag_seen[id - 1]) throw ParseError("bag " + std::to_string(id) + " listed twice", line_no);
            bag_seen[id - 1] = true;
            std::vector<Vertex> bag;
            long long v = 0;
            while (ls >> v) {
                if (v < 1 || v > n) throw ParseError("vertex id out of range in bag", line_no);
                bag.push_back(static_cast<Vertex>(v - 1));
            }
            if (!ls.eof()) throw ParseError("non-numeric token in bag line", line_no);
            td.bags[id - 1] = make_vertex_set(bag);
            if (static_cast<long long>(td.bags[id - 1].size()) > max_bag)
                throw ParseError("bag larger than declared width+1", line_no);
            continue;
        }
        long long a = 0, b = 0;
        std::istringstream es(line);
        if (!(es >> a >> b) || a < 1 || b < 1 || static_cast<std::size_t>(a) > nodes || static_cast<std::size_t>(b) > nodes)
            throw ParseError("malformed tree edge line", line_no);
        td.tree_edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
    }
    if (!header) throw ParseError("missing 's td' header");
    return td;
}

inline std::string write_decomposition(const TreeDecomposition& td, int n) {
    std::ostringstream out;
    out << "s td " << td.bags.size() << ' ' << td.width() + 1 << ' ' << n << '\n';
    for (std::size_t t = 0; t < td.bags.size(); ++t) {
        out << "b " << t + 1;
        for (Vertex v : td.bags[t]) out << ' ' << v + 1;
        out << '\n';
    }
    for (auto [a, b] : td.tree_edges) out << a + 1 << ' ' << b + 1 << '\n';
    return out.str();
}

enum class NiceKind { Leaf, Introduce, Forget, Join };

struct NiceNode {
    NiceKind kind = NiceKind::Leaf;
    Vertex vertex = -1;        // introduced/forgotten vertex
    std::vector<int> children; // 0 (leaf), 1, or 2 (join)
    VertexSet bag;
};

// Rooted nice decomposition. Children always precede parents, so index order is a valid
// bottom-up schedule; the root is the last node and has an empty bag.
struct NiceTreeDecomposition {
    std::vector<NiceNode> nodes;
    int root = -1;

    int width() const {
        int w = -1;
        for (const auto& node : nodes) w = std::max(w, static_cast<int>(node.bag.size()) - 1);
        return w;
    }

    // Vertex -> the unique FORGET node for it.
    std::map<Vertex, int> forget_nodes() const {
        std::map<Vertex, int> out;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].kind == NiceKind::Forget) out[nodes[i].vertex] = static_cast<int>(i);
        return out;
    }

    TreeDecomposition as_plain() const {
        TreeDecomposition td;
        for (const auto& node : nodes) td.bags.push_back(node.bag);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (int c : nodes[i].children) td.tree_edges.emplace_back(c, static_cast<int>(i));
        return td;
    }
};

// Structural problems with a nice decomposition (empty = well formed).
inline std::vector<std::string> check_nice(const NiceTreeDecomposition& nice) {
    std::vector<std::string> problems;
    auto bad = [&](std::size_t i, const std::string& what) { problems.push_back("node " + std::to_string(i) + ": " + what); };
    for (std::size_t i = 0; i < nice.nodes.size(); ++i) {
        const auto& node = nice.nodes[i];
        for (int c : node.children)
            if (c < 0 || static_cast<std::size_t>(c) >= i) bad(i, "child does not precede parent");
        switch (node.kind) {
        case NiceKind::Leaf:
            if (!node.children.empty() || !node.bag.empty()) bad(i, "leaf must be childless with empty bag");
            break;
        case NiceKind::Introduce: {
            if (node.children.size() != 1) { bad(i, "introduce needs one child"); break; }
            auto expect = make_vertex_set([&] { auto b = nice.nodes[node.children[0]].bag; b.push_back(node.vertex); return b; }());
            if (contains(nice.nodes[node.children[0]].bag, node.vertex) || expect != node.bag) bad(i, "introduce must add exactly its vertex");
            break;
        }
        case NiceKind::Forget: {
            if (node.children.size() != 1) { bad(i, "forget needs one child"); break; }
            auto child = nice.nodes[node.children[0]].bag;
            if (!contains(child, node.vertex)) { bad(i, "forgotten vertex missing from child"); break; }
            child.erase(std::find(child.begin(), child.end(), node.vertex));
            if (child != node.bag) bad(i, "forget must remove exactly its vertex");
            break;
        }
        case NiceKind::Join:
            if (node.children.size() != 2) { bad(i, "join needs two children"); break; }
            if (nice.nodes[node.children[0]].bag != node.bag || nice.nodes[node.children[1]].bag != node.bag)
                bad(i, "join children must share the bag");
            break;
        }
    }
    if (nice.root < 0 || static_cast<std::size_t>(nice.root) + 1 != nice.nodes.size()) problems.push_back("root must be the last node");
    else if (!nice.nodes[nice.root].bag.empty()) problems.push_back("root bag must be empty");
    std::map<Vertex, int> forgets;
    for (const auto& node : nice.nodes)
        if (node.kind == NiceKind::Forget && ++forgets[node.vertex] > 1)
            problems.push_back("vertex " + std::to_string(node.vertex + 1) + " forgotten twice");
    return problems;
}

// Converts a valid decomposition into nice form rooted at node 0. Width is preserved.
inline NiceTreeDecomposition make_nice(const TreeDecomposition& td) {
    if (td.bags.empty()) throw InvalidArgument("decomposition has no nodes");
    if (!detail::is_tree(td.bags.size(), td.tree_edges)) throw InvalidArgument("decomposition nodes do not form a tree");
    auto adj = td.adjacency();
    std::set<Vertex> all;
    for (const auto& b : td.bags) all.insert(b.begin(), b.end());
    for (Vertex v : all)
        if (!detail::disconnected_occurrence(td, adj, v).empty())
            throw InvalidArgument("bags containing vertex " + std::to_string(v + 1) + " are not connected");

    NiceTreeDecomposition nice;
    auto add = [&](NiceKind kind, Vertex v, std::vector<int> children, VertexSet bag) {
        nice.nodes.push_back({kind, v, std::move(children), std::move(bag)});
        return static_cast<int>(nice.nodes.size()) - 1;
    };
    auto introduce = [&](int cur, Vertex v) {
        auto bag = nice.nodes[cur].bag;
        bag.push_back(v);
        return add(NiceKind::Introduce, v, {cur}, make_vertex_set(bag));
    };
    auto forget = [&](int cur, Vertex v) {
        auto bag = nice.nodes[cur].bag;
        bag.erase(std::find(bag.begin(), bag.end(), v));
        return add(NiceKind::Forget, v, {cur}, bag);
    };

    // Iterative post-order over the decomposition tree rooted at node 0.
    std::vector<int> parent(td.bags.size(), -1), order;
    std::vector<int> stack{0};
    std::vector<bool> seen(td.bags.size(), false);
    seen[0] = true;
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        order.push_back(t);
        for (int s : adj[t])
            if (!seen[s]) {
                seen[s] = true;
                parent[s] = t;
                stack.push_back(s);
            }
    }
    std::vector<int> top(td.bags.size(), -1); // nice node carrying bag B(t)
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int t = *it;
        const auto& bag = td.bags[t];
        std::vector<int> branches;
        for (int c : adj[t]) {
            if (c == parent[t]) continue;
            int cur = top[c];
            for (Vertex v : td.bags[c])
                if (!contains(bag, v)) cur = forget(cur, v);
            for (Vertex v : bag)
                if (!contains(td.bags[c], v)) cur = introduce(cur, v);
            branches.push_back(cur);
        }
        if (branches.empty()) {
            int cur = add(NiceKind::Leaf, -1, {}, {});
            for (Vertex v : bag) cur = introduce(cur, v);
            branches.push_back(cur);
        }
        int cur = branches.front();
        for (std::size_t i = 1; i < branches.size(); ++i) cur = add(NiceKind::Join, -1, {cur, branches[i]}, bag);
        top[t] = cur;
    }
    int cur = top[0];
    for (Vertex v : td.bags[0]) cur = forget(cur, v);
    nice.root = cur;
    return nice;
}

} // namespace logiq
