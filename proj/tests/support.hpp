#pragma once

// Instance generators and reference checks shared by the unit tests and the acceptance run.
// Nothing here calls into the solvers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "logiq/augmentation.hpp"
#include "logiq/dnnf.hpp"
#include "logiq/graph.hpp"
#include "logiq/logic.hpp"
#include "logiq/predicate.hpp"
#include "logiq/submodular.hpp"

namespace testsupport {

using namespace logiq;
using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline Graph random_graph(Rng& rng, int n, double p) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng, p)) edges.emplace_back(u, v);
    return Graph(n, edges);
}

inline Graph random_tree(Rng& rng, int n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int v = 1; v < n; ++v) edges.emplace_back(uniform(rng, 0, v - 1), v);
    return Graph(n, edges);
}

// Random graph with every degree at most `max_degree`.
inline Graph random_bounded_degree(Rng& rng, int n, int max_degree, int tries) {
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    std::set<std::pair<Vertex, Vertex>> edges;
    for (int t = 0; t < tries && n > 1; ++t) {
        int u = uniform(rng, 0, n - 1), v = uniform(rng, 0, n - 1);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (deg[u] >= max_degree || deg[v] >= max_degree || edges.count({u, v})) continue;
        edges.insert({u, v});
        ++deg[u];
        ++deg[v];
    }
    return Graph(n, {edges.begin(), edges.end()});
}

// A tree plus a few extra edges.
inline Graph random_sparse(Rng& rng, int n, int extra) {
    auto edges = random_tree(rng, n).edges();
    std::set<std::pair<Vertex, Vertex>> all(edges.begin(), edges.end());
    for (int t = 0; t < extra && n > 2; ++t) {
        int u = uniform(rng, 0, n - 1), v = uniform(rng, 0, n - 1);
        if (u != v) all.insert({std::min(u, v), std::max(u, v)});
    }
    return Graph(n, {all.begin(), all.end()});
}

inline CoverageFunction random_coverage(Rng& rng, int n, int items, int max_per_vertex, bool weighted = false) {
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
    for (auto& s : sets) {
        int c = uniform(rng, 0, max_per_vertex);
        for (int i = 0; i < c; ++i) s.push_back(uniform(rng, 0, items - 1));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    std::vector<double> weights(static_cast<std::size_t>(items), 1.0);
    if (weighted)
        for (auto& w : weights) w = uniform(rng, 1, 5);
    return CoverageFunction(n, std::move(sets), std::move(weights));
}

inline ModularFunction random_modular(Rng& rng, int n, int max_weight) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (auto& x : w) x = uniform(rng, 0, max_weight);
    return ModularFunction(std::move(w));
}

// Random full binary vtree over variables 0..leaves-1: repeatedly join two random pool members.
inline Vtree random_vtree(Rng& rng, int leaves) {
    std::vector<Vtree::Node> raw;
    std::vector<int> pool;
    for (int v = 0; v < leaves; ++v) {
        raw.push_back(Vtree::Node{-1, -1, -1, v});
        pool.push_back(v);
    }
    while (pool.size() > 1) {
        std::size_t a = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1));
        int left = pool[a];
        pool[a] = pool.back();
        pool.pop_back();
        std::size_t b = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1));
        raw.push_back(Vtree::Node{left, pool[b], -1, -1});
        pool[b] = static_cast<int>(raw.size()) - 1;
    }
    return Vtree::from_nodes(raw, pool.front());
}

inline PredicateExpr random_predicate_combo(Rng& rng) {
    static const Predicate all[] = {Predicate::IndSet, Predicate::VCover, Predicate::DomSet, Predicate::Connected,
                                    Predicate::NonEmpty, Predicate::EdgeIn, Predicate::All, Predicate::True};
    auto leaf = [&] { return PredicateExpr::leaf(all[uniform(rng, 0, 7)]); };
    auto level = [&] {
        PredicateExpr a = leaf(), b = leaf();
        return coin(rng, 0.5) ? PredicateExpr::both(a, b) : PredicateExpr::either(a, b);
    };
    PredicateExpr a = level(), b = level();
    return coin(rng, 0.5) ? PredicateExpr::both(a, b) : PredicateExpr::either(a, b);
}

// Exact treewidth by dynamic programming over vertex subsets (elimination orderings).
inline int exact_treewidth(const Graph& g) {
    const int n = g.size();
    if (n == 0) return -1;
    const std::uint32_t full = (1u << n) - 1;
    // Vertices outside S ∪ {v} reachable from v through S.
    auto q = [&](std::uint32_t s, int v) {
        std::uint32_t seen = 1u << v, out = 0;
        std::vector<int> stack{v};
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (Vertex b : g.neighbors(a)) {
                if (seen >> b & 1) continue;
                seen |= 1u << b;
                if (s >> b & 1) stack.push_back(b);
                else out |= 1u << b;
            }
        }
        return __builtin_popcount(out);
    };
    std::vector<int> tw(full + 1, n);
    tw[0] = -1;
    for (std::uint32_t s = 1; s <= full; ++s)
        for (int v = 0; v < n; ++v)
            if (s >> v & 1) {
                std::uint32_t rest = s & ~(1u << v);
                tw[s] = std::min(tw[s], std::max(tw[rest], q(rest, v)));
            }
    return tw[full];
}

// Closure violations between two consecutive augmentation levels: transitive paths of `prev`
// missing their shortcut in `next`, and common-head pairs of `prev` not adjacent in `next`.
inline std::vector<std::string> closure_violations(const DirectedGraph& prev, const DirectedGraph& next) {
    std::vector<std::string> out;
    const int n = prev.size();
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v) {
            if (!prev.has_arc(u, v)) continue;
            if (!next.has_arc(u, v)) out.push_back("lost arc " + std::to_string(u) + "->" + std::to_string(v));
            for (Vertex w = 0; w < n; ++w) {
                if (w != u && prev.has_arc(v, w) && !next.has_arc(u, w))
                    out.push_back("transitivity " + std::to_string(u) + "->" + std::to_string(v) + "->" + std::to_string(w));
                if (w != u && prev.has_arc(w, v) && !next.has_arc(u, w) && !next.has_arc(w, u))
                    out.push_back("fraternity " + std::to_string(u) + "," + std::to_string(w) + " -> " + std::to_string(v));
            }
        }
    return out;
}

// Random Gaifman form: one or two disjuncts, k ≤ max_k variables split into blocks, each block
// with a formula drawn from a small local catalog.
inline GaifmanForm random_gaifman(Rng& rng, int max_k) {
    GaifmanForm gf;
    gf.k = uniform(rng, 1, max_k);
    int disjuncts = uniform(rng, 1, 2);
    for (int d = 0; d < disjuncts; ++d) {
        GaifmanDisjunct dis;
        dis.r = uniform(rng, 0, 1);
        std::vector<int> vars(static_cast<std::size_t>(gf.k));
        for (int i = 0; i < gf.k; ++i) vars[i] = i;
        std::shuffle(vars.begin(), vars.end(), rng);
        std::size_t at = 0;
        while (at < vars.size()) {
            std::size_t len = static_cast<std::size_t>(uniform(rng, 1, std::min<int>(2, static_cast<int>(vars.size() - at))));
            std::vector<int> block(vars.begin() + static_cast<std::ptrdiff_t>(at), vars.begin() + static_cast<std::ptrdiff_t>(at + len));
            std::sort(block.begin(), block.end());
            at += len;
            std::string x = variable_name(block[0]);
            std::vector<std::string> options;
            // Quantifiers only when r >= 1 and only over neighbours, so every formula is r-local.
            if (block.size() == 1) {
                options = {"true", x + " = " + x};
                if (dis.r >= 1)
                    for (const char* extra : {"exists y. adj(X, y)", "!(exists y. adj(X, y))", "exists y. exists z. adj(X, y) & adj(X, z) & y != z"}) {
                        std::string t = extra;
                        for (std::size_t p; (p = t.find('X')) != std::string::npos;) t.replace(p, 1, x);
                        options.push_back(t);
                    }
            } else {
                std::string y = variable_name(block[1]);
                options = {x + " = " + y, "true"};
                if (dis.r >= 1) {
                    options.push_back("adj(" + x + ", " + y + ")");
                    options.push_back(x + " != " + y);
                    options.push_back("!adj(" + x + ", " + y + ") & " + x + " != " + y);
                }
            }
            dis.blocks.push_back(make_block(block, options[uniform(rng, 0, static_cast<int>(options.size()) - 1)]));
        }
        gf.disjuncts.push_back(std::move(dis));
    }
    return gf;
}

// Random KS disjunct over a forest of equality atoms with a few inequalities and τ atoms.
inline KsNormalForm random_ks(Rng& rng, const Augmentation& aug, int max_k, int max_neq) {
    KsNormalForm ks;
    ks.depth = aug.steps();
    ks.k = uniform(rng, 1, max_k);
    const int rho = std::max(1, std::min(aug.max_rho(), 2));
    KsDisjunct d;
    for (int v = 1; v < ks.k; ++v)
        if (coin(rng, 0.6)) d.eq.push_back({uniform(rng, 0, v - 1), uniform(rng, 0, rho), v, uniform(rng, 0, rho)});
    int neq = uniform(rng, 0, max_neq);
    for (int t = 0; t < neq && ks.k >= 2; ++t) {
        int i = uniform(rng, 0, ks.k - 1), j = uniform(rng, 0, ks.k - 1);
        if (i == j) continue;
        d.neq.push_back({i, uniform(rng, 0, rho), j, uniform(rng, 0, rho)});
    }
    if (coin(rng, 0.3)) {
        TauConstraint t;
        t.var = uniform(rng, 0, ks.k - 1);
        t.fun_eqs.push_back({0, uniform(rng, 0, 1), uniform(rng, 0, 1)});
        d.tau.push_back(t);
    }
    ks.disjuncts.push_back(std::move(d));
    return ks;
}

} // namespace testsupport
