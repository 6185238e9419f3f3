#pragma once

// Exhaustive reference solvers. Every constraint kind is evaluated from its own definition
// here; nothing in this header may depend on the solvers or the compiler.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "logiq/augmentation.hpp"
#include "logiq/error.hpp"
#include "logiq/graph.hpp"
#include "logiq/logic.hpp"
#include "logiq/predicate.hpp"
#include "logiq/submodular.hpp"

namespace logiq {

struct BruteForceOptions {
    int max_vertices = 12;               // subset scans
    std::uint64_t max_tuples = 10'000'000; // n^k for tuple scans
};

struct ExactSet {
    VertexSet set;
    double value = 0;
};

struct ExactTuple {
    VertexTuple tuple;
    double value = 0;
};

// Direct semantics of one catalog predicate. The empty set counts as connected.
inline bool predicate_holds(const Graph& g, Predicate p, const VertexSet& u) {
    std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
    for (Vertex v : u) in[v] = 1;
    switch (p) {
    case Predicate::IndSet:
        for (auto [a, b] : g.edges())
            if (in[a] && in[b]) return false;
        return true;
    case Predicate::VCover:
        for (auto [a, b] : g.edges())
            if (!in[a] && !in[b]) return false;
        return true;
    case Predicate::DomSet:
        for (Vertex v = 0; v < g.size(); ++v) {
            bool dominated = in[v];
            for (Vertex w : g.neighbors(v)) dominated = dominated || in[w];
            if (!dominated) return false;
        }
        return true;
    case Predicate::Connected: {
        if (u.empty()) return true;
        std::vector<char> seen(in.size(), 0);
        std::vector<Vertex> stack{u.front()};
        seen[u.front()] = 1;
        std::size_t count = 0;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            ++count;
            for (Vertex w : g.neighbors(v))
                if (in[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        return count == u.size();
    }
    case Predicate::NonEmpty:
        return !u.empty();
    case Predicate::EdgeIn:
        for (auto [a, b] : g.edges())
            if (in[a] && in[b]) return true;
        return false;
    case Predicate::All:
        return static_cast<int>(u.size()) == g.size();
    case Predicate::True:
        return true;
    }
    return false;
}

inline bool predicate_holds(const Graph& g, const PredicateExpr& e, const VertexSet& u) {
    switch (e.kind) {
    case PredicateExpr::Kind::Leaf:
        return predicate_holds(g, e.predicate, u);
    case PredicateExpr::Kind::And:
        for (const auto& c : e.children)
            if (!predicate_holds(g, c, u)) return false;
        return true;
    case PredicateExpr::Kind::Or:
        for (const auto& c : e.children)
            if (predicate_holds(g, c, u)) return true;
        return false;
    }
    return false;
}

namespace detail {

inline VertexSet set_of_mask(std::uint64_t mask, int n) {
    VertexSet s;
    for (int v = 0; v < n; ++v)
        if (mask >> v & 1) s.push_back(v);
    return s;
}

inline std::optional<ExactSet> best_subset(int n, const SubmodularOracle& f, const BruteForceOptions& opt,
                                           const std::function<bool(const VertexSet&)>& feasible) {
    if (n > opt.max_vertices) throw CapExceeded("brute force over subsets limited to " + std::to_string(opt.max_vertices) + " vertices");
    std::optional<ExactSet> best;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        VertexSet s = set_of_mask(mask, n);
        if (!feasible(s)) continue;
        double value = f.evaluate(s);
        if (!best || value > best->value || (value == best->value && s < best->set)) best = ExactSet{std::move(s), value};
    }
    return best;
}

inline std::optional<ExactTuple> best_tuple(int n, int k, const SubmodularOracle& f, const BruteForceOptions& opt,
                                            const std::function<bool(const VertexTuple&)>& feasible) {
    double count = 1;
    for (int i = 0; i < k; ++i) count *= n;
    if (count > static_cast<double>(opt.max_tuples)) throw CapExceeded("brute force over tuples limited to " + std::to_string(opt.max_tuples) + " tuples");
    std::optional<ExactTuple> best;
    VertexTuple t(static_cast<std::size_t>(k), 0);
    if (n == 0) return best;
    while (true) {
        // Ascending lexicographic order, so a strictly better value is needed to replace.
        if (feasible(t)) {
            VertexSet s = make_vertex_set(t);
            double value = f.evaluate(s);
            if (!best || value > best->value) best = ExactTuple{t, value};
        }
        int i = k - 1;
        while (i >= 0 && t[i] == n - 1) t[i--] = 0;
        if (i < 0) break;
        ++t[i];
    }
    return best;
}

} // namespace detail

// All models of a predicate expression, in lexicographic order.
inline std::vector<VertexSet> predicate_models(const Graph& g, const PredicateExpr& e, BruteForceOptions opt = {}) {
    if (g.size() > opt.max_vertices) throw CapExceeded("model enumeration limited to " + std::to_string(opt.max_vertices) + " vertices");
    std::vector<VertexSet> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.size()); ++mask) {
        VertexSet s = detail::set_of_mask(mask, g.size());
        if (predicate_holds(g, e, s)) out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::optional<ExactSet> brute_force_mso(const Graph& g, const Formula& phi, const SubmodularOracle& f, BruteForceOptions opt = {}) {
    return detail::best_subset(g.size(), f, opt, [&](const VertexSet& s) { return model_check_mso(g, phi, s, {opt.max_vertices}); });
}

inline std::optional<ExactSet> brute_force_mso(const Graph& g, const PredicateExpr& e, const SubmodularOracle& f, BruteForceOptions opt = {}) {
    return detail::best_subset(g.size(), f, opt, [&](const VertexSet& s) { return predicate_holds(g, e, s); });
}

inline std::optional<ExactTuple> brute_force_fo(const Graph& g, const Formula& phi, const SubmodularOracle& f, BruteForceOptions opt = {}) {
    return detail::best_tuple(g.size(), phi.free_count(), f, opt, [&](const VertexTuple& t) { return model_check_fo(g, phi, t, {g.size()}); });
}

// A disjunct holds when every block's formula holds (checked on the whole graph), entries of
// one block are linked by hops of length at most 2r, and distinct blocks are more than 2r apart.
inline bool gaifman_holds(const Graph& g, const GaifmanForm& gf, const VertexTuple& t) {
    std::vector<std::vector<int>> dist;
    for (Vertex v : t) dist.push_back(bfs_hops(g, {v}));
    auto near = [&](int a, int b, int limit) { return dist[a][t[b]] >= 0 && dist[a][t[b]] <= limit; };
    for (const auto& d : gf.disjuncts) {
        const int reach = 2 * d.r;
        bool ok = true;
        for (std::size_t b = 0; b < d.blocks.size() && ok; ++b) {
            const auto& vars = d.blocks[b].vars;
            VertexTuple sub;
            for (int v : vars) sub.push_back(t[v]);
            ok = model_check_fo(g, *d.blocks[b].formula, sub, {g.size()});
            // Linked within the block.
            std::vector<char> reached(vars.size(), 0);
            reached[0] = 1;
            for (bool grew = true; grew && ok;) {
                grew = false;
                for (std::size_t a = 0; a < vars.size(); ++a)
                    for (std::size_t c = 0; c < vars.size(); ++c)
                        if (reached[a] && !reached[c] && near(vars[a], vars[c], reach)) reached[c] = grew = true;
            }
            for (char r : reached) ok = ok && r;
            for (std::size_t c = b + 1; c < d.blocks.size() && ok; ++c)
                for (int x : vars)
                    for (int y : d.blocks[c].vars) ok = ok && !near(x, y, reach);
        }
        if (ok) return true;
    }
    return false;
}

inline std::optional<ExactTuple> brute_force_fo(const Graph& g, const GaifmanForm& gf, const SubmodularOracle& f, BruteForceOptions opt = {}) {
    return detail::best_tuple(g.size(), gf.k, f, opt, [&](const VertexTuple& t) { return gaifman_holds(g, gf, t); });
}

namespace detail {

inline Vertex follow(const Augmentation& aug, int p, Vertex u) {
    if (u < 0) return -1;
    if (p == 0) return u;
    const auto& order = aug.in_order(u);
    return p <= static_cast<int>(order.size()) ? order[p - 1] : -1;
}

} // namespace detail

// Missing in-neighbours make equalities false and inequalities true.
inline bool ks_holds(const Augmentation& aug, const KsDisjunct& d, const VertexTuple& t) {
    for (const auto& tau : d.tau) {
        Vertex u = t[tau.var];
        for (const auto& label : tau.labels) {
            bool found = false;
            for (const auto& l : aug.labels(u)) found = found || l.to_string() == label;
            if (!found) return false;
        }
        for (const auto& fe : tau.fun_eqs) {
            Vertex lhs = detail::follow(aug, fe.a, detail::follow(aug, fe.b, u)), rhs = detail::follow(aug, fe.c, u);
            if (lhs < 0 || lhs != rhs) return false;
        }
    }
    for (const auto& at : d.eq) {
        Vertex lhs = detail::follow(aug, at.p, t[at.i]), rhs = detail::follow(aug, at.q, t[at.j]);
        if (lhs < 0 || lhs != rhs) return false;
    }
    for (const auto& at : d.neq) {
        Vertex lhs = detail::follow(aug, at.p, t[at.i]), rhs = detail::follow(aug, at.q, t[at.j]);
        if (lhs >= 0 && rhs >= 0 && lhs == rhs) return false;
    }
    return true;
}

inline bool ks_holds(const Augmentation& aug, const KsNormalForm& ks, const VertexTuple& t) {
    for (const auto& d : ks.disjuncts)
        if (ks_holds(aug, d, t)) return true;
    return false;
}

inline std::optional<ExactTuple> brute_force_fo(const Augmentation& aug, const KsNormalForm& ks, const SubmodularOracle& f, BruteForceOptions opt = {}) {
    return detail::best_tuple(aug.size(), ks.k, f, opt, [&](const VertexTuple& t) { return ks_holds(aug, ks, t); });
}

} // namespace logiq
