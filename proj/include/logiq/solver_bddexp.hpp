#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "logiq/augmentation.hpp"
#include "logiq/error.hpp"
#include "logiq/fo_solution.hpp"
#include "logiq/logging.hpp"
#include "logiq/logic.hpp"
#include "logiq/submodular.hpp"

namespace logiq {

// Triple (var, p, vertex): the tuple must have ρ_p(u_var) != vertex.
struct ForbiddenTriple {
    int var = 0;
    int p = 0;
    Vertex vertex = 0;
    friend auto operator<=>(const ForbiddenTriple&, const ForbiddenTriple&) = default;
};
using ForbiddenPattern = std::vector<ForbiddenTriple>; // sorted

// Partial assignment; `order` lists variables in the order they were assigned.
struct Assignment {
    VertexTuple values;
    std::vector<int> order;

    explicit Assignment(int k = 0) : values(static_cast<std::size_t>(k), -1) {}
    bool assigned(int var) const { return values[var] >= 0; }
    void assign(int var, Vertex u) {
        values[var] = u;
        order.push_back(var);
    }
    int position(int var) const {
        auto it = std::find(order.begin(), order.end(), var);
        return it == order.end() ? -1 : static_cast<int>(it - order.begin());
    }
};

struct TreeSolution {
    Assignment assignment;
    bool complete = false;
    double value = 0;
};

// Lowest-index vertex of the tree whose removal leaves components of at most half the size.
inline int tree_centroid(const std::vector<int>& vars, const std::vector<std::vector<int>>& neighbors) {
    std::vector<char> inside(neighbors.size(), 0);
    for (int v : vars) inside[v] = 1;
    const int size = static_cast<int>(vars.size());
    for (int x : vars) {
        std::vector<char> seen = inside;
        seen[x] = 0;
        int largest = 0;
        for (int s : vars) {
            if (!seen[s]) continue;
            int count = 0;
            std::vector<int> stack{s};
            seen[s] = 0;
            while (!stack.empty()) {
                int a = stack.back();
                stack.pop_back();
                ++count;
                for (int b : neighbors[a])
                    if (seen[b]) {
                        seen[b] = 0;
                        stack.push_back(b);
                    }
            }
            largest = std::max(largest, count);
        }
        if (largest <= size / 2) return x;
    }
    throw InvalidArgument("tree_centroid: variables do not form a tree");
}

// Components of `vars` minus `removed`, each sorted, ordered by smallest variable.
inline std::vector<std::vector<int>> split_tree(const std::vector<int>& vars, int removed, const std::vector<std::vector<int>>& neighbors) {
    std::vector<char> open(neighbors.size(), 0);
    for (int v : vars) open[v] = 1;
    open[removed] = 0;
    std::vector<std::vector<int>> parts;
    for (int s : vars) {
        if (!open[s]) continue;
        std::vector<int> part, stack{s};
        open[s] = 0;
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            part.push_back(a);
            for (int b : neighbors[a])
                if (open[b]) {
                    open[b] = 0;
                    stack.push_back(b);
                }
        }
        std::sort(part.begin(), part.end());
        parts.push_back(std::move(part));
    }
    return parts;
}

// One disjunct of a KS normal form over a frozen augmentation.
class BoundedExpansionDisjunct {
public:
    BoundedExpansionDisjunct(const Augmentation& aug, const KsNormalForm& ks, int index, EqualityForest forest)
        : aug_(aug), k_(ks.k), d_(ks.disjuncts.at(static_cast<std::size_t>(index))), forest_(std::move(forest)) {}
    BoundedExpansionDisjunct(Augmentation&&, const KsNormalForm&, int, EqualityForest) = delete;

    int k() const noexcept { return k_; }
    const EqualityForest& forest() const noexcept { return forest_; }
    const KsDisjunct& disjunct() const noexcept { return d_; }

    // Whether x = u can extend `a` under τ(x), atoms against assigned variables, and F.
    bool consistent(const Assignment& a, int x, Vertex u, const ForbiddenPattern& forbidden) const {
        for (const auto& t : d_.tau) {
            if (t.var != x) continue;
            for (const auto& label : t.labels)
                if (!aug_.has_label(u, label)) return false;
            for (const auto& fe : t.fun_eqs) {
                Vertex lhs = aug_.rho(fe.a, aug_.rho(fe.b, u)), rhs = aug_.rho(fe.c, u);
                if (lhs == kUndef || rhs == kUndef || lhs != rhs) return false;
            }
        }
        auto value_of = [&](int var) { return var == x ? u : a.values[var]; };
        auto relevant = [&](const RhoAtom& at) {
            return (at.i == x || at.j == x) && (at.i == x || a.assigned(at.i)) && (at.j == x || a.assigned(at.j));
        };
        for (const auto& at : d_.eq) {
            if (!relevant(at)) continue;
            Vertex lhs = aug_.rho(at.p, value_of(at.i)), rhs = aug_.rho(at.q, value_of(at.j));
            if (lhs == kUndef || rhs == kUndef || lhs != rhs) return false;
        }
        for (const auto& at : d_.neq) {
            if (!relevant(at)) continue;
            Vertex lhs = aug_.rho(at.p, value_of(at.i)), rhs = aug_.rho(at.q, value_of(at.j));
            if (lhs != kUndef && rhs != kUndef && lhs == rhs) return false;
        }
        for (const auto& t : forbidden)
            if (t.var == x && aug_.rho(t.p, u) == t.vertex) return false;
        return true;
    }

    // Centroid recursion: try every consistent vertex for the centroid, solve the remaining
    // subtrees in order under it, keep the best result (ties: lowest vertex).
    std::optional<Assignment> solve_tree(const std::vector<int>& vars, const Assignment& a, const ForbiddenPattern& forbidden,
                                         const SubmodularOracle& f) const {
        int x = tree_centroid(vars, forest_.neighbors);
        auto parts = split_tree(vars, x, forest_.neighbors);
        std::optional<Assignment> best;
        double best_value = 0;
        for (Vertex u = 0; u < aug_.size(); ++u) {
            if (!consistent(a, x, u, forbidden)) continue;
            std::optional<Assignment> grown = a;
            grown->assign(x, u);
            for (const auto& part : parts) {
                grown = solve_tree(part, *grown, forbidden, f);
                if (!grown) break;
            }
            if (!grown) continue;
            double value = f.evaluate(detail::image(grown->values));
            if (!best || value > best_value) {
                best_value = value;
                best = std::move(grown);
            }
        }
        return best;
    }

    // Trees in forest order; an unsolvable tree stays unassigned and the rest still run.
    TreeSolution greedy(const ForbiddenPattern& forbidden, const SubmodularOracle& f) const {
        TreeSolution sol;
        sol.assignment = Assignment(k_);
        sol.complete = true;
        for (const auto& tree : forest_.components) {
            auto grown = solve_tree(tree, sol.assignment, forbidden, f);
            if (grown) sol.assignment = std::move(*grown);
            else sol.complete = false;
        }
        sol.value = f.evaluate(detail::image(sol.assignment.values));
        return sol;
    }

    // Forbidden-pattern search. For each inequality atom, suspect that the optimum's partner
    // collides with the earlier-assigned endpoint's current image, and forbid that image.
    std::optional<FoSolution> suspect_recurse(const SubmodularOracle& f, std::uint64_t* nodes) const {
        std::optional<FoSolution> best;
        std::set<ForbiddenPattern> seen{{}};
        std::vector<ForbiddenPattern> stack{{}};
        while (!stack.empty()) {
            ForbiddenPattern forbidden = std::move(stack.back());
            stack.pop_back();
            ++*nodes;
            TreeSolution sol = greedy(forbidden, f);
            if (sol.complete && (!best || detail::better_solution(sol.value, sol.assignment.values, best->value, best->tuple))) {
                FoSolution s;
                s.tuple = sol.assignment.values;
                s.value = sol.value;
                best = std::move(s);
            }
            if (forbidden.size() >= d_.neq.size()) continue;
            std::vector<ForbiddenPattern> children;
            for (const auto& at : d_.neq) {
                if (at.i == at.j) continue;
                int pi = sol.assignment.position(at.i), pj = sol.assignment.position(at.j);
                if (pi < 0 && pj < 0) continue;
                bool i_first = pj < 0 || (pi >= 0 && pi < pj);
                int early = i_first ? at.i : at.j, early_p = i_first ? at.p : at.q;
                Vertex value = aug_.rho(early_p, sol.assignment.values[early]);
                if (value == kUndef) continue;
                ForbiddenTriple triple{early, early_p, value};
                if (std::binary_search(forbidden.begin(), forbidden.end(), triple)) continue;
                ForbiddenPattern next = forbidden;
                next.insert(std::upper_bound(next.begin(), next.end(), triple), triple);
                if (seen.insert(next).second) children.push_back(std::move(next));
            }
            for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
        }
        return best;
    }

private:
    const Augmentation& aug_;
    int k_;
    KsDisjunct d_;
    EqualityForest forest_;
};

// ⌈log₂ k⌉ + 2 for the largest equality tree k over all disjuncts.
inline int bddexp_certificate(const KsValidation& v) {
    int largest = 1;
    for (const auto& forest : v.forests)
        for (const auto& tree : forest.components) largest = std::max(largest, static_cast<int>(tree.size()));
    int log = 0;
    while ((1 << log) < largest) ++log;
    return log + 2;
}

inline std::optional<FoSolution> suspect_recurse_bddexp(const KsNormalForm& ks, const Augmentation& aug, const SubmodularOracle& f) {
    KsValidation v = validate_ks(ks, aug.max_rho());
    if (!v.ok()) throw InvalidArgument("invalid KS form: " + v.violations.front());
    if (aug.steps() < ks.depth)
        throw InvalidArgument("KS form needs " + std::to_string(ks.depth) + " augmentation steps, got " + std::to_string(aug.steps()));
    auto start = std::chrono::steady_clock::now();
    std::uint64_t calls_before = f.calls(), nodes = 0;
    std::optional<FoSolution> best;
    for (std::size_t d = 0; d < ks.disjuncts.size(); ++d) {
        BoundedExpansionDisjunct solver(aug, ks, static_cast<int>(d), v.forests[d]);
        auto sol = solver.suspect_recurse(f, &nodes);
        if (sol && (!best || detail::better_solution(sol->value, sol->tuple, best->value, best->tuple))) {
            best = std::move(sol);
            best->disjunct = static_cast<int>(d);
        }
    }
    if (!best) return std::nullopt;
    best->certificate = bddexp_certificate(v);
    best->search_nodes = nodes;
    best->oracle_calls = f.calls() - calls_before;
    best->elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log_info("suspect-and-recurse (bounded expansion): value " + std::to_string(best->value) + ", " + std::to_string(nodes) + " search nodes");
    return best;
}

} // namespace logiq
