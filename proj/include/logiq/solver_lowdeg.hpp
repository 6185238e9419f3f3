#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "logiq/error.hpp"
#include "logiq/fo_solution.hpp"
#include "logiq/graph.hpp"
#include "logiq/logging.hpp"
#include "logiq/logic.hpp"
#include "logiq/submodular.hpp"

namespace logiq {

// (variable index, vertex): "entry i of the optimum is v".
struct Guess {
    int var = 0;
    Vertex vertex = 0;
    friend auto operator<=>(const Guess&, const Guess&) = default;
};
using GuessList = std::vector<Guess>; // sorted, at most one guess per variable

struct BlockSolution {
    std::vector<std::optional<VertexTuple>> blocks; // nullopt = no feasible block tuple
    VertexTuple tuple;                              // per variable, -1 when unassigned
    bool complete = false;
    double value = 0; // f of the assigned vertices
};

struct LowDegOptions {
    std::size_t max_search_nodes = 5'000'000;
};

// One disjunct of a Gaifman form over a fixed graph. Block tuples that satisfy their local
// formula and are internally 2r-connected are enumerated once up front; the greedy and the
// suspect search then only filter them.
class LowDegreeDisjunct {
public:
    LowDegreeDisjunct(const Graph& g, const GaifmanForm& gf, int index) : g_(g), k_(gf.k), d_(gf.disjuncts.at(static_cast<std::size_t>(index))) {
        r2_ = 2 * d_.r;
        block_of_.assign(static_cast<std::size_t>(k_), -1);
        for (std::size_t b = 0; b < d_.blocks.size(); ++b)
            for (int v : d_.blocks[b].vars) block_of_[v] = static_cast<int>(b);
        for (Vertex v = 0; v < g.size(); ++v) hops_.push_back(bfs_hops(g, {v}));
        for (const auto& block : d_.blocks) candidates_.push_back(enumerate_block(block));
    }
    LowDegreeDisjunct(Graph&&, const GaifmanForm&, int) = delete;

    int k() const noexcept { return k_; }
    int radius() const noexcept { return d_.r; }
    const GaifmanDisjunct& disjunct() const noexcept { return d_; }
    int block_of(int var) const { return block_of_.at(static_cast<std::size_t>(var)); }
    const std::vector<VertexTuple>& block_candidates(int block) const { return candidates_.at(static_cast<std::size_t>(block)); }

    // Best block tuple for block I given the assigned entries in `tuple` (earlier blocks) and
    // the guesses: entries avoid N(prefix ∪ guesses outside I, 2r) and match guesses inside I.
    std::optional<VertexTuple> block_solve(const VertexTuple& tuple, const GuessList& guesses, int block, const SubmodularOracle& f) const {
        const auto& vars = d_.blocks[block].vars;
        std::vector<Vertex> zone;
        for (Vertex v : tuple)
            if (v >= 0) zone.push_back(v);
        std::vector<Vertex> pin(vars.size(), -1);
        for (const auto& guess : guesses) {
            auto it = std::find(vars.begin(), vars.end(), guess.var);
            if (it == vars.end()) zone.push_back(guess.vertex);
            else pin[it - vars.begin()] = guess.vertex;
        }
        std::vector<char> blocked(static_cast<std::size_t>(g_.size()), 0);
        for (Vertex v : neighborhood(g_, make_vertex_set(zone), r2_)) blocked[v] = 1;
        VertexSet prefix = detail::image(tuple);

        std::optional<VertexTuple> best;
        double best_value = 0;
        for (const auto& cand : candidates_[block]) {
            bool ok = true;
            for (std::size_t j = 0; j < cand.size() && ok; ++j)
                ok = !blocked[cand[j]] && (pin[j] < 0 || pin[j] == cand[j]);
            if (!ok) continue;
            VertexSet u = prefix;
            u.insert(u.end(), cand.begin(), cand.end());
            double value = f.evaluate(make_vertex_set(std::move(u)));
            if (!best || value > best_value) {
                best = cand;
                best_value = value;
            }
        }
        return best;
    }

    // Blocks in order; an infeasible block is left unassigned and the rest still run.
    BlockSolution greedy(const GuessList& guesses, const SubmodularOracle& f) const {
        BlockSolution sol;
        sol.tuple.assign(static_cast<std::size_t>(k_), -1);
        sol.complete = true;
        for (std::size_t b = 0; b < d_.blocks.size(); ++b) {
            auto chosen = block_solve(sol.tuple, guesses, static_cast<int>(b), f);
            if (chosen)
                for (std::size_t j = 0; j < chosen->size(); ++j) sol.tuple[d_.blocks[b].vars[j]] = (*chosen)[j];
            else
                sol.complete = false;
            sol.blocks.push_back(std::move(chosen));
        }
        sol.value = f.evaluate(detail::image(sol.tuple));
        return sol;
    }

    // Suspect-and-recurse: rerun the greedy under every guess of an optimal entry that may
    // conflict with an earlier block (a vertex within 2r of an earlier block's assignment).
    std::optional<FoSolution> suspect_recurse(const SubmodularOracle& f, const LowDegOptions& opt, std::uint64_t* nodes) const {
        std::optional<FoSolution> best;
        std::set<GuessList> seen;
        std::vector<GuessList> stack{{}};
        seen.insert({});
        while (!stack.empty()) {
            GuessList guesses = std::move(stack.back());
            stack.pop_back();
            if (++*nodes > opt.max_search_nodes) throw CapExceeded("suspect-and-recurse exceeded " + std::to_string(opt.max_search_nodes) + " nodes");
            BlockSolution sol = greedy(guesses, f);
            if (sol.complete && (!best || detail::better_solution(sol.value, sol.tuple, best->value, best->tuple))) {
                FoSolution s;
                s.tuple = sol.tuple;
                s.value = sol.value;
                best = std::move(s);
            }
            if (static_cast<int>(guesses.size()) >= k_) continue;
            std::vector<char> guessed(static_cast<std::size_t>(k_), 0);
            for (const auto& g : guesses) guessed[g.var] = 1;
            std::vector<GuessList> children;
            for (int i = 0; i < k_; ++i) {
                if (guessed[i]) continue;
                std::vector<Vertex> earlier;
                for (int b = 0; b < block_of_[i]; ++b)
                    if (sol.blocks[b])
                        for (Vertex v : *sol.blocks[b]) earlier.push_back(v);
                if (earlier.empty()) continue;
                for (Vertex v : neighborhood(g_, make_vertex_set(earlier), r2_)) {
                    if (v == sol.tuple[i] || contradicts(guesses, {i, v})) continue;
                    GuessList next = guesses;
                    next.insert(std::upper_bound(next.begin(), next.end(), Guess{i, v}), Guess{i, v});
                    if (seen.insert(next).second) children.push_back(std::move(next));
                }
            }
            // Depth-first in ascending guess order.
            for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
        }
        return best;
    }

private:
    bool contradicts(const GuessList& guesses, Guess g) const {
        for (const auto& h : guesses) {
            if (block_of_[h.var] == block_of_[g.var]) continue;
            int d = hops_[h.vertex][g.vertex];
            if (d >= 0 && d <= r2_) return true;
        }
        return false;
    }

    bool connected_within(const VertexTuple& t) const {
        std::vector<char> reached(t.size(), 0);
        std::vector<std::size_t> queue{0};
        reached[0] = 1;
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (std::size_t j = 0; j < t.size(); ++j) {
                int d = hops_[t[queue[h]]][t[j]];
                if (!reached[j] && d >= 0 && d <= r2_) {
                    reached[j] = 1;
                    queue.push_back(j);
                }
            }
        return queue.size() == t.size();
    }

    // All block tuples satisfying the local formula whose entries are 2r-connected, in
    // lexicographic order. The first entry anchors; the rest lie within 2r(m-1) of it.
    std::vector<VertexTuple> enumerate_block(const GaifmanBlock& block) const {
        std::vector<VertexTuple> out;
        const std::size_t m = block.vars.size();
        const int reach = r2_ * static_cast<int>(m - 1);
        VertexTuple t(m);
        for (Vertex anchor = 0; anchor < g_.size(); ++anchor) {
            t[0] = anchor;
            VertexSet ball = neighborhood(g_, {anchor}, reach);
            std::function<void(std::size_t)> fill = [&](std::size_t j) {
                if (j == m) {
                    if (connected_within(t) && eval_local(g_, *block.formula, t, d_.r)) out.push_back(t);
                    return;
                }
                for (Vertex v : ball) {
                    t[j] = v;
                    fill(j + 1);
                }
            };
            fill(1);
        }
        return out;
    }

    const Graph& g_;
    int k_;
    GaifmanDisjunct d_;
    int r2_ = 0;
    std::vector<int> block_of_;
    std::vector<std::vector<int>> hops_;
    std::vector<std::vector<VertexTuple>> candidates_;
};

// Best complete solution over all disjuncts; ties prefer the higher value, then the
// lexicographically smaller tuple. nullopt when no disjunct yields a complete solution.
inline std::optional<FoSolution> suspect_recurse_lowdeg(const Graph& g, const GaifmanForm& gf, const SubmodularOracle& f, LowDegOptions opt = {}) {
    auto violations = validate_gaifman(gf);
    if (!violations.empty()) throw InvalidArgument("invalid Gaifman form: " + violations.front());
    auto start = std::chrono::steady_clock::now();
    std::uint64_t calls_before = f.calls(), nodes = 0;
    std::optional<FoSolution> best;
    for (std::size_t d = 0; d < gf.disjuncts.size(); ++d) {
        LowDegreeDisjunct solver(g, gf, static_cast<int>(d));
        auto sol = solver.suspect_recurse(f, opt, &nodes);
        if (sol && (!best || detail::better_solution(sol->value, sol->tuple, best->value, best->tuple))) {
            best = std::move(sol);
            best->disjunct = static_cast<int>(d);
        }
    }
    if (!best) return std::nullopt;
    best->certificate = 2;
    best->search_nodes = nodes;
    best->oracle_calls = f.calls() - calls_before;
    best->elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log_info("suspect-and-recurse (low degree): value " + std::to_string(best->value) + ", " + std::to_string(nodes) + " search nodes");
    return best;
}

// All set partitions of {0..k-1} as class labels (restricted growth strings).
inline std::vector<std::vector<int>> set_partitions(int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> label(static_cast<std::size_t>(k), 0);
    std::function<void(int, int)> go = [&](int i, int used) {
        if (i == k) {
            out.push_back(label);
            return;
        }
        for (int c = 0; c <= used; ++c) {
            label[i] = c;
            go(i + 1, std::max(used, c + 1));
        }
    };
    go(0, 0);
    return out;
}

// Exact optimum for a modular objective: for each way of letting variables coincide, merge
// them, require the remaining variables of a block to be distinct, and run the suspect search.
inline std::optional<FoSolution> solve_linear_exact(const Graph& g, const GaifmanForm& gf, const ModularFunction& w, LowDegOptions opt = {}) {
    auto violations = validate_gaifman(gf);
    if (!violations.empty()) throw InvalidArgument("invalid Gaifman form: " + violations.front());
    auto start = std::chrono::steady_clock::now();
    std::uint64_t calls_before = w.calls(), nodes = 0;
    std::optional<FoSolution> best;
    for (const auto& classes : set_partitions(gf.k)) {
        int reduced_k = *std::max_element(classes.begin(), classes.end()) + 1;
        for (std::size_t d = 0; d < gf.disjuncts.size(); ++d) {
            const auto& dis = gf.disjuncts[d];
            // A class spanning two blocks would need distance > 2r from itself.
            bool spans = false;
            std::vector<int> owner(static_cast<std::size_t>(reduced_k), -1);
            for (std::size_t b = 0; b < dis.blocks.size(); ++b)
                for (int v : dis.blocks[b].vars) {
                    int c = classes[v];
                    if (owner[c] >= 0 && owner[c] != static_cast<int>(b)) spans = true;
                    owner[c] = static_cast<int>(b);
                }
            if (spans) continue;
            GaifmanForm reduced;
            reduced.k = reduced_k;
            GaifmanDisjunct rd;
            rd.r = dis.r;
            for (const auto& block : dis.blocks) {
                std::vector<int> reps;
                for (int v : block.vars)
                    if (std::find(reps.begin(), reps.end(), classes[v]) == reps.end()) reps.push_back(classes[v]);
                std::vector<int> mapping;
                for (int v : block.vars) mapping.push_back(static_cast<int>(std::find(reps.begin(), reps.end(), classes[v]) - reps.begin()));
                std::vector<std::string> names;
                for (int c : reps) names.push_back(variable_name(c));
                Formula merged = rename_free(*block.formula, mapping, static_cast<int>(reps.size()), names);
                std::string distinct = "true";
                for (std::size_t a = 0; a < reps.size(); ++a)
                    for (std::size_t b2 = a + 1; b2 < reps.size(); ++b2) distinct += " & " + names[a] + " != " + names[b2];
                Formula both = conjoin(merged, parse_formula(distinct, names));
                GaifmanBlock rb;
                rb.vars = reps;
                rb.text = both.to_string();
                rb.formula = std::move(both);
                rd.blocks.push_back(std::move(rb));
            }
            reduced.disjuncts.push_back(std::move(rd));
            LowDegreeDisjunct solver(g, reduced, 0);
            auto sol = solver.suspect_recurse(w, opt, &nodes);
            if (!sol) continue;
            VertexTuple full(static_cast<std::size_t>(gf.k));
            for (int i = 0; i < gf.k; ++i) full[i] = sol->tuple[classes[i]];
            double value = w.evaluate(detail::image(full));
            if (!best || detail::better_solution(value, full, best->value, best->tuple)) {
                FoSolution s;
                s.tuple = std::move(full);
                s.value = value;
                s.disjunct = static_cast<int>(d);
                best = std::move(s);
            }
        }
    }
    if (!best) return std::nullopt;
    best->certificate = 1;
    best->search_nodes = nodes;
    best->oracle_calls = w.calls() - calls_before;
    best->elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return best;
}

// Checks that `blocks` alpha-dominates `optimal` block by block: for every prefix,
// alpha * (gain of the next chosen block) >= gain of the corresponding optimal block.
inline bool prefix_dominating(const SubmodularOracle& f, const std::vector<VertexSet>& blocks, const std::vector<VertexSet>& optimal, double alpha) {
    if (blocks.size() != optimal.size()) throw InvalidArgument("prefix_dominating: block counts differ");
    VertexSet prefix;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        double base = f.evaluate(prefix);
        double mine = f.evaluate(set_union(prefix, blocks[i])) - base;
        double theirs = f.evaluate(set_union(prefix, optimal[i])) - base;
        if (!approx_leq(theirs, alpha * mine)) return false;
        prefix = set_union(prefix, blocks[i]);
    }
    return true;
}

} // namespace logiq
