#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "logiq/dnnf.hpp"
#include "logiq/logging.hpp"
#include "logiq/submodular.hpp"

namespace logiq {

struct MsoOptions {
    int base_size = 1; // circuits over at most this many variables are solved by enumeration
};

struct MsoSolution {
    VertexSet set;
    double value = 0;
    int certificate = 1; // f(OPT) <= certificate * value
    std::uint64_t oracle_calls = 0;
    double elapsed_ms = 0;
    std::uint64_t recursive_calls = 0;
    int depth = 0; // deepest split level reached
};

// Factor the solver may report on n variables: 1 + ceil(log_{3/2} n).
inline int mso_certificate_bound(int n) {
    if (n <= 1) return 1;
    return 1 + static_cast<int>(std::ceil(std::log(static_cast<double>(n)) / std::log(1.5) - 1e-12));
}

namespace detail {

struct GreedyResult {
    VertexSet set;
    int certificate = 1;
    int depth = 0;
};

class RecursiveGreedy {
public:
    explicit RecursiveGreedy(MsoOptions opt) : opt_(opt) {}

    std::optional<GreedyResult> solve(const StructuredDnnf& d, const SubmodularOracle& f) {
        ++calls_;
        if (!d.satisfiable()) return std::nullopt;
        const Vtree& vt = d.vtree();
        // Any model can be extended to all of a true circuit's variables; by monotonicity that is optimal.
        if (d.is_true()) return GreedyResult{vt.variables(), 1, 0};
        if (vt.leaf_count() <= opt_.base_size) {
            auto models = d.enumerate_models();
            GreedyResult best;
            double best_value = -1;
            for (auto& m : models) {
                double v = f.evaluate(m);
                if (v > best_value) {
                    best_value = v;
                    best.set = std::move(m);
                }
            }
            return best;
        }
        SeparatorSplit parts = split(d, leaf_separator(vt));
        std::optional<GreedyResult> best;
        double best_value = 0;
        int child_certificate = 0, child_depth = 0;
        for (const auto& pair : parts.pairs) {
            auto first = solve(pair.first, f);
            if (!first) continue;
            auto contracted = contract(f, first->set);
            auto second = solve(pair.second, *contracted);
            if (!second) continue;
            child_certificate = std::max({child_certificate, first->certificate, second->certificate});
            child_depth = std::max({child_depth, first->depth, second->depth});
            VertexSet u = set_union(first->set, second->set);
            double value = f.evaluate(u);
            if (!best || value > best_value) {
                best_value = value;
                best = GreedyResult{std::move(u), 0, 0};
            }
        }
        if (best) {
            best->certificate = child_certificate + 1;
            best->depth = child_depth + 1;
        }
        return best;
    }

    std::uint64_t calls() const noexcept { return calls_; }

private:
    MsoOptions opt_;
    std::uint64_t calls_ = 0;
};

} // namespace detail

// Recursive greedy over the models of `d`: split at a leaf separator, solve the first factor,
// then the second against the contracted objective, keep the best pair. Returns nullopt when
// `d` has no model.
inline std::optional<MsoSolution> recursive_greedy(const StructuredDnnf& d, const SubmodularOracle& f, MsoOptions opt = {}) {
    auto start = std::chrono::steady_clock::now();
    std::uint64_t calls_before = f.calls();
    for (Vertex v : d.vtree().variables())
        if (v >= f.ground_size()) throw InvalidArgument("circuit variable " + std::to_string(v + 1) + " outside the objective's ground set");
    detail::RecursiveGreedy rg(opt);
    auto result = rg.solve(d, f);
    if (!result) return std::nullopt;
    MsoSolution sol;
    sol.set = std::move(result->set);
    sol.value = f.evaluate(sol.set);
    sol.certificate = result->certificate;
    sol.depth = result->depth;
    sol.recursive_calls = rg.calls();
    sol.oracle_calls = f.calls() - calls_before;
    sol.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log_info("recursive greedy: value " + std::to_string(sol.value) + ", certificate " + std::to_string(sol.certificate) +
             ", " + std::to_string(sol.recursive_calls) + " calls");
    return sol;
}

} // namespace logiq
