#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "logiq/error.hpp"
#include "logiq/graph.hpp"

namespace logiq {

inline constexpr Vertex kUndef = -1;

// Label on vertex v recording a composition fact, with kind 't' (transitive) or 'f' (fraternal).
//   t: ρ_r(v) = ρ_q(ρ_p(v))
//   f: ρ_r(v) = ρ_q(y) where v = ρ_p(y) for some witness y
// Text form "t:r:q:p" / "f:r:q:p", which is what τ label atoms refer to.
struct AugmentationLabel {
    char kind = 't';
    int r = 0, q = 0, p = 0;

    std::string to_string() const { return std::string(1, kind) + ":" + std::to_string(r) + ":" + std::to_string(q) + ":" + std::to_string(p); }
    friend auto operator<=>(const AugmentationLabel&, const AugmentationLabel&) = default;
};

struct AugmentationArc {
    Vertex tail = 0, head = 0;
    int step = 0; // 0 = from the initial orientation
    friend auto operator<=>(const AugmentationArc&, const AugmentationArc&) = default;
};

class Augmentation {
public:
    Augmentation() = default;

    int size() const noexcept { return n_; }
    int steps() const noexcept { return static_cast<int>(levels_.size()) - 1; }
    const DirectedGraph& level(int j) const { return levels_.at(static_cast<std::size_t>(j)); }
    const DirectedGraph& final_graph() const { return levels_.back(); }
    const std::vector<int>& in_degree_history() const noexcept { return gamma_; }
    const std::vector<AugmentationArc>& arc_history() const noexcept { return arc_history_; }

    // Largest usable ρ index.
    int max_rho() const noexcept { return final_graph().max_in_degree(); }

    // ρ_0 is the identity; ρ_p(u) for p ≥ 1 is u's p-th in-neighbour in insertion order.
    Vertex rho(int p, Vertex u) const {
        if (u == kUndef) return kUndef;
        if (p == 0) return u;
        const auto& order = in_order_.at(static_cast<std::size_t>(u));
        if (p < 0 || p > static_cast<int>(order.size())) return kUndef;
        return order[p - 1];
    }

    const std::vector<Vertex>& in_order(Vertex u) const { return in_order_.at(static_cast<std::size_t>(u)); }
    const std::set<AugmentationLabel>& labels(Vertex v) const { return labels_.at(static_cast<std::size_t>(v)); }

    bool has_label(Vertex v, const std::string& text) const {
        for (const auto& l : labels(v))
            if (l.to_string() == text) return true;
        return false;
    }

    // `arc u v step` and `label v r q p kind`, vertices 1-based.
    std::string dump() const {
        std::ostringstream out;
        for (const auto& a : arc_history_) out << "arc " << a.tail + 1 << " " << a.head + 1 << " " << a.step << "\n";
        for (Vertex v = 0; v < n_; ++v)
            for (const auto& l : labels_[v]) out << "label " << v + 1 << " " << l.r << " " << l.q << " " << l.p << " " << l.kind << "\n";
        return out.str();
    }

private:
    friend Augmentation fraternal_augment(const DirectedGraph&, int, std::size_t);

    int n_ = 0;
    std::vector<DirectedGraph> levels_;
    std::vector<std::vector<Vertex>> in_order_;
    std::vector<std::set<AugmentationLabel>> labels_;
    std::vector<int> gamma_;
    std::vector<AugmentationArc> arc_history_;
};

// Transitive fraternal augmentation: each step adds u→w for every u→v→w of the previous level,
// then joins the two tails of every common head, orienting each such edge toward the endpoint
// with the smaller current in-degree (ties toward the lower id).
inline Augmentation fraternal_augment(const DirectedGraph& start, int steps, std::size_t arc_cap = 1u << 20) {
    if (steps < 0) throw InvalidArgument("augmentation steps must be nonnegative");
    const int n = start.size();
    if (start.arc_count() > arc_cap) throw CapExceeded("orientation already has more than " + std::to_string(arc_cap) + " arcs");
    Augmentation aug;
    aug.n_ = n;
    aug.levels_.push_back(start);
    aug.in_order_.resize(static_cast<std::size_t>(n));
    aug.labels_.resize(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) aug.in_order_[v] = start.in_neighbors(v);
    for (auto [u, v] : start.arcs()) aug.arc_history_.push_back({u, v, 0});
    aug.gamma_.push_back(start.max_in_degree());

    auto index_of = [&](Vertex tail, Vertex head) {
        const auto& order = aug.in_order_[head];
        return static_cast<int>(std::find(order.begin(), order.end(), tail) - order.begin()) + 1;
    };

    for (int step = 1; step <= steps; ++step) {
        const DirectedGraph& prev = aug.levels_.back();
        std::vector<std::vector<char>> arc(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
        std::vector<int> indeg(static_cast<std::size_t>(n), 0);
        for (auto [u, v] : prev.arcs()) arc[u][v] = 1;
        for (Vertex v = 0; v < n; ++v) indeg[v] = static_cast<int>(prev.in_neighbors(v).size());
        std::vector<std::vector<Vertex>> new_tails(static_cast<std::size_t>(n));
        std::set<std::pair<Vertex, Vertex>> added;
        std::size_t total = prev.arc_count();
        auto add_arc = [&](Vertex u, Vertex w) {
            arc[u][w] = 1;
            ++indeg[w];
            new_tails[w].push_back(u);
            added.insert({u, w});
            if (++total > arc_cap) throw CapExceeded("augmentation exceeded " + std::to_string(arc_cap) + " arcs at step " + std::to_string(step));
        };

        // Transitivity.
        for (Vertex v = 0; v < n; ++v)
            for (Vertex u : prev.in_neighbors(v))
                for (Vertex w : prev.out_neighbors(v))
                    if (u != w && !arc[u][w]) add_arc(u, w);
        // Fraternality on common heads.
        std::map<std::pair<Vertex, Vertex>, std::pair<Vertex, Vertex>> fraternal; // {tail, head} of new edge
        for (Vertex v = 0; v < n; ++v) {
            const auto& tails = prev.in_neighbors(v);
            for (std::size_t a = 0; a < tails.size(); ++a)
                for (std::size_t b = a + 1; b < tails.size(); ++b) {
                    Vertex x = tails[a], y = tails[b];
                    if (arc[x][y] || arc[y][x]) continue;
                    Vertex head = indeg[x] < indeg[y] ? x : indeg[y] < indeg[x] ? y : std::min(x, y);
                    Vertex tail = head == x ? y : x;
                    add_arc(tail, head);
                    fraternal[{std::min(x, y), std::max(x, y)}] = {tail, head};
                }
        }

        for (Vertex w = 0; w < n; ++w) {
            std::sort(new_tails[w].begin(), new_tails[w].end());
            for (Vertex u : new_tails[w]) aug.in_order_[w].push_back(u);
        }
        for (auto [u, w] : added) aug.arc_history_.push_back({u, w, step});

        // Labels for every witness of a new arc.
        for (auto [u, w] : added) {
            int c = index_of(u, w);
            for (Vertex v : prev.in_neighbors(w))
                if (prev.has_arc(u, v)) aug.labels_[w].insert({'t', c, index_of(u, v), index_of(v, w)});
        }
        for (const auto& [pair, oriented] : fraternal) {
            auto [u, w] = oriented;
            int c = index_of(u, w);
            for (Vertex v = 0; v < n; ++v)
                if (prev.has_arc(u, v) && prev.has_arc(w, v)) aug.labels_[w].insert({'f', c, index_of(u, v), index_of(w, v)});
        }

        std::vector<std::pair<Vertex, Vertex>> arcs;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex w = 0; w < n; ++w)
                if (arc[u][w]) arcs.emplace_back(u, w);
        aug.levels_.emplace_back(n, arcs);
        aug.gamma_.push_back(aug.levels_.back().max_in_degree());
    }
    std::sort(aug.arc_history_.begin(), aug.arc_history_.end(),
              [](const AugmentationArc& a, const AugmentationArc& b) { return std::tie(a.step, a.tail, a.head) < std::tie(b.step, b.tail, b.head); });
    return aug;
}

inline Augmentation fraternal_augment(const Graph& g, int steps, std::size_t arc_cap = 1u << 20) {
    return fraternal_augment(degeneracy_orientation(g), steps, arc_cap);
}

} // namespace logiq
