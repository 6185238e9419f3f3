#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "logiq/dnnf.hpp"
#include "logiq/error.hpp"
#include "logiq/graph.hpp"
#include "logiq/logging.hpp"
#include "logiq/predicate.hpp"
#include "logiq/tree_decomposition.hpp"

namespace logiq {

struct PredicateInfo {
    std::string id;
    std::string description;
    std::string states; // reachable states per bag of size b
};

inline std::vector<PredicateInfo> list_predicates() {
    return {
        {"indset", "no edge has both endpoints in X", "2^b"},
        {"vcover", "every edge has an endpoint in X", "2^b"},
        {"domset", "every vertex is in X or adjacent to X", "3^b"},
        {"connected", "X induces a connected subgraph (empty counts as connected)", "4 * sum_k C(b,k) Bell(k)"},
        {"nonempty", "X is not empty", "2^(b+1)"},
        {"edge_in", "X contains both endpoints of some edge", "2^(b+1)"},
        {"all", "X is the whole vertex set", "2^b"},
        {"true", "no constraint", "1"},
    };
}

// Upper bound on reachable compiler states at one node with bag size b, for a single predicate.
inline double predicate_state_bound(Predicate p, int b) {
    double two = std::pow(2.0, b);
    switch (p) {
    case Predicate::IndSet:
    case Predicate::VCover:
    case Predicate::All: return two;
    case Predicate::DomSet: return std::pow(3.0, b);
    case Predicate::NonEmpty:
    case Predicate::EdgeIn: return 2 * two;
    case Predicate::Connected: {
        // Bell numbers via the triangle.
        std::vector<std::vector<double>> tri{{1}};
        for (int i = 1; i <= b; ++i) {
            std::vector<double> row{tri.back().back()};
            for (double x : tri.back()) row.push_back(row.back() + x);
            tri.push_back(row);
        }
        double total = 0, binom = 1;
        for (int k = 0; k <= b; ++k) {
            total += binom * tri[k].front();
            binom = binom * (b - k) / (k + 1);
        }
        return 4 * total;
    }
    case Predicate::True: return 1;
    }
    return 0;
}

struct CompileOptions {
    int connected_max_bag = 8;              // CONNECTED state space grows with Bell numbers
    std::size_t max_states_per_node = 1u << 20;
};

struct CompileStats {
    std::size_t max_states = 0; // largest state table over all decomposition nodes
    int decomposition_width = -1;
};

namespace detail {

// Bottom-up automaton run over a nice decomposition. A state is the membership mask of the
// current bag plus one component per distinct predicate; components carry a "dead" bit instead
// of being dropped so that disjunctions can still be satisfied by another predicate.
class MsoCompiler {
public:
    using Component = std::vector<int>;
    struct State {
        std::uint32_t mask = 0;
        std::vector<Component> parts;
        friend bool operator<(const State& a, const State& b) {
            return a.mask != b.mask ? a.mask < b.mask : a.parts < b.parts;
        }
    };

    MsoCompiler(const Graph& g, const NiceTreeDecomposition& nice, const PredicateExpr& expr, CompileOptions opt)
        : g_(g), nice_(nice), expr_(expr), preds_(expr.predicates()), opt_(opt) {
        track_mask_ = std::any_of(preds_.begin(), preds_.end(), [](Predicate p) { return p != Predicate::True; });
    }

    StructuredDnnf run(CompileStats* stats) {
        auto problems = check_nice(nice_);
        if (!problems.empty()) throw InvalidArgument("not a nice decomposition: " + problems.front());
        auto violations = validate(g_, nice_.as_plain());
        if (!violations.empty()) throw InvalidArgument("decomposition does not match graph: " + violations.front().message);
        int width = nice_.width();
        if (width + 1 > 31) throw CapExceeded("bag size " + std::to_string(width + 1) + " exceeds the 31-vertex mask limit");
        if (std::count(preds_.begin(), preds_.end(), Predicate::Connected) && width + 1 > opt_.connected_max_bag)
            throw CapExceeded("connected(X) is limited to bags of size " + std::to_string(opt_.connected_max_bag) +
                              ", decomposition has " + std::to_string(width + 1));

        DnnfBuilder b(build_vtree());
        std::vector<std::map<State, int>> table(nice_.nodes.size());
        std::size_t max_states = 0;
        for (std::size_t n = 0; n < nice_.nodes.size(); ++n) {
            const auto& node = nice_.nodes[n];
            std::map<State, std::vector<int>> acc;
            switch (node.kind) {
            case NiceKind::Leaf: {
                State s;
                for (auto p : preds_) s.parts.push_back(initial(p));
                acc[s].push_back(b.top());
                break;
            }
            case NiceKind::Introduce: {
                const auto& child = nice_.nodes[node.children[0]];
                int pos = index_in(node.bag, node.vertex);
                for (const auto& [s, gate] : table[node.children[0]])
                    for (int x = 0; x <= (track_mask_ ? 1 : 0); ++x) {
                        State t = introduce(s, child.bag, node.bag, pos, x);
                        if (alive(t)) acc[t].push_back(gate);
                    }
                break;
            }
            case NiceKind::Forget: {
                const auto& child = nice_.nodes[node.children[0]];
                int pos = index_in(child.bag, node.vertex);
                for (const auto& [s, gate] : table[node.children[0]]) {
                    int x = s.mask >> pos & 1;
                    State t = forget(s, child.bag, pos);
                    if (!alive(t)) continue;
                    int lit = track_mask_ ? b.literal(node.vertex, x == 1) : b.top();
                    acc[t].push_back(b.conjoin(gate, lit));
                }
                break;
            }
            case NiceKind::Join: {
                const auto& left = table[node.children[0]];
                const auto& right = table[node.children[1]];
                for (const auto& [s1, g1] : left)
                    for (const auto& [s2, g2] : right) {
                        if (s1.mask != s2.mask) continue;
                        State t = join(s1, s2, node.bag);
                        if (alive(t)) acc[t].push_back(b.conjoin(g1, g2));
                    }
                break;
            }
            }
            for (auto& [s, gates] : acc) {
                int gate = b.disjoin(gates);
                if (!b.is_false(gate)) table[n].emplace(s, gate);
            }
            if (table[n].size() > opt_.max_states_per_node)
                throw CapExceeded("compiler state table exceeds " + std::to_string(opt_.max_states_per_node) + " states");
            max_states = std::max(max_states, table[n].size());
            // Children tables are no longer needed once their parent is built.
            for (int c : node.children) std::map<State, int>().swap(table[c]);
        }
        std::vector<int> accepted;
        for (const auto& [s, gate] : table[nice_.root])
            if (accepts(s)) accepted.push_back(gate);
        log_debug("compiled " + expr_.to_string() + ": max states " + std::to_string(max_states));
        if (stats) {
            stats->max_states = max_states;
            stats->decomposition_width = width;
        }
        return b.finish(b.disjoin(accepted));
    }

private:
    // Vtree mirroring the decomposition: FORGET(v) -> (child, v), JOIN -> (left, right);
    // LEAF and INTRODUCE add nothing.
    Vtree build_vtree() {
        std::vector<Vtree::Node> raw;
        std::vector<int> top(nice_.nodes.size(), -1);
        for (std::size_t n = 0; n < nice_.nodes.size(); ++n) {
            const auto& node = nice_.nodes[n];
            auto internal = [&](int a, int c) {
                if (a < 0) return c;
                if (c < 0) return a;
                raw.push_back(Vtree::Node{a, c, -1, -1});
                return static_cast<int>(raw.size()) - 1;
            };
            switch (node.kind) {
            case NiceKind::Leaf: break;
            case NiceKind::Introduce: top[n] = top[node.children[0]]; break;
            case NiceKind::Forget:
                raw.push_back(Vtree::Node{-1, -1, -1, node.vertex});
                top[n] = internal(top[node.children[0]], static_cast<int>(raw.size()) - 1);
                break;
            case NiceKind::Join: top[n] = internal(top[node.children[0]], top[node.children[1]]); break;
            }
        }
        return Vtree::from_nodes(raw, top[nice_.root]);
    }

    static int index_in(const VertexSet& bag, Vertex v) {
        return static_cast<int>(std::lower_bound(bag.begin(), bag.end(), v) - bag.begin());
    }

    static std::uint32_t insert_bit(std::uint32_t mask, int pos, int bit) {
        std::uint32_t low = mask & ((1u << pos) - 1);
        return low | (static_cast<std::uint32_t>(bit) << pos) | ((mask >> pos) << (pos + 1));
    }

    static std::uint32_t remove_bit(std::uint32_t mask, int pos) {
        std::uint32_t low = mask & ((1u << pos) - 1);
        return low | ((mask >> (pos + 1)) << pos);
    }

    static void insert_at(Component& c, std::size_t offset, int pos, int value) {
        c.insert(c.begin() + static_cast<std::ptrdiff_t>(offset) + pos, value);
    }

    static Component initial(Predicate p) {
        switch (p) {
        case Predicate::DomSet: return {0};          // dead, then one dominated bit per bag vertex
        case Predicate::Connected: return {0, 0, 0}; // dead, seen, closed, then block labels
        default: return {0};                         // dead or flag
        }
    }

    // Relabels connected-blocks by first occurrence (offset 3 onwards; -1 = not in X).
    static void canonical_blocks(Component& c) {
        std::map<int, int> rename;
        for (std::size_t i = 3; i < c.size(); ++i)
            if (c[i] >= 0) {
                auto it = rename.emplace(c[i], static_cast<int>(rename.size())).first;
                c[i] = it->second;
            }
    }

    State introduce(const State& s, const VertexSet& old_bag, const VertexSet& bag, int pos, int x) const {
        State t;
        t.mask = insert_bit(s.mask, pos, x);
        Vertex v = bag[pos];
        auto in_x = [&](int i) { return (t.mask >> i & 1) != 0; };
        std::vector<int> nbrs; // bag positions adjacent to v
        for (std::size_t i = 0; i < bag.size(); ++i)
            if (static_cast<int>(i) != pos && g_.adjacent(v, bag[i])) nbrs.push_back(static_cast<int>(i));
        (void)old_bag;
        for (std::size_t k = 0; k < preds_.size(); ++k) {
            Component c = s.parts[k];
            switch (preds_[k]) {
            case Predicate::IndSet:
                if (x)
                    for (int i : nbrs)
                        if (in_x(i)) c[0] = 1;
                break;
            case Predicate::VCover:
                if (!x)
                    for (int i : nbrs)
                        if (!in_x(i)) c[0] = 1;
                break;
            case Predicate::EdgeIn:
                if (x)
                    for (int i : nbrs)
                        if (in_x(i)) c[0] = 1;
                break;
            case Predicate::NonEmpty:
                if (x) c[0] = 1;
                break;
            case Predicate::All:
                if (!x) c[0] = 1;
                break;
            case Predicate::DomSet: {
                int dominated = 0;
                for (int i : nbrs)
                    if (in_x(i)) dominated = 1;
                insert_at(c, 1, pos, x ? 0 : dominated);
                if (x)
                    for (int i : nbrs)
                        if (!in_x(i)) c[1 + i] = 1;
                break;
            }
            case Predicate::Connected: {
                if (!x) {
                    insert_at(c, 3, pos, -1);
                    break;
                }
                if (c[2]) c[0] = 1; // a finished component already exists
                c[1] = 1;
                int fresh = 1000;
                insert_at(c, 3, pos, fresh);
                for (int i : nbrs) {
                    if (!in_x(i)) continue;
                    int old = c[3 + i];
                    for (std::size_t j = 3; j < c.size(); ++j)
                        if (c[j] == old) c[j] = fresh;
                }
                canonical_blocks(c);
                break;
            }
            case Predicate::True: break;
            }
            t.parts.push_back(std::move(c));
        }
        return t;
    }

    State forget(const State& s, const VertexSet& bag, int pos) const {
        State t;
        t.mask = remove_bit(s.mask, pos);
        int x = s.mask >> pos & 1;
        for (std::size_t k = 0; k < preds_.size(); ++k) {
            Component c = s.parts[k];
            switch (preds_[k]) {
            case Predicate::DomSet:
                if (!x && !c[1 + pos]) c[0] = 1;
                c.erase(c.begin() + 1 + pos);
                break;
            case Predicate::Connected: {
                if (x) {
                    int label = c[3 + pos];
                    bool shared = false, other_x = false;
                    for (std::size_t i = 0; i < bag.size(); ++i) {
                        if (static_cast<int>(i) == pos || c[3 + i] < 0) continue;
                        other_x = true;
                        if (c[3 + i] == label) shared = true;
                    }
                    if (!shared) {
                        if (other_x) c[0] = 1;
                        else c[2] = 1;
                    }
                }
                c.erase(c.begin() + 3 + pos);
                canonical_blocks(c);
                break;
            }
            default: break;
            }
            t.parts.push_back(std::move(c));
        }
        (void)bag;
        return t;
    }

    State join(const State& a, const State& b, const VertexSet& bag) const {
        State t;
        t.mask = a.mask;
        for (std::size_t k = 0; k < preds_.size(); ++k) {
            const Component& x = a.parts[k];
            const Component& y = b.parts[k];
            Component c = x;
            switch (preds_[k]) {
            case Predicate::DomSet:
                c[0] = x[0] | y[0];
                for (std::size_t i = 1; i < c.size(); ++i) c[i] = x[i] | y[i];
                break;
            case Predicate::Connected: {
                c[0] = x[0] | y[0];
                if ((x[2] && y[1]) || (y[2] && x[1])) c[0] = 1;
                c[1] = x[1] | y[1];
                c[2] = x[2] | y[2];
                // Union of the two bag partitions.
                std::vector<int> parent(bag.size());
                std::iota(parent.begin(), parent.end(), 0);
                std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
                for (const Component* side : {&x, &y})
                    for (std::size_t i = 0; i < bag.size(); ++i)
                        for (std::size_t j = i + 1; j < bag.size(); ++j)
                            if ((*side)[3 + i] >= 0 && (*side)[3 + i] == (*side)[3 + j]) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
                for (std::size_t i = 0; i < bag.size(); ++i) c[3 + i] = x[3 + i] < 0 ? -1 : find(static_cast<int>(i));
                canonical_blocks(c);
                break;
            }
            case Predicate::True: break;
            default: c[0] = x[0] | y[0]; break;
            }
            t.parts.push_back(std::move(c));
        }
        return t;
    }

    static bool is_flag(Predicate p) { return p == Predicate::NonEmpty || p == Predicate::EdgeIn; }

    bool value(const PredicateExpr& e, const State& s, bool final) const {
        switch (e.kind) {
        case PredicateExpr::Kind::Leaf: {
            if (e.predicate == Predicate::True) return true;
            std::size_t k = static_cast<std::size_t>(std::find(preds_.begin(), preds_.end(), e.predicate) - preds_.begin());
            if (is_flag(e.predicate)) return !final || s.parts[k][0] == 1;
            return s.parts[k][0] == 0;
        }
        case PredicateExpr::Kind::And:
            for (const auto& c : e.children)
                if (!value(c, s, final)) return false;
            return true;
        case PredicateExpr::Kind::Or:
            for (const auto& c : e.children)
                if (value(c, s, final)) return true;
            return false;
        }
        return false;
    }

    bool alive(const State& s) const { return value(expr_, s, false); }
    bool accepts(const State& s) const { return value(expr_, s, true); }

    const Graph& g_;
    const NiceTreeDecomposition& nice_;
    const PredicateExpr& expr_;
    std::vector<Predicate> preds_;
    CompileOptions opt_;
    bool track_mask_ = false;
};

} // namespace detail

// Circuit whose models are exactly the sets X with g |= expr(X). The vtree follows the nice
// decomposition; each vertex's leaf hangs at its FORGET node.
inline StructuredDnnf compile(const Graph& g, const NiceTreeDecomposition& nice, const PredicateExpr& expr,
                              CompileOptions opt = {}, CompileStats* stats = nullptr) {
    return detail::MsoCompiler(g, nice, expr, opt).run(stats);
}

inline StructuredDnnf compile(const Graph& g, const PredicateExpr& expr, CompileOptions opt = {}, CompileStats* stats = nullptr) {
    return compile(g, make_nice(min_fill_decomposition(g)), expr, opt, stats);
}

} // namespace logiq
