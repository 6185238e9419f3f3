#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "logiq/error.hpp"
#include "logiq/graph.hpp"

namespace logiq {

// Rooted full binary tree whose leaves are labeled by variables (graph vertices). Nodes are
// stored in preorder, so subtree(u) is the contiguous id range [u, u + 2*leaves(u) - 1).
class Vtree {
public:
    struct Node {
        int left = -1;
        int right = -1;
        int parent = -1;
        Vertex var = -1; // leaves only
        int leaves = 0;
        int depth = 0;
    };

    Vtree() = default;

    // Normalizes arbitrary node ids (only left/right/var are read) into preorder. `remap`, when
    // given, receives old id -> new id (-1 for nodes not under `root`).
    static Vtree from_nodes(const std::vector<Node>& raw, int root, std::vector<int>* remap = nullptr) {
        Vtree t;
        std::vector<int> map(raw.size(), -1);
        if (root < 0) {
            if (remap) *remap = map;
            return t;
        }
        std::vector<std::pair<int, int>> stack{{root, -1}}; // (old id, new parent)
        while (!stack.empty()) {
            auto [old, parent] = stack.back();
            stack.pop_back();
            if (old < 0 || static_cast<std::size_t>(old) >= raw.size()) throw InvalidArgument("vtree child id out of range");
            if (map[old] >= 0) throw InvalidArgument("vtree node reached twice");
            const Node& r = raw[old];
            bool leaf = r.left < 0 && r.right < 0;
            if (!leaf && (r.left < 0 || r.right < 0)) throw InvalidArgument("vtree is not full: node with one child");
            if (leaf && r.var < 0) throw InvalidArgument("vtree leaf without a variable");
            int id = static_cast<int>(t.nodes_.size());
            map[old] = id;
            Node n;
            n.parent = parent;
            n.var = leaf ? r.var : -1;
            t.nodes_.push_back(n);
            if (parent >= 0) {
                auto& p = t.nodes_[parent];
                (p.left < 0 ? p.left : p.right) = id;
            }
            if (!leaf) {
                stack.emplace_back(r.right, id);
                stack.emplace_back(r.left, id);
            }
        }
        t.finish();
        if (remap) *remap = std::move(map);
        return t;
    }

    static Vtree leaf(Vertex v) { return from_nodes({Node{-1, -1, -1, v}}, 0); }

    static Vtree join(const Vtree& a, const Vtree& b) {
        if (a.empty()) return b;
        if (b.empty()) return a;
        std::vector<Node> raw(a.nodes_.begin(), a.nodes_.end());
        int shift = static_cast<int>(raw.size());
        for (auto n : b.nodes_) {
            if (n.left >= 0) n.left += shift;
            if (n.right >= 0) n.right += shift;
            raw.push_back(n);
        }
        raw.push_back(Node{0, shift, -1, -1});
        return from_nodes(raw, static_cast<int>(raw.size()) - 1);
    }

    // Right-leaning chain over `vars` in order.
    static Vtree right_comb(const VertexSet& vars) {
        Vtree t;
        for (auto it = vars.rbegin(); it != vars.rend(); ++it) t = t.empty() ? leaf(*it) : join(leaf(*it), t);
        return t;
    }

    // "((1 2) (3 4))" with 1-based variables; "" for the empty vtree.
    static Vtree parse(std::string_view text) {
        std::vector<Node> raw;
        std::vector<int> open; // raw ids of internal nodes awaiting children
        int root = -1;
        std::size_t i = 0;
        auto attach = [&](int id) {
            if (open.empty()) {
                if (root >= 0) throw ParseError("vtree text has more than one root");
                root = id;
                return;
            }
            Node& p = raw[open.back()];
            if (p.left < 0) p.left = id;
            else if (p.right < 0) p.right = id;
            else throw ParseError("vtree node with more than two children");
        };
        while (i < text.size()) {
            char c = text[i];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { ++i; continue; }
            if (c == '(') {
                raw.push_back({});
                int id = static_cast<int>(raw.size()) - 1;
                attach(id);
                open.push_back(id);
                ++i;
            } else if (c == ')') {
                if (open.empty()) throw ParseError("unbalanced ')' in vtree");
                if (raw[open.back()].right < 0) throw ParseError("vtree node with fewer than two children");
                open.pop_back();
                ++i;
            } else if (c >= '0' && c <= '9') {
                std::size_t j = i;
                while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
                int v = std::stoi(std::string(text.substr(i, j - i)));
                if (v < 1) throw ParseError("vtree variables are 1-based");
                raw.push_back(Node{-1, -1, -1, v - 1});
                attach(static_cast<int>(raw.size()) - 1);
                i = j;
            } else {
                throw ParseError(std::string("unexpected character '") + c + "' in vtree");
            }
        }
        if (!open.empty()) throw ParseError("unbalanced '(' in vtree");
        try {
            return from_nodes(raw, root);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
    }

    std::string to_string() const {
        std::string out;
        if (empty()) return out;
        // Preorder walk; close parentheses as right subtrees finish.
        std::vector<int> stack{root()};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            if (u < 0) {
                out += ")";
                continue;
            }
            if (!out.empty() && out.back() != '(') out += " ";
            if (is_leaf(u)) {
                out += std::to_string(var(u) + 1);
            } else {
                out += "(";
                stack.push_back(-1);
                stack.push_back(right(u));
                stack.push_back(left(u));
            }
        }
        return out;
    }

    bool empty() const noexcept { return nodes_.empty(); }
    int size() const noexcept { return static_cast<int>(nodes_.size()); }
    int root() const noexcept { return empty() ? -1 : 0; }
    const Node& node(int u) const { return nodes_.at(static_cast<std::size_t>(u)); }
    bool is_leaf(int u) const { return node(u).left < 0; }
    int left(int u) const { return node(u).left; }
    int right(int u) const { return node(u).right; }
    int parent(int u) const { return node(u).parent; }
    Vertex var(int u) const { return node(u).var; }
    int leaf_count(int u) const { return node(u).leaves; }
    int leaf_count() const { return empty() ? 0 : nodes_[0].leaves; }
    int depth(int u) const { return node(u).depth; }

    bool in_subtree(int u, int x) const { return x >= u && x < u + 2 * nodes_[u].leaves - 1; }

    int lca(int a, int b) const {
        while (!in_subtree(a, b)) a = nodes_[a].parent;
        return a;
    }

    int leaf_of(Vertex v) const {
        auto it = leaf_index_.find(v);
        return it == leaf_index_.end() ? -1 : it->second;
    }

    const VertexSet& variables() const noexcept { return variables_; }

    VertexSet variables_under(int u) const {
        VertexSet out;
        for (int x = u; x < u + 2 * nodes_[u].leaves - 1; ++x)
            if (is_leaf(x)) out.push_back(nodes_[x].var);
        std::sort(out.begin(), out.end());
        return out;
    }

    // The subtree rooted at t as a vtree of its own.
    Vtree subtree(int t, std::vector<int>* remap = nullptr) const { return from_nodes(nodes_, t, remap); }

    // Removes subtree(t) and contracts its parent s: s's other child takes its place. In `remap`,
    // s maps to the sibling's new id and nodes under t map to -1.
    Vtree without_subtree(int t, std::vector<int>* remap = nullptr) const {
        int s = parent(t);
        if (s < 0) throw InvalidArgument("cannot remove the whole vtree");
        int sibling = left(s) == t ? right(s) : left(s);
        std::vector<Node> raw = nodes_;
        int gp = parent(s);
        int root_id = 0;
        if (gp < 0) root_id = sibling;
        else (raw[gp].left == s ? raw[gp].left : raw[gp].right) = sibling;
        std::vector<int> map;
        Vtree out = from_nodes(raw, root_id, &map);
        map[s] = map[sibling];
        if (remap) *remap = std::move(map);
        return out;
    }

    friend bool operator==(const Vtree& a, const Vtree& b) {
        if (a.nodes_.size() != b.nodes_.size()) return false;
        for (std::size_t i = 0; i < a.nodes_.size(); ++i)
            if (a.nodes_[i].left != b.nodes_[i].left || a.nodes_[i].right != b.nodes_[i].right || a.nodes_[i].var != b.nodes_[i].var)
                return false;
        return true;
    }

private:
    void finish() {
        for (int u = size() - 1; u >= 0; --u) {
            auto& n = nodes_[u];
            n.leaves = n.left < 0 ? 1 : nodes_[n.left].leaves + nodes_[n.right].leaves;
        }
        for (int u = 0; u < size(); ++u) {
            auto& n = nodes_[u];
            n.depth = n.parent < 0 ? 0 : nodes_[n.parent].depth + 1;
            if (n.left < 0) {
                if (!leaf_index_.emplace(n.var, u).second)
                    throw InvalidArgument("vtree variable " + std::to_string(n.var + 1) + " appears twice");
                variables_.push_back(n.var);
            }
        }
        std::sort(variables_.begin(), variables_.end());
    }

    std::vector<Node> nodes_;
    std::map<Vertex, int> leaf_index_;
    VertexSet variables_;
};

struct VtreeEdge {
    int parent = -1;
    int child = -1;
};

// Edge minimizing |2*leaves(child) - n|; ties go to the deepest child, then the lowest preorder id.
inline VtreeEdge leaf_separator(const Vtree& t) {
    int n = t.leaf_count();
    if (n < 2) throw InvalidArgument("leaf separator needs at least two leaves");
    int best = -1;
    for (int u = 1; u < t.size(); ++u) {
        if (best < 0) { best = u; continue; }
        int a = std::abs(2 * t.leaf_count(u) - n), b = std::abs(2 * t.leaf_count(best) - n);
        if (a < b || (a == b && t.depth(u) > t.depth(best))) best = u;
    }
    return {t.parent(best), best};
}

enum class GateKind { True, False, Lit, And, Or };

struct Gate {
    GateKind kind = GateKind::True;
    Vertex var = -1;       // literals
    bool positive = true;  // literals
    std::vector<int> inputs;
    int vnode = -1;        // associated vtree node; -1 for constants
};

// Structured DNNF: inputs precede gates and the root is the last gate.
class StructuredDnnf {
public:
    StructuredDnnf() : gates_{Gate{}} {}

    // Takes gates as given (no simplification) and checks structuredness.
    StructuredDnnf(Vtree vtree, std::vector<Gate> gates) : vtree_(std::move(vtree)), gates_(std::move(gates)) {
        auto problems = check_structured();
        if (!problems.empty()) throw InvalidArgument("circuit does not respect its vtree: " + problems.front());
    }

    const Vtree& vtree() const noexcept { return vtree_; }
    const std::vector<Gate>& gates() const noexcept { return gates_; }
    int root() const noexcept { return static_cast<int>(gates_.size()) - 1; }
    std::size_t size() const noexcept { return gates_.size(); }

    bool is_true() const { return gates_.back().kind == GateKind::True; }
    bool is_false() const { return gates_.back().kind == GateKind::False; }

    // One bottom-up pass over the indicator assignment of U.
    bool evaluate(const VertexSet& u) const {
        for (Vertex v : u)
            if (vtree_.leaf_of(v) < 0) throw InvalidArgument("vertex " + std::to_string(v + 1) + " is not a circuit variable");
        std::vector<char> value(gates_.size());
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            const Gate& g = gates_[i];
            switch (g.kind) {
            case GateKind::True: value[i] = 1; break;
            case GateKind::False: value[i] = 0; break;
            case GateKind::Lit: value[i] = contains(u, g.var) == g.positive; break;
            case GateKind::And: value[i] = value[g.inputs[0]] && value[g.inputs[1]]; break;
            case GateKind::Or:
                value[i] = 0;
                for (int c : g.inputs)
                    if (value[c]) { value[i] = 1; break; }
                break;
            }
        }
        return value.back();
    }

    // Linear satisfiability sweep (decomposability makes conjunctions of satisfiable inputs satisfiable).
    bool satisfiable() const {
        std::vector<char> sat(gates_.size());
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            const Gate& g = gates_[i];
            switch (g.kind) {
            case GateKind::True:
            case GateKind::Lit: sat[i] = 1; break;
            case GateKind::False: sat[i] = 0; break;
            case GateKind::And: sat[i] = sat[g.inputs[0]] && sat[g.inputs[1]]; break;
            case GateKind::Or:
                sat[i] = std::any_of(g.inputs.begin(), g.inputs.end(), [&](int c) { return sat[c] != 0; });
                break;
            }
        }
        return sat.back();
    }

    // Maximum OR fan-in; literals and constants count as 1.
    int width() const {
        int w = 1;
        for (const auto& g : gates_)
            if (g.kind == GateKind::Or) w = std::max(w, static_cast<int>(g.inputs.size()));
        return w;
    }

    // Decomposability and association problems (empty = structured).
    std::vector<std::string> check_structured() const {
        std::vector<std::string> out;
        auto bad = [&](std::size_t i, const std::string& what) { out.push_back("gate " + std::to_string(i) + ": " + what); };
        if (gates_.empty()) out.push_back("circuit has no gates");
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            const Gate& g = gates_[i];
            for (int c : g.inputs)
                if (c < 0 || static_cast<std::size_t>(c) >= i) bad(i, "input does not precede gate");
            if (!out.empty() && out.back().rfind("gate " + std::to_string(i) + ":", 0) == 0) continue;
            auto node_ok = [&](int u) { return u >= 0 && u < vtree_.size(); };
            switch (g.kind) {
            case GateKind::True:
            case GateKind::False:
                if (!g.inputs.empty() || g.vnode != -1) bad(i, "constants take no inputs and no vtree node");
                break;
            case GateKind::Lit:
                if (vtree_.leaf_of(g.var) < 0) bad(i, "literal variable not in vtree");
                else if (g.vnode != vtree_.leaf_of(g.var)) bad(i, "literal not associated with its leaf");
                break;
            case GateKind::And: {
                if (g.inputs.size() != 2) { bad(i, "AND must have two inputs"); break; }
                if (!node_ok(g.vnode) || vtree_.is_leaf(g.vnode)) { bad(i, "AND must sit at an internal vtree node"); break; }
                int l = gates_[g.inputs[0]].vnode, r = gates_[g.inputs[1]].vnode;
                if (l >= 0 && !vtree_.in_subtree(vtree_.left(g.vnode), l)) bad(i, "left input outside the left subtree");
                if (r >= 0 && !vtree_.in_subtree(vtree_.right(g.vnode), r)) bad(i, "right input outside the right subtree");
                break;
            }
            case GateKind::Or:
                if (g.inputs.empty()) { bad(i, "OR without inputs"); break; }
                if (!node_ok(g.vnode)) { bad(i, "OR without a vtree node"); break; }
                for (int c : g.inputs)
                    if (gates_[c].vnode >= 0 && !vtree_.in_subtree(g.vnode, gates_[c].vnode)) bad(i, "input outside the OR's subtree");
                break;
            }
        }
        return out;
    }

    // All models, sorted. Per-gate model sets are bitmasks over the vtree variables.
    std::vector<VertexSet> enumerate_models(std::size_t cap = 1u << 20) const {
        const auto& vars = vtree_.variables();
        if (vars.size() > 63) throw CapExceeded("model enumeration supports at most 63 variables");
        std::vector<std::uint64_t> scope(static_cast<std::size_t>(vtree_.size()), 0);
        for (int u = vtree_.size() - 1; u >= 0; --u) {
            if (vtree_.is_leaf(u)) {
                auto pos = std::lower_bound(vars.begin(), vars.end(), vtree_.var(u)) - vars.begin();
                scope[u] = std::uint64_t{1} << pos;
            } else {
                scope[u] = scope[vtree_.left(u)] | scope[vtree_.right(u)];
            }
        }
        auto scope_of = [&](int g) { return gates_[g].vnode < 0 ? std::uint64_t{0} : scope[gates_[g].vnode]; };
        auto lift = [&](const std::vector<std::uint64_t>& models, std::uint64_t from, std::uint64_t to, std::vector<std::uint64_t>& out) {
            std::uint64_t free = to & ~from;
            for (auto m : models) {
                std::uint64_t sub = 0;
                do {
                    out.push_back(m | sub);
                    if (out.size() > cap) throw CapExceeded("model count exceeds cap " + std::to_string(cap));
                    sub = (sub - free) & free;
                } while (sub != 0);
            }
        };
        std::vector<std::vector<std::uint64_t>> models(gates_.size());
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            const Gate& g = gates_[i];
            auto& out = models[i];
            switch (g.kind) {
            case GateKind::True: out = {0}; break;
            case GateKind::False: break;
            case GateKind::Lit: out = {g.positive ? scope[g.vnode] : 0}; break;
            case GateKind::And: {
                std::vector<std::uint64_t> pairs;
                for (auto a : models[g.inputs[0]])
                    for (auto b : models[g.inputs[1]]) {
                        pairs.push_back(a | b);
                        if (pairs.size() > cap) throw CapExceeded("model count exceeds cap " + std::to_string(cap));
                    }
                lift(pairs, scope_of(g.inputs[0]) | scope_of(g.inputs[1]), scope[g.vnode], out);
                break;
            }
            case GateKind::Or:
                for (int c : g.inputs) lift(models[c], scope_of(c), scope[g.vnode], out);
                std::sort(out.begin(), out.end());
                out.erase(std::unique(out.begin(), out.end()), out.end());
                break;
            }
        }
        std::vector<std::uint64_t> top;
        std::uint64_t all = vtree_.empty() ? 0 : scope[0];
        lift(models.back(), scope_of(root()), all, top);
        std::sort(top.begin(), top.end());
        top.erase(std::unique(top.begin(), top.end()), top.end());
        std::vector<VertexSet> out;
        out.reserve(top.size());
        for (auto m : top) {
            VertexSet s;
            for (std::size_t b = 0; b < vars.size(); ++b)
                if (m >> b & 1) s.push_back(vars[b]);
            out.push_back(std::move(s));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Line format: "nnf <gates> <vars>", "V <vtree>", then one line per gate in order:
    // "T", "F", "L <±var>", "A 2 <a> <b> @<node>", "O <k> <ids...> @<node>". The root is last.
    std::string to_text() const {
        std::ostringstream out;
        out << "nnf " << gates_.size() << " " << vtree_.variables().size() << "\n";
        out << "V " << vtree_.to_string() << "\n";
        for (const auto& g : gates_) {
            switch (g.kind) {
            case GateKind::True: out << "T"; break;
            case GateKind::False: out << "F"; break;
            case GateKind::Lit: out << "L " << (g.positive ? "" : "-") << g.var + 1; break;
            case GateKind::And:
            case GateKind::Or:
                out << (g.kind == GateKind::And ? "A " : "O ") << g.inputs.size();
                for (int c : g.inputs) out << " " << c;
                out << " @" << g.vnode;
                break;
            }
            out << "\n";
        }
        return out.str();
    }

    static StructuredDnnf parse(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        auto next_line = [&]() {
            while (std::getline(in, line)) {
                ++lineno;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (!line.empty() && line[0] != 'c') return true;
            }
            return false;
        };
        if (!next_line()) throw ParseError("empty circuit file");
        std::istringstream header(line);
        std::string tag;
        std::size_t count = 0, nvars = 0;
        if (!(header >> tag >> count >> nvars) || tag != "nnf") throw ParseError("expected 'nnf <gates> <vars>'", lineno);
        if (!next_line() || line.rfind("V", 0) != 0) throw ParseError("expected vtree line 'V ...'", lineno);
        Vtree vt;
        try {
            vt = Vtree::parse(std::string_view(line).substr(1));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (vt.variables().size() != nvars) throw ParseError("vtree variable count differs from header", lineno);
        std::vector<Gate> gates;
        while (gates.size() < count && next_line()) {
            std::istringstream ls(line);
            Gate g;
            ls >> tag;
            if (tag == "T") g.kind = GateKind::True;
            else if (tag == "F") g.kind = GateKind::False;
            else if (tag == "L") {
                long v = 0;
                if (!(ls >> v) || v == 0) throw ParseError("bad literal", lineno);
                g.kind = GateKind::Lit;
                g.positive = v > 0;
                g.var = static_cast<Vertex>(std::labs(v) - 1);
                g.vnode = vt.leaf_of(g.var);
                if (g.vnode < 0) throw ParseError("literal variable not in vtree", lineno);
            } else if (tag == "A" || tag == "O") {
                g.kind = tag == "A" ? GateKind::And : GateKind::Or;
                std::size_t k = 0;
                if (!(ls >> k)) throw ParseError("missing fan-in", lineno);
                g.inputs.resize(k);
                for (auto& c : g.inputs)
                    if (!(ls >> c)) throw ParseError("missing input id", lineno);
                std::string at;
                if (!(ls >> at) || at.size() < 2 || at[0] != '@') throw ParseError("missing '@<vtree node>'", lineno);
                g.vnode = std::stoi(at.substr(1));
            } else {
                throw ParseError("unknown gate '" + tag + "'", lineno);
            }
            gates.push_back(std::move(g));
        }
        if (gates.size() != count) throw ParseError("circuit ends after " + std::to_string(gates.size()) + " of " + std::to_string(count) + " gates", lineno);
        try {
            return StructuredDnnf(std::move(vt), std::move(gates));
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
    }

private:
    Vtree vtree_;
    std::vector<Gate> gates_;
};

// Incremental construction with constant folding and structural hashing.
class DnnfBuilder {
public:
    explicit DnnfBuilder(Vtree vtree) : vtree_(std::move(vtree)) {}

    const Vtree& vtree() const noexcept { return vtree_; }
    const Gate& gate(int id) const { return gates_.at(static_cast<std::size_t>(id)); }
    int node_of(int id) const { return gate(id).vnode; }
    bool is_true(int id) const { return gate(id).kind == GateKind::True; }
    bool is_false(int id) const { return gate(id).kind == GateKind::False; }

    int top() { return intern(constant(true)); }
    int bottom() { return intern(constant(false)); }

    int literal(Vertex v, bool positive = true) {
        int leaf = vtree_.leaf_of(v);
        if (leaf < 0) throw InvalidArgument("vertex " + std::to_string(v + 1) + " is not a vtree variable");
        Gate g{GateKind::Lit, v, positive, {}, leaf};
        return intern(g);
    }

    // AND at `vnode` (default: the lowest common ancestor of the inputs). Inputs are swapped when
    // given in right/left order.
    int conjoin(int a, int b, int vnode = -1) {
        if (is_false(a) || is_false(b)) return bottom();
        if (is_true(a)) return b;
        if (is_true(b)) return a;
        int na = node_of(a), nb = node_of(b);
        if (vnode < 0) vnode = vtree_.lca(na, nb);
        if (vtree_.is_leaf(vnode)) throw InvalidArgument("AND inputs share a vtree leaf");
        int l = vtree_.left(vnode), r = vtree_.right(vnode);
        if (vtree_.in_subtree(r, na) && vtree_.in_subtree(l, nb)) std::swap(a, b), std::swap(na, nb);
        if (!vtree_.in_subtree(l, na) || !vtree_.in_subtree(r, nb)) throw InvalidArgument("AND inputs are not decomposable at the given vtree node");
        return intern(Gate{GateKind::And, -1, true, {a, b}, vnode});
    }

    // OR at `vnode` (default: the lowest common ancestor of the inputs).
    int disjoin(std::vector<int> inputs, int vnode = -1) {
        std::vector<int> kept;
        for (int c : inputs) {
            if (is_true(c)) return top();
            if (!is_false(c)) kept.push_back(c);
        }
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        if (kept.empty()) return bottom();
        if (kept.size() == 1) return kept.front();
        int lca = node_of(kept.front());
        for (int c : kept) lca = vtree_.lca(lca, node_of(c));
        if (vnode < 0) vnode = lca;
        else if (!vtree_.in_subtree(vnode, lca)) throw InvalidArgument("OR input outside the given vtree node");
        return intern(Gate{GateKind::Or, -1, true, std::move(kept), vnode});
    }

    // Adds a gate verbatim (no folding), for hand-built circuits. Inputs must already exist.
    int raw(Gate g) {
        if (g.kind == GateKind::Lit) g.vnode = vtree_.leaf_of(g.var);
        for (int c : g.inputs)
            if (c < 0 || static_cast<std::size_t>(c) >= gates_.size()) throw InvalidArgument("raw gate input does not exist");
        gates_.push_back(std::move(g));
        return static_cast<int>(gates_.size()) - 1;
    }

    // Keeps the gates reachable from `root`, renumbered so the root is last.
    StructuredDnnf finish(int root) const {
        std::vector<char> live(gates_.size(), 0);
        live.at(static_cast<std::size_t>(root)) = 1;
        for (int i = root; i >= 0; --i)
            if (live[i])
                for (int c : gates_[i].inputs) live[c] = 1;
        std::vector<int> id(gates_.size(), -1);
        std::vector<Gate> out;
        for (int i = 0; i <= root; ++i) {
            if (!live[i]) continue;
            Gate g = gates_[i];
            for (int& c : g.inputs) c = id[c];
            id[i] = static_cast<int>(out.size());
            out.push_back(std::move(g));
        }
        return StructuredDnnf(vtree_, std::move(out));
    }

private:
    static Gate constant(bool value) {
        Gate g;
        g.kind = value ? GateKind::True : GateKind::False;
        return g;
    }

    int intern(Gate g) {
        auto key = std::make_tuple(static_cast<int>(g.kind), g.var, g.positive, g.inputs, g.vnode);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        gates_.push_back(std::move(g));
        int id = static_cast<int>(gates_.size()) - 1;
        index_.emplace(std::move(key), id);
        return id;
    }

    Vtree vtree_;
    std::vector<Gate> gates_;
    std::map<std::tuple<int, Vertex, bool, std::vector<int>, int>, int> index_;
};

inline StructuredDnnf constant_circuit(const Vtree& vtree, bool value) {
    DnnfBuilder b(vtree);
    return b.finish(value ? b.top() : b.bottom());
}

namespace detail {

// Rebuilds gates of `d` inside `b`, mapping vtree nodes through `node_map` and replacing gate i
// by `substitute[i]` when that entry is >= 0. Returns the builder id of `root`.
inline int transplant(const StructuredDnnf& d, int root, DnnfBuilder& b, const std::vector<int>& node_map,
                      const std::vector<int>& substitute) {
    std::vector<int> id(d.size(), -1);
    std::vector<char> live(d.size(), 0);
    live[root] = 1;
    for (int i = root; i >= 0; --i) {
        if (!live[i] || (!substitute.empty() && substitute[i] >= 0)) continue;
        for (int c : d.gates()[i].inputs) live[c] = 1;
    }
    for (int i = 0; i <= root; ++i) {
        if (!live[i]) continue;
        if (!substitute.empty() && substitute[i] >= 0) {
            id[i] = substitute[i];
            continue;
        }
        const Gate& g = d.gates()[i];
        switch (g.kind) {
        case GateKind::True: id[i] = b.top(); break;
        case GateKind::False: id[i] = b.bottom(); break;
        case GateKind::Lit: id[i] = b.literal(g.var, g.positive); break;
        case GateKind::And: id[i] = b.conjoin(id[g.inputs[0]], id[g.inputs[1]], node_map[g.vnode]); break;
        case GateKind::Or: {
            std::vector<int> in;
            for (int c : g.inputs) in.push_back(id[c]);
            id[i] = b.disjoin(std::move(in), node_map[g.vnode]);
            break;
        }
        }
    }
    return id[root];
}

} // namespace detail

struct FactorPair {
    StructuredDnnf first;  // over the variables under the separator's child
    StructuredDnnf second; // over the remaining variables
};

struct SeparatorSplit {
    VtreeEdge edge;
    VertexSet side1; // variables under edge.child
    VertexSet side2;
    std::vector<FactorPair> pairs;
};

// Splits at vtree edge (s, t). The boundary gates are the reachable gates associated with
// subtree(t) that feed a gate outside it (or are the root). Each yields the pair
// (sub-circuit at the gate, D with that gate set to true and the other boundary gates to false).
// One more pair (true, D with every boundary gate false) covers derivations that never enter
// subtree(t). A model U1 ∪ U2 of D is then exactly a model of some pair.
inline SeparatorSplit split(const StructuredDnnf& d, VtreeEdge edge) {
    const Vtree& vt = d.vtree();
    if (edge.child <= 0 || edge.child >= vt.size() || vt.parent(edge.child) != edge.parent)
        throw InvalidArgument("split edge is not a vtree edge");
    SeparatorSplit out;
    out.edge = edge;
    out.side1 = vt.variables_under(edge.child);
    for (Vertex v : vt.variables())
        if (!contains(out.side1, v)) out.side2.push_back(v);

    const auto& gates = d.gates();
    auto inside = [&](int g) { return gates[g].vnode >= 0 && vt.in_subtree(edge.child, gates[g].vnode); };
    std::vector<char> live(gates.size(), 0), boundary(gates.size(), 0);
    live[d.root()] = 1;
    if (inside(d.root())) boundary[d.root()] = 1;
    for (int i = d.root(); i >= 0; --i) {
        if (!live[i]) continue;
        for (int c : gates[i].inputs) {
            live[c] = 1;
            if (inside(c) && !inside(i)) boundary[c] = 1;
        }
    }
    std::vector<int> alphas;
    for (std::size_t i = 0; i < gates.size(); ++i)
        if (boundary[i]) alphas.push_back(static_cast<int>(i));

    std::vector<int> map1, map2;
    Vtree vt1 = vt.subtree(edge.child, &map1);
    Vtree vt2 = vt.without_subtree(edge.child, &map2);

    auto rest = [&](int chosen) {
        DnnfBuilder b(vt2);
        std::vector<int> sub(gates.size(), -1);
        int t = b.top(), f = b.bottom();
        for (int a : alphas) sub[a] = a == chosen ? t : f;
        return b.finish(detail::transplant(d, d.root(), b, map2, sub));
    };

    for (int a : alphas) {
        StructuredDnnf second = rest(a);
        if (second.is_false()) continue;
        DnnfBuilder b(vt1);
        StructuredDnnf first = b.finish(detail::transplant(d, a, b, map1, {}));
        if (first.is_false()) continue;
        out.pairs.push_back({std::move(first), std::move(second)});
    }
    StructuredDnnf skip = rest(-1);
    if (skip.satisfiable()) out.pairs.push_back({constant_circuit(vt1, true), std::move(skip)});
    return out;
}

enum class ApplyOp { And, Or };

// Conjunction or disjunction of two circuits over the same vtree.
inline StructuredDnnf apply(ApplyOp op, const StructuredDnnf& x, const StructuredDnnf& y) {
    if (!(x.vtree() == y.vtree())) throw InvalidArgument("apply needs circuits over identical vtrees");
    const Vtree& vt = x.vtree();
    std::vector<int> identity(static_cast<std::size_t>(vt.size()));
    for (int u = 0; u < vt.size(); ++u) identity[u] = u;
    DnnfBuilder b(vt);
    int rx = detail::transplant(x, x.root(), b, identity, {});
    int ry = detail::transplant(y, y.root(), b, identity, {});
    if (op == ApplyOp::Or) return b.finish(b.disjoin({rx, ry}));

    std::map<std::pair<int, int>, int> memo;
    std::function<int(int, int)> conj = [&](int p, int q) -> int {
        if (b.is_false(p) || b.is_false(q)) return b.bottom();
        if (b.is_true(p)) return q;
        if (b.is_true(q)) return p;
        if (p > q) std::swap(p, q);
        auto key = std::make_pair(p, q);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        int result;
        Gate gp = b.gate(p), gq = b.gate(q);
        if (gp.kind == GateKind::Or || gq.kind == GateKind::Or) {
            const Gate& o = gp.kind == GateKind::Or ? gp : gq;
            int other = gp.kind == GateKind::Or ? q : p;
            std::vector<int> parts;
            for (int c : o.inputs) parts.push_back(conj(c, other));
            result = b.disjoin(std::move(parts));
        } else {
            int np = gp.vnode, nq = gq.vnode;
            if (np == nq) {
                if (gp.kind == GateKind::Lit) result = gp.positive == gq.positive ? p : b.bottom();
                else result = b.conjoin(conj(gp.inputs[0], gq.inputs[0]), conj(gp.inputs[1], gq.inputs[1]), np);
            } else if (vt.in_subtree(np, nq) || vt.in_subtree(nq, np)) {
                const Gate& outer = vt.in_subtree(np, nq) ? gp : gq;
                int inner = vt.in_subtree(np, nq) ? q : p;
                int u = outer.vnode;
                if (vt.in_subtree(vt.left(u), b.node_of(inner)))
                    result = b.conjoin(conj(outer.inputs[0], inner), outer.inputs[1], u);
                else
                    result = b.conjoin(outer.inputs[0], conj(outer.inputs[1], inner), u);
            } else {
                result = b.conjoin(p, q);
            }
        }
        memo.emplace(key, result);
        return result;
    };
    return b.finish(conj(rx, ry));
}

} // namespace logiq
