#pragma once

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logiq/error.hpp"
#include "logiq/graph.hpp"

namespace logiq {

enum class Op { Exists, Forall, And, Or, Not, Implies, Adj, Eq, Neq, In, Dist, True, False };

struct FormulaNode {
    Op op = Op::True;
    int a = -1;     // variable slot: quantified variable, or first atom argument
    int b = -1;     // second atom argument
    int radius = 0; // dist(x, y) <= radius
    std::vector<int> children;
};

// Immutable formula AST. Variable slots 0..free_count()-1 are the free vertex variables in
// declaration order; each quantifier owns one further slot.
class Formula {
public:
    const std::vector<FormulaNode>& nodes() const noexcept { return nodes_; }
    int root() const noexcept { return root_; }
    int free_count() const noexcept { return free_count_; }
    int slot_count() const noexcept { return static_cast<int>(names_.size()); }
    const std::string& name(int slot) const { return names_.at(static_cast<std::size_t>(slot)); }
    const std::optional<std::string>& set_variable() const noexcept { return set_var_; }
    bool uses_dist() const noexcept { return uses_dist_; }
    bool is_mso() const noexcept { return set_var_.has_value(); }

    // Free slots that actually occur in the body.
    std::vector<int> mentioned_free() const {
        std::set<int> out;
        for (const auto& n : nodes_) {
            if (n.op == Op::Exists || n.op == Op::Forall) continue;
            for (int s : {n.a, n.b})
                if (s >= 0 && s < free_count_) out.insert(s);
        }
        return {out.begin(), out.end()};
    }

    // Canonical text; parse(to_string()) reproduces the same canonical text.
    std::string to_string() const {
        std::string out;
        if (free_count_ > 0) {
            out += "free";
            for (int i = 0; i < free_count_; ++i) out += " " + names_[i];
            out += "; ";
        }
        print(root_, out);
        return out;
    }

private:
    friend class FormulaParser;
    friend Formula conjoin(const Formula&, const Formula&);
    friend Formula rename_free(const Formula&, const std::vector<int>&, int, const std::vector<std::string>&);

    void print(int id, std::string& out) const {
        const auto& n = nodes_[id];
        switch (n.op) {
        case Op::Exists:
        case Op::Forall:
            out += "(";
            out += n.op == Op::Exists ? "exists " : "forall ";
            out += names_[n.a] + ". ";
            print(n.children[0], out);
            out += ")";
            return;
        case Op::And:
        case Op::Or:
        case Op::Implies: {
            const char* sym = n.op == Op::And ? " & " : n.op == Op::Or ? " | " : " -> ";
            out += "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out += sym;
                print(n.children[i], out);
            }
            out += ")";
            return;
        }
        case Op::Not:
            out += "!";
            print(n.children[0], out);
            return;
        case Op::Adj: out += "adj(" + names_[n.a] + "," + names_[n.b] + ")"; return;
        case Op::Eq: out += names_[n.a] + " = " + names_[n.b]; return;
        case Op::Neq: out += names_[n.a] + " != " + names_[n.b]; return;
        case Op::In: out += names_[n.a] + " in " + *set_var_; return;
        case Op::Dist: out += "dist(" + names_[n.a] + "," + names_[n.b] + ") <= " + std::to_string(n.radius); return;
        case Op::True: out += "true"; return;
        case Op::False: out += "false"; return;
        }
    }

    std::vector<FormulaNode> nodes_;
    int root_ = -1;
    int free_count_ = 0;
    std::vector<std::string> names_;
    std::optional<std::string> set_var_;
    bool uses_dist_ = false;
};

class FormulaParser {
public:
    FormulaParser(std::string_view text, const std::vector<std::string>& default_free) : text_(text) {
        tokenize();
        if (peek().text == "free") {
            next();
            std::vector<std::string> declared;
            while (peek().kind == Tok::Ident && peek().text != ";") declared.push_back(expect_var("free variable"));
            expect(";");
            declare_free(declared);
        } else {
            declare_free(default_free);
        }
        f_.root_ = formula();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
    }

    Formula take() { return std::move(f_); }

private:
    enum class Tok { Ident, Int, Sym, End };
    struct Token {
        Tok kind;
        std::string text;
        std::size_t pos;
    };

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t pos = tokens_[cursor_].pos;
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos && i < text_.size(); ++i) {
            if (text_[i] == '\n') { ++line; col = 1; }
            else ++col;
        }
        throw ParseError(what, line, col);
    }

    void tokenize() {
        std::size_t i = 0;
        while (i < text_.size()) {
            char c = text_[i];
            if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
            std::size_t start = i;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_')) ++i;
                tokens_.push_back({Tok::Ident, std::string(text_.substr(start, i - start)), start});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
                tokens_.push_back({Tok::Int, std::string(text_.substr(start, i - start)), start});
            } else {
                std::string two = std::string(text_.substr(i, 2));
                if (two == "->" || two == "!=" || two == "<=") {
                    tokens_.push_back({Tok::Sym, two, start});
                    i += 2;
                } else if (std::string_view("().,;&|!=").find(c) != std::string_view::npos) {
                    tokens_.push_back({Tok::Sym, std::string(1, c), start});
                    ++i;
                } else {
                    cursor_ = tokens_.size();
                    tokens_.push_back({Tok::End, "", start});
                    fail(std::string("unexpected character '") + c + "'");
                }
            }
        }
        tokens_.push_back({Tok::End, "<end>", text_.size()});
    }

    const Token& peek() const { return tokens_[cursor_]; }
    Token next() { return tokens_[cursor_ < tokens_.size() - 1 ? cursor_++ : cursor_]; }

    void expect(const std::string& sym) {
        if (peek().text != sym) fail("expected '" + sym + "', found '" + peek().text + "'");
        next();
    }

    static bool keyword(const std::string& s) {
        static const std::set<std::string> words{"free", "exists", "forall", "in", "adj", "dist", "true", "false"};
        return words.count(s) > 0;
    }

    std::string expect_var(const char* what) {
        if (peek().kind != Tok::Ident || keyword(peek().text)) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
        return next().text;
    }

    void declare_free(const std::vector<std::string>& names) {
        for (const auto& name : names) {
            if (std::find(f_.names_.begin(), f_.names_.end(), name) != f_.names_.end()) fail("free variable '" + name + "' declared twice");
            scope_.emplace_back(name, static_cast<int>(f_.names_.size()));
            f_.names_.push_back(name);
        }
        f_.free_count_ = static_cast<int>(names.size());
    }

    int lookup(const std::string& name) {
        if (f_.set_var_ && *f_.set_var_ == name) fail("set variable '" + name + "' used where a vertex variable is expected");
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->first == name) return it->second;
        fail("unbound variable '" + name + "'");
    }

    int add(FormulaNode node) {
        f_.nodes_.push_back(std::move(node));
        return static_cast<int>(f_.nodes_.size()) - 1;
    }

    int formula() {
        if (peek().text == "exists" || peek().text == "forall") return quantifier();
        return implication();
    }

    int quantifier() {
        Op op = next().text == "exists" ? Op::Exists : Op::Forall;
        std::string name = expect_var("quantified variable");
        if (f_.set_var_ && *f_.set_var_ == name) fail("'" + name + "' is already the set variable");
        expect(".");
        int slot = static_cast<int>(f_.names_.size());
        f_.names_.push_back(name);
        scope_.emplace_back(name, slot);
        int body = formula();
        scope_.pop_back();
        FormulaNode n;
        n.op = op;
        n.a = slot;
        n.children = {body};
        return add(n);
    }

    int implication() {
        int lhs = disjunction();
        if (peek().text != "->") return lhs;
        next();
        int rhs = peek().text == "exists" || peek().text == "forall" ? quantifier() : implication();
        FormulaNode n;
        n.op = Op::Implies;
        n.children = {lhs, rhs};
        return add(n);
    }

    int nary(Op op, const char* sym, int (FormulaParser::*sub)()) {
        std::vector<int> parts{(this->*sub)()};
        while (peek().text == sym) {
            next();
            parts.push_back((this->*sub)());
        }
        if (parts.size() == 1) return parts.front();
        FormulaNode n;
        n.op = op;
        n.children = std::move(parts);
        return add(n);
    }

    int disjunction() { return nary(Op::Or, "|", &FormulaParser::conjunction); }
    int conjunction() { return nary(Op::And, "&", &FormulaParser::negation); }

    int negation() {
        if (peek().text == "!") {
            next();
            FormulaNode n;
            n.op = Op::Not;
            n.children = {negation()};
            return add(n);
        }
        if (peek().text == "(") {
            next();
            int inner = formula();
            expect(")");
            return inner;
        }
        if (peek().text == "exists" || peek().text == "forall") return quantifier();
        return atom();
    }

    int atom() {
        const Token& t = peek();
        FormulaNode n;
        if (t.text == "true" || t.text == "false") {
            n.op = next().text == "true" ? Op::True : Op::False;
            return add(n);
        }
        if (t.text == "adj" || t.text == "dist") {
            bool is_dist = next().text == "dist";
            expect("(");
            n.a = lookup(expect_var("vertex variable"));
            expect(",");
            n.b = lookup(expect_var("vertex variable"));
            expect(")");
            n.op = is_dist ? Op::Dist : Op::Adj;
            if (is_dist) {
                expect("<=");
                if (peek().kind != Tok::Int) fail("expected radius after '<='");
                n.radius = std::stoi(next().text);
                f_.uses_dist_ = true;
            }
            return add(n);
        }
        if (t.kind != Tok::Ident || keyword(t.text)) fail("expected atom, found '" + t.text + "'");
        std::string lhs = next().text;
        if (peek().text == "in") {
            next();
            std::string set = expect_var("set variable");
            for (const auto& [name, slot] : scope_)
                if (name == set) fail("vertex variable '" + set + "' used as a set variable");
            if (f_.set_var_ && *f_.set_var_ != set) fail("only one set variable is supported, found '" + set + "'");
            f_.set_var_ = set;
            n.op = Op::In;
            n.a = lookup(lhs);
            return add(n);
        }
        n.a = lookup(lhs);
        if (peek().text == "=") n.op = Op::Eq;
        else if (peek().text == "!=") n.op = Op::Neq;
        else fail("expected '=', '!=' or 'in' after '" + lhs + "'");
        next();
        n.b = lookup(expect_var("vertex variable"));
        return add(n);
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t cursor_ = 0;
    std::vector<std::pair<std::string, int>> scope_;
    Formula f_;
};

// Parses the formula DSL. Without a leading "free ...;" header, `default_free` names the free
// vertex variables (empty: the formula must be closed apart from its set variable).
inline Formula parse_formula(std::string_view text, const std::vector<std::string>& default_free = {}) {
    return FormulaParser(text, default_free).take();
}

// a & b over the same free variables (names taken from `a`).
inline Formula conjoin(const Formula& a, const Formula& b) {
    if (a.free_count_ != b.free_count_) throw InvalidArgument("conjoin: free variable counts differ");
    if (a.set_var_ && b.set_var_ && *a.set_var_ != *b.set_var_) throw InvalidArgument("conjoin: different set variables");
    Formula out = a;
    int slot_shift = a.slot_count() - a.free_count_;
    int node_shift = static_cast<int>(a.nodes_.size());
    for (int s = b.free_count_; s < b.slot_count(); ++s) out.names_.push_back(b.names_[s]);
    auto remap = [&](int s) { return s < 0 || s < b.free_count_ ? s : s + slot_shift; };
    for (auto n : b.nodes_) {
        n.a = remap(n.a);
        n.b = remap(n.b);
        for (int& c : n.children) c += node_shift;
        out.nodes_.push_back(n);
    }
    FormulaNode both;
    both.op = Op::And;
    both.children = {a.root_, b.root_ + node_shift};
    out.nodes_.push_back(both);
    out.root_ = static_cast<int>(out.nodes_.size()) - 1;
    if (!out.set_var_) out.set_var_ = b.set_var_;
    out.uses_dist_ = a.uses_dist_ || b.uses_dist_;
    return out;
}

// Substitutes free slot i by new free slot mapping[i] (several slots may merge into one).
inline Formula rename_free(const Formula& f, const std::vector<int>& mapping, int new_free_count,
                           const std::vector<std::string>& new_names) {
    if (static_cast<int>(mapping.size()) != f.free_count_ || static_cast<int>(new_names.size()) != new_free_count)
        throw InvalidArgument("rename_free: mapping size mismatch");
    Formula out;
    out.free_count_ = new_free_count;
    out.names_ = new_names;
    for (int s = f.free_count_; s < f.slot_count(); ++s) out.names_.push_back(f.names_[s]);
    int shift = new_free_count - f.free_count_;
    auto remap = [&](int s) { return s < 0 ? s : s < f.free_count_ ? mapping[s] : s + shift; };
    out.nodes_ = f.nodes_;
    for (auto& n : out.nodes_) {
        n.a = remap(n.a);
        n.b = remap(n.b);
    }
    out.root_ = f.root_;
    out.set_var_ = f.set_var_;
    out.uses_dist_ = f.uses_dist_;
    return out;
}

struct ModelCheckOptions {
    int max_vertices = 14;
};

namespace detail {

// Direct recursive evaluation over all vertex assignments.
class Evaluator {
public:
    Evaluator(const Graph& g, const Formula& f, const std::vector<bool>* in_set) : g_(g), f_(f), in_set_(in_set) {
        if (f.uses_dist()) {
            hops_.reserve(static_cast<std::size_t>(g.size()));
            for (Vertex v = 0; v < g.size(); ++v) hops_.push_back(bfs_hops(g, {v}));
        }
    }

    bool run(std::vector<Vertex>& slots) const { return eval(f_.root(), slots); }

private:
    bool eval(int id, std::vector<Vertex>& s) const {
        const auto& n = f_.nodes()[id];
        switch (n.op) {
        case Op::Exists:
        case Op::Forall: {
            bool want = n.op == Op::Exists;
            for (Vertex v = 0; v < g_.size(); ++v) {
                s[n.a] = v;
                if (eval(n.children[0], s) == want) return want;
            }
            return !want;
        }
        case Op::And:
            for (int c : n.children)
                if (!eval(c, s)) return false;
            return true;
        case Op::Or:
            for (int c : n.children)
                if (eval(c, s)) return true;
            return false;
        case Op::Implies: return !eval(n.children[0], s) || eval(n.children[1], s);
        case Op::Not: return !eval(n.children[0], s);
        case Op::Adj: return g_.adjacent(s[n.a], s[n.b]);
        case Op::Eq: return s[n.a] == s[n.b];
        case Op::Neq: return s[n.a] != s[n.b];
        case Op::In: return in_set_ && (*in_set_)[s[n.a]];
        case Op::Dist: {
            int d = hops_[s[n.a]][s[n.b]];
            return d >= 0 && d <= n.radius;
        }
        case Op::True: return true;
        case Op::False: return false;
        }
        return false;
    }

    const Graph& g_;
    const Formula& f_;
    const std::vector<bool>* in_set_;
    std::vector<std::vector<int>> hops_;
};

inline void check_cap(const Graph& g, const ModelCheckOptions& opt) {
    if (g.size() > opt.max_vertices)
        throw CapExceeded("model checker limited to " + std::to_string(opt.max_vertices) + " vertices, graph has " +
                          std::to_string(g.size()));
}

} // namespace detail

// G |= φ(U) for a formula whose only free variable is the set variable.
inline bool model_check_mso(const Graph& g, const Formula& f, const VertexSet& u, ModelCheckOptions opt = {12}) {
    detail::check_cap(g, opt);
    if (f.free_count() != 0) throw InvalidArgument("MSO formula must not have free vertex variables");
    std::vector<bool> in(static_cast<std::size_t>(g.size()), false);
    for (Vertex v : u) {
        g.check(v);
        in[v] = true;
    }
    std::vector<Vertex> slots(static_cast<std::size_t>(f.slot_count()), 0);
    return detail::Evaluator(g, f, &in).run(slots);
}

// G |= φ(u_1, ..., u_k).
inline bool model_check_fo(const Graph& g, const Formula& f, const VertexTuple& tuple, ModelCheckOptions opt = {}) {
    detail::check_cap(g, opt);
    if (f.is_mso()) throw InvalidArgument("set variable " + *f.set_variable() + " in a first-order formula");
    if (static_cast<int>(tuple.size()) != f.free_count())
        throw InvalidArgument("tuple has " + std::to_string(tuple.size()) + " entries, formula has " +
                              std::to_string(f.free_count()) + " free variables");
    std::vector<Vertex> slots(static_cast<std::size_t>(f.slot_count()), 0);
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        g.check(tuple[i]);
        slots[i] = tuple[i];
    }
    return detail::Evaluator(g, f, nullptr).run(slots);
}

// Evaluates φ on G[N(ū, r)] with remapped ids. Equals global evaluation for r-local φ.
inline bool eval_local(const Graph& g, const Formula& f, const VertexTuple& tuple, int r,
                       ModelCheckOptions opt = {INT_MAX}) {
    auto sub = induced_subgraph(g, neighborhood(g, tuple, r));
    VertexTuple local;
    local.reserve(tuple.size());
    for (Vertex v : tuple) local.push_back(sub.map(v));
    return model_check_fo(sub.graph, f, local, opt);
}

// ---------------------------------------------------------------------------
// Gaifman form: disjuncts of (per-block r-local formulas) with pairwise block distance > 2r.

struct GaifmanBlock {
    std::vector<int> vars; // 0-based variable indices; free slot j of `formula` is vars[j]
    std::string text;
    std::optional<Formula> formula;
    std::string parse_error;
};

struct GaifmanDisjunct {
    int r = 0;
    std::vector<GaifmanBlock> blocks;
};

struct GaifmanForm {
    int k = 0;
    std::vector<GaifmanDisjunct> disjuncts;
};

inline std::string variable_name(int index) { return "x" + std::to_string(index + 1); }

namespace detail {

inline int parse_variable(const nlohmann::json& j) {
    if (j.is_number_integer()) {
        int v = j.get<int>();
        if (v < 1) throw ParseError("variable index must be >= 1");
        return v - 1;
    }
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s.size() >= 2 && s[0] == 'x' && std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            int v = std::stoi(s.substr(1));
            if (v >= 1) return v - 1;
        }
        throw ParseError("variable name '" + s + "' must look like x<index>");
    }
    throw ParseError("variable must be an index or a name x<index>");
}

inline nlohmann::json parse_json(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

} // namespace detail

inline GaifmanBlock make_block(std::vector<int> vars, std::string text) {
    GaifmanBlock b;
    b.vars = std::move(vars);
    b.text = std::move(text);
    std::vector<std::string> names;
    for (int v : b.vars) names.push_back(variable_name(v));
    try {
        b.formula = parse_formula(b.text, names);
    } catch (const ParseError& e) {
        b.parse_error = e.what();
    }
    return b;
}

// {"k":INT?, "disjuncts":[{"r":INT,"blocks":[{"vars":[...],"formula":"<DSL>"}]}]}
inline GaifmanForm load_gaifman(std::string_view text) {
    auto doc = detail::parse_json(text);
    GaifmanForm gf;
    try {
        int max_var = -1;
        for (const auto& d : doc.at("disjuncts")) {
            GaifmanDisjunct dis;
            dis.r = d.at("r").get<int>();
            for (const auto& b : d.at("blocks")) {
                std::vector<int> vars;
                for (const auto& v : b.at("vars")) {
                    vars.push_back(detail::parse_variable(v));
                    max_var = std::max(max_var, vars.back());
                }
                dis.blocks.push_back(make_block(std::move(vars), b.at("formula").get<std::string>()));
            }
            gf.disjuncts.push_back(std::move(dis));
        }
        gf.k = doc.contains("k") ? doc.at("k").get<int>() : max_var + 1;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed Gaifman form: ") + e.what());
    }
    return gf;
}

inline nlohmann::json to_json(const GaifmanForm& gf) {
    nlohmann::json doc;
    doc["k"] = gf.k;
    doc["disjuncts"] = nlohmann::json::array();
    for (const auto& d : gf.disjuncts) {
        nlohmann::json jd;
        jd["r"] = d.r;
        jd["blocks"] = nlohmann::json::array();
        for (const auto& b : d.blocks) {
            nlohmann::json vars = nlohmann::json::array();
            for (int v : b.vars) vars.push_back(variable_name(v));
            jd["blocks"].push_back({{"vars", vars}, {"formula", b.text}});
        }
        doc["disjuncts"].push_back(jd);
    }
    return doc;
}

// Block partition, scoping and radius checks. Empty result = valid.
inline std::vector<std::string> validate_gaifman(const GaifmanForm& gf) {
    std::vector<std::string> out;
    if (gf.k < 1) out.push_back("form has no free variables");
    if (gf.disjuncts.empty()) out.push_back("form has no disjuncts");
    for (std::size_t d = 0; d < gf.disjuncts.size(); ++d) {
        const auto& dis = gf.disjuncts[d];
        std::string where = "disjunct " + std::to_string(d + 1);
        if (dis.r < 0) out.push_back(where + ": negative radius");
        std::vector<int> owner(static_cast<std::size_t>(std::max(gf.k, 0)), -1);
        for (std::size_t b = 0; b < dis.blocks.size(); ++b) {
            const auto& block = dis.blocks[b];
            std::string bw = where + ", block " + std::to_string(b + 1);
            if (block.vars.empty()) out.push_back(bw + ": empty block");
            for (int v : block.vars) {
                if (v < 0 || v >= gf.k) {
                    out.push_back(bw + ": variable " + variable_name(v) + " outside x1..x" + std::to_string(gf.k));
                    continue;
                }
                if (owner[v] >= 0)
                    out.push_back(bw + ": variable " + variable_name(v) + " already in block " + std::to_string(owner[v] + 1) +
                                  " (blocks must partition the variables)");
                else
                    owner[v] = static_cast<int>(b);
            }
            if (!block.formula)
                out.push_back(bw + ": formula mentions variables outside its block or is malformed (" + block.parse_error + ")");
            else if (block.formula->is_mso())
                out.push_back(bw + ": set variable in a first-order block formula");
        }
        for (int v = 0; v < gf.k; ++v)
            if (owner[v] < 0) out.push_back(where + ": variable " + variable_name(v) + " is in no block");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bounded-expansion normal form: per-variable unary constraints plus ρ-equalities whose
// equality graph is a forest, plus ρ-inequalities.

struct RhoAtom {
    int i = 0; // variable (0-based)
    int p = 0; // ρ index, 0 = identity
    int j = 0;
    int q = 0;
    friend bool operator==(const RhoAtom&, const RhoAtom&) = default;
};

// ρ_a(ρ_b(x)) = ρ_c(x)
struct FunEq {
    int a = 0, b = 0, c = 0;
    friend bool operator==(const FunEq&, const FunEq&) = default;
};

struct TauConstraint {
    int var = 0;
    std::vector<std::string> labels;
    std::vector<FunEq> fun_eqs;
};

struct KsDisjunct {
    std::vector<TauConstraint> tau;
    std::vector<RhoAtom> eq;
    std::vector<RhoAtom> neq;
};

struct KsNormalForm {
    int depth = 0; // augmentation steps the atoms refer to
    int k = 0;
    std::vector<KsDisjunct> disjuncts;
};

struct EqualityForest {
    int k = 0;
    std::vector<std::vector<int>> components;     // sorted variables, ordered by smallest member
    std::vector<std::vector<int>> neighbors;      // equality-graph adjacency per variable
    std::vector<int> component_of;                // variable -> component index
};

struct KsValidation {
    std::vector<EqualityForest> forests; // one per disjunct when valid
    std::vector<std::string> violations;
    std::vector<int> cycle; // witness variables of the first cycle found
    bool ok() const { return violations.empty(); }
};

// {"depth":INT,"k":INT?,"disjuncts":[{"tau":[{"var":i,"labels":[...],"fun_eqs":[[a,b,c]]}],
//   "eq":[[i,p,j,q]],"neq":[[i,p,j,q]]}]}
inline KsNormalForm load_ks(std::string_view text) {
    auto doc = detail::parse_json(text);
    KsNormalForm ks;
    try {
        ks.depth = doc.value("depth", 0);
        int max_var = -1;
        auto atom = [&](const nlohmann::json& a) {
            if (!a.is_array() || a.size() != 4) throw ParseError("ρ atom must be [i,p,j,q]");
            RhoAtom r{detail::parse_variable(a[0]), a[1].get<int>(), detail::parse_variable(a[2]), a[3].get<int>()};
            max_var = std::max({max_var, r.i, r.j});
            return r;
        };
        for (const auto& d : doc.at("disjuncts")) {
            KsDisjunct dis;
            for (const auto& t : d.value("tau", nlohmann::json::array())) {
                TauConstraint c;
                c.var = detail::parse_variable(t.at("var"));
                max_var = std::max(max_var, c.var);
                for (const auto& l : t.value("labels", nlohmann::json::array())) c.labels.push_back(l.get<std::string>());
                for (const auto& e : t.value("fun_eqs", nlohmann::json::array())) {
                    if (!e.is_array() || e.size() != 3) throw ParseError("fun_eq must be [a,b,c]");
                    c.fun_eqs.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
                }
                dis.tau.push_back(std::move(c));
            }
            for (const auto& a : d.value("eq", nlohmann::json::array())) dis.eq.push_back(atom(a));
            for (const auto& a : d.value("neq", nlohmann::json::array())) dis.neq.push_back(atom(a));
            ks.disjuncts.push_back(std::move(dis));
        }
        ks.k = doc.contains("k") ? doc.at("k").get<int>() : max_var + 1;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed KS normal form: ") + e.what());
    }
    return ks;
}

inline nlohmann::json to_json(const KsNormalForm& ks) {
    nlohmann::json doc;
    doc["depth"] = ks.depth;
    doc["k"] = ks.k;
    doc["disjuncts"] = nlohmann::json::array();
    auto atoms = [](const std::vector<RhoAtom>& list) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& a : list) out.push_back({a.i + 1, a.p, a.j + 1, a.q});
        return out;
    };
    for (const auto& d : ks.disjuncts) {
        nlohmann::json jd;
        jd["tau"] = nlohmann::json::array();
        for (const auto& t : d.tau) {
            nlohmann::json eqs = nlohmann::json::array();
            for (const auto& e : t.fun_eqs) eqs.push_back({e.a, e.b, e.c});
            jd["tau"].push_back({{"var", t.var + 1}, {"labels", t.labels}, {"fun_eqs", eqs}});
        }
        jd["eq"] = atoms(d.eq);
        jd["neq"] = atoms(d.neq);
        doc["disjuncts"].push_back(jd);
    }
    return doc;
}

// Builds the equality graph of each disjunct and checks it is a forest. `max_rho`, when given,
// bounds every ρ index (the in-degree budget of the augmentation).
inline KsValidation validate_ks(const KsNormalForm& ks, std::optional<int> max_rho = std::nullopt) {
    KsValidation out;
    if (ks.k < 1) out.violations.push_back("form has no free variables");
    if (ks.disjuncts.empty()) out.violations.push_back("form has no disjuncts");
    for (std::size_t d = 0; d < ks.disjuncts.size() && ks.k >= 1; ++d) {
        const auto& dis = ks.disjuncts[d];
        std::string where = "disjunct " + std::to_string(d + 1);
        auto check_var = [&](int v) {
            if (v < 0 || v >= ks.k) out.violations.push_back(where + ": variable " + variable_name(v) + " outside x1..x" + std::to_string(ks.k));
            return v >= 0 && v < ks.k;
        };
        auto check_rho = [&](int p) {
            if (p < 0 || (max_rho && p > *max_rho))
                out.violations.push_back(where + ": ρ index " + std::to_string(p) + " outside budget 0.." +
                                         (max_rho ? std::to_string(*max_rho) : std::string("∞")));
        };
        for (const auto& t : dis.tau) {
            check_var(t.var);
            for (const auto& e : t.fun_eqs) {
                check_rho(e.a);
                check_rho(e.b);
                check_rho(e.c);
            }
        }
        for (const auto& a : dis.neq) {
            check_var(a.i);
            check_var(a.j);
            check_rho(a.p);
            check_rho(a.q);
        }

        EqualityForest forest;
        forest.k = ks.k;
        forest.neighbors.assign(static_cast<std::size_t>(ks.k), {});
        std::vector<int> parent(static_cast<std::size_t>(ks.k));
        for (int v = 0; v < ks.k; ++v) parent[v] = v;
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        bool cyclic = false;
        for (const auto& a : dis.eq) {
            bool ok = check_var(a.i) & check_var(a.j);
            check_rho(a.p);
            check_rho(a.q);
            if (!ok) continue;
            if (a.i == a.j) {
                out.violations.push_back(where + ": equality atom relates " + variable_name(a.i) + " to itself");
                continue;
            }
            int ri = find(a.i), rj = find(a.j);
            if (ri == rj && !cyclic) {
                cyclic = true;
                // Witness: the tree path between the endpoints closes the cycle.
                std::vector<int> prev(static_cast<std::size_t>(ks.k), -2);
                std::vector<int> queue{a.i};
                prev[a.i] = -1;
                for (std::size_t h = 0; h < queue.size(); ++h)
                    for (int w : forest.neighbors[queue[h]])
                        if (prev[w] == -2) {
                            prev[w] = queue[h];
                            queue.push_back(w);
                        }
                std::vector<int> cycle;
                for (int x = a.j; x >= 0; x = prev[x]) cycle.push_back(x);
                out.cycle = cycle;
                std::string names;
                for (int x : cycle) names += (names.empty() ? "" : " ") + variable_name(x);
                out.violations.push_back(where + ": equality graph has a cycle through " + names);
            }
            parent[ri] = rj;
            forest.neighbors[a.i].push_back(a.j);
            forest.neighbors[a.j].push_back(a.i);
        }
        for (auto& l : forest.neighbors) {
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
        }
        std::map<int, std::vector<int>> groups;
        for (int v = 0; v < ks.k; ++v) groups[find(v)].push_back(v);
        for (auto& [root, members] : groups) forest.components.push_back(members);
        std::sort(forest.components.begin(), forest.components.end());
        forest.component_of.assign(static_cast<std::size_t>(ks.k), -1);
        for (std::size_t c = 0; c < forest.components.size(); ++c)
            for (int v : forest.components[c]) forest.component_of[v] = static_cast<int>(c);
        out.forests.push_back(std::move(forest));
    }
    if (!out.ok()) out.forests.clear();
    return out;
}

} // namespace logiq
