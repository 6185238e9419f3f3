#pragma once

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logiq/error.hpp"

namespace logiq {

enum class Predicate { IndSet, VCover, DomSet, Connected, NonEmpty, EdgeIn, All, True };

inline const char* predicate_name(Predicate p) {
    switch (p) {
    case Predicate::IndSet: return "indset";
    case Predicate::VCover: return "vcover";
    case Predicate::DomSet: return "domset";
    case Predicate::Connected: return "connected";
    case Predicate::NonEmpty: return "nonempty";
    case Predicate::EdgeIn: return "edge_in";
    case Predicate::All: return "all";
    case Predicate::True: return "true";
    }
    return "?";
}

inline std::optional<Predicate> predicate_from_name(std::string_view name) {
    for (auto p : {Predicate::IndSet, Predicate::VCover, Predicate::DomSet, Predicate::Connected, Predicate::NonEmpty,
                   Predicate::EdgeIn, Predicate::All, Predicate::True})
        if (name == predicate_name(p)) return p;
    return std::nullopt;
}

// Positive boolean combination of built-in predicates over one set variable.
struct PredicateExpr {
    enum class Kind { Leaf, And, Or };
    Kind kind = Kind::Leaf;
    Predicate predicate = Predicate::True;
    std::vector<PredicateExpr> children;

    static PredicateExpr leaf(Predicate p) { return {Kind::Leaf, p, {}}; }
    static PredicateExpr both(PredicateExpr a, PredicateExpr b) { return {Kind::And, Predicate::True, {std::move(a), std::move(b)}}; }
    static PredicateExpr either(PredicateExpr a, PredicateExpr b) { return {Kind::Or, Predicate::True, {std::move(a), std::move(b)}}; }

    std::vector<Predicate> predicates() const {
        std::vector<Predicate> out;
        collect(out);
        return out;
    }

    std::string to_string() const {
        if (kind == Kind::Leaf) return predicate == Predicate::True ? "true" : std::string(predicate_name(predicate)) + "(X)";
        std::string out = "(";
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) out += kind == Kind::And ? " & " : " | ";
            out += children[i].to_string();
        }
        return out + ")";
    }

private:
    void collect(std::vector<Predicate>& out) const {
        if (kind == Kind::Leaf) {
            for (auto p : out)
                if (p == predicate) return;
            out.push_back(predicate);
        }
        for (const auto& c : children) c.collect(out);
    }
};

namespace detail {

class PredicateParser {
public:
    explicit PredicateParser(std::string_view text) : text_(text) {}

    PredicateExpr run() {
        auto e = disjunction();
        skip();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string ident() {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a predicate name");
        return std::string(text_.substr(start, pos_ - start));
    }

    PredicateExpr disjunction() {
        auto e = conjunction();
        while (eat('|')) e = PredicateExpr::either(std::move(e), conjunction());
        return e;
    }

    PredicateExpr conjunction() {
        auto e = primary();
        while (eat('&')) e = PredicateExpr::both(std::move(e), primary());
        return e;
    }

    PredicateExpr primary() {
        if (eat('(')) {
            auto e = disjunction();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        std::size_t at = pos_;
        std::string name = ident();
        auto p = predicate_from_name(name);
        if (!p) {
            pos_ = at;
            fail("unsupported predicate '" + name + "'");
        }
        if (*p == Predicate::True) return PredicateExpr::leaf(*p);
        if (!eat('(')) fail("expected '(' after " + name);
        std::string var = ident();
        if (set_var_.empty()) set_var_ = var;
        else if (var != set_var_) fail("only one set variable is supported, found '" + var + "'");
        if (!eat(')')) fail("expected ')'");
        return PredicateExpr::leaf(*p);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::string set_var_;
};

} // namespace detail

// "indset(X) & (domset(X) | true)"
inline PredicateExpr parse_predicate(std::string_view text) { return detail::PredicateParser(text).run(); }

} // namespace logiq
