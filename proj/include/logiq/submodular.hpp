#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logiq/error.hpp"
#include "logiq/graph.hpp"

namespace logiq {

inline constexpr double kRelativeTolerance = 1e-9;

// a <= b up to relative tolerance.
inline bool approx_leq(double a, double b, double rel = kRelativeTolerance) {
    return a <= b + rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool approx_eq(double a, double b, double rel = kRelativeTolerance) { return approx_leq(a, b, rel) && approx_leq(b, a, rel); }

// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Value oracle over ground set {0..n-1}. evaluate() counts calls; the counter is atomic so
// concurrent evaluation is safe.
class SubmodularOracle {
public:
    explicit SubmodularOracle(int n) : n_(n) {
        if (n < 0) throw InvalidArgument("ground set size must be nonnegative");
    }
    SubmodularOracle(const SubmodularOracle&) = delete;
    SubmodularOracle& operator=(const SubmodularOracle&) = delete;
    virtual ~SubmodularOracle() = default;

    int ground_size() const noexcept { return n_; }

    double evaluate(const VertexSet& u) const {
        for (Vertex v : u)
            if (v < 0 || v >= n_) throw InvalidArgument("element " + std::to_string(v + 1) + " outside the ground set");
        calls_.fetch_add(1, std::memory_order_relaxed);
        return value(u);
    }

    std::uint64_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }
    void reset_calls() noexcept { calls_.store(0, std::memory_order_relaxed); }

    // Canonical description; null for functions without a file representation.
    virtual nlohmann::json to_json() const { return nullptr; }

    std::string hash() const {
        auto j = to_json();
        return content_hash(j.is_null() ? std::string("opaque") : j.dump());
    }

protected:
    virtual double value(const VertexSet& u) const = 0;

private:
    int n_;
    mutable std::atomic<std::uint64_t> calls_{0};
};

// Total weight of the items covered by the chosen vertices.
class CoverageFunction : public SubmodularOracle {
public:
    CoverageFunction(int n, std::vector<std::vector<int>> sets, std::vector<double> item_weights, std::vector<std::string> item_names = {})
        : SubmodularOracle(n), sets_(std::move(sets)), weights_(std::move(item_weights)), names_(std::move(item_names)) {
        sets_.resize(static_cast<std::size_t>(n));
        for (double w : weights_)
            if (!(w >= 0)) throw InvalidArgument("coverage item weights must be nonnegative");
        for (auto& s : sets_) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            for (int item : s)
                if (item < 0 || static_cast<std::size_t>(item) >= weights_.size()) throw InvalidArgument("coverage item out of range");
        }
        if (names_.empty())
            for (std::size_t i = 0; i < weights_.size(); ++i) names_.push_back("i" + std::to_string(i));
    }

    // Unit item weights.
    CoverageFunction(int n, std::vector<std::vector<int>> sets, int items)
        : CoverageFunction(n, std::move(sets), std::vector<double>(static_cast<std::size_t>(items), 1.0)) {}

    const std::vector<std::vector<int>>& sets() const noexcept { return sets_; }
    const std::vector<double>& item_weights() const noexcept { return weights_; }

    nlohmann::json to_json() const override {
        nlohmann::json j;
        j["type"] = "coverage";
        nlohmann::json w = nlohmann::json::object(), s = nlohmann::json::object();
        for (std::size_t i = 0; i < weights_.size(); ++i) w[names_[i]] = weights_[i];
        for (std::size_t v = 0; v < sets_.size(); ++v) {
            nlohmann::json items = nlohmann::json::array();
            for (int item : sets_[v]) items.push_back(names_[item]);
            s[std::to_string(v + 1)] = items;
        }
        j["weights"] = w;
        j["sets"] = s;
        return j;
    }

protected:
    double value(const VertexSet& u) const override {
        std::vector<char> covered(weights_.size(), 0);
        double total = 0;
        for (Vertex v : u)
            for (int item : sets_[v])
                if (!covered[item]) {
                    covered[item] = 1;
                    total += weights_[item];
                }
        return total;
    }

private:
    std::vector<std::vector<int>> sets_;
    std::vector<double> weights_;
    std::vector<std::string> names_;
};

class ModularFunction : public SubmodularOracle {
public:
    explicit ModularFunction(std::vector<double> weights) : SubmodularOracle(static_cast<int>(weights.size())), weights_(std::move(weights)) {
        for (double w : weights_)
            if (!(w >= 0)) throw InvalidArgument("modular weights must be nonnegative");
    }

    const std::vector<double>& weights() const noexcept { return weights_; }
    double weight(Vertex v) const { return weights_.at(static_cast<std::size_t>(v)); }

    nlohmann::json to_json() const override {
        nlohmann::json w = nlohmann::json::object();
        for (std::size_t v = 0; v < weights_.size(); ++v) w[std::to_string(v + 1)] = weights_[v];
        return {{"type", "modular"}, {"weights", w}};
    }

protected:
    double value(const VertexSet& u) const override {
        double total = 0;
        for (Vertex v : u) total += weights_[v];
        return total;
    }

private:
    std::vector<double> weights_;
};

// Arbitrary set function, mostly for tests (not assumed monotone or submodular).
class LambdaFunction : public SubmodularOracle {
public:
    LambdaFunction(int n, std::function<double(const VertexSet&)> fn) : SubmodularOracle(n), fn_(std::move(fn)) {}

protected:
    double value(const VertexSet& u) const override { return fn_(u); }

private:
    std::function<double(const VertexSet&)> fn_;
};

// U -> f(pinned ∪ U) - f(pinned). Refers to `base`, which must outlive it. Contracting a
// contraction pins the union against the original base.
class ContractedOracle : public SubmodularOracle {
public:
    ContractedOracle(const SubmodularOracle& base, VertexSet pinned) : SubmodularOracle(base.ground_size()) {
        if (auto* inner = dynamic_cast<const ContractedOracle*>(&base)) {
            base_ = inner->base_;
            pinned_ = set_union(inner->pinned_, make_vertex_set(std::move(pinned)));
        } else {
            base_ = &base;
            pinned_ = make_vertex_set(std::move(pinned));
        }
        offset_ = base_->evaluate(pinned_);
    }

    const VertexSet& pinned() const noexcept { return pinned_; }
    const SubmodularOracle& base() const noexcept { return *base_; }

protected:
    double value(const VertexSet& u) const override { return base_->evaluate(set_union(pinned_, make_vertex_set(u))) - offset_; }

private:
    const SubmodularOracle* base_ = nullptr;
    VertexSet pinned_;
    double offset_ = 0;
};

inline std::unique_ptr<ContractedOracle> contract(const SubmodularOracle& f, VertexSet pinned) {
    return std::make_unique<ContractedOracle>(f, std::move(pinned));
}

// {"type":"coverage","weights":{item:w}?,"sets":{"<vertex>":[items]}} or
// {"type":"modular","weights":{"<vertex>":w}}. Vertices are 1-based. `n` < 0 infers the ground
// set from the largest vertex mentioned.
inline std::unique_ptr<SubmodularOracle> load_function(std::string_view text, int n = -1) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    auto vertex = [&](const std::string& key) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || v < 1) throw ParseError("vertex key '" + key + "' must be a 1-based integer");
        if (n >= 0 && v > n) throw ParseError("vertex " + key + " outside the graph (n = " + std::to_string(n) + ")");
        return v - 1;
    };
    try {
        std::string type = doc.at("type").get<std::string>();
        if (type == "modular") {
            std::map<int, double> w;
            int top = n;
            for (auto& [key, val] : doc.at("weights").items()) {
                int v = vertex(key);
                w[v] = val.get<double>();
                top = std::max(top, v + 1);
            }
            std::vector<double> weights(static_cast<std::size_t>(std::max(top, 0)), 0.0);
            for (auto [v, x] : w) weights[v] = x;
            return std::make_unique<ModularFunction>(std::move(weights));
        }
        if (type == "coverage") {
            std::map<std::string, int> item_index;
            std::vector<std::string> names;
            std::vector<double> weights;
            auto item = [&](const std::string& name) {
                auto [it, fresh] = item_index.emplace(name, static_cast<int>(names.size()));
                if (fresh) {
                    names.push_back(name);
                    weights.push_back(1.0);
                }
                return it->second;
            };
            if (doc.contains("weights"))
                for (auto& [name, val] : doc.at("weights").items()) weights[item(name)] = val.get<double>();
            std::map<int, std::vector<int>> sets;
            int top = n;
            for (auto& [key, items] : doc.at("sets").items()) {
                int v = vertex(key);
                top = std::max(top, v + 1);
                for (const auto& it : items) sets[v].push_back(item(it.get<std::string>()));
            }
            std::vector<std::vector<int>> per_vertex(static_cast<std::size_t>(std::max(top, 0)));
            for (auto& [v, s] : sets) per_vertex[v] = std::move(s);
            return std::make_unique<CoverageFunction>(std::max(top, 0), std::move(per_vertex), std::move(weights), std::move(names));
        }
        throw ParseError("unknown function type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed function spec: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

struct PropertyReport {
    bool nonnegative = true;
    bool monotone = true;
    bool submodular = true;
    // First violation found for each failed property.
    std::optional<VertexSet> negative_at;
    std::optional<std::pair<VertexSet, VertexSet>> monotone_witness;   // U ⊆ W with f(U) > f(W)
    std::optional<std::pair<VertexSet, VertexSet>> submodular_witness; // f(U)+f(W) < f(U∪W)+f(U∩W)
    bool ok() const { return nonnegative && monotone && submodular; }
};

// Exhaustive check over all 2^n sets and all pairs; n is capped at 12.
inline PropertyReport verify_properties(const SubmodularOracle& f, int max_n = 12) {
    const int n = f.ground_size();
    if (n > max_n) throw CapExceeded("verify_properties limited to n <= " + std::to_string(max_n));
    const std::uint32_t full = 1u << n;
    auto to_set = [&](std::uint32_t m) {
        VertexSet s;
        for (int i = 0; i < n; ++i)
            if (m >> i & 1) s.push_back(i);
        return s;
    };
    std::vector<double> value(full);
    for (std::uint32_t m = 0; m < full; ++m) value[m] = f.evaluate(to_set(m));
    PropertyReport r;
    for (std::uint32_t m = 0; m < full && r.nonnegative; ++m)
        if (!approx_leq(0.0, value[m])) {
            r.nonnegative = false;
            r.negative_at = to_set(m);
        }
    for (std::uint32_t m = 0; m < full && r.monotone; ++m)
        for (int i = 0; i < n; ++i)
            if (!(m >> i & 1) && !approx_leq(value[m], value[m | 1u << i])) {
                r.monotone = false;
                r.monotone_witness = std::make_pair(to_set(m), to_set(m | 1u << i));
                break;
            }
    for (std::uint32_t a = 0; a < full && r.submodular; ++a)
        for (std::uint32_t b = a + 1; b < full; ++b)
            if (!approx_leq(value[a | b] + value[a & b], value[a] + value[b])) {
                r.submodular = false;
                r.submodular_witness = std::make_pair(to_set(a), to_set(b));
                break;
            }
    return r;
}

} // namespace logiq
