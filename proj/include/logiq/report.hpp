#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logiq/graph.hpp"

namespace logiq {

// Result of one CLI solve. Vertices are 1-based, as in the input files.
struct SolveReport {
    std::string problem;                // "mso", "fo-lowdeg", "fo-lowdeg-linear", "fo-bddexp"
    std::vector<int> solution;          // set (sorted) or tuple
    bool feasible = false;
    double value = 0;
    int certificate = 0;
    std::uint64_t oracle_calls = 0;
    std::optional<double> optimum;      // brute-force OPT when --verify ran
    std::optional<bool> certificate_ok; // f(ALG) <= OPT <= certificate * f(ALG)
    double elapsed_ms = 0;
    std::map<std::string, std::string> input_hashes;

    friend bool operator==(const SolveReport&, const SolveReport&) = default;
};

inline std::vector<int> one_based(const std::vector<Vertex>& vs) {
    std::vector<int> out;
    for (Vertex v : vs) out.push_back(v + 1);
    return out;
}

inline void to_json(nlohmann::json& j, const SolveReport& r) {
    j = nlohmann::json{{"problem", r.problem},
                       {"solution", r.solution},
                       {"feasible", r.feasible},
                       {"value", r.value},
                       {"certificate", r.certificate},
                       {"oracle_calls", r.oracle_calls},
                       {"elapsed_ms", r.elapsed_ms},
                       {"input_hashes", r.input_hashes}};
    j["optimum"] = r.optimum ? nlohmann::json(*r.optimum) : nlohmann::json(nullptr);
    j["certificate_ok"] = r.certificate_ok ? nlohmann::json(*r.certificate_ok) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, SolveReport& r) {
    j.at("problem").get_to(r.problem);
    j.at("solution").get_to(r.solution);
    j.at("feasible").get_to(r.feasible);
    j.at("value").get_to(r.value);
    j.at("certificate").get_to(r.certificate);
    j.at("oracle_calls").get_to(r.oracle_calls);
    j.at("elapsed_ms").get_to(r.elapsed_ms);
    j.at("input_hashes").get_to(r.input_hashes);
    r.optimum = j.at("optimum").is_null() ? std::nullopt : std::optional<double>(j.at("optimum").get<double>());
    r.certificate_ok = j.at("certificate_ok").is_null() ? std::nullopt : std::optional<bool>(j.at("certificate_ok").get<bool>());
}

} // namespace logiq
