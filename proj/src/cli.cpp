#include "logiq/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logiq/logiq.hpp"

namespace logiq {
namespace {

using nlohmann::json;

struct Options {
    std::string graph, function, formula, predicate, gaifman, ks, dump, decomposition, input;
    int aug_steps = -1;
    int n = -1;
    long long cap = -1;
    bool verify = false, pretty = false, linear_exact = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Session {
public:
    Session(const Options& o, std::ostream& out) : o_(o), out_(out) {}

    const Graph& graph() {
        if (!graph_) {
            require(o_.graph, "--graph");
            graph_ = load_graph(text("graph", o_.graph));
        }
        return *graph_;
    }

    const SubmodularOracle& function() {
        if (!function_) {
            require(o_.function, "--function");
            function_ = load_function(text("function", o_.function), graph().size());
        }
        return *function_;
    }

    std::string text(const std::string& key, const std::string& path) {
        std::string bytes = read_file(path);
        hashes_[key] = content_hash(bytes);
        return bytes;
    }

    BruteForceOptions caps() const {
        BruteForceOptions b;
        if (o_.cap > 0) {
            b.max_vertices = static_cast<int>(std::min<long long>(o_.cap, 62));
            b.max_tuples = static_cast<std::uint64_t>(o_.cap);
        }
        return b;
    }

    void emit(const json& j) { out_ << (o_.pretty ? j.dump(2) : j.dump()) << "\n"; }

    int report(SolveReport r) {
        r.input_hashes = hashes_;
        emit(json(r));
        return r.feasible ? kExitOk : kExitInfeasible;
    }

    static void require(const std::string& value, const std::string& flag) {
        if (value.empty()) throw CLI::RequiredError(flag);
    }

private:
    const Options& o_;
    std::ostream& out_;
    std::optional<Graph> graph_;
    std::unique_ptr<SubmodularOracle> function_;
    std::map<std::string, std::string> hashes_;
};

void attach_verdict(SolveReport& r, std::optional<double> optimum) {
    if (!optimum) {
        r.certificate_ok = !r.feasible;
        return;
    }
    r.optimum = *optimum;
    r.certificate_ok = r.feasible && approx_leq(r.value, *optimum) && approx_leq(*optimum, r.certificate * r.value);
}

int solve_mso(const Options& o, Session& s) {
    Session::require(o.predicate, "--predicate");
    const Graph& g = s.graph();
    const auto& f = s.function();
    PredicateExpr expr = parse_predicate(o.predicate);
    StructuredDnnf d = o.decomposition.empty() ? compile(g, expr) : [&] {
        TreeDecomposition td = load_decomposition(s.text("decomposition", o.decomposition));
        auto bad = validate(g, td);
        if (!bad.empty()) throw InvalidArgument("decomposition: " + bad.front().message);
        return compile(g, make_nice(td), expr);
    }();
    SolveReport r;
    r.problem = "mso";
    auto sol = recursive_greedy(d, f);
    if (sol) {
        r.feasible = true;
        r.solution = one_based(sol->set);
        r.value = sol->value;
        r.certificate = sol->certificate;
        r.oracle_calls = sol->oracle_calls;
        r.elapsed_ms = sol->elapsed_ms;
    }
    if (o.verify) {
        auto opt = brute_force_mso(g, expr, f, s.caps());
        attach_verdict(r, opt ? std::optional<double>(opt->value) : std::nullopt);
    }
    return s.report(r);
}

void fill(SolveReport& r, const std::optional<FoSolution>& sol) {
    if (!sol) return;
    r.feasible = true;
    r.solution = one_based(sol->tuple);
    r.value = sol->value;
    r.certificate = sol->certificate;
    r.oracle_calls = sol->oracle_calls;
    r.elapsed_ms = sol->elapsed_ms;
}

int solve_lowdeg(const Options& o, Session& s) {
    Session::require(o.gaifman, "--gaifman");
    const Graph& g = s.graph();
    const auto& f = s.function();
    GaifmanForm gf = load_gaifman(s.text("gaifman", o.gaifman));
    SolveReport r;
    if (o.linear_exact) {
        auto* w = dynamic_cast<const ModularFunction*>(&f);
        if (!w) throw InvalidArgument("--linear-exact needs a modular function");
        r.problem = "fo-lowdeg-linear";
        fill(r, solve_linear_exact(g, gf, *w));
    } else {
        r.problem = "fo-lowdeg";
        fill(r, suspect_recurse_lowdeg(g, gf, f));
    }
    if (o.verify) {
        auto opt = brute_force_fo(g, gf, f, s.caps());
        attach_verdict(r, opt ? std::optional<double>(opt->value) : std::nullopt);
    }
    return s.report(r);
}

int solve_bddexp(const Options& o, Session& s) {
    Session::require(o.ks, "--ks");
    const Graph& g = s.graph();
    const auto& f = s.function();
    KsNormalForm ks = load_ks(s.text("ks", o.ks));
    Augmentation aug = fraternal_augment(g, o.aug_steps >= 0 ? o.aug_steps : ks.depth);
    if (!o.dump.empty()) std::ofstream(o.dump) << aug.dump();
    SolveReport r;
    r.problem = "fo-bddexp";
    fill(r, suspect_recurse_bddexp(ks, aug, f));
    if (o.verify) {
        auto opt = brute_force_fo(aug, ks, f, s.caps());
        attach_verdict(r, opt ? std::optional<double>(opt->value) : std::nullopt);
    }
    return s.report(r);
}

int compile_cmd(const Options& o, Session& s) {
    Session::require(o.predicate, "--predicate");
    CompileStats stats;
    StructuredDnnf d = compile(s.graph(), parse_predicate(o.predicate), {}, &stats);
    if (!o.dump.empty()) {
        std::ofstream file(o.dump);
        if (!file) throw InvalidArgument("cannot write '" + o.dump + "'");
        file << d.to_text();
    }
    s.emit(json{{"predicate", o.predicate},
                {"gates", d.size()},
                {"width", d.width()},
                {"decomposition_width", stats.decomposition_width},
                {"max_states", stats.max_states},
                {"satisfiable", d.satisfiable()}});
    return kExitOk;
}

int check_function(const Options& o, Session& s) {
    Session::require(o.input, "FILE");
    auto f = load_function(s.text("function", o.input), o.n);
    PropertyReport p = verify_properties(*f, o.cap > 0 ? static_cast<int>(o.cap) : 12);
    auto witness = [](const auto& w) {
        return w ? json::array({one_based(w->first), one_based(w->second)}) : json(nullptr);
    };
    s.emit(json{{"n", f->ground_size()},
                {"nonnegative", p.nonnegative},
                {"monotone", p.monotone},
                {"submodular", p.submodular},
                {"negative_at", p.negative_at ? json(one_based(*p.negative_at)) : json(nullptr)},
                {"monotone_witness", witness(p.monotone_witness)},
                {"submodular_witness", witness(p.submodular_witness)},
                {"ok", p.ok()}});
    return p.ok() ? kExitOk : kExitData;
}

int check_decomposition(const Options& o, Session& s) {
    Session::require(o.input, "FILE");
    TreeDecomposition td = load_decomposition(s.text("decomposition", o.input));
    auto bad = validate(s.graph(), td);
    json violations = json::array();
    for (const auto& v : bad) violations.push_back({{"message", v.message}, {"witness", one_based(v.witness)}});
    s.emit(json{{"width", td.width()}, {"violations", violations}, {"ok", bad.empty()}});
    return bad.empty() ? kExitOk : kExitData;
}

int check_formula(const Options& o, Session& s) {
    json j;
    std::vector<std::string> problems;
    if (!o.gaifman.empty()) {
        GaifmanForm gf = load_gaifman(s.text("gaifman", o.gaifman));
        problems = validate_gaifman(gf);
        j["kind"] = "gaifman";
        j["k"] = gf.k;
    } else if (!o.ks.empty()) {
        KsNormalForm ks = load_ks(s.text("ks", o.ks));
        KsValidation v = validate_ks(ks);
        problems = v.violations;
        j["kind"] = "ks";
        j["k"] = ks.k;
        if (!v.cycle.empty()) j["cycle"] = one_based(v.cycle);
    } else {
        Session::require(o.input, "FILE");
        Formula f = parse_formula(s.text("formula", o.input));
        j["kind"] = f.is_mso() ? "mso" : "fo";
        j["free"] = f.free_count();
        j["canonical"] = f.to_string();
    }
    j["violations"] = problems;
    j["ok"] = problems.empty();
    s.emit(j);
    return problems.empty() ? kExitOk : kExitData;
}

int oracle_mso(const Options& o, Session& s) {
    const Graph& g = s.graph();
    const auto& f = s.function();
    const std::uint64_t calls_before = f.calls();
    std::optional<ExactSet> best;
    if (!o.predicate.empty()) best = brute_force_mso(g, parse_predicate(o.predicate), f, s.caps());
    else {
        Session::require(o.formula, "--formula or --predicate");
        best = brute_force_mso(g, parse_formula(s.text("formula", o.formula)), f, s.caps());
    }
    SolveReport r;
    r.problem = "oracle-mso";
    r.certificate = 1;
    r.oracle_calls = f.calls() - calls_before;
    if (best) {
        r.feasible = true;
        r.solution = one_based(best->set);
        r.value = best->value;
        r.optimum = best->value;
    }
    return s.report(r);
}

int oracle_fo(const Options& o, Session& s) {
    const Graph& g = s.graph();
    const auto& f = s.function();
    const std::uint64_t calls_before = f.calls();
    std::optional<ExactTuple> best;
    if (!o.gaifman.empty()) best = brute_force_fo(g, load_gaifman(s.text("gaifman", o.gaifman)), f, s.caps());
    else if (!o.ks.empty()) {
        KsNormalForm ks = load_ks(s.text("ks", o.ks));
        best = brute_force_fo(fraternal_augment(g, o.aug_steps >= 0 ? o.aug_steps : ks.depth), ks, f, s.caps());
    } else {
        Session::require(o.formula, "--formula, --gaifman or --ks");
        best = brute_force_fo(g, parse_formula(s.text("formula", o.formula)), f, s.caps());
    }
    SolveReport r;
    r.problem = "oracle-fo";
    r.certificate = 1;
    r.oracle_calls = f.calls() - calls_before;
    if (best) {
        r.feasible = true;
        r.solution = one_based(best->tuple);
        r.value = best->value;
        r.optimum = best->value;
    }
    return s.report(r);
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Submodular maximization under graph-logic constraints"};
    app.require_subcommand(1);
    auto graph_flag = [&](CLI::App* c) { c->add_option("--graph", o.graph, "graph file (p/e lines)"); };
    auto common = [&](CLI::App* c) {
        graph_flag(c);
        c->add_option("--function", o.function, "objective JSON");
        c->add_option("--cap", o.cap, "brute-force cap (vertices for subsets, tuples for FO)");
        c->add_flag("--json", o.pretty, "indent the JSON output");
    };

    auto* solve = app.add_subcommand("solve", "approximate a constrained maximization");
    solve->require_subcommand(1);
    auto* s_mso = solve->add_subcommand("mso", "set constraint over bounded treewidth");
    common(s_mso);
    s_mso->add_option("--predicate", o.predicate, "predicate expression, e.g. \"domset(X) & connected(X)\"");
    s_mso->add_option("--decomposition", o.decomposition, "tree decomposition file (default: min-fill)");
    s_mso->add_flag("--verify", o.verify, "compare against the brute-force optimum");
    auto* s_low = solve->add_subcommand("fo-lowdeg", "tuple constraint in Gaifman form");
    common(s_low);
    s_low->add_option("--gaifman", o.gaifman, "Gaifman form JSON");
    s_low->add_flag("--linear-exact", o.linear_exact, "exact mode for modular objectives");
    s_low->add_flag("--verify", o.verify, "compare against the brute-force optimum");
    auto* s_bdd = solve->add_subcommand("fo-bddexp", "tuple constraint in KS normal form");
    common(s_bdd);
    s_bdd->add_option("--ks", o.ks, "KS normal form JSON");
    s_bdd->add_option("--aug-steps", o.aug_steps, "augmentation steps (default: the form's depth)");
    s_bdd->add_option("--dump", o.dump, "write the augmentation dump here");
    s_bdd->add_flag("--verify", o.verify, "compare against the brute-force optimum");

    auto* comp = app.add_subcommand("compile", "compile a predicate to a structured DNNF");
    graph_flag(comp);
    comp->add_option("--predicate", o.predicate, "predicate expression");
    comp->add_option("--dump", o.dump, "write the circuit here");
    comp->add_flag("--json", o.pretty, "indent the JSON output");

    auto* check = app.add_subcommand("check", "validate an input file");
    check->require_subcommand(1);
    auto* c_fun = check->add_subcommand("function", "check nonnegativity, monotonicity and submodularity");
    c_fun->add_option("file", o.input, "objective JSON");
    c_fun->add_option("--n", o.n, "ground set size");
    c_fun->add_option("--cap", o.cap, "largest ground set to check exhaustively");
    c_fun->add_flag("--json", o.pretty, "indent the JSON output");
    auto* c_dec = check->add_subcommand("decomposition", "validate a tree decomposition");
    c_dec->add_option("file", o.input, "decomposition file");
    graph_flag(c_dec);
    c_dec->add_flag("--json", o.pretty, "indent the JSON output");
    auto* c_for = check->add_subcommand("formula", "parse a formula or validate a normal form");
    c_for->add_option("file", o.input, "formula file");
    c_for->add_option("--gaifman", o.gaifman, "Gaifman form JSON");
    c_for->add_option("--ks", o.ks, "KS normal form JSON");
    c_for->add_flag("--json", o.pretty, "indent the JSON output");

    auto* oracle = app.add_subcommand("oracle", "exact optimum by exhaustive search");
    oracle->require_subcommand(1);
    auto* o_mso = oracle->add_subcommand("mso", "best set");
    common(o_mso);
    o_mso->add_option("--predicate", o.predicate, "predicate expression");
    o_mso->add_option("--formula", o.formula, "MSO formula file");
    auto* o_fo = oracle->add_subcommand("fo", "best tuple");
    common(o_fo);
    o_fo->add_option("--formula", o.formula, "FO formula file");
    o_fo->add_option("--gaifman", o.gaifman, "Gaifman form JSON");
    o_fo->add_option("--ks", o.ks, "KS normal form JSON");
    o_fo->add_option("--aug-steps", o.aug_steps, "augmentation steps for --ks");

    std::vector<std::string> storage{"logiq"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : storage) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "logiq: " << e.what() << "\n";
        return kExitUsage;
    }

    Session session(o, out);
    try {
        if (*s_mso) return solve_mso(o, session);
        if (*s_low) return solve_lowdeg(o, session);
        if (*s_bdd) return solve_bddexp(o, session);
        if (*comp) return compile_cmd(o, session);
        if (*c_fun) return check_function(o, session);
        if (*c_dec) return check_decomposition(o, session);
        if (*c_for) return check_formula(o, session);
        if (*o_mso) return oracle_mso(o, session);
        if (*o_fo) return oracle_fo(o, session);
    } catch (const CLI::RequiredError& e) {
        err << "logiq: missing " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "logiq: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        err << "logiq: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

} // namespace logiq
