#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include "fkt/io.hpp"

using namespace fkt;

namespace {

struct Options {
    std::string verb, builtin, space, file, engine = "builtin", format = "text";
    int degree = -1, max = 4;
    long mod = 0;
    bool serial = false;
};

struct Report {
    std::ostringstream text;
    Json json = Json::object();
    std::vector<std::string> warnings;
};

std::string yes(bool b) { return b ? "yes" : "no"; }

std::string resolve_path(const std::string& p) {
    if (p.empty() || std::filesystem::exists(p)) return p;
    auto alt = std::filesystem::path(FKT_DATA_DIR) / p;
    return std::filesystem::exists(alt) ? alt.string() : p;
}

Engine engine_of(const Options& o) {
    if (o.engine == "builtin") return Engine::builtin;
    if (o.engine == "generic") return Engine::generic;
    throw ParseError("engine must be builtin or generic");
}

void provenance(const Category& cat, const Options& o, Report& r) {
    if (cat.reconstructed)
        r.warnings.push_back("relations of " + cat.name + " are derived from six-term vanishing and naturality");
    if (engine_of(o) == Engine::builtin && (cat.name == "C2" || cat.name == "Z4"))
        r.warnings.push_back("resolutions over " + cat.name + " come from the syzygy engine and are checked, not transcribed");
}

std::shared_ptr<const Category> category_of(const Options& o) {
    if (!o.builtin.empty()) return builtin_category(o.builtin);
    if (!o.file.empty()) return category_from_json(load_json(resolve_path(o.file)));
    if (!o.space.empty()) return builtin_category(o.space);
    throw ParseError("need --builtin or --file");
}

GradedModule module_of(const Options& o) {
    if (o.file.empty()) throw ParseError("need --file with a module");
    Json j = load_json(resolve_path(o.file));
    std::shared_ptr<const Category> cat;
    if (!o.space.empty()) {
        if (j.contains("space") && j["space"].is_string() && j["space"] != o.space)
            throw ParseError("module is over " + j["space"].get<std::string>() + ", not " + o.space);
        cat = builtin_category(o.space);
    }
    auto M = module_from_json(j, cat);
    if (o.mod) M = tensor_mod_k(M, o.mod);
    return M;
}

BlockGraph graph_of(const Options& o) {
    if (o.file.empty()) throw ParseError("need --file with a graph");
    auto G = graph_from_json(load_json(resolve_path(o.file)));
    if (!o.space.empty() && o.space != G.space_name)
        throw ParseError("graph is over " + G.space_name + ", not " + o.space);
    return G;
}

std::vector<int> degrees_of(const Options& o) {
    if (o.degree >= 0) return {o.degree};
    return {0, 1, 2};
}

void tor_text(const TorReport& T, Report& r) {
    for (const auto& [n, g] : T.aggregate) {
        r.text << "Tor_" << n << " even: " << g[0].str() << "\n";
        r.text << "Tor_" << n << " odd: " << g[1].str() << "\n";
        for (const auto& [y, m] : T.per_object) {
            auto it = m.find(n);
            if (it == m.end() || (it->second[0].trivial() && it->second[1].trivial())) continue;
            r.text << "  S_" << y << ": even " << it->second[0].str() << ", odd " << it->second[1].str() << "\n";
        }
    }
}

Json aggregate_json(const TorReport& T) {
    Json a = Json::object();
    for (const auto& [n, g] : T.aggregate) a[std::to_string(n)] = {{"even", g[0].str()}, {"odd", g[1].str()}};
    return a;
}

void space_info(const Options& o, Report& r) {
    FiniteSpace X = !o.builtin.empty() ? builtin_space(o.builtin)
                    : !o.file.empty()  ? space_from_json(load_json(resolve_path(o.file)))
                                       : throw ParseError("need --builtin or --file");
    auto lc = X.lc_subsets(true);
    std::vector<std::string> labels;
    for (const auto& s : lc) labels.push_back(X.label(s.value));
    r.text << "space " << X.name() << ": " << X.size() << " points, " << X.opens().size() << " open sets\n";
    r.text << "LC* = " << lc.size() << " subsets; accordion: " << yes(X.is_accordion_union()) << "\n";
    r.text << "LC*: ";
    for (std::size_t i = 0; i < labels.size(); ++i) r.text << (i ? " " : "") << labels[i];
    r.text << "\n";
    r.json = space_to_json(X);
    r.json["lc"] = labels;
    r.json["accordion"] = X.is_accordion_union();
}

void cat_table(const Options& o, Report& r) {
    auto cat = category_of(o);
    provenance(*cat, o, r);
    const auto& T = cat->table;
    auto ideal = ideal_checks(T, cat->pres.quiver);
    r.text << "category " << cat->name << ": " << cat->size() << " objects, " << cat->pres.quiver.arrows.size()
           << " generators, " << cat->pres.relations.size() << " relations, total rank " << T.total_rank() << "\n";
    r.text << "nilpotent: " << yes(ideal.nilpotent) << "; semidirect: " << yes(ideal.semidirect);
    if (ideal.nilpotency_index) r.text << "; nilpotency index " << *ideal.nilpotency_index;
    r.text << "\n";
    for (std::size_t y = 0; y < cat->size(); ++y) {
        r.text << cat->label(int(y)) << ":";
        for (std::size_t z = 0; z < cat->size(); ++z) r.text << " " << T.rank(int(y), int(z));
        r.text << "\n";
    }
    r.json = table_to_json(*cat);
    r.json["presentation"] = presentation_to_json(cat->pres);
    r.json["nilpotent"] = ideal.nilpotent;
    r.json["semidirect"] = ideal.semidirect;
}

void module_validate(const Options& o, Report& r) {
    auto M = module_of(o);
    provenance(*M.cat, o, r);
    auto v = validate(M);
    r.text << "valid: " << yes(v.ok) << "\n";
    for (const auto& p : v.problems) r.text << "  " << p << "\n";
    r.json = {{"valid", v.ok}, {"problems", v.problems}};
}

void module_exact(const Options& o, Report& r) {
    auto M = module_of(o);
    provenance(*M.cat, o, r);
    auto e = check_exact(M);
    r.text << "exact: " << yes(e.exact) << " (" << e.checked << " extensions)\n";
    if (e.first_failure) r.text << "  " << *e.first_failure << "\n";
    r.json = {{"exact", e.exact}, {"checked", e.checked}};
    if (e.first_failure) r.json["failure"] = *e.first_failure;
}

void module_tor(const Options& o, Report& r) {
    auto M = module_of(o);
    provenance(*M.cat, o, r);
    auto T = tor(M, degrees_of(o), TorOptions{engine_of(o), !o.serial});
    tor_text(T, r);
    r.json = {{"tor", tor_to_json(T)}, {"aggregate", aggregate_json(T)}};
}

void module_pd(const Options& o, Report& r) {
    auto M = module_of(o);
    provenance(*M.cat, o, r);
    auto p = projective_dimension(M, o.max, TorOptions{engine_of(o), !o.serial});
    if (p.pd) r.text << "pd = " << *p.pd << "\n";
    else r.text << "pd > " << o.max << "\n";
    r.json = {{"pd", p.pd ? Json(*p.pd) : Json(nullptr)}, {"max", o.max}, {"aggregate", aggregate_json(p.tor)}};
}

void graph_check(const Options& o, Report& r) {
    auto G = graph_of(o);
    auto c = graph_checks(G);
    r.text << "triangular: " << yes(c.triangular) << "\nsinks: " << yes(c.has_sinks) << "\nsources: "
           << yes(c.has_sources) << "\ncondition (K): " << yes(c.condition_k) << "\n";
    r.json = {{"triangular", c.triangular},
              {"sinks", c.sinks},
              {"sources", c.sources},
              {"condition_K", c.condition_k},
              {"single_cycle_vertices", c.too_few_cycles}};
}

void graph_k(const Options& o, Report& r) {
    auto G = graph_of(o);
    for (const auto& s : G.space.lc_subsets(true)) {
        auto K = k_groups(G, s.value);
        std::string lbl = G.space.label(s.value);
        r.text << lbl << ": K0 = " << K.k0_nf().str() << ", K1 = " << AbGroupNF{K.k1_rank(), {}}.str() << "\n";
        r.json[lbl] = {{"K0", K.k0_nf().str()}, {"K1", AbGroupNF{K.k1_rank(), {}}.str()},
                       {"bprime", matrix_to_json(K.bprime)}, {"K1_basis", matrix_to_json(K.k1.transpose())}};
    }
}

void graph_fk(const Options& o, Report& r) {
    auto G = graph_of(o);
    auto M = fk_module(G);
    provenance(*M.cat, o, r);
    auto v = validate(M);
    auto e = check_exact(M);
    for (std::size_t y = 0; y < M.cat->size(); ++y) {
        auto nf = M.entries[y].nf();
        r.text << M.cat->label(int(y)) << ": even " << nf[0].str() << ", odd " << nf[1].str() << "\n";
    }
    r.text << "valid: " << yes(v.ok) << "; exact: " << yes(e.exact) << "\n";
    r.json = module_to_json(M);
}

void graph_tor(const Options& o, Report& r) {
    auto G = graph_of(o);
    std::vector<int> ds = degrees_of(o);
    auto ck = tor_ck(G, *std::max_element(ds.begin(), ds.end()), TorOptions{engine_of(o), !o.serial});
    provenance(*builtin_category(G.space_name), o, r);
    TorReport T = ck.tor;
    if (o.degree >= 0) {
        for (auto it = T.aggregate.begin(); it != T.aggregate.end();)
            it = it->first == o.degree ? std::next(it) : T.aggregate.erase(it);
        for (auto& [y, m] : T.per_object)
            for (auto it = m.begin(); it != m.end();) it = it->first == o.degree ? std::next(it) : m.erase(it);
    }
    tor_text(T, r);
    r.json = {{"tor", tor_to_json(T)}, {"aggregate", aggregate_json(T)}};
    if (ck.fast) {
        const auto& f = *ck.fast;
        r.text << "shortcut complex (" << f.kind << "): Tor_1 even " << f.tor1[0].str() << ", odd "
               << f.tor1[1].str() << "\n";
        Json fj = {{"kind", f.kind}, {"tor1", {{"even", f.tor1[0].str()}, {"odd", f.tor1[1].str()}}}};
        std::vector<std::string> gs;
        for (const auto& g : f.complex_groups) gs.push_back(g.str());
        r.text << "  groups:";
        for (const auto& g : gs) r.text << " [" << g << "]";
        r.text << "\n";
        fj["groups"] = gs;
        auto vecs = [&](const char* name, const std::vector<std::vector<Int>>& vs) {
            Json arr = Json::array();
            for (const auto& v : vs) {
                r.text << "  " << name << ": (";
                Json jv = Json::array();
                for (std::size_t i = 0; i < v.size(); ++i) {
                    r.text << (i ? "," : "") << v[i];
                    jv.push_back(int_to_json(v[i]));
                }
                r.text << ")\n";
                arr.push_back(jv);
            }
            fj[name] = arr;
        };
        vecs("ker f meet im phi0", f.witness_lattice);
        vecs("phi0(ker f)", f.witness_sublattice);
        if (f.witness_generates) {
            r.text << "  class of (0,1,1,0,1) generates: " << yes(*f.witness_generates) << "\n";
            fj["witness_generates"] = *f.witness_generates;
        }
        r.json["shortcut"] = fj;
    }
}

int run(const Options& o) {
    Report r;
    static const std::map<std::string, void (*)(const Options&, Report&)> verbs{
        {"space-info", space_info},   {"cat-table", cat_table},       {"module-validate", module_validate},
        {"module-exact", module_exact}, {"module-tor", module_tor},   {"module-pd", module_pd},
        {"graph-check", graph_check}, {"graph-k", graph_k},           {"graph-fk", graph_fk},
        {"graph-tor", graph_tor}};
    auto it = verbs.find(o.verb);
    if (it == verbs.end()) throw ParseError("unknown verb '" + o.verb + "'");
    it->second(o, r);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (o.format == "json") {
        if (!r.warnings.empty()) r.json["warnings"] = r.warnings;
        std::cout << r.json.dump(2) << "\n";
    } else {
        std::cout << r.text.str();
    }
    return 0;
}

}

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"filtrated K-theory invariants over finite spaces"};
    app.add_option("verb", o.verb, "space-info | cat-table | module-validate | module-exact | module-tor | module-pd | "
                                    "graph-check | graph-k | graph-fk | graph-tor")
        ->required();
    app.add_option("--builtin", o.builtin, "builtin space or category: Z1..Z4, S, C2, pt");
    app.add_option("--space", o.space, "space the input file lives over");
    app.add_option("--file", o.file, "JSON input; bundled fixtures are found by name");
    app.add_option("--engine", o.engine, "builtin | generic")->check(CLI::IsMember({"builtin", "generic"}));
    app.add_option("--format", o.format, "text | json")->check(CLI::IsMember({"text", "json"}));
    app.add_option("-n,--degree", o.degree, "single Tor degree (default 0..2)");
    app.add_option("--max", o.max, "largest projective dimension tried");
    app.add_option("--mod", o.mod, "tensor the module with Z/k first");
    app.add_flag("--serial", o.serial, "evaluate Tor summands one at a time");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return run(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis not verified: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 4;
    }
}
