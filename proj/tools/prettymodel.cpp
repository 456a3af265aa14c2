#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "prettymodel/prettymodel.hpp"

#ifndef PRETTYMODEL_CORPUS_DIR
#define PRETTYMODEL_CORPUS_DIR "data/corpus"
#endif

namespace fs = std::filesystem;
using namespace pm;

namespace {

struct Options {
    std::string input;
    std::string map_doc;
    std::string base;
    std::string name;
    std::string output = "table";
    std::string euler;
    std::optional<int> truncation;
    std::optional<int> dimension;
    std::optional<int> rank;
    std::optional<int> degree;
    bool verify = false;
};

struct Outcome {
    Report report;
    std::string document; // serialized result, when the command produces one
};

std::string corpus_dir() {
    if (const char* env = std::getenv("PRETTYMODEL_CORPUS")) return env;
    return PRETTYMODEL_CORPUS_DIR;
}

/// A path, or a corpus name with or without the .cdga extension.
std::string read_input(const std::string& ref) {
    std::vector<fs::path> candidates{ref};
    fs::path dir = corpus_dir();
    candidates.push_back(dir / ref);
    candidates.push_back(dir / (ref + ".cdga"));
    for (const auto& p : candidates) {
        std::error_code ec;
        if (fs::is_regular_file(p, ec)) {
            std::ifstream in(p);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    }
    throw InputError("cannot find document '" + ref + "' (looked in the working directory and " + dir.string() + ")");
}

CdgaDocument load(const std::string& ref) {
    if (ref.empty()) throw InputError("no input document given");
    try {
        return parse(read_input(ref));
    } catch (const ParseError& e) {
        throw InputError(ref + ": " + e.what());
    }
}

Orientation orientation_of(const AlgebraEntry& e, std::optional<int> dimension) {
    if (e.orientation) {
        if (dimension && *dimension != e.orientation->dimension)
            throw InputError("document orientation has dimension " + std::to_string(e.orientation->dimension) +
                             ", --dimension says " + std::to_string(*dimension));
        return *e.orientation;
    }
    Orientation eps = default_orientation(e.table);
    if (dimension && *dimension != eps.dimension)
        throw InputError("no orientation in the document and the top degree " + std::to_string(eps.dimension) +
                         " differs from --dimension " + std::to_string(*dimension));
    return eps;
}

std::string ideal_dims(const DiffIdeal& j, int from, int to) {
    std::string out = "(";
    for (int p = from; p <= to; ++p) out += (p > from ? "," : "") + std::to_string(j.dim(p));
    return out + ")";
}

void add_failures(Report& r, const std::string& prefix, const ValidationReport& v) {
    if (v.ok()) {
        r.check(prefix, true);
        return;
    }
    for (const auto& f : v.failures) r.check(prefix + ": " + f.check, false, f.witness);
}

const ModMapEntry& modmap_of(const CdgaDocument& doc, const std::string& name) {
    if (!name.empty()) {
        if (auto* m = doc.find_modmap(name)) return *m;
        throw InputError("no module map named '" + name + "'");
    }
    if (doc.modmaps.empty()) throw InputError("document contains no module map");
    return doc.modmaps.front();
}

const MapEntry& map_of(const CdgaDocument& doc, const std::string& name) {
    if (!name.empty()) {
        if (auto* m = doc.find_map(name)) return *m;
        throw InputError("no map named '" + name + "'");
    }
    if (doc.maps.empty()) throw InputError("document contains no CDGA map");
    return doc.maps.front();
}

Outcome cmd_validate(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.input);
    for (const auto& a : doc.algebras) {
        add_failures(r, "algebra " + a.name, validate_cdga(a.table));
        r.table(cohomology_table(a.name, a.table.complex()));
        if (a.orientation) {
            auto oc = is_orientation(a.table, *a.orientation);
            r.check("orientation of " + a.name, oc.ok, oc.reason + (oc.witness.empty() ? "" : " (" + oc.witness + ")"));
        }
    }
    for (const auto& m : doc.modules) add_failures(r, "module " + m.name, validate_module(m.module));
    for (const auto& m : doc.maps) add_failures(r, "map " + m.name, m.morphism.validate());
    for (const auto& m : doc.modmaps) add_failures(r, "module map " + m.name, m.map.validate());
    return out;
}

Outcome cmd_cohomology(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.input);
    const AlgebraEntry& e = doc.algebra(o.name);
    CdgaTable a = o.truncation ? truncate(e.table, *o.truncation) : e.table;
    r.facts.add("algebra", e.name);
    r.facts.add("total dimension", std::to_string(a.dim()));
    if (a.truncation()) r.facts.add("truncation", std::to_string(*a.truncation()));
    Cohomology h(a.complex());
    r.table(cohomology_table(e.name, h));
    r.facts.add("dims", dims_string(dims_list(h)));
    return out;
}

Outcome cmd_check_pd(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.input);
    const AlgebraEntry& e = doc.algebra(o.name);
    Orientation eps = orientation_of(e, o.dimension);
    r.facts.add("algebra", e.name);
    r.facts.add("dimension", std::to_string(eps.dimension));
    r.table(cohomology_table(e.name, e.table.complex()));
    auto oc = is_orientation(e.table, eps);
    r.check("orientation", oc.ok, oc.reason + (oc.witness.empty() ? "" : " (" + oc.witness + ")"));
    if (!oc) return out;
    PdCheck pd = is_pd_cdga(e.table, eps, false);
    std::string why = pd.reason;
    if (pd.failing_degree) why += " (degree " + std::to_string(*pd.failing_degree) + ")";
    r.check("theta is an isomorphism", pd.certificate.has_value(), why);
    if (pd && eps.dimension % 4 == 0) r.facts.add("signature", std::to_string(signature(e.table, eps)));
    return out;
}

Outcome cmd_orphans(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.input);
    const AlgebraEntry& e = doc.algebra(o.name);
    Orientation eps = orientation_of(e, o.dimension);
    auto oc = is_orientation(e.table, eps);
    if (!oc) throw PreconditionError("not an orientation: " + oc.reason + " (" + oc.witness + ")");
    DiffIdeal j = orphan_ideal(e.table, eps);
    int top = e.table.space().max_degree();
    r.facts.add("algebra", e.name);
    r.facts.add("dimension", std::to_string(eps.dimension));
    r.facts.add("orphan dims", ideal_dims(j, 0, top));
    Cohomology h(j.complex());
    r.table(cohomology_table("orphan ideal", h));
    r.facts.add("orphans acyclic", h.acyclic() ? "yes" : "no");
    return out;
}

Outcome cmd_pd_quotient(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.input);
    const AlgebraEntry& e = doc.algebra(o.name);
    Orientation eps = orientation_of(e, o.dimension);
    PdQuotient q = pd_quotient(e.table, eps);
    r.facts.add("algebra", e.name);
    r.facts.add("orphan dims", ideal_dims(q.orphans, 0, e.table.space().max_degree()));
    r.check("orphan ideal is acyclic", q.orphans_acyclic, "orphan ideal has cohomology");
    r.check("projection is a quasi-isomorphism", q.quasi_iso.quasi_iso,
            "degree " + std::to_string(q.quasi_iso.failing_degree.value_or(-1)));
    r.check("quotient is Poincare duality", true);
    r.table(cohomology_table(e.name, e.table.complex()));
    r.table(cohomology_table(e.name + "/O", q.quotient.algebra.complex()));
    out.document = serialize(e.name + "_pd", q.quotient.algebra, q.certificate.orientation);
    return out;
}

Outcome cmd_kill_orphans(const Options& o) {
    Outcome out;
    Report& r = out.report;
    if (!o.degree) throw InputError("kill-orphans needs --degree p");
    CdgaDocument doc = load(o.input);
    const AlgebraEntry& e = doc.algebra(o.name);
    Orientation eps = orientation_of(e, o.dimension);
    OrphanKilling k = kill_orphans_in_degree(e.table, eps, *o.degree);
    std::string gens;
    for (const auto& g : k.generators) {
        std::size_t i = k.algebra.index_of(g);
        gens += (gens.empty() ? "" : " ") + g + "[" + std::to_string(k.algebra.degree(i)) + "]";
    }
    r.facts.add("algebra", e.name);
    r.facts.add("degree", std::to_string(*o.degree));
    r.facts.add("new generators", gens.empty() ? "none" : gens);
    r.facts.add("d vanishes on degree 2", k.degree2_closed ? "yes" : "no");
    auto oc = is_orientation(k.algebra, k.orientation);
    r.check("extended orientation", oc.ok, oc.reason + (oc.witness.empty() ? "" : " (" + oc.witness + ")"));
    QuasiIsoResult qi = is_quasi_iso(k.inclusion);
    r.check("inclusion is a quasi-isomorphism", qi.quasi_iso, "degree " + std::to_string(qi.failing_degree.value_or(-1)));
    if (oc) {
        DiffIdeal j = orphan_ideal(k.algebra, k.orientation);
        r.facts.add("orphan dims after", ideal_dims(j, 0, k.algebra.space().max_degree()));
        int first = -1;
        for (int p = 0; p <= *o.degree; ++p)
            if (j.dim(p) > 0 && first < 0) first = p;
        r.check("no orphans in degrees <= " + std::to_string(*o.degree), first < 0, "degree " + std::to_string(first));
    }
    r.table(cohomology_table(e.name, e.table.complex()));
    r.table(cohomology_table("extension", k.algebra.complex()));
    out.document = serialize(e.name + "_killed", k.algebra, k.orientation);
    return out;
}

Outcome cmd_balanced(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.map_doc.empty() ? o.input : o.map_doc);
    const ModMapEntry& m = modmap_of(doc, o.name);
    auto rep = m.map.validate();
    if (!rep) throw InputError("'" + m.name + "' is not a module map: " + rep.summary());
    BalancedResult b = is_balanced(m.map, false);
    r.facts.add("map", m.name);
    std::string w = b.witness ? "(" + b.witness->first + ", " + b.witness->second + ")" : "";
    r.check("balanced", b.balanced, w);
    return out;
}

Outcome cmd_cone(const Options& o) {
    Outcome out;
    Report& r = out.report;
    CdgaDocument doc = load(o.map_doc.empty() ? o.input : o.map_doc);
    const ModMapEntry& m = modmap_of(doc, o.name);
    auto rep = m.map.validate();
    if (!rep) throw InputError("'" + m.name + "' is not a module map: " + rep.summary());
    MappingCone c = mapping_cone(m.map);
    Cohomology hq(m.map.source().complex()), hr(m.map.target().complex()), hc(c.cone.complex());
    r.facts.add("map", m.name);
    r.table(cohomology_table("source", hq));
    r.table(cohomology_table("target", hr));
    r.table(cohomology_table("cone", hc));
    QuasiIsoResult qi = is_quasi_iso(m.map.source().complex(), m.map.target().complex(), m.map.map());
    r.facts.add("quasi-isomorphism", qi.quasi_iso ? "yes" : "no");
    r.facts.add("cone acyclic", hc.acyclic() ? "yes" : "no");
    const DgModule& t = m.map.target();
    if (t.space() == t.algebra().space() && t.action() == t.algebra().products()) {
        BalancedResult b = is_balanced(m.map, false);
        r.facts.add("balanced", b ? "yes" : "no");
        bool positive = m.map.source().space().empty() || m.map.source().space().min_degree() >= 1;
        if (b && positive) {
            CdgaTable st = semi_trivial_cone(m.map);
            add_failures(r, "semi-trivial cone", validate_cdga(st));
            out.document = serialize(m.name + "_cone", st);
        }
    }
    return out;
}

struct PrettyRun {
    PrettyModel model;
    const MapEntry* map;
};

PrettyRun run_pretty(const CdgaDocument& doc, const Options& o) {
    const MapEntry& m = map_of(doc, o.name);
    const AlgebraEntry& src = doc.algebra(m.source);
    Orientation eps = orientation_of(src, o.dimension);
    PdCheck pd = is_pd_cdga(src.table, eps, false);
    if (!pd) throw PreconditionError("source algebra '" + src.name + "' is not Poincare duality: " + pd.reason);
    return {build_pretty_model(m.morphism, *pd.certificate), &m};
}

CdgaDocument pretty_document(const PrettyModel& pm, const std::string& name) {
    CdgaDocument d;
    d.algebras.push_back({name + "_domain", pm.domain, std::nullopt, std::nullopt});
    d.algebras.push_back({name + "_codomain", pm.codomain, std::nullopt, std::nullopt});
    d.maps.push_back({name + "_model", name + "_domain", name + "_codomain", pm.morphism});
    return d;
}

Outcome cmd_pretty_model(const Options& o) {
    Outcome out;
    CdgaDocument doc = load(o.input);
    PrettyRun run = run_pretty(doc, o);
    out.report = verify_pretty_model(run.model);
    out.report.facts.entries.insert(out.report.facts.entries.begin(), {"map", run.map->name});
    out.document = serialize(pretty_document(run.model, run.map->name + "_pretty"));
    return out;
}

Outcome cmd_quotient_model(const Options& o) {
    Outcome out;
    CdgaDocument doc = load(o.input);
    PrettyRun run = run_pretty(doc, o);
    QuotientModel qm = surjective_quotient_model(run.model);
    Report& r = out.report;
    r.facts.add("map", run.map->name);
    r.facts.add("ideal dimension", std::to_string(qm.ideal.dim()));
    r.table(cohomology_table("domain", run.model.domain.complex()));
    r.table(cohomology_table("P/I", qm.quotient.algebra.complex()));
    r.check("domain -> P/I is a quasi-isomorphism", qm.quasi_iso.quasi_iso,
            "degree " + std::to_string(qm.quasi_iso.failing_degree.value_or(-1)));
    out.document = serialize(run.map->name + "_quotient", qm.quotient.algebra);
    return out;
}

Outcome cmd_verify(const Options& o) {
    Outcome out;
    CdgaDocument doc = load(o.input);
    PrettyRun run = run_pretty(doc, o);
    out.report = verify_pretty_model(run.model);
    out.report.facts.entries.insert(out.report.facts.entries.begin(), {"map", run.map->name});
    if (run.model.surjective) {
        QuotientModel qm = surjective_quotient_model(run.model);
        out.report.check("domain -> P/I is a quasi-isomorphism", qm.quasi_iso.quasi_iso,
                         "degree " + std::to_string(qm.quasi_iso.failing_degree.value_or(-1)));
    }
    return out;
}

Outcome cmd_boundary_double(const Options& o) {
    Outcome out;
    Report& r = out.report;
    if (!o.dimension) throw InputError("boundary-double needs --dimension n");
    CdgaDocument doc = load(o.input);
    const AlgebraEntry& e = doc.algebra(o.name);
    std::optional<RatMatrix> psi;
    if (!doc.modmaps.empty()) psi = modmap_of(doc, "").map.matrix();
    BoundaryDouble b = boundary_double(e.table, *o.dimension, psi);
    r.facts.add("algebra", e.name);
    r.facts.add("dimension", std::to_string(*o.dimension));
    r.facts.add("Q vanishes from degree n/2 - 1", b.half_vanishing ? "yes" : "no");
    Cohomology h(b.table.complex());
    r.table(cohomology_table("double", h));
    r.facts.add("dims", dims_string(dims_list(h)));
    std::string why = b.pd.reason;
    if (b.pd.failing_degree) why += " (degree " + std::to_string(*b.pd.failing_degree) + ")";
    r.check("Poincare duality in dimension " + std::to_string(*o.dimension - 1), b.pd.certificate.has_value(), why);
    out.document = serialize(e.name + "_double", b.table, b.pd.certificate ? std::optional(b.pd.certificate->orientation) : std::nullopt);
    return out;
}

Outcome cmd_disk_bundle(const Options& o) {
    Outcome out;
    if (o.base.empty()) throw InputError("disk-bundle needs --base");
    if (!o.rank) throw InputError("disk-bundle needs --rank");
    CdgaDocument doc = load(o.base);
    const AlgebraEntry& e = doc.algebra(o.name);
    Vec euler = parse_combination(e.table, o.euler.empty() ? "0" : o.euler);
    Orientation eps = orientation_of(e, o.dimension);
    BundleInput in = make_bundle_input(e.table, eps, euler, *o.rank);
    DiskBundle db = disk_bundle_pretty_model(in);
    Report& r = out.report;
    if (o.verify) {
        r = verify_bundle_equivalence(in, db.model);
        Report v = verify_pretty_model(db.model);
        for (const auto& f : v.findings) r.check(f.name, f.passed, f.witness, f.detail);
    } else {
        r.facts.add("base dimension", std::to_string(in.base_dimension()));
        r.facts.add("rank", std::to_string(in.rank));
        r.facts.add("euler", e.table.format(euler));
        r.table(cohomology_table("domain", db.model.domain.complex()));
        r.table(cohomology_table("codomain", db.model.codomain.complex()));
    }
    r.facts.add("base", e.name);
    r.facts.add("lambda", db.lambda.str());
    CdgaDocument d = pretty_document(db.model, e.name + "_disk");
    d.algebras.insert(d.algebras.begin(), {e.name + "_disk", db.p, in.dimension(), db.orientation});
    out.document = serialize(d);
    return out;
}

nlohmann::ordered_json to_json(const Outcome& out) {
    const Report& r = out.report;
    nlohmann::ordered_json j;
    j["command"] = r.command;
    j["status"] = to_string(r.status);
    j["exit_code"] = exit_code(r.status);
    if (!r.error.empty()) j["error"] = r.error;
    nlohmann::ordered_json facts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.facts.entries) facts[k] = v;
    j["facts"] = facts;
    nlohmann::ordered_json tables = nlohmann::ordered_json::array();
    for (const auto& t : r.tables) {
        nlohmann::ordered_json tj;
        tj["name"] = t.name;
        nlohmann::ordered_json dims = nlohmann::ordered_json::object();
        for (const auto& [p, d] : t.dims) dims[std::to_string(p)] = d;
        tj["dims"] = dims;
        tj["undetermined_degrees"] = t.upper_bounded;
        tables.push_back(tj);
    }
    j["tables"] = tables;
    nlohmann::ordered_json findings = nlohmann::ordered_json::array();
    for (const auto& f : r.findings) {
        nlohmann::ordered_json fj;
        fj["name"] = f.name;
        fj["passed"] = f.passed;
        if (!f.passed) fj["witness"] = f.witness;
        if (!f.detail.empty()) fj["detail"] = f.detail;
        findings.push_back(fj);
    }
    j["findings"] = findings;
    if (!out.document.empty()) j["document"] = out.document;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pretty models of Poincare duality pairs over the rationals"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--output", o.output, "report format")->check(CLI::IsMember({"table", "json"}));

    auto positional = [&](CLI::App* s) { s->add_option("input", o.input, "document path or corpus name"); };
    auto named = [&](CLI::App* s) { s->add_option("--name", o.name, "block to use (default: first)"); };

    std::vector<std::pair<CLI::App*, Outcome (*)(const Options&)>> commands;
    auto add = [&](const std::string& n, const std::string& desc, Outcome (*f)(const Options&)) {
        CLI::App* s = app.add_subcommand(n, desc);
        s->add_option("--output", o.output, "report format")->check(CLI::IsMember({"table", "json"}));
        commands.emplace_back(s, f);
        return s;
    };

    auto* s = add("validate", "check every block of a document", cmd_validate);
    positional(s);
    s = add("cohomology", "cohomology dimensions", cmd_cohomology);
    positional(s);
    named(s);
    s->add_option("--truncation", o.truncation, "truncate above N first");
    s = add("check-pd", "Poincare duality certificate", cmd_check_pd);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");
    s = add("orphans", "orphan ideal", cmd_orphans);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");
    s = add("pd-quotient", "quotient by the orphan ideal", cmd_pd_quotient);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");
    s = add("kill-orphans", "kill the orphans of degree p", cmd_kill_orphans);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");
    s->add_option("--degree", o.degree, "orphan degree p")->required();
    s = add("balanced", "balance test for a module map into the algebra", cmd_balanced);
    positional(s);
    named(s);
    s->add_option("--map", o.map_doc, "document holding the module map");
    s = add("cone", "mapping cone of a module map", cmd_cone);
    positional(s);
    named(s);
    s->add_option("--map", o.map_doc, "document holding the module map");
    s = add("pretty-model", "pretty model of a CDGA map P -> Q", cmd_pretty_model);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");
    s = add("quotient-model", "quotient model P/I of a surjective map", cmd_quotient_model);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");
    s = add("boundary-double", "Q (+) ss^{-n}#Q", cmd_boundary_double);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "dimension n of the shifted dual")->required();
    s = add("disk-bundle", "disk-bundle pretty model", cmd_disk_bundle);
    named(s);
    s->add_option("--base", o.base, "base document")->required();
    s->add_option("--euler", o.euler, "Euler class as a label combination");
    s->add_option("--rank", o.rank, "even rank")->required();
    s->add_option("--dimension", o.dimension, "expected dimension of the base orientation");
    s->add_flag("--verify", o.verify, "run the equivalence checks");
    s = add("verify", "checks on a pretty model", cmd_verify);
    positional(s);
    named(s);
    s->add_option("--dimension", o.dimension, "expected orientation dimension n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Outcome out;
    std::string command;
    for (const auto& [sub, f] : commands) {
        if (!sub->parsed()) continue;
        command = sub->get_name();
        try {
            out = f(o);
        } catch (const InvariantError& e) {
            out = {};
            out.report.status = Status::invariant_failure;
            out.report.error = e.what();
        } catch (const std::exception& e) {
            out = {};
            out.report.status = Status::input_error;
            out.report.error = e.what();
        }
    }
    out.report.command = command;

    if (o.output == "json") {
        std::cout << to_json(out).dump(2) << "\n";
    } else {
        std::cout << render_table(out.report);
        if (!out.document.empty()) std::cout << "\n" << out.document;
    }
    return exit_code(out.report.status);
}
