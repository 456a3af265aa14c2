#pragma once

// Line-oriented text format for algebras, modules and maps.
//
//   cdga-format 1
//   % comment
//   algebra cp2
//     dimension 4
//     basis 0 1
//     basis 2 a
//     basis 4 a2
//     unit 1
//     mult a a 1 a2          x.y contains c*z
//     diff x 1 y             dx contains c*y
//     orientation a2 1
//   end
//   module M over cp2
//     basis 2 e
//     act a e 1 f
//     diff e 1 f
//   end
//   map phi cp2 point        CDGA morphism, unit -> unit unless given
//     send a 0 1
//   end
//   modmap f M cp2           module map; an algebra name stands for the self module
//     send e 1 a
//   end
//
// Products not listed are filled from the opposite order with the Koszul
// sign, and products with the unit default to the identity.

#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prettymodel/cdga.hpp"
#include "prettymodel/dgmodule.hpp"
#include "prettymodel/errors.hpp"
#include "prettymodel/pdual.hpp"

namespace pm {

inline constexpr const char* kFormatHeader = "cdga-format 1";

struct AlgebraEntry {
    std::string name;
    CdgaTable table;
    std::optional<int> dimension;
    std::optional<Orientation> orientation;
};

struct ModuleEntry {
    std::string name;
    std::string over;
    DgModule module;
};

struct MapEntry {
    std::string name;
    std::string source;
    std::string target;
    CdgaMorphism morphism;
};

struct ModMapEntry {
    std::string name;
    std::string source;
    std::string target;
    DgModuleMap map;
};

struct CdgaDocument {
    std::vector<AlgebraEntry> algebras;
    std::vector<ModuleEntry> modules;
    std::vector<MapEntry> maps;
    std::vector<ModMapEntry> modmaps;

    const AlgebraEntry* find_algebra(const std::string& name) const {
        for (const auto& a : algebras)
            if (a.name == name) return &a;
        return nullptr;
    }
    const ModuleEntry* find_module(const std::string& name) const {
        for (const auto& m : modules)
            if (m.name == name) return &m;
        return nullptr;
    }
    const MapEntry* find_map(const std::string& name) const {
        for (const auto& m : maps)
            if (m.name == name) return &m;
        return nullptr;
    }
    const ModMapEntry* find_modmap(const std::string& name) const {
        for (const auto& m : modmaps)
            if (m.name == name) return &m;
        return nullptr;
    }

    const AlgebraEntry& algebra(const std::string& name = "") const {
        if (name.empty()) {
            if (algebras.empty()) throw InputError("document contains no algebra");
            return algebras.front();
        }
        if (auto* a = find_algebra(name)) return *a;
        throw InputError("no algebra named '" + name + "'");
    }
};

inline Rational parse_rational(const std::string& s) {
    static const std::regex re(R"(^[+-]?\d+(/\d+)?$)");
    if (!std::regex_match(s, re)) throw InputError("'" + s + "' is not a rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos && std::stoll(s.substr(slash + 1)) == 0 &&
        s.find_first_not_of('0', slash + 1) == std::string::npos)
        throw InputError("'" + s + "' has zero denominator");
    std::string t = s[0] == '+' ? s.substr(1) : s;
    Rational q(t);
    return q;
}

inline std::string format_rational(const Rational& q) { return q.str(); }

namespace detail {

struct Token {
    std::string text;
    int column;
};

struct Line {
    int number;
    std::vector<Token> tokens;
};

inline std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        auto pct = raw.find('%');
        if (pct != std::string::npos) raw = raw.substr(0, pct);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            if (i >= raw.size()) break;
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
            line.tokens.push_back({raw.substr(i, j - i), static_cast<int>(i) + 1});
            i = j;
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

class Parser {
public:
    explicit Parser(const std::string& text) : lines_(tokenize(text)) {}

    CdgaDocument run() {
        if (lines_.empty()) throw ParseError(1, 1, "empty document, expected header '" + std::string(kFormatHeader) + "'");
        const Line& h = lines_[0];
        if (h.tokens.size() != 2 || h.tokens[0].text != "cdga-format")
            throw ParseError(h.number, 1, "expected header '" + std::string(kFormatHeader) + "'");
        if (h.tokens[1].text != "1")
            throw ParseError(h.number, h.tokens[1].column, "unsupported format version '" + h.tokens[1].text + "'");
        pos_ = 1;
        while (pos_ < lines_.size()) {
            const Line& l = lines_[pos_];
            const std::string& kw = l.tokens[0].text;
            if (kw == "algebra") parse_algebra();
            else if (kw == "module") parse_module();
            else if (kw == "map") parse_map();
            else if (kw == "modmap") parse_modmap();
            else throw ParseError(l.number, l.tokens[0].column, "unknown block '" + kw + "'");
        }
        return std::move(doc_);
    }

private:
    [[noreturn]] void fail(const Line& l, std::size_t tok, const std::string& msg) const {
        int col = tok < l.tokens.size() ? l.tokens[tok].column : (l.tokens.empty() ? 1 : l.tokens.back().column);
        throw ParseError(l.number, col, msg);
    }

    void arity(const Line& l, std::size_t n) const {
        if (l.tokens.size() != n)
            fail(l, std::min(l.tokens.size(), n), "'" + l.tokens[0].text + "' expects " + std::to_string(n - 1) +
                                                       " arguments, got " + std::to_string(l.tokens.size() - 1));
    }

    int integer(const Line& l, std::size_t tok) const {
        static const std::regex re(R"(^[+-]?\d+$)");
        const std::string& s = l.tokens[tok].text;
        if (!std::regex_match(s, re)) fail(l, tok, "'" + s + "' is not an integer");
        return std::stoi(s);
    }

    Rational rational(const Line& l, std::size_t tok) const {
        try {
            return parse_rational(l.tokens[tok].text);
        } catch (const InputError& e) {
            fail(l, tok, e.what());
        }
    }

    void check_name(const Line& l, std::size_t tok) {
        const std::string& n = l.tokens[tok].text;
        if (names_.count(n)) fail(l, tok, "duplicate block name '" + n + "'");
        names_.insert(n);
    }

    /// Collects block lines up to the matching 'end'.
    std::pair<const Line*, std::vector<const Line*>> block() {
        const Line* head = &lines_[pos_++];
        std::vector<const Line*> body;
        while (pos_ < lines_.size()) {
            const Line& l = lines_[pos_++];
            if (l.tokens[0].text == "end") {
                if (l.tokens.size() != 1) fail(l, 1, "unexpected text after 'end'");
                end_line_ = &l;
                return {head, body};
            }
            body.push_back(&l);
        }
        fail(*head, 0, "block '" + head->tokens[0].text + "' is not closed by 'end'");
    }

    void parse_algebra() {
        auto [head, body] = block();
        arity(*head, 2);
        check_name(*head, 1);
        AlgebraEntry entry;
        entry.name = head->tokens[1].text;
        std::vector<BasisElement> basis;
        std::map<std::string, std::pair<int, const Line*>> labels;
        std::optional<int> trunc;
        std::optional<std::string> unit;
        const Line* unit_line = nullptr;
        std::vector<const Line*> mults, diffs, orients;
        for (const Line* l : body) {
            const std::string& kw = l->tokens[0].text;
            if (kw == "dimension") {
                arity(*l, 2);
                entry.dimension = integer(*l, 1);
            } else if (kw == "truncation") {
                arity(*l, 2);
                trunc = integer(*l, 1);
            } else if (kw == "basis") {
                if (l->tokens.size() < 3) fail(*l, l->tokens.size(), "'basis' expects a degree and labels");
                int deg = integer(*l, 1);
                if (deg < 0) fail(*l, 1, "algebra degrees must be non-negative");
                for (std::size_t t = 2; t < l->tokens.size(); ++t) {
                    const std::string& lab = l->tokens[t].text;
                    if (labels.count(lab)) fail(*l, t, "duplicate label '" + lab + "'");
                    labels[lab] = {deg, l};
                    basis.push_back({lab, deg});
                }
            } else if (kw == "unit") {
                arity(*l, 2);
                unit = l->tokens[1].text;
                unit_line = l;
            } else if (kw == "mult") {
                mults.push_back(l);
            } else if (kw == "diff") {
                diffs.push_back(l);
            } else if (kw == "orientation") {
                orients.push_back(l);
            } else {
                fail(*l, 0, "unknown algebra entry '" + kw + "'");
            }
        }
        auto degree_of = [&](const Line& l, std::size_t tok) {
            auto it = labels.find(l.tokens[tok].text);
            if (it == labels.end()) fail(l, tok, "unknown label '" + l.tokens[tok].text + "'");
            return it->second.first;
        };
        if (!unit) fail(*end_line_, 0, "unit required");
        degree_of(*unit_line, 1);
        if (trunc)
            for (const auto& b : basis)
                if (b.degree > *trunc) fail(*labels[b.label].second, 0, "label '" + b.label + "' lies above the truncation bound");
        CdgaBuilder builder;
        builder.truncation(trunc);
        for (const auto& b : basis) builder.basis(b.label, b.degree);
        builder.unit(*unit);
        for (const Line* l : mults) {
            arity(*l, 5);
            int dx = degree_of(*l, 1), dy = degree_of(*l, 2), dz = degree_of(*l, 4);
            Rational c = rational(*l, 3);
            if (dz != dx + dy)
                fail(*l, 4, "mult entry '" + l->tokens[1].text + " " + l->tokens[2].text + " -> " + l->tokens[4].text +
                                "' has degree " + std::to_string(dz) + ", expected " + std::to_string(dx + dy));
            builder.mult(l->tokens[1].text, l->tokens[2].text, c, l->tokens[4].text);
        }
        for (const Line* l : diffs) {
            arity(*l, 4);
            int dx = degree_of(*l, 1), dy = degree_of(*l, 3);
            Rational c = rational(*l, 2);
            if (dy != dx + 1)
                fail(*l, 3, "diff entry '" + l->tokens[1].text + " -> " + l->tokens[3].text + "' has degree " +
                                std::to_string(dy) + ", expected " + std::to_string(dx + 1));
            builder.diff(l->tokens[1].text, c, l->tokens[3].text);
        }
        try {
            entry.table = builder.build();
        } catch (const InputError& e) {
            fail(*head, 1, e.what());
        }
        if (!orients.empty()) {
            std::optional<int> n = entry.dimension;
            std::vector<std::pair<std::string, Rational>> values;
            for (const Line* l : orients) {
                arity(*l, 3);
                int d = degree_of(*l, 1);
                if (n && d != *n)
                    fail(*l, 1, "orientation entry '" + l->tokens[1].text + "' has degree " + std::to_string(d) +
                                    ", expected " + std::to_string(*n));
                n = d;
                values.emplace_back(l->tokens[1].text, rational(*l, 2));
            }
            entry.dimension = n;
            entry.orientation = make_orientation(entry.table, *n, values);
        }
        doc_.algebras.push_back(std::move(entry));
    }

    const CdgaTable& algebra_named(const Line& l, std::size_t tok) const {
        if (auto* a = doc_.find_algebra(l.tokens[tok].text)) return a->table;
        fail(l, tok, "unknown algebra '" + l.tokens[tok].text + "'");
    }

    void parse_module() {
        auto [head, body] = block();
        arity(*head, 4);
        if (head->tokens[2].text != "over") fail(*head, 2, "expected 'over'");
        check_name(*head, 1);
        const CdgaTable& a = algebra_named(*head, 3);
        std::vector<BasisElement> basis;
        std::map<std::string, int> labels;
        std::vector<const Line*> acts, diffs;
        for (const Line* l : body) {
            const std::string& kw = l->tokens[0].text;
            if (kw == "basis") {
                if (l->tokens.size() < 3) fail(*l, l->tokens.size(), "'basis' expects a degree and labels");
                int deg = integer(*l, 1);
                for (std::size_t t = 2; t < l->tokens.size(); ++t) {
                    const std::string& lab = l->tokens[t].text;
                    if (labels.count(lab)) fail(*l, t, "duplicate label '" + lab + "'");
                    labels[lab] = deg;
                    basis.push_back({lab, deg});
                }
            } else if (kw == "act") {
                acts.push_back(l);
            } else if (kw == "diff") {
                diffs.push_back(l);
            } else {
                fail(*l, 0, "unknown module entry '" + kw + "'");
            }
        }
        GradedSpace space(basis);
        const std::size_t n = space.dim();
        auto mod_index = [&](const Line& l, std::size_t tok) {
            auto i = space.find(l.tokens[tok].text);
            if (!i) fail(l, tok, "unknown label '" + l.tokens[tok].text + "'");
            return *i;
        };
        auto alg_index = [&](const Line& l, std::size_t tok) {
            auto i = a.space().find(l.tokens[tok].text);
            if (!i) fail(l, tok, "unknown label '" + l.tokens[tok].text + "'");
            return *i;
        };
        std::vector<SparseVec> action(a.dim() * n);
        std::vector<bool> unit_given(n, false);
        for (const Line* l : acts) {
            arity(*l, 5);
            std::size_t x = alg_index(*l, 1), m = mod_index(*l, 2), t = mod_index(*l, 4);
            if (space.degree(t) != a.degree(x) + space.degree(m))
                fail(*l, 4, "act entry '" + l->tokens[1].text + " " + l->tokens[2].text + " -> " + l->tokens[4].text +
                                "' has the wrong degree");
            action[x * n + m].emplace_back(t, rational(*l, 3));
            if (x == a.unit()) unit_given[m] = true;
        }
        for (std::size_t m = 0; m < n; ++m)
            if (!unit_given[m]) action[a.unit() * n + m].emplace_back(m, Rational(1));
        RatMatrix d(n, n);
        for (const Line* l : diffs) {
            arity(*l, 4);
            std::size_t x = mod_index(*l, 1), y = mod_index(*l, 3);
            if (space.degree(y) != space.degree(x) + 1)
                fail(*l, 3, "diff entry '" + l->tokens[1].text + " -> " + l->tokens[3].text + "' has the wrong degree");
            d(y, x) += rational(*l, 2);
        }
        doc_.modules.push_back({head->tokens[1].text, head->tokens[3].text, DgModule(a, space, std::move(d), std::move(action))});
    }

    template <class Src, class Tgt>
    RatMatrix sends(const std::vector<const Line*>& body, const Src& src, const Tgt& tgt,
                    std::optional<std::pair<std::size_t, std::size_t>> unit_default) {
        RatMatrix m(tgt.dim(), src.dim());
        bool unit_given = false;
        for (const Line* l : body) {
            if (l->tokens[0].text != "send") fail(*l, 0, "unknown map entry '" + l->tokens[0].text + "'");
            arity(*l, 4);
            auto x = src.find(l->tokens[1].text);
            if (!x) fail(*l, 1, "unknown label '" + l->tokens[1].text + "'");
            auto y = tgt.find(l->tokens[3].text);
            if (!y) fail(*l, 3, "unknown label '" + l->tokens[3].text + "'");
            if (src.degree(*x) != tgt.degree(*y))
                fail(*l, 3, "send entry '" + l->tokens[1].text + " -> " + l->tokens[3].text + "' changes degree");
            m(*y, *x) += rational(*l, 2);
            if (unit_default && *x == unit_default->first) unit_given = true;
        }
        if (unit_default && !unit_given) m(unit_default->second, unit_default->first) = 1;
        return m;
    }

    void parse_map() {
        auto [head, body] = block();
        arity(*head, 4);
        check_name(*head, 1);
        const CdgaTable& s = algebra_named(*head, 2);
        const CdgaTable& t = algebra_named(*head, 3);
        RatMatrix m = sends(body, s.space(), t.space(), std::make_pair(s.unit(), t.unit()));
        doc_.maps.push_back({head->tokens[1].text, head->tokens[2].text, head->tokens[3].text, CdgaMorphism(s, t, std::move(m))});
    }

    DgModule module_named(const Line& l, std::size_t tok) const {
        if (auto* m = doc_.find_module(l.tokens[tok].text)) return m->module;
        if (auto* a = doc_.find_algebra(l.tokens[tok].text)) return self_module(a->table);
        fail(l, tok, "unknown module '" + l.tokens[tok].text + "'");
    }

    void parse_modmap() {
        auto [head, body] = block();
        arity(*head, 4);
        check_name(*head, 1);
        DgModule s = module_named(*head, 2);
        DgModule t = module_named(*head, 3);
        if (!(s.algebra().space() == t.algebra().space())) fail(*head, 3, "modules are over different algebras");
        RatMatrix m = sends(body, s.space(), t.space(), std::nullopt);
        doc_.modmaps.push_back({head->tokens[1].text, head->tokens[2].text, head->tokens[3].text, DgModuleMap(s, t, std::move(m))});
    }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
    const Line* end_line_ = nullptr;
    std::set<std::string> names_;
    CdgaDocument doc_;
};

inline void emit_basis(std::ostringstream& os, const GradedSpace& sp) {
    for (int p : sp.degrees()) {
        os << "  basis " << p;
        auto [b, e] = sp.range(p);
        for (std::size_t i = b; i < e; ++i) os << " " << sp.label(i);
        os << "\n";
    }
}

inline void emit_sends(std::ostringstream& os, const GradedSpace& src, const GradedSpace& tgt, const RatMatrix& m,
                       std::optional<std::pair<std::size_t, std::size_t>> unit_default) {
    for (std::size_t x = 0; x < src.dim(); ++x) {
        bool is_unit = unit_default && x == unit_default->first;
        if (is_unit) {
            Vec col = m.column(x);
            if (col == unit_vec(tgt.dim(), unit_default->second)) continue;
            if (is_zero(col)) {
                // an explicit zero entry suppresses the unit default
                os << "  send " << src.label(x) << " 0 " << tgt.label(unit_default->second) << "\n";
                continue;
            }
        }
        for (std::size_t y = 0; y < tgt.dim(); ++y)
            if (m(y, x) != 0) os << "  send " << src.label(x) << " " << format_rational(m(y, x)) << " " << tgt.label(y) << "\n";
    }
}

} // namespace detail

inline CdgaDocument parse(const std::string& text) { return detail::Parser(text).run(); }

/// Canonical text: basis grouped by degree, then only the product entries the
/// defaults would not reproduce, then differential and orientation entries.
inline std::string serialize_algebra(const AlgebraEntry& e) {
    const CdgaTable& a = e.table;
    const auto& sp = a.space();
    const std::size_t n = a.dim();
    std::ostringstream os;
    os << "algebra " << e.name << "\n";
    if (e.dimension) os << "  dimension " << *e.dimension << "\n";
    if (a.truncation()) os << "  truncation " << *a.truncation() << "\n";
    detail::emit_basis(os, sp);
    os << "  unit " << a.label(a.unit()) << "\n";
    auto default_of = [&](std::size_t i, std::size_t j) {
        if (i == a.unit()) return a.basis_vector(j);
        if (j == a.unit()) return a.basis_vector(i);
        return Vec(n);
    };
    auto emit = [&](std::size_t i, std::size_t j, const Vec& v) {
        bool any = false;
        for (std::size_t k = 0; k < n; ++k)
            if (v[k] != 0) {
                os << "  mult " << a.label(i) << " " << a.label(j) << " " << format_rational(v[k]) << " " << a.label(k) << "\n";
                any = true;
            }
        if (any) return;
        // explicit zero: needs some label of the right degree
        int deg = a.degree(i) + a.degree(j);
        if (sp.dim(deg) > 0)
            os << "  mult " << a.label(i) << " " << a.label(j) << " 0 " << a.label(sp.range(deg).first) << "\n";
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Vec ij = a.basis_product(i, j), ji = a.basis_product(j, i);
            int s = koszul(static_cast<long long>(a.degree(i)) * a.degree(j));
            bool emit_ij = ij != default_of(i, j);
            bool emit_ji = false;
            if (j != i) {
                Vec fill = emit_ij ? scaled(ij, s) : default_of(j, i);
                emit_ji = ji != fill;
            }
            if (emit_ji) emit_ij = true;
            if (emit_ij) emit(i, j, ij);
            if (emit_ji) emit(j, i, ji);
        }
    const RatMatrix& d = a.differential().matrix();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (d(y, x) != 0) os << "  diff " << a.label(x) << " " << format_rational(d(y, x)) << " " << a.label(y) << "\n";
    if (e.orientation)
        for (std::size_t i = 0; i < n; ++i)
            if (e.orientation->functional[i] != 0)
                os << "  orientation " << a.label(i) << " " << format_rational(e.orientation->functional[i]) << "\n";
    os << "end\n";
    return os.str();
}

inline std::string serialize(const CdgaDocument& doc) {
    std::ostringstream os;
    os << kFormatHeader << "\n";
    for (const auto& a : doc.algebras) os << "\n" << serialize_algebra(a);
    for (const auto& m : doc.modules) {
        const DgModule& mod = m.module;
        const CdgaTable& a = mod.algebra();
        const std::size_t n = mod.dim();
        os << "\nmodule " << m.name << " over " << m.over << "\n";
        detail::emit_basis(os, mod.space());
        for (std::size_t x = 0; x < a.dim(); ++x)
            for (std::size_t j = 0; j < n; ++j) {
                Vec v = to_dense(mod.act(x, j), n);
                if (x == a.unit()) {
                    if (v == mod.basis_vector(j)) continue;
                    if (is_zero(v)) {
                        os << "  act " << a.label(x) << " " << mod.space().label(j) << " 0 " << mod.space().label(j) << "\n";
                        continue;
                    }
                }
                for (std::size_t k = 0; k < n; ++k)
                    if (v[k] != 0)
                        os << "  act " << a.label(x) << " " << mod.space().label(j) << " " << format_rational(v[k]) << " "
                           << mod.space().label(k) << "\n";
            }
        const RatMatrix& d = mod.differential().matrix();
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (d(y, x) != 0)
                    os << "  diff " << mod.space().label(x) << " " << format_rational(d(y, x)) << " " << mod.space().label(y) << "\n";
        os << "end\n";
    }
    for (const auto& m : doc.maps) {
        const auto& f = m.morphism;
        os << "\nmap " << m.name << " " << m.source << " " << m.target << "\n";
        detail::emit_sends(os, f.source().space(), f.target().space(), f.matrix(),
                           std::make_pair(f.source().unit(), f.target().unit()));
        os << "end\n";
    }
    for (const auto& m : doc.modmaps) {
        os << "\nmodmap " << m.name << " " << m.source << " " << m.target << "\n";
        detail::emit_sends(os, m.map.source().space(), m.map.target().space(), m.map.matrix(), std::nullopt);
        os << "end\n";
    }
    return os.str();
}

/// A single-algebra document.
inline std::string serialize(const std::string& name, const CdgaTable& a, std::optional<Orientation> eps = std::nullopt) {
    CdgaDocument doc;
    AlgebraEntry e{name, a, std::nullopt, eps};
    if (eps) e.dimension = eps->dimension;
    doc.algebras.push_back(std::move(e));
    return serialize(doc);
}

/// Parses a rational combination of labels such as "a", "2*a", "a + 1/2*b", "-a".
inline Vec parse_combination(const CdgaTable& a, const std::string& text) {
    Vec v(a.dim());
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw InputError("empty combination");
    if (s == "0") return v;
    std::size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
        std::string term = s.substr(i, j - i);
        if (term.empty()) throw InputError("malformed combination '" + text + "'");
        Rational c = 1;
        std::string label = term;
        auto star = term.find('*');
        if (star != std::string::npos) {
            c = parse_rational(term.substr(0, star));
            label = term.substr(star + 1);
        }
        auto idx = a.space().find(label);
        if (!idx) throw InputError("unknown label '" + label + "' in combination");
        v[*idx] += sign * c;
        i = j;
    }
    return v;
}

} // namespace pm
