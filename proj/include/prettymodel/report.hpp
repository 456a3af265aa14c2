#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prettymodel/errors.hpp"
#include "prettymodel/graded.hpp"

namespace pm {

enum class Status { ok, invariant_failure, input_error };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::ok: return "ok";
    case Status::invariant_failure: return "invariant-failure";
    case Status::input_error: return "input-error";
    }
    return "unknown";
}

inline int exit_code(Status s) {
    switch (s) {
    case Status::ok: return 0;
    case Status::invariant_failure: return 1;
    case Status::input_error: return 2;
    }
    return 2;
}

struct Finding {
    std::string name;
    bool passed = true;
    std::string witness;
    std::string detail;
};

struct CohomologyTable {
    std::string name;
    std::map<int, std::size_t> dims;
    std::vector<int> upper_bounded;
};

inline CohomologyTable cohomology_table(const std::string& name, const Cohomology& h) {
    CohomologyTable t{name, h.dims(), {}};
    t.upper_bounded.assign(h.upper_bounded().begin(), h.upper_bounded().end());
    return t;
}

inline CohomologyTable cohomology_table(const std::string& name, const CochainComplex& c) {
    return cohomology_table(name, Cohomology(c));
}

/// Dimensions from degree 0 up to the top determined degree, as a list.
inline std::vector<std::size_t> dims_list(const std::map<int, std::size_t>& dims) {
    std::vector<std::size_t> out;
    if (dims.empty()) return out;
    int top = dims.rbegin()->first;
    while (top > 0 && dims.at(top) == 0) --top;
    for (int p = 0; p <= top; ++p) {
        auto it = dims.find(p);
        out.push_back(it == dims.end() ? 0 : it->second);
    }
    return out;
}

inline std::vector<std::size_t> dims_list(const Cohomology& h) { return dims_list(h.dims()); }

struct Facts {
    std::vector<std::pair<std::string, std::string>> entries;
    void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
};

struct Report {
    std::string command;
    Status status = Status::ok;
    std::vector<Finding> findings;
    std::vector<CohomologyTable> tables;
    Facts facts;
    std::string error;

    /// Records a check; a failing check must say where it failed.
    void check(const std::string& name, bool passed, const std::string& witness = "", const std::string& detail = "") {
        if (!passed && witness.empty()) throw InvariantError("failed check '" + name + "' recorded without a witness");
        findings.push_back({name, passed, passed ? "" : witness, detail});
        if (!passed && status == Status::ok) status = Status::invariant_failure;
    }

    void table(CohomologyTable t) { tables.push_back(std::move(t)); }

    bool all_passed() const {
        return std::all_of(findings.begin(), findings.end(), [](const Finding& f) { return f.passed; });
    }

    const Finding* find(const std::string& name) const {
        for (const auto& f : findings)
            if (f.name == name) return &f;
        return nullptr;
    }
};

inline std::string render_table(const Report& r) {
    std::ostringstream os;
    os << "command: " << r.command << "\n";
    os << "status:  " << to_string(r.status) << "\n";
    if (!r.error.empty()) os << "error:   " << r.error << "\n";
    for (const auto& [k, v] : r.facts.entries) os << k << ": " << v << "\n";
    for (const auto& t : r.tables) {
        os << "\ncohomology of " << t.name << "\n";
        std::string deg_row = "  degree |", dim_row = "  dim    |";
        for (const auto& [p, d] : t.dims) {
            std::string ps = std::to_string(p), ds = std::to_string(d);
            std::size_t w = std::max(ps.size(), ds.size());
            deg_row += " " + std::string(w - ps.size(), ' ') + ps;
            dim_row += " " + std::string(w - ds.size(), ' ') + ds;
        }
        os << deg_row << "\n" << dim_row << "\n";
        if (!t.upper_bounded.empty()) {
            os << "  not determined in degrees:";
            for (int p : t.upper_bounded) os << " " << p;
            os << "\n";
        }
    }
    if (!r.findings.empty()) os << "\nchecks\n";
    for (const auto& f : r.findings) {
        os << "  [" << (f.passed ? "pass" : "FAIL") << "] " << f.name;
        if (!f.detail.empty()) os << "  (" << f.detail << ")";
        if (!f.passed) os << "  witness: " << f.witness;
        os << "\n";
    }
    return os.str();
}

} // namespace pm
