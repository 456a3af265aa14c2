#pragma once

// Shriek maps, pretty models phi (+) id : P (+)_{phi!} ss^{-n}#Q -> Q (+)_{phi phi!} ss^{-n}#Q,
// the quotient model P/I for surjective phi, and boundary doubles.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prettymodel/cdga.hpp"
#include "prettymodel/dgmodule.hpp"
#include "prettymodel/errors.hpp"
#include "prettymodel/pdual.hpp"
#include "prettymodel/report.hpp"

namespace pm {

/// Matrix of theta_P^{-1} o s^{-n}#phi : s^{-n}#Q -> P.
inline RatMatrix shriek_matrix(const CdgaMorphism& phi, const PdCertificate& cert) {
    GradedMap dual = shifted_dual_map(phi.map(), cert.orientation.dimension);
    return cert.theta_inverse * dual.matrix();
}

/// phi^! as a map of P-modules, where s^{-n}#Q is a P-module through phi.
/// Checks that it is a module map and that it is an isomorphism on H^n.
inline DgModuleMap shriek(const CdgaMorphism& phi, const PdCertificate& cert) {
    const int n = cert.orientation.dimension;
    if (!phi.target().complete()) throw InputError("shriek needs a complete target algebra");
    if (!(cert.theta.source().space() == detail::as_complete(phi.source()).space()))
        throw InputError("certificate does not belong to the morphism's source");
    CdgaMorphism phi_c(detail::as_complete(phi.source()), phi.target(), phi.matrix());
    DgModule source = restrict_scalars(phi_c, shifted_dual_module(phi.target(), n));
    DgModuleMap f(source, self_module(phi_c.source()), shriek_matrix(phi_c, cert));
    auto rep = f.validate();
    if (!rep) throw InvariantError("shriek map is not a module map: " + rep.summary());
    Cohomology hs(source.complex()), ht(f.target().complex());
    RatMatrix hn = induced_map(hs, ht, f.map(), n);
    if (hn.rows() != 1 || hn.cols() != 1 || hn(0, 0) == 0)
        throw InvariantError("shriek map is not an isomorphism on H^" + std::to_string(n));
    return f;
}

struct PrettyModel {
    int dimension = 0;
    CdgaMorphism phi;
    PdCertificate certificate;
    DgModuleMap shriek;     // s^{-n}#Q -> P over P
    DgModuleMap phi_shriek; // s^{-n}#Q -> Q over Q
    CdgaTable domain;       // P (+)_{phi!} ss^{-n}#Q
    CdgaTable codomain;     // Q (+)_{phi phi!} ss^{-n}#Q
    CdgaMorphism morphism;  // phi (+) id
    bool surjective = false;
    BalancedResult balance;
};

/// Whether phi is onto in every degree; the first degree where it is not.
inline std::optional<int> first_non_surjective_degree(const CdgaMorphism& phi) {
    for (int p : phi.target().space().degrees()) {
        RatMatrix b = phi.map().block(p);
        if (rank(b) != phi.target().dim(p)) return p;
    }
    return std::nullopt;
}

/// Builds the pretty model from phi, its certificate and a given shriek
/// matrix. build_pretty_model passes theta_P^{-1} o s^{-n}#phi; tests use this
/// entry point to feed perturbed maps.
inline PrettyModel assemble_pretty_model(const CdgaMorphism& phi_in, const PdCertificate& cert,
                                         const RatMatrix& shriek_m) {
    const int n = cert.orientation.dimension;
    const CdgaTable& q = phi_in.target();
    if (!q.space().empty() && q.top_degree() >= n)
        throw PreconditionError("Q must vanish in degrees >= n (found degree " + std::to_string(q.top_degree()) +
                                ")");
    CdgaMorphism phi(detail::as_complete(phi_in.source()), q, phi_in.matrix());
    const CdgaTable& p = phi.source();
    DgModule dual_q = shifted_dual_module(q, n);
    DgModuleMap sh(restrict_scalars(phi, dual_q), self_module(p), shriek_m);
    auto shrep = sh.validate();
    if (!shrep) throw PreconditionError("shriek is not a module map: " + shrep.summary());

    DgModuleMap ps(dual_q, self_module(q), phi.matrix() * shriek_m);
    auto psrep = ps.validate();
    if (!psrep) throw PreconditionError("phi o shriek is not a map of Q-modules: " + psrep.summary());
    BalancedResult bal = is_balanced(ps);
    if (!bal)
        throw PreconditionError("phi o shriek is not balanced; witness pair (" + bal.witness->first + ", " +
                                bal.witness->second + ")");
    BalancedResult bal_p = is_balanced(sh);
    if (!bal_p)
        throw PreconditionError("shriek is not balanced; witness pair (" + bal_p.witness->first + ", " +
                                bal_p.witness->second + ")");

    CdgaTable domain = semi_trivial_cone_unchecked(sh);
    CdgaTable codomain = semi_trivial_cone_unchecked(ps);
    RatMatrix m(codomain.dim(), domain.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) {
        std::size_t col = domain.index_of(p.label(i));
        for (std::size_t j = 0; j < q.dim(); ++j)
            if (phi.matrix()(j, i) != 0) m(codomain.index_of(q.label(j)), col) = phi.matrix()(j, i);
    }
    for (std::size_t k = 0; k < dual_q.dim(); ++k) {
        std::string label = suspended_label(dual_q.space().label(k), 1);
        m(codomain.index_of(label), domain.index_of(label)) = 1;
    }
    CdgaMorphism morphism(domain, codomain, std::move(m));
    for (const auto* t : {&domain, &codomain}) {
        auto rep = validate_cdga(*t);
        if (!rep) throw InvariantError("semi-trivial cone fails the CDGA axioms: " + rep.summary());
    }
    auto mrep = morphism.validate();
    if (!mrep) throw InvariantError("phi (+) id is not a CDGA morphism: " + mrep.summary());
    bool surj = !first_non_surjective_degree(phi).has_value();
    return {n, phi, cert, std::move(sh), std::move(ps), std::move(domain), std::move(codomain),
            std::move(morphism), surj, bal};
}

inline PrettyModel build_pretty_model(const CdgaMorphism& phi, const PdCertificate& cert) {
    auto rep = phi.validate();
    if (!rep) throw InputError("phi is not a CDGA morphism: " + rep.summary());
    DgModuleMap sh = shriek(phi, cert);
    return assemble_pretty_model(phi, cert, sh.matrix());
}

struct QuotientModel {
    DiffIdeal ideal;
    Quotient quotient;
    CdgaMorphism pi; // domain -> P/I
    QuasiIsoResult quasi_iso;
};

/// For surjective phi: I = image of phi^!, and pi = (projection, 0) : domain -> P/I.
inline QuotientModel surjective_quotient_model(const PrettyModel& pm) {
    if (auto p = first_non_surjective_degree(pm.phi))
        throw PreconditionError("phi is not surjective in degree " + std::to_string(*p));
    const CdgaTable& p = pm.phi.source();
    const RatMatrix& sh = pm.shriek.matrix();
    if (rank(sh) != sh.cols()) throw InvariantError("shriek of a surjective map is not injective");
    std::vector<Vec> image;
    for (std::size_t c = 0; c < sh.cols(); ++c) image.push_back(sh.column(c));
    DiffIdeal ideal(p, image);
    auto irep = validate_ideal(ideal);
    if (!irep) throw InvariantError("image of the shriek map is not an ideal: " + irep.summary());
    Quotient q = quotient_by_ideal(p, ideal);
    RatMatrix m(q.algebra.dim(), pm.domain.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) {
        std::size_t col = pm.domain.index_of(p.label(i));
        for (std::size_t r = 0; r < q.algebra.dim(); ++r) m(r, col) = q.projection.matrix()(r, i);
    }
    CdgaMorphism pi(pm.domain, q.algebra, std::move(m));
    auto rep = pi.validate();
    if (!rep) throw InvariantError("quotient map from the domain is not a CDGA morphism: " + rep.summary());
    QuasiIsoResult qi = is_quasi_iso(pi);
    return {std::move(ideal), std::move(q), std::move(pi), qi};
}

/// Orientation of Q (+)_Psi ss^{-n}#Q taking the value 1 on s(#1).
inline Orientation canonical_double_orientation(const CdgaTable& table, const CdgaTable& q, int n) {
    Orientation eps{n - 1, Vec(table.dim())};
    eps.functional[table.index_of(suspended_label(dual_label(q.label(q.unit())), 1))] = 1;
    return eps;
}

struct BoundaryDouble {
    CdgaTable q;
    int dimension = 0;
    DgModuleMap psi;
    CdgaTable table;
    bool half_vanishing = false; // Q^{>= n/2 - 1} = 0
    PdCheck pd;
};

inline BoundaryDouble boundary_double(const CdgaTable& q, int n, const std::optional<RatMatrix>& psi = std::nullopt) {
    if (!q.complete()) throw InputError("boundary double needs a complete algebra");
    DgModule dual = shifted_dual_module(q, n);
    DgModuleMap f(dual, self_module(q), psi ? *psi : RatMatrix(q.dim(), dual.dim()));
    auto rep = f.validate();
    if (!rep) throw InputError("Psi is not a module map: " + rep.summary());
    CdgaTable table = semi_trivial_cone(f);
    bool half = true;
    for (std::size_t i = 0; i < q.dim(); ++i)
        if (2 * q.degree(i) >= n - 2) half = false;
    PdCheck pd = is_pd_cdga(table, canonical_double_orientation(table, q, n));
    return {q, n, std::move(f), std::move(table), half, std::move(pd)};
}

struct ExpectedTables {
    std::vector<std::size_t> domain;
    std::vector<std::size_t> codomain;
};

inline std::string dims_string(const std::vector<std::size_t>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out + ")";
}

/// Report-producing check of a pretty model; never throws on failed checks.
inline Report verify_pretty_model(const PrettyModel& pm, const std::optional<ExpectedTables>& expected = std::nullopt) {
    Report r;
    r.command = "verify";
    const int n = pm.dimension;
    r.facts.add("dimension", std::to_string(n));
    r.facts.add("phi surjective", pm.surjective ? "yes" : "no");
    r.facts.add("balanced by degree", pm.balance.by_degree ? "yes" : "no");

    Cohomology hs(pm.shriek.source().complex()), ht(pm.shriek.target().complex());
    RatMatrix hn = induced_map(hs, ht, pm.shriek.map(), n);
    bool iso = hn.rows() == 1 && hn.cols() == 1 && hn(0, 0) != 0;
    r.check("H^n(shriek) is an isomorphism", iso, "degree " + std::to_string(n));

    Cohomology hd(pm.domain.complex()), hc(pm.codomain.complex());
    r.table(cohomology_table("domain", hd));
    r.table(cohomology_table("codomain", hc));

    PdCheck pd = is_pd_cdga(pm.codomain, canonical_double_orientation(pm.codomain, pm.phi.target(), n));
    std::string why = pd.reason;
    if (pd.failing_degree) why += " (degree " + std::to_string(*pd.failing_degree) + ")";
    r.check("codomain is Poincare duality in dimension " + std::to_string(n - 1), pd.certificate.has_value(), why);

    if (expected) {
        auto dd = dims_list(hd), dc = dims_list(hc);
        r.check("domain cohomology matches", dd == expected->domain,
                "got " + dims_string(dd) + ", expected " + dims_string(expected->domain));
        r.check("codomain cohomology matches", dc == expected->codomain,
                "got " + dims_string(dc) + ", expected " + dims_string(expected->codomain));
    }
    return r;
}

} // namespace pm
