#pragma once

// Sphere bundles (Q (x) /\z, dz = e) and the disk-bundle pretty model
// P = Q (x) /\zb / (zb^2 - e zb) -> Q, zb -> e.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prettymodel/cdga.hpp"
#include "prettymodel/dgmodule.hpp"
#include "prettymodel/errors.hpp"
#include "prettymodel/pdual.hpp"
#include "prettymodel/pretty.hpp"
#include "prettymodel/report.hpp"

namespace pm {

struct BundleInput {
    CdgaTable base;
    PdCertificate base_certificate;
    Vec euler;
    int rank = 0;

    int half_rank() const { return rank / 2; }
    int base_dimension() const { return base_certificate.orientation.dimension; }
    int dimension() const { return base_dimension() + rank; }
};

inline BundleInput make_bundle_input(const CdgaTable& base, const Orientation& eps, const Vec& euler, int rank) {
    if (rank <= 0 || rank % 2 != 0) throw InputError("bundle rank must be even and positive, got " + std::to_string(rank));
    if (!base.complete()) throw InputError("bundle base must be a complete algebra");
    if (euler.size() != base.dim()) throw InputError("Euler class has wrong length");
    auto deg = base.space().degree_of(euler);
    if (deg && *deg != rank)
        throw InputError("Euler class has degree " + std::to_string(*deg) + ", expected " + std::to_string(rank));
    if (!is_zero(base.d(euler))) throw InputError("Euler class " + base.format(euler) + " is not a cocycle");
    auto pd = is_pd_cdga(base, eps, false);
    if (!pd) throw PreconditionError("bundle base is not Poincare duality: " + pd.reason);
    return {base, std::move(*pd.certificate), euler, rank};
}

inline BundleInput make_bundle_input(const CdgaTable& base, const Vec& euler, int rank) {
    return make_bundle_input(base, default_orientation(base), euler, rank);
}

struct SphereBundle {
    CdgaTable total;
    CdgaMorphism inclusion;
};

inline SphereBundle sphere_bundle_model(const BundleInput& in) {
    CdgaTable total = adjoin_odd_generator(in.base, in.euler, in.rank - 1, "z");
    CdgaMorphism inc = inclusion_by_labels(in.base, total);
    return {std::move(total), std::move(inc)};
}

struct DiskBundle {
    CdgaTable p;
    Orientation orientation;
    PrettyModel model;
    Rational lambda; // coefficient of zb in the unnormalized shriek of s^{-2k}1
};

namespace detail {

/// theta_Q(q) as an element of s^{-n}#Q: sum_x eps_Q(x.q) #x (degree shift by the rank).
inline Vec theta_q_element(const BundleInput& in, const GradedSpace& dual_space, std::size_t q) {
    const CdgaTable& base = in.base;
    const Orientation& eps = in.base_certificate.orientation;
    Vec out(dual_space.dim());
    for (std::size_t x = 0; x < base.dim(); ++x) {
        Rational v = 0;
        for (const auto& [k, c] : base.product(x, q)) v += c * eps.functional[k];
        if (v != 0) out[dual_index(dual_space, base.space(), x)] = v;
    }
    return out;
}

} // namespace detail

inline DiskBundle disk_bundle_pretty_model(const BundleInput& in) {
    const CdgaTable& q = in.base;
    const int n = in.dimension();
    CdgaTable p = adjoin_even_truncated(q, in.euler, in.rank, "zb");
    const std::size_t zb = p.index_of("zb");

    RatMatrix phim(q.dim(), p.dim());
    for (std::size_t i = 0; i < q.dim(); ++i) {
        phim(i, p.index_of(q.label(i))) = 1;
        // q.zb -> q.e
        std::string lab = i == q.unit() ? "zb" : q.label(i) + ".zb";
        if (auto col = p.space().find(lab)) {
            Vec qe = q.multiply(q.basis_vector(i), in.euler);
            for (std::size_t r = 0; r < q.dim(); ++r) phim(r, *col) = qe[r];
        }
    }
    CdgaMorphism phi(p, q, std::move(phim));
    auto rep = phi.validate();
    if (!rep) throw InvariantError("zb -> e is not a CDGA morphism: " + rep.summary());

    // eps_P(q.zb) = eps_Q(q)
    Orientation eps{n, Vec(p.dim())};
    const auto& eq = in.base_certificate.orientation;
    for (std::size_t i = 0; i < q.dim(); ++i) {
        if (eq.functional[i] == 0) continue;
        std::string lab = i == q.unit() ? "zb" : q.label(i) + ".zb";
        eps.functional[p.index_of(lab)] = eq.functional[i];
    }
    auto pd = is_pd_cdga(p, eps, false);
    if (!pd) throw InvariantError("disk-bundle algebra is not Poincare duality: " + pd.reason);

    // Shriek of theta_Q(1) must be alpha + lambda zb with alpha = 0, lambda != 0.
    GradedSpace dual_space = shifted_dual(q.space(), n);
    Vec one = detail::theta_q_element(in, dual_space, q.unit());
    Vec image = shriek_matrix(phi, *pd.certificate).apply(one);
    Rational lambda = image[zb];
    Vec alpha = image;
    alpha[zb] = 0;
    if (!is_zero(alpha) || lambda == 0)
        throw InvariantError("shriek of the fundamental class is " + p.format(image) + ", expected a multiple of zb");
    if (lambda != 1) {
        eps.functional = scaled(eps.functional, lambda);
        pd = is_pd_cdga(p, eps, false);
        if (!pd) throw InvariantError("rescaled orientation lost Poincare duality");
    }
    PrettyModel model = build_pretty_model(phi, *pd.certificate);
    return {std::move(p), std::move(eps), std::move(model), lambda};
}

/// The isomorphism codomain -> (Q (x) /\z, dz = e): q -> q and s(theta_Q(q)) -> (-1)^{|q|} q.z.
inline RatMatrix bundle_codomain_iso(const BundleInput& in, const CdgaTable& codomain, const CdgaTable& sphere) {
    const CdgaTable& q = in.base;
    const int n = in.dimension();
    GradedSpace dual_space = shifted_dual(q.space(), n);
    RatMatrix m(sphere.dim(), codomain.dim());
    for (std::size_t i = 0; i < q.dim(); ++i) m(sphere.index_of(q.label(i)), codomain.index_of(q.label(i))) = 1;
    // columns of theta_Q in the dual basis, inverted to express each #x through theta_Q(q)
    std::vector<Vec> th;
    for (std::size_t i = 0; i < q.dim(); ++i) th.push_back(detail::theta_q_element(in, dual_space, i));
    auto inv = inverse(RatMatrix::from_columns(th, dual_space.dim()));
    if (!inv) throw InvariantError("theta_Q is not invertible");
    for (std::size_t k = 0; k < dual_space.dim(); ++k) {
        std::size_t col = codomain.index_of(suspended_label(dual_space.label(k), 1));
        for (std::size_t i = 0; i < q.dim(); ++i) {
            Rational c = (*inv)(i, k);
            if (c == 0) continue;
            std::string lab = i == q.unit() ? "z" : q.label(i) + ".z";
            m(sphere.index_of(lab), col) += koszul(q.degree(i)) * c;
        }
    }
    return m;
}

inline Report verify_bundle_equivalence(const BundleInput& in, const PrettyModel& pm) {
    Report r;
    r.command = "disk-bundle --verify";
    const CdgaTable& q = in.base;
    const int n = in.dimension();
    r.facts.add("base dimension", std::to_string(in.base_dimension()));
    r.facts.add("rank", std::to_string(in.rank));
    r.facts.add("euler", q.format(in.euler));

    SphereBundle sb = sphere_bundle_model(in);
    r.table(cohomology_table("domain", pm.domain.complex()));
    r.table(cohomology_table("codomain", pm.codomain.complex()));
    r.table(cohomology_table("sphere bundle", sb.total.complex()));

    // phi phi^!(theta_Q(q)) = e.q
    {
        GradedSpace dual_space = shifted_dual(q.space(), n);
        std::string witness;
        for (std::size_t i = 0; i < q.dim() && witness.empty(); ++i) {
            Vec lhs = pm.phi_shriek(detail::theta_q_element(in, dual_space, i));
            Vec rhs = q.multiply(in.euler, q.basis_vector(i));
            if (lhs != rhs) witness = q.label(i) + ": " + q.format(lhs) + " != " + q.format(rhs);
        }
        r.check("phi shriek(s^{-2k} q) = e.q", witness.empty(), witness);
    }
    {
        auto rep = pm.shriek.validate();
        r.check("shriek is a module map", rep.ok(), rep.summary());
    }

    RatMatrix iso = bundle_codomain_iso(in, pm.codomain, sb.total);
    bool shapes = pm.codomain.dim() == sb.total.dim();
    std::optional<int> bad_degree;
    if (shapes) {
        for (int p : sb.total.space().degrees()) {
            GradedMap g(pm.codomain.space(), sb.total.space(), 0, iso);
            RatMatrix b = g.block(p);
            if (b.rows() != b.cols() || rank(b) != b.rows()) {
                bad_degree = p;
                break;
            }
        }
    }
    r.check("codomain iso is bijective", shapes && !bad_degree,
            shapes ? "degree " + std::to_string(bad_degree.value_or(-1)) : "dimension mismatch");
    CdgaMorphism psi(pm.codomain, sb.total, iso);
    auto prep = psi.validate();
    std::string pw = prep.summary();
    if (!prep.ok()) {
        // name the degree of the first witness element
        const auto& f = prep.failures.front();
        std::string lab = f.witness.substr(1, f.witness.find_first_of(",)") - 1);
        if (auto i = pm.codomain.space().find(lab)) pw = "degree " + std::to_string(pm.codomain.degree(*i)) + ": " + pw;
    }
    r.check("codomain iso is a CDGA morphism", prep.ok(), pw);

    CdgaMorphism inc = inclusion_by_labels(q, pm.domain);
    QuasiIsoResult qi = is_quasi_iso(inc);
    r.check("Q -> domain is a quasi-isomorphism", qi.quasi_iso,
            "degree " + std::to_string(qi.failing_degree.value_or(-1)));
    return r;
}

} // namespace pm
