#pragma once

// Orientations, the duality map theta(y)(x) = eps(x.y), Poincare duality
// certificates, orphan ideals, PD quotients and the degree-p orphan-killing
// extension.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prettymodel/cdga.hpp"
#include "prettymodel/dgmodule.hpp"
#include "prettymodel/errors.hpp"
#include "prettymodel/graded.hpp"
#include "prettymodel/linalg.hpp"

namespace pm {

/// Degree-n functional, stored as a covector over the whole basis (entries
/// outside degree n are ignored and kept zero).
struct Orientation {
    int dimension = 0;
    Vec functional;

    Rational operator()(const Vec& x) const { return dot(functional, x); }
};

inline Orientation make_orientation(const CdgaTable& a, int n, const std::vector<std::pair<std::string, Rational>>& values) {
    Orientation eps{n, Vec(a.dim())};
    for (const auto& [label, c] : values) {
        std::size_t i = a.index_of(label);
        if (a.degree(i) != n)
            throw InputError("orientation value on '" + label + "' of degree " + std::to_string(a.degree(i)) +
                             ", expected " + std::to_string(n));
        eps.functional[i] += c;
    }
    return eps;
}

/// Orientation taking the value 1 on the first top-degree cohomology
/// representative and 0 on the others; n is the top degree of a complete table.
inline Orientation default_orientation(const CdgaTable& a) {
    if (!a.complete()) throw InputError("default orientation needs a complete table");
    const int n = a.top_degree();
    Cohomology h(a.complex());
    if (h.dim(n) == 0) throw PreconditionError("top degree " + std::to_string(n) + " carries no cohomology");
    Orientation eps{n, Vec(a.dim())};
    auto [b, e] = a.space().range(n);
    for (std::size_t i = b; i < e; ++i) eps.functional[i] = h.class_of(a.basis_vector(i), n)[0];
    return eps;
}

struct OrientationCheck {
    bool ok = true;
    std::string reason;
    std::string witness;

    explicit operator bool() const { return ok; }
};

/// eps vanishes on d(A^{n-1}) and is nonzero on some degree-n cocycle.
inline OrientationCheck is_orientation(const CdgaTable& a, const Orientation& eps) {
    OrientationCheck res;
    const int n = eps.dimension;
    if (eps.functional.size() != a.dim()) throw InputError("orientation has wrong length");
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (eps.functional[i] != 0 && a.degree(i) != n)
            return {false, "functional has support outside degree " + std::to_string(n), a.label(i)};
    auto [b, e] = a.space().range(n - 1);
    for (std::size_t i = b; i < e; ++i) {
        Vec dx = a.d(a.basis_vector(i));
        if (eps(dx) != 0) return {false, "does not vanish on coboundaries", a.format(dx)};
    }
    std::vector<Vec> cocycles;
    if (a.retains(n + 1)) {
        for (const auto& k : kernel_basis(a.differential().block(n))) cocycles.push_back(a.space().embed(k, n));
    } else {
        auto [nb, ne] = a.space().range(n);
        for (std::size_t i = nb; i < ne; ++i) cocycles.push_back(a.basis_vector(i));
    }
    for (const auto& z : cocycles)
        if (eps(z) != 0) return res;
    return {false, "not surjective in cohomology", "degree " + std::to_string(n)};
}

/// Rows: degree-p basis x, columns: degree-(n-p) basis y, entries eps(x.y).
inline RatMatrix pairing_matrix(const CdgaTable& a, const Orientation& eps, int p) {
    auto [xb, xe] = a.space().range(p);
    auto [yb, ye] = a.space().range(eps.dimension - p);
    RatMatrix m(xe - xb, ye - yb);
    for (std::size_t x = xb; x < xe; ++x)
        for (std::size_t y = yb; y < ye; ++y) {
            Rational v = 0;
            for (const auto& [k, c] : a.product(x, y)) v += c * eps.functional[k];
            m(x - xb, y - yb) = v;
        }
    return m;
}

namespace detail {

inline CdgaTable as_complete(const CdgaTable& a) {
    if (a.complete()) return a;
    return CdgaTable(GradedSpace(a.space().basis()), a.unit(), a.products(), a.differential().matrix());
}

} // namespace detail

/// theta: A -> s^{-n}#A, theta(y) = sum_x eps(x.y) #x. A is treated as complete.
inline DgModuleMap theta(const CdgaTable& a_in, const Orientation& eps) {
    CdgaTable a = detail::as_complete(a_in);
    DgModule self = self_module(a);
    DgModule dual = shifted_dual_module(self, eps.dimension);
    RatMatrix m(dual.dim(), a.dim());
    for (std::size_t y = 0; y < a.dim(); ++y)
        for (std::size_t x = 0; x < a.dim(); ++x) {
            Rational v = 0;
            for (const auto& [k, c] : a.product(x, y)) v += c * eps.functional[k];
            if (v != 0) m(dual_index(dual.space(), a.space(), x), y) = v;
        }
    return DgModuleMap(self, dual, std::move(m));
}

struct PdCertificate {
    Orientation orientation;
    DgModuleMap theta;
    RatMatrix theta_inverse;
};

struct PdCheck {
    std::optional<PdCertificate> certificate;
    std::optional<int> failing_degree;
    std::string reason;

    explicit operator bool() const { return certificate.has_value(); }
};

/// Certifies that theta is an isomorphism of modules. With `normalize`, eps is
/// rescaled to take the value 1 on the first top-degree cohomology representative
/// where it is nonzero.
inline PdCheck is_pd_cdga(const CdgaTable& a, const Orientation& eps_in, bool normalize = true) {
    PdCheck res;
    const int n = eps_in.dimension;
    auto oc = is_orientation(a, eps_in);
    if (!oc) {
        res.reason = "not an orientation: " + oc.reason + " (" + oc.witness + ")";
        return res;
    }
    if (a.truncation() && *a.truncation() < n) {
        res.reason = "truncation bound below the dimension";
        return res;
    }
    if (a.top_degree() > n) {
        res.failing_degree = a.top_degree();
        res.reason = "nonzero content above the dimension";
        return res;
    }
    for (int p = 0; p <= n; ++p) {
        RatMatrix m = pairing_matrix(a, eps_in, p);
        if (m.rows() != m.cols() || rank(m) != m.rows()) {
            res.failing_degree = p;
            res.reason = "pairing in degree " + std::to_string(p) + " is degenerate (" + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", rank " + std::to_string(rank(m)) + ")";
            return res;
        }
    }
    Orientation eps = eps_in;
    CdgaTable full = detail::as_complete(a);
    if (normalize) {
        Cohomology h(full.complex());
        for (const auto& z : h.representatives(n)) {
            Rational v = eps(z);
            if (v == 0) continue;
            eps.functional = scaled(eps.functional, 1 / v);
            break;
        }
    }
    DgModuleMap th = theta(full, eps);
    auto inv = inverse(th.matrix());
    if (!inv) throw InvariantError("theta is not invertible although every pairing block is");
    res.certificate = PdCertificate{eps, std::move(th), std::move(*inv)};
    return res;
}

/// O = {a : eps(a.b) = 0 for all b}; everything above the dimension is an orphan.
inline DiffIdeal orphan_ideal(const CdgaTable& a, const Orientation& eps) {
    const int n = eps.dimension;
    std::vector<Vec> vectors;
    for (int p : a.space().degrees()) {
        if (p > n) continue;
        RatMatrix m = pairing_matrix(a, eps, p);
        std::vector<Vec> kernel;
        if (m.cols() == 0) {
            for (std::size_t i = 0; i < m.rows(); ++i) kernel.push_back(unit_vec(m.rows(), i));
        } else {
            kernel = kernel_basis(m.transpose());
        }
        for (const auto& k : kernel) vectors.push_back(a.space().embed(k, p));
    }
    DiffIdeal o(a, vectors, n + 1);
    auto rep = validate_ideal(o);
    if (!rep) throw InvariantError("orphans do not form a differential ideal: " + rep.summary());
    return o;
}

inline bool is_acyclic_ideal(const DiffIdeal& j) { return Cohomology(j.complex()).acyclic(); }

struct PdQuotient {
    Quotient quotient;
    PdCertificate certificate;
    DiffIdeal orphans;
    bool orphans_acyclic = false;
    QuasiIsoResult quasi_iso;
};

/// eps induced on a quotient whose basis keeps parent labels.
inline Orientation induced_orientation(const CdgaTable& parent, const CdgaTable& quotient, const Orientation& eps) {
    Orientation out{eps.dimension, Vec(quotient.dim())};
    for (std::size_t i = 0; i < quotient.dim(); ++i) out.functional[i] = eps.functional[parent.index_of(quotient.label(i))];
    return out;
}

/// A / O(A, eps), after checking that H(A) is a Poincare duality algebra.
inline PdQuotient pd_quotient(const CdgaTable& a, const Orientation& eps) {
    auto oc = is_orientation(a, eps);
    if (!oc) throw PreconditionError("not an orientation: " + oc.reason + " (" + oc.witness + ")");
    CohomologyAlgebra h = cohomology_algebra(a);
    Orientation eh{eps.dimension, Vec(h.algebra.dim())};
    for (std::size_t i = 0; i < h.algebra.dim(); ++i)
        if (h.algebra.degree(i) == eps.dimension) eh.functional[i] = eps(h.representatives[i]);
    auto hpd = is_pd_cdga(h.algebra, eh, false);
    if (!hpd) throw PreconditionError("H(A) is not a Poincare duality algebra: " + hpd.reason);
    DiffIdeal o = orphan_ideal(a, eps);
    Quotient q = quotient_by_ideal(a, o);
    Orientation eq = induced_orientation(a, q.algebra, eps);
    auto cert = is_pd_cdga(q.algebra, eq, false);
    if (!cert) throw InvariantError("quotient by orphans is not Poincare duality: " + cert.reason);
    bool acyclic = is_acyclic_ideal(o);
    QuasiIsoResult qi = is_quasi_iso(q.projection);
    return {std::move(q), std::move(*cert.certificate), std::move(o), acyclic, qi};
}

struct OrphanKilling {
    CdgaTable algebra;
    Orientation orientation;
    CdgaMorphism inclusion;
    std::vector<std::string> generators; // u1, ub1, u2, ub2, ...
    bool degree2_closed = true;          // whether A^2 lies in ker d
};

/// Adjoins u_i (degree n-p-1) and ub_i = d u_i (degree n-p) for a basis x_i of
/// the degree-p orphans, and extends eps so that eps(ub_i.x_j) = delta_ij,
/// eps(u_i.dx_j) = (-1)^{n-p} delta_ij, and eps vanishes on ub_i.(ker d + S) and
/// u_i.(dS + T). The result is truncated at n + 1, which is exact there because
/// any product of two new generators has degree above n + 1.
inline OrphanKilling kill_orphans_in_degree(const CdgaTable& a, const Orientation& eps, int p) {
    const int n = eps.dimension;
    if (p < 1 || 2 * p >= n - 2)
        throw PreconditionError("degree p = " + std::to_string(p) + " must satisfy 1 <= p < n/2 - 1 (n = " +
                                std::to_string(n) + ")");
    if (a.truncation() && *a.truncation() < n + 1)
        throw PreconditionError("truncation bound must be at least n + 1");
    auto oc = is_orientation(a, eps);
    if (!oc) throw PreconditionError("not an orientation: " + oc.reason + " (" + oc.witness + ")");
    DiffIdeal o = orphan_ideal(a, eps);
    if (!is_acyclic_ideal(o)) throw PreconditionError("the orphan ideal is not acyclic");
    for (int q = 0; q < p; ++q)
        if (o.dim(q) > 0) throw PreconditionError("there are orphans in degree " + std::to_string(q) + " < p");

    const auto& sp = a.space();
    bool degree2_closed = a.dim(2) == 0 || a.differential().block(2).is_zero();
    std::vector<Vec> xs = o.local_basis(p);
    const std::size_t r = xs.size();
    if (r == 0) return {a, eps, CdgaMorphism::identity(a), {}, degree2_closed};

    // A^p = O^p + (A^p n ker d) + S
    RatMatrix dp = a.differential().block(p);
    std::vector<Vec> kernel = kernel_basis(dp);
    std::vector<Vec> ok = xs;
    ok.insert(ok.end(), kernel.begin(), kernel.end());
    if (independent_subset(ok, sp.dim(p)).size() != ok.size())
        throw PreconditionError("orphans in degree " + std::to_string(p) + " meet the cocycles");
    std::vector<Vec> s = complement_basis(ok, sp.dim(p));
    std::vector<Vec> cols_p = ok;
    cols_p.insert(cols_p.end(), s.begin(), s.end());
    auto inv_p = inverse(RatMatrix::from_columns(cols_p, sp.dim(p)));

    // A^{p+1} = d(O^p) + d(S) + T
    std::vector<Vec> dd;
    for (const auto& x : xs) dd.push_back(dp.apply(x));
    for (const auto& y : s) dd.push_back(dp.apply(y));
    std::vector<Vec> t = complement_basis(dd, sp.dim(p + 1));
    std::vector<Vec> cols_q = dd;
    cols_q.insert(cols_q.end(), t.begin(), t.end());
    auto inv_q = inverse(RatMatrix::from_columns(cols_q, sp.dim(p + 1)));
    if (!inv_p || !inv_q) throw InvariantError("supplements do not split");

    CdgaTable big = a;
    std::vector<std::string> gens;
    for (std::size_t i = 1; i <= r; ++i) {
        std::string u = "u" + std::to_string(i), ub = "ub" + std::to_string(i);
        gens.push_back(u);
        gens.push_back(ub);
        big = truncate(tensor_product(big, contractible_pair(u, ub, n - p - 1, a.label(a.unit()))).algebra, n + 1);
    }

    Orientation hat{n, Vec(big.dim())};
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (a.degree(i) == n) hat.functional[big.index_of(a.label(i))] = eps.functional[i];
    auto [pb, pe] = sp.range(p);
    auto [qb, qe] = sp.range(p + 1);
    for (std::size_t i = 0; i < r; ++i) {
        const std::string u = gens[2 * i], ub = gens[2 * i + 1];
        // x.ub = (-1)^{|x||ub|} ub.x, and ub.x is read off from the splitting of A^p
        for (std::size_t g = pb; g < pe; ++g) {
            Rational coeff = (*inv_p)(i, g - pb);
            if (coeff == 0) continue;
            std::string label = a.label(g) + "." + ub;
            hat.functional[big.index_of(label)] = koszul(static_cast<long long>(p) * (n - p)) * coeff;
        }
        for (std::size_t g = qb; g < qe; ++g) {
            Rational coeff = (*inv_q)(i, g - qb);
            if (coeff == 0) continue;
            std::string label = a.label(g) + "." + u;
            hat.functional[big.index_of(label)] =
                koszul(static_cast<long long>(p + 1) * (n - p - 1)) * koszul(n - p) * coeff;
        }
    }
    CdgaMorphism inc = inclusion_by_labels(a, big);
    return {std::move(big), std::move(hat), std::move(inc), std::move(gens), degree2_closed};
}

/// Signature of the symmetric middle-degree pairing on H^{n/2}; requires n = 0 mod 4.
inline int signature(const CdgaTable& a, const Orientation& eps) {
    const int n = eps.dimension;
    if (n % 4 != 0) throw PreconditionError("signature needs dimension divisible by 4");
    Cohomology h(a.complex());
    auto reps = h.representatives(n / 2);
    const std::size_t k = reps.size();
    RatMatrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) g(i, j) = eps(a.multiply(reps[i], reps[j]));
    // congruence diagonalization
    int pos = 0, neg = 0;
    std::size_t m = k;
    while (m > 0) {
        std::size_t piv = m;
        for (std::size_t i = 0; i < m; ++i)
            if (g(i, i) != 0) {
                piv = i;
                break;
            }
        if (piv == m) {
            std::optional<std::pair<std::size_t, std::size_t>> off;
            for (std::size_t i = 0; i < m && !off; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    if (g(i, j) != 0) {
                        off = std::make_pair(i, j);
                        break;
                    }
            if (!off) break;
            // replace e_i by e_i + e_j, which has value 2 g(i,j) != 0
            auto [i, j] = *off;
            for (std::size_t c = 0; c < m; ++c) g(i, c) += g(j, c);
            for (std::size_t c = 0; c < m; ++c) g(c, i) += g(c, j);
            piv = i;
        }
        Rational d = g(piv, piv);
        (d > 0 ? pos : neg)++;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == piv || g(i, piv) == 0) continue;
            Rational f = g(i, piv) / d;
            for (std::size_t c = 0; c < m; ++c) g(i, c) -= f * g(piv, c);
            for (std::size_t c = 0; c < m; ++c) g(c, i) -= f * g(c, piv);
        }
        // move pivot to the end and shrink
        for (std::size_t c = 0; c < k; ++c) std::swap(g(piv, c), g(m - 1, c));
        for (std::size_t c = 0; c < k; ++c) std::swap(g(c, piv), g(c, m - 1));
        --m;
    }
    return pos - neg;
}

} // namespace pm
