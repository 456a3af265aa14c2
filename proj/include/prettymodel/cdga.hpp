#pragma once

// Commutative differential graded algebras given by multiplication tables,
// their morphisms, differential ideals, quotients and the generator
// adjunctions used by the bundle constructions.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prettymodel/errors.hpp"
#include "prettymodel/graded.hpp"
#include "prettymodel/linalg.hpp"

namespace pm {

using SparseVec = std::vector<std::pair<std::size_t, Rational>>;

inline SparseVec to_sparse(const Vec& v) {
    SparseVec out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) out.emplace_back(i, v[i]);
    return out;
}

inline Vec to_dense(const SparseVec& s, std::size_t n) {
    Vec v(n);
    for (const auto& [i, c] : s) v.at(i) += c;
    return v;
}

struct Failure {
    std::string check;
    std::string witness;
};

struct ValidationReport {
    std::vector<Failure> failures;

    bool ok() const { return failures.empty(); }
    explicit operator bool() const { return ok(); }

    bool failed(const std::string& check) const {
        return std::any_of(failures.begin(), failures.end(), [&](const Failure& f) { return f.check == check; });
    }

    void add(std::string check, std::string witness) { failures.push_back({std::move(check), std::move(witness)}); }

    void merge(const ValidationReport& other, const std::string& prefix = "") {
        for (const auto& f : other.failures) failures.push_back({prefix + f.check, f.witness});
    }

    std::string summary() const {
        if (ok()) return "ok";
        std::string out;
        for (const auto& f : failures) {
            if (!out.empty()) out += "; ";
            out += f.check + " at " + f.witness;
        }
        return out;
    }
};

/// A connected, non-negatively graded CDGA stored as structure constants.
/// products[i * dim + j] holds x_i . x_j as a sparse combination of basis
/// elements. Only degree bookkeeping is enforced on construction; the algebra
/// axioms are checked by validate_cdga so that broken inputs can be reported.
class CdgaTable {
public:
    CdgaTable() = default;

    CdgaTable(GradedSpace space, std::size_t unit, std::vector<SparseVec> products, RatMatrix differential)
        : space_(std::move(space)), unit_(unit), products_(std::move(products)),
          differential_(space_, space_, 1, std::move(differential)) {
        const std::size_t n = space_.dim();
        if (n == 0) throw InputError("an algebra needs at least a unit");
        if (space_.min_degree() < 0)
            throw InputError("algebra has negative-degree element '" + space_.label(0) + "'");
        if (unit_ >= n) throw InputError("unit index out of range");
        if (space_.degree(unit_) != 0) throw InputError("unit '" + space_.label(unit_) + "' must have degree 0");
        if (products_.empty()) products_.resize(n * n);
        if (products_.size() != n * n) throw InputError("multiplication table has wrong size");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                auto& entry = products_[i * n + j];
                std::map<std::size_t, Rational> merged;
                for (const auto& [k, c] : entry) {
                    if (k >= n) throw InputError("multiplication entry out of range");
                    if (space_.degree(k) != space_.degree(i) + space_.degree(j))
                        throw InputError("product " + space_.label(i) + "*" + space_.label(j) + " has term '" +
                                         space_.label(k) + "' of degree " + std::to_string(space_.degree(k)) +
                                         ", expected " + std::to_string(space_.degree(i) + space_.degree(j)));
                    merged[k] += c;
                }
                entry.clear();
                for (auto& [k, c] : merged)
                    if (c != 0) entry.emplace_back(k, c);
            }
    }

    const GradedSpace& space() const { return space_; }
    std::size_t dim() const { return space_.dim(); }
    std::size_t dim(int p) const { return space_.dim(p); }
    int degree(std::size_t i) const { return space_.degree(i); }
    const std::string& label(std::size_t i) const { return space_.label(i); }
    std::size_t index_of(const std::string& label) const { return space_.index_of(label); }
    std::optional<int> truncation() const { return space_.truncation(); }
    bool complete() const { return space_.complete(); }
    int top_degree() const { return space_.max_degree(); }

    /// Whether products landing in degree p are recorded by the table.
    bool retains(int p) const { return space_.retains(p); }

    std::size_t unit() const { return unit_; }
    Vec unit_vector() const { return unit_vec(dim(), unit_); }
    Vec basis_vector(std::size_t i) const { return unit_vec(dim(), i); }
    Vec element(const std::string& label) const { return basis_vector(index_of(label)); }

    const SparseVec& product(std::size_t i, std::size_t j) const { return products_.at(i * dim() + j); }
    const std::vector<SparseVec>& products() const { return products_; }

    Vec multiply(const Vec& x, const Vec& y) const {
        const std::size_t n = dim();
        if (x.size() != n || y.size() != n) throw InputError("multiply: vector length mismatch");
        Vec out(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (y[j] == 0) continue;
                const auto& p = products_[i * n + j];
                if (p.empty()) continue;
                Rational c = x[i] * y[j];
                for (const auto& [k, v] : p) out[k] += c * v;
            }
        }
        return out;
    }

    Vec basis_product(std::size_t i, std::size_t j) const { return to_dense(product(i, j), dim()); }

    const GradedMap& differential() const { return differential_; }
    Vec d(const Vec& x) const { return differential_(x); }
    CochainComplex complex() const { return CochainComplex(space_, differential_); }

    std::string format(const Vec& v) const { return space_.format(v); }

private:
    GradedSpace space_;
    std::size_t unit_ = 0;
    std::vector<SparseVec> products_;
    GradedMap differential_;
};

/// Incremental construction by labels. Products not given explicitly are
/// filled from the opposite order with the Koszul sign, and products with the
/// unit default to the identity.
class CdgaBuilder {
public:
    CdgaBuilder& truncation(std::optional<int> n) {
        truncation_ = n;
        return *this;
    }
    CdgaBuilder& basis(const std::string& label, int degree) {
        basis_.push_back({label, degree});
        return *this;
    }
    CdgaBuilder& unit(const std::string& label) {
        unit_ = label;
        return *this;
    }
    CdgaBuilder& mult(const std::string& x, const std::string& y, const Rational& c, const std::string& z) {
        mult_.push_back({x, y, c, z});
        return *this;
    }
    CdgaBuilder& diff(const std::string& x, const Rational& c, const std::string& y) {
        diff_.push_back({x, c, y});
        return *this;
    }

    CdgaTable build() const {
        GradedSpace space(basis_, truncation_);
        if (!unit_) throw InputError("unit required");
        const std::size_t n = space.dim();
        const std::size_t u = space.index_of(*unit_);
        std::vector<SparseVec> products(n * n);
        std::vector<bool> given(n * n, false);
        for (const auto& m : mult_) {
            std::size_t i = space.index_of(m.x), j = space.index_of(m.y), k = space.index_of(m.z);
            if (space.degree(k) != space.degree(i) + space.degree(j))
                throw InputError("mult " + m.x + " " + m.y + " -> " + m.z + ": degree " +
                                 std::to_string(space.degree(k)) + " is not " +
                                 std::to_string(space.degree(i) + space.degree(j)));
            products[i * n + j].emplace_back(k, m.c);
            given[i * n + j] = true;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (given[i * n + j]) continue;
                if (given[j * n + i]) {
                    int s = koszul(static_cast<long long>(space.degree(i)) * space.degree(j));
                    for (const auto& [k, c] : products[j * n + i]) products[i * n + j].emplace_back(k, s * c);
                } else if (i == u) {
                    products[i * n + j].emplace_back(j, Rational(1));
                } else if (j == u) {
                    products[i * n + j].emplace_back(i, Rational(1));
                }
            }
        RatMatrix d(n, n);
        for (const auto& e : diff_) {
            std::size_t i = space.index_of(e.x), k = space.index_of(e.y);
            if (space.degree(k) != space.degree(i) + 1)
                throw InputError("diff " + e.x + " -> " + e.y + ": degree " + std::to_string(space.degree(k)) +
                                 " is not " + std::to_string(space.degree(i) + 1));
            d(k, i) += e.c;
        }
        return CdgaTable(std::move(space), u, std::move(products), std::move(d));
    }

private:
    struct Mult {
        std::string x, y;
        Rational c;
        std::string z;
    };
    struct Diff {
        std::string x;
        Rational c;
        std::string y;
    };
    std::optional<int> truncation_;
    std::vector<BasisElement> basis_;
    std::optional<std::string> unit_;
    std::vector<Mult> mult_;
    std::vector<Diff> diff_;
};

namespace detail {

inline std::string tuple_witness(const CdgaTable& a, std::initializer_list<std::size_t> idx) {
    std::string out = "(";
    bool first = true;
    for (auto i : idx) {
        if (!first) out += ", ";
        out += a.label(i);
        first = false;
    }
    return out + ")";
}

} // namespace detail

/// Checks connectivity, unit, graded commutativity, associativity, the Leibniz
/// rule and d^2 = 0. Each failed axiom is reported once with its first witness.
inline ValidationReport validate_cdga(const CdgaTable& a) {
    ValidationReport rep;
    const std::size_t n = a.dim();
    const int top = a.top_degree();

    if (a.dim(0) != 1) rep.add("connected", "degree 0 has dimension " + std::to_string(a.dim(0)));

    const Vec one = a.unit_vector();
    for (std::size_t i = 0; i < n; ++i) {
        Vec x = a.basis_vector(i);
        if (a.multiply(one, x) != x || a.multiply(x, one) != x) {
            rep.add("unit", detail::tuple_witness(a, {a.unit(), i}));
            break;
        }
    }

    [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                int s = koszul(static_cast<long long>(a.degree(i)) * a.degree(j));
                if (a.basis_product(i, j) != scaled(a.basis_product(j, i), s)) {
                    rep.add("commutativity", detail::tuple_witness(a, {i, j}));
                    return;
                }
            }
        for (std::size_t i = 0; i < n; ++i)
            if (a.degree(i) % 2 != 0 && !a.product(i, i).empty()) {
                rep.add("commutativity", detail::tuple_witness(a, {i, i}));
                return;
            }
    }();

    [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (a.degree(i) + a.degree(j) > top) continue;
                Vec ij = a.basis_product(i, j);
                for (std::size_t k = 0; k < n; ++k) {
                    if (a.degree(i) + a.degree(j) + a.degree(k) > top) continue;
                    Vec left = a.multiply(ij, a.basis_vector(k));
                    Vec right = a.multiply(a.basis_vector(i), a.basis_product(j, k));
                    if (left != right) {
                        rep.add("associativity", detail::tuple_witness(a, {i, j, k}));
                        return;
                    }
                }
            }
    }();

    [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                int deg = a.degree(i) + a.degree(j);
                if (!a.retains(deg + 1)) continue;
                Vec x = a.basis_vector(i), y = a.basis_vector(j);
                Vec left = a.d(a.basis_product(i, j));
                Vec right = a.multiply(a.d(x), y);
                axpy(right, koszul(a.degree(i)), a.multiply(x, a.d(y)));
                if (left != right) {
                    rep.add("leibniz", detail::tuple_witness(a, {i, j}));
                    return;
                }
            }
    }();

    if (!a.complex().squares_to_zero()) {
        const RatMatrix dd = a.differential().matrix() * a.differential().matrix();
        for (std::size_t c = 0; c < n; ++c)
            if (!is_zero(dd.column(c))) {
                rep.add("d^2=0", detail::tuple_witness(a, {c}));
                break;
            }
    }
    return rep;
}

/// Keeps degrees <= n and records n as the truncation bound.
inline CdgaTable truncate(const CdgaTable& a, int n) {
    int bound = a.truncation() ? std::min(*a.truncation(), n) : n;
    std::vector<BasisElement> basis;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (a.degree(i) <= bound) {
            basis.push_back(a.space()[i]);
            keep.push_back(i);
        }
    GradedSpace space(basis, bound);
    std::vector<std::size_t> new_index(a.dim(), SIZE_MAX);
    for (std::size_t k = 0; k < keep.size(); ++k) new_index[keep[k]] = k;
    const std::size_t m = keep.size();
    std::vector<SparseVec> products(m * m);
    RatMatrix d(m, m);
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y)
            for (const auto& [k, c] : a.product(keep[x], keep[y]))
                if (new_index[k] != SIZE_MAX) products[x * m + y].emplace_back(new_index[k], c);
        for (std::size_t r = 0; r < a.dim(); ++r)
            if (new_index[r] != SIZE_MAX && a.differential().at(r, keep[x]) != 0)
                d(new_index[r], x) = a.differential().at(r, keep[x]);
    }
    return CdgaTable(space, new_index[a.unit()], std::move(products), std::move(d));
}

/// Degree-0 map between algebras, expected to be a CDGA morphism.
class CdgaMorphism {
public:
    CdgaMorphism() = default;

    CdgaMorphism(CdgaTable source, CdgaTable target, RatMatrix matrix)
        : source_(std::move(source)), target_(std::move(target)),
          map_(source_.space(), target_.space(), 0, std::move(matrix)) {}

    static CdgaMorphism identity(const CdgaTable& a) { return CdgaMorphism(a, a, RatMatrix::identity(a.dim())); }

    const CdgaTable& source() const { return source_; }
    const CdgaTable& target() const { return target_; }
    const GradedMap& map() const { return map_; }
    const RatMatrix& matrix() const { return map_.matrix(); }
    Vec operator()(const Vec& x) const { return map_(x); }

    ValidationReport validate() const {
        ValidationReport rep;
        const std::size_t n = source_.dim();
        if (map_(source_.unit_vector()) != target_.unit_vector())
            rep.add("unit", "(" + source_.label(source_.unit()) + ")");
        auto in_range = [&](int deg) { return source_.retains(deg) && target_.retains(deg); };
        [&] {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (!in_range(source_.degree(i) + source_.degree(j))) continue;
                    Vec left = map_(source_.basis_product(i, j));
                    Vec right = target_.multiply(map_.column(i), map_.column(j));
                    if (left != right) {
                        rep.add("multiplicative", detail::tuple_witness(source_, {i, j}));
                        return;
                    }
                }
        }();
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_range(source_.degree(i) + 1)) continue;
            if (target_.d(map_.column(i)) != map_(source_.d(source_.basis_vector(i)))) {
                rep.add("chain map", detail::tuple_witness(source_, {i}));
                break;
            }
        }
        return rep;
    }

private:
    CdgaTable source_;
    CdgaTable target_;
    GradedMap map_;
};

inline CdgaMorphism compose(const CdgaMorphism& g, const CdgaMorphism& f) {
    if (!(f.target().space() == g.source().space())) throw InputError("compose: target/source mismatch");
    return CdgaMorphism(f.source(), g.target(), g.matrix() * f.matrix());
}

inline QuasiIsoResult is_quasi_iso(const CdgaMorphism& f) {
    return is_quasi_iso(f.source().complex(), f.target().complex(), f.map());
}

/// Sub-space of an algebra given by homogeneous basis vectors per degree.
/// `everything_from` marks ideals known to contain the whole algebra from that
/// degree on, including any content a truncation has discarded.
class DiffIdeal {
public:
    DiffIdeal() = default;

    DiffIdeal(CdgaTable parent, const std::vector<Vec>& vectors, std::optional<int> everything_from = std::nullopt)
        : parent_(std::move(parent)), everything_from_(everything_from) {
        const auto& sp = parent_.space();
        std::map<int, SpanTracker> spans;
        auto push = [&](const Vec& v) {
            auto deg = sp.degree_of(v);
            if (!deg) return;
            auto it = spans.try_emplace(*deg, sp.dim()).first;
            if (it->second.add(v)) basis_[*deg].push_back(v);
        };
        for (const auto& v : vectors) push(v);
        if (everything_from_)
            for (std::size_t i = 0; i < sp.dim(); ++i)
                if (sp.degree(i) >= *everything_from_) push(unit_vec(sp.dim(), i));
    }

    const CdgaTable& parent() const { return parent_; }
    std::optional<int> everything_from() const { return everything_from_; }

    std::size_t dim(int p) const {
        auto it = basis_.find(p);
        return it == basis_.end() ? 0 : it->second.size();
    }

    std::size_t dim() const {
        std::size_t n = 0;
        for (const auto& [p, b] : basis_) n += b.size();
        return n;
    }

    const std::vector<Vec>& basis(int p) const {
        static const std::vector<Vec> empty;
        auto it = basis_.find(p);
        return it == basis_.end() ? empty : it->second;
    }

    std::vector<Vec> basis() const {
        std::vector<Vec> out;
        for (const auto& [p, b] : basis_) out.insert(out.end(), b.begin(), b.end());
        return out;
    }

    std::vector<int> degrees() const {
        std::vector<int> out;
        for (const auto& [p, b] : basis_)
            if (!b.empty()) out.push_back(p);
        return out;
    }

    /// Local coordinates (degree-p parent basis) of the ideal's degree-p basis.
    std::vector<Vec> local_basis(int p) const {
        std::vector<Vec> out;
        for (const auto& v : basis(p)) out.push_back(parent_.space().restrict(v, p));
        return out;
    }

    bool contains(const Vec& v) const {
        const auto& sp = parent_.space();
        for (int p : sp.degrees()) {
            Vec local = sp.restrict(v, p);
            if (is_zero(local)) continue;
            if (!coordinates(local_basis(p), local)) return false;
        }
        return true;
    }

    /// The ideal as a cochain complex with the restricted differential.
    CochainComplex complex() const {
        std::vector<BasisElement> labels;
        std::vector<Vec> all;
        for (const auto& [p, b] : basis_)
            for (std::size_t k = 0; k < b.size(); ++k) {
                labels.push_back({"i" + std::to_string(p) + "_" + std::to_string(k), p});
                all.push_back(b[k]);
            }
        GradedSpace space(labels, parent_.truncation());
        RatMatrix dm(all.size(), all.size());
        for (std::size_t c = 0; c < all.size(); ++c) {
            Vec dv = parent_.d(all[c]);
            if (is_zero(dv)) continue;
            auto coords = coordinates(all, dv);
            if (!coords) throw InvariantError("ideal is not closed under the differential");
            for (std::size_t r = 0; r < all.size(); ++r) dm(r, c) = (*coords)[r];
        }
        GradedMap d(space, space, 1, std::move(dm));
        return CochainComplex(space, std::move(d));
    }

private:
    CdgaTable parent_;
    std::optional<int> everything_from_;
    std::map<int, std::vector<Vec>> basis_;
};

inline ValidationReport validate_ideal(const DiffIdeal& ideal) {
    ValidationReport rep;
    const CdgaTable& a = ideal.parent();
    for (const auto& v : ideal.basis()) {
        Vec dv = a.d(v);
        if (!ideal.contains(dv)) {
            rep.add("closed under d", a.format(v));
            break;
        }
    }
    [&] {
        for (const auto& v : ideal.basis())
            for (std::size_t i = 0; i < a.dim(); ++i) {
                Vec prod = a.multiply(a.basis_vector(i), v);
                if (!ideal.contains(prod)) {
                    rep.add("closed under multiplication", "(" + a.label(i) + ", " + a.format(v) + ")");
                    return;
                }
            }
    }();
    return rep;
}

inline DiffIdeal ideal_generated_by(const CdgaTable& a, const std::vector<Vec>& gens) {
    SpanTracker span(a.dim());
    std::vector<Vec> accepted;
    std::vector<Vec> queue;
    for (const auto& g : gens) {
        if (g.size() != a.dim()) throw InputError("ideal generator has wrong length");
        a.space().degree_of(g);
        queue.push_back(g);
    }
    while (!queue.empty()) {
        Vec v = std::move(queue.back());
        queue.pop_back();
        if (is_zero(v) || !span.add(v)) continue;
        accepted.push_back(v);
        queue.push_back(a.d(v));
        for (std::size_t i = 0; i < a.dim(); ++i)
            if (i != a.unit()) queue.push_back(a.multiply(a.basis_vector(i), v));
    }
    return DiffIdeal(a, accepted);
}

struct Quotient {
    CdgaTable algebra;
    CdgaMorphism projection;
};

/// A/I with basis the parent labels picked greedily outside I in each degree.
inline Quotient quotient_by_ideal(const CdgaTable& a, const DiffIdeal& ideal) {
    if (ideal.dim(0) > 0) throw PreconditionError("ideal contains the unit; the quotient would not be connected");
    const auto& sp = a.space();
    std::vector<BasisElement> basis;
    std::vector<std::size_t> kept;
    for (int p : sp.degrees()) {
        auto local = ideal.local_basis(p);
        for (auto idx : complement_indices(local, sp.dim(p))) {
            std::size_t g = sp.range(p).first + idx;
            basis.push_back(sp[g]);
            kept.push_back(g);
        }
    }
    std::optional<int> trunc = a.truncation();
    if (trunc && ideal.everything_from() && *ideal.everything_from() <= *trunc + 1) trunc.reset();
    GradedSpace qspace(basis, trunc);
    const std::size_t m = qspace.dim();

    // For each degree, invert [ideal basis | complement unit vectors] to split parent vectors.
    RatMatrix proj(m, a.dim());
    for (int p : sp.degrees()) {
        auto local = ideal.local_basis(p);
        std::vector<Vec> cols = local;
        std::vector<std::size_t> qidx;
        auto [b, e] = sp.range(p);
        for (std::size_t g = b; g < e; ++g) {
            auto it = std::find(kept.begin(), kept.end(), g);
            if (it == kept.end()) continue;
            cols.push_back(unit_vec(e - b, g - b));
            qidx.push_back(static_cast<std::size_t>(it - kept.begin()));
        }
        auto inv = inverse(RatMatrix::from_columns(cols, e - b));
        if (!inv) throw InvariantError("quotient: complement does not split the degree");
        for (std::size_t g = b; g < e; ++g)
            for (std::size_t k = 0; k < qidx.size(); ++k) proj(qidx[k], g) = (*inv)(local.size() + k, g - b);
    }

    std::vector<SparseVec> products(m * m);
    RatMatrix d(m, m);
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y)
            products[x * m + y] = to_sparse(proj.apply(a.basis_product(kept[x], kept[y])));
        Vec dx = proj.apply(a.d(a.basis_vector(kept[x])));
        for (std::size_t r = 0; r < m; ++r) d(r, x) = dx[r];
    }
    std::size_t unit = static_cast<std::size_t>(std::find(kept.begin(), kept.end(), a.unit()) - kept.begin());
    CdgaTable q(qspace, unit, std::move(products), std::move(d));
    CdgaMorphism pi(a, q, std::move(proj));
    return {std::move(q), std::move(pi)};
}

namespace detail {

inline std::string times_label(const std::string& a, const std::string& b) { return a + "." + b; }

inline void check_cocycle(const CdgaTable& q, const Vec& e, int degree) {
    if (e.size() != q.dim()) throw InputError("Euler class has wrong length");
    auto deg = q.space().degree_of(e);
    if (deg && *deg != degree)
        throw InputError("class has degree " + std::to_string(*deg) + ", expected " + std::to_string(degree));
    if (!is_zero(q.d(e))) throw InputError("class " + q.format(e) + " is not a cocycle");
}

} // namespace detail

/// (Q (x) /\z, dz = e) with |z| = |e| - 1 odd. Basis {q} then {q.z}; the unit's
/// partner is labelled by the generator alone.
inline CdgaTable adjoin_odd_generator(const CdgaTable& q, const Vec& e, int zdeg, const std::string& z = "z") {
    if (zdeg < 1 || zdeg % 2 == 0) throw InputError("odd generator must have positive odd degree");
    detail::check_cocycle(q, e, zdeg + 1);
    const std::size_t n = q.dim();
    std::vector<BasisElement> basis = q.space().basis();
    std::vector<std::size_t> zpart(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        int deg = q.degree(i) + zdeg;
        if (!q.retains(deg)) continue;
        zpart[i] = basis.size();
        basis.push_back({i == q.unit() ? z : detail::times_label(q.label(i), z), deg});
    }
    // GradedSpace re-sorts by degree; map our insertion order to final indices.
    GradedSpace space(basis, q.truncation());
    std::vector<std::size_t> pos(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) pos[k] = space.index_of(basis[k].label);
    const std::size_t m = space.dim();
    std::vector<SparseVec> products(m * m);
    auto put = [&](std::size_t x, std::size_t y, std::size_t k, const Rational& c) {
        products[pos[x] * m + pos[y]].emplace_back(pos[k], c);
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (const auto& [k, c] : q.product(i, j)) {
                put(i, j, k, c);
                if (zpart[k] == SIZE_MAX) continue;
                if (zpart[j] != SIZE_MAX) put(i, zpart[j], zpart[k], c);
                if (zpart[i] != SIZE_MAX) put(zpart[i], j, zpart[k], koszul(static_cast<long long>(zdeg) * q.degree(j)) * c);
            }
    RatMatrix d(m, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
            const Rational& c = q.differential().at(r, i);
            if (c == 0) continue;
            d(pos[r], pos[i]) += c;
            if (zpart[i] != SIZE_MAX && zpart[r] != SIZE_MAX) d(pos[zpart[r]], pos[zpart[i]]) += c;
        }
        if (zpart[i] == SIZE_MAX) continue;
        // d(q.z) = (dq).z + (-1)^{|q|} q.e
        Vec qe = q.multiply(q.basis_vector(i), e);
        for (std::size_t r = 0; r < n; ++r)
            if (qe[r] != 0) d(pos[r], pos[zpart[i]]) += koszul(q.degree(i)) * qe[r];
    }
    return CdgaTable(space, pos[q.unit()], std::move(products), std::move(d));
}

/// Q (x) /\zb / (zb^2 - e zb) with D zb = 0, |zb| = |e| even. Basis {q} then {q.zb}.
inline CdgaTable adjoin_even_truncated(const CdgaTable& q, const Vec& e, int zdeg, const std::string& zb = "zb") {
    if (zdeg < 2 || zdeg % 2 != 0) throw InputError("even generator must have positive even degree");
    detail::check_cocycle(q, e, zdeg);
    const std::size_t n = q.dim();
    std::vector<BasisElement> basis = q.space().basis();
    std::vector<std::size_t> zpart(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        int deg = q.degree(i) + zdeg;
        if (!q.retains(deg)) continue;
        zpart[i] = basis.size();
        basis.push_back({i == q.unit() ? zb : detail::times_label(q.label(i), zb), deg});
    }
    GradedSpace space(basis, q.truncation());
    std::vector<std::size_t> pos(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) pos[k] = space.index_of(basis[k].label);
    const std::size_t m = space.dim();
    std::vector<SparseVec> products(m * m);
    auto put = [&](std::size_t x, std::size_t y, std::size_t k, const Rational& c) {
        products[pos[x] * m + pos[y]].emplace_back(pos[k], c);
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Vec qq = q.basis_product(i, j);
            for (std::size_t k = 0; k < n; ++k) {
                if (qq[k] == 0) continue;
                put(i, j, k, qq[k]);
                if (zpart[k] == SIZE_MAX) continue;
                if (zpart[j] != SIZE_MAX) put(i, zpart[j], zpart[k], qq[k]);
                if (zpart[i] != SIZE_MAX) put(zpart[i], j, zpart[k], qq[k]);
            }
            // (q zb)(q' zb) = q q' e zb
            if (zpart[i] == SIZE_MAX || zpart[j] == SIZE_MAX) continue;
            Vec qqe = q.multiply(qq, e);
            for (std::size_t k = 0; k < n; ++k)
                if (qqe[k] != 0 && zpart[k] != SIZE_MAX) put(zpart[i], zpart[j], zpart[k], qqe[k]);
        }
    RatMatrix d(m, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < n; ++r) {
            const Rational& c = q.differential().at(r, i);
            if (c == 0) continue;
            d(pos[r], pos[i]) += c;
            if (zpart[i] != SIZE_MAX && zpart[r] != SIZE_MAX) d(pos[zpart[r]], pos[zpart[i]]) += c;
        }
    return CdgaTable(space, pos[q.unit()], std::move(products), std::move(d));
}

inline CdgaTable adjoin_even_truncated(const CdgaTable& q, const Vec& e, const std::string& zb = "zb") {
    auto deg_e = q.space().degree_of(e);
    if (!deg_e) throw InputError("adjoin_even_truncated needs a nonzero class to fix the generator degree");
    return adjoin_even_truncated(q, e, *deg_e, zb);
}

/// Inclusion of Q into an adjunction built above (Q's labels are kept verbatim).
inline CdgaMorphism inclusion_by_labels(const CdgaTable& sub, const CdgaTable& big) {
    RatMatrix m(big.dim(), sub.dim());
    for (std::size_t i = 0; i < sub.dim(); ++i) m(big.index_of(sub.label(i)), i) = 1;
    return CdgaMorphism(sub, big, std::move(m));
}

struct TensorProduct {
    CdgaTable algebra;
    CdgaMorphism left;  // A -> A (x) B, a -> a (x) 1
    CdgaMorphism right; // B -> A (x) B
};

/// A (x) B with (a (x) b)(a' (x) b') = (-1)^{|b||a'|} aa' (x) bb' and
/// d(a (x) b) = da (x) b + (-1)^{|a|} a (x) db. Labels: a (x) 1 -> a, 1 (x) b -> b,
/// otherwise "a.b"; the unit keeps A's unit label.
inline TensorProduct tensor_product(const CdgaTable& a, const CdgaTable& b) {
    std::optional<int> trunc;
    if (a.truncation()) trunc = a.truncation();
    if (b.truncation()) trunc = trunc ? std::min(*trunc, *b.truncation()) : *b.truncation();
    std::vector<BasisElement> basis;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) {
            int deg = a.degree(i) + b.degree(j);
            if (trunc && deg > *trunc) continue;
            std::string label = j == b.unit()   ? a.label(i)
                                : i == a.unit() ? b.label(j)
                                                : detail::times_label(a.label(i), b.label(j));
            basis.push_back({label, deg});
            pairs.emplace_back(i, j);
        }
    GradedSpace space(basis, trunc);
    const std::size_t m = space.dim();
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pos;
    for (std::size_t k = 0; k < basis.size(); ++k) pos[pairs[k]] = space.index_of(basis[k].label);
    auto find = [&](std::size_t i, std::size_t j) -> std::optional<std::size_t> {
        auto it = pos.find({i, j});
        if (it == pos.end()) return std::nullopt;
        return it->second;
    };
    std::vector<SparseVec> products(m * m);
    RatMatrix d(m, m);
    for (const auto& [x, px] : pos) {
        auto [i, j] = x;
        for (const auto& [y, py] : pos) {
            auto [i2, j2] = y;
            int s = koszul(static_cast<long long>(b.degree(j)) * a.degree(i2));
            for (const auto& [k, c] : a.product(i, i2))
                for (const auto& [l, c2] : b.product(j, j2))
                    if (auto t = find(k, l)) products[px * m + py].emplace_back(*t, s * c * c2);
        }
        for (std::size_t k = 0; k < a.dim(); ++k)
            if (a.differential().at(k, i) != 0)
                if (auto t = find(k, j)) d(*t, px) += a.differential().at(k, i);
        for (std::size_t l = 0; l < b.dim(); ++l)
            if (b.differential().at(l, j) != 0)
                if (auto t = find(i, l)) d(*t, px) += koszul(a.degree(i)) * b.differential().at(l, j);
    }
    CdgaTable t(space, *find(a.unit(), b.unit()), std::move(products), std::move(d));
    RatMatrix lm(m, a.dim()), rm(m, b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (auto k = find(i, b.unit())) lm(*k, i) = 1;
    for (std::size_t j = 0; j < b.dim(); ++j)
        if (auto k = find(a.unit(), j)) rm(*k, j) = 1;
    CdgaMorphism left(a, t, std::move(lm));
    CdgaMorphism right(b, t, std::move(rm));
    return {std::move(t), std::move(left), std::move(right)};
}

/// Square-zero algebra Q{1, u, v} with du = v and all positive products zero:
/// contractible in positive degrees.
inline CdgaTable contractible_pair(const std::string& u, const std::string& v, int udeg,
                                   const std::string& unit = "1") {
    if (udeg < 1) throw InputError("contractible pair needs a positive degree");
    return CdgaBuilder().basis(unit, 0).basis(u, udeg).basis(v, udeg + 1).unit(unit).diff(u, 1, v).build();
}

struct CohomologyAlgebra {
    CdgaTable algebra;
    std::vector<Vec> representatives; // cocycle in A for each basis element of H(A)
};

/// H(A) with the induced product. A representative that is a single basis
/// element with coefficient 1 keeps its label; others are named h<p>_<k>.
inline CohomologyAlgebra cohomology_algebra(const CdgaTable& a) {
    Cohomology h(a.complex());
    std::vector<BasisElement> basis;
    std::vector<Vec> reps;
    for (const auto& [p, dim] : h.dims()) {
        auto rp = h.representatives(p);
        for (std::size_t k = 0; k < rp.size(); ++k) {
            auto nz = to_sparse(rp[k]);
            std::string label = (nz.size() == 1 && nz[0].second == 1)
                                    ? a.label(nz[0].first)
                                    : "h" + std::to_string(p) + "_" + std::to_string(k);
            basis.push_back({label, p});
            reps.push_back(rp[k]);
        }
    }
    std::optional<int> trunc;
    if (a.truncation()) trunc = *a.truncation() - 1;
    GradedSpace space(basis, trunc);
    const std::size_t m = space.dim();
    std::vector<std::size_t> pos(m);
    for (std::size_t k = 0; k < m; ++k) pos[k] = space.index_of(basis[k].label);
    std::vector<Vec> ordered(m);
    for (std::size_t k = 0; k < m; ++k) ordered[pos[k]] = reps[k];
    std::vector<SparseVec> products(m * m);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y) {
            int deg = space.degree(x) + space.degree(y);
            if (!space.retains(deg) || !a.space().faithful(deg)) continue;
            Vec prod = a.multiply(ordered[x], ordered[y]);
            Vec cls = h.class_of(prod, deg);
            auto [b, e] = space.range(deg);
            for (std::size_t k = 0; k < cls.size(); ++k)
                if (cls[k] != 0) products[x * m + y].emplace_back(b + k, cls[k]);
        }
    std::size_t unit = 0;
    Vec unit_class = h.class_of(a.unit_vector(), 0);
    for (std::size_t k = 0; k < unit_class.size(); ++k)
        if (unit_class[k] != 0) unit = space.range(0).first + k;
    if (h.dim(0) != 1 || unit_class[unit - space.range(0).first] != 1)
        throw PreconditionError("cohomology_algebra: H^0 is not spanned by the unit");
    CdgaTable t(space, unit, std::move(products), RatMatrix(m, m));
    return {std::move(t), std::move(ordered)};
}

struct Truncation {
    DiffIdeal ideal;
    Quotient quotient;
};

/// J = S (+) B^{>=k} with S a complement of ker d in B^{k-1}; B/J vanishes from
/// degree k on and B -> B/J is a quasi-isomorphism when H^{>=k}(B) = 0.
inline Truncation acyclic_truncation(const CdgaTable& b, int k) {
    if (k < 1) throw PreconditionError("acyclic_truncation needs k >= 1");
    Cohomology h(b.complex());
    for (const auto& [p, dim] : h.dims())
        if (p >= k && dim > 0)
            throw PreconditionError("H^" + std::to_string(p) + " is nonzero, witness class " +
                                    b.format(h.representatives(p).front()));
    const auto& sp = b.space();
    RatMatrix dk = b.differential().block(k - 1);
    std::vector<Vec> kernel = kernel_basis(dk);
    std::vector<Vec> gens;
    for (const auto& s : complement_basis(kernel, sp.dim(k - 1))) gens.push_back(sp.embed(s, k - 1));
    DiffIdeal j(b, gens, k);
    auto rep = validate_ideal(j);
    if (!rep) throw InvariantError("acyclic truncation is not an ideal: " + rep.summary());
    Quotient q = quotient_by_ideal(b, j);
    return {std::move(j), std::move(q)};
}

} // namespace pm
