#pragma once

// Graded vector spaces, degree-homogeneous maps, cochain complexes and their
// cohomology, together with the suspension and shifted-dual functors.
//
// Sign conventions used throughout the library (all other signs are derived
// from these and from the Koszul rule):
//
//   suspension      (s^k V)^p = V^{k+p},         d(s^k x) = (-1)^k s^k(dx)
//   shifted dual    (s^{-n}#V)^p = hom(V^{n-p}),   (df)(x) = (-1)^{n-|f|} f(dx)
//   dual action     (a.f)(m) = (-1)^{|a||m|} f(a.m)   (on the self module: f(m.a))
//   dual of a map   (s^{-n}#g)(f) = f o g            (no sign, g of degree 0)
//   cone action     a.(sq) = (-1)^{|a|} s(a.q)
//
// With these choices theta(y)(x) = eps(x.y) is a chain map and a module map;
// the tests check that on every oriented algebra in the corpus.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prettymodel/errors.hpp"
#include "prettymodel/linalg.hpp"

namespace pm {

inline int koszul(long long exponent) { return (exponent % 2 == 0) ? 1 : -1; }

struct BasisElement {
    std::string label;
    int degree = 0;

    friend bool operator==(const BasisElement&, const BasisElement&) = default;
};

inline std::string suspended_label(const std::string& label, int k) {
    if (k == 0) return label;
    if (k == 1) return "s" + label;
    return "s^" + std::to_string(k) + "(" + label + ")";
}

inline std::string dual_label(const std::string& label) { return "#" + label; }

/// Finite-type graded vector space with a labelled basis. Basis elements are
/// stored contiguously by degree (stable with respect to the input order).
/// An optional truncation bound N declares that content above degree N has
/// been discarded; without a bound the space is complete.
class GradedSpace {
public:
    GradedSpace() = default;

    explicit GradedSpace(std::vector<BasisElement> basis, std::optional<int> truncation = std::nullopt)
        : basis_(std::move(basis)), truncation_(truncation) {
        std::stable_sort(basis_.begin(), basis_.end(),
                         [](const BasisElement& a, const BasisElement& b) { return a.degree < b.degree; });
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            const auto& e = basis_[i];
            if (truncation_ && e.degree > *truncation_)
                throw InputError("basis element '" + e.label + "' has degree " + std::to_string(e.degree) +
                                 " above the truncation bound " + std::to_string(*truncation_));
            if (e.label.empty()) throw InputError("empty basis label");
            if (!index_.emplace(e.label, i).second) throw InputError("duplicate basis label '" + e.label + "'");
        }
        for (std::size_t i = 0; i < basis_.size();) {
            std::size_t j = i;
            while (j < basis_.size() && basis_[j].degree == basis_[i].degree) ++j;
            ranges_[basis_[i].degree] = {i, j};
            i = j;
        }
    }

    std::size_t dim() const { return basis_.size(); }

    std::size_t dim(int p) const {
        auto it = ranges_.find(p);
        return it == ranges_.end() ? 0 : it->second.second - it->second.first;
    }

    /// Half-open index range [begin, end) of the degree-p basis.
    std::pair<std::size_t, std::size_t> range(int p) const {
        auto it = ranges_.find(p);
        if (it != ranges_.end()) return it->second;
        auto next = ranges_.lower_bound(p);
        std::size_t at = next == ranges_.end() ? basis_.size() : next->second.first;
        return {at, at};
    }

    std::vector<int> degrees() const {
        std::vector<int> out;
        for (const auto& [p, r] : ranges_) out.push_back(p);
        return out;
    }

    bool empty() const { return basis_.empty(); }
    int min_degree() const { return ranges_.empty() ? 0 : ranges_.begin()->first; }
    int max_degree() const { return ranges_.empty() ? 0 : ranges_.rbegin()->first; }

    const BasisElement& operator[](std::size_t i) const { return basis_.at(i); }
    const std::vector<BasisElement>& basis() const { return basis_; }
    int degree(std::size_t i) const { return basis_.at(i).degree; }
    const std::string& label(std::size_t i) const { return basis_.at(i).label; }

    std::optional<std::size_t> find(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(const std::string& label) const {
        auto i = find(label);
        if (!i) throw InputError("unknown label '" + label + "'");
        return *i;
    }

    std::optional<int> truncation() const { return truncation_; }
    bool complete() const { return !truncation_.has_value(); }

    /// Whether degree p lies inside the retained range.
    bool retains(int p) const { return !truncation_ || p <= *truncation_; }

    /// Whether cohomology in degree p is determined by the retained content.
    bool faithful(int p) const { return !truncation_ || p <= *truncation_ - 1; }

    /// Degree of a homogeneous nonzero vector; nullopt for zero, throws if inhomogeneous.
    std::optional<int> degree_of(const Vec& v) const {
        if (v.size() != dim()) throw InputError("vector length does not match space dimension");
        std::optional<int> deg;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) continue;
            if (deg && *deg != basis_[i].degree) throw InputError("element is not homogeneous");
            deg = basis_[i].degree;
        }
        return deg;
    }

    /// Local coordinates (within degree p) of a global vector.
    Vec restrict(const Vec& v, int p) const {
        auto [b, e] = range(p);
        return Vec(v.begin() + static_cast<std::ptrdiff_t>(b), v.begin() + static_cast<std::ptrdiff_t>(e));
    }

    /// Global vector from local degree-p coordinates.
    Vec embed(const Vec& local, int p) const {
        auto [b, e] = range(p);
        if (local.size() != e - b) throw InputError("local vector length does not match degree dimension");
        Vec v(dim());
        std::copy(local.begin(), local.end(), v.begin() + static_cast<std::ptrdiff_t>(b));
        return v;
    }

    std::string format(const Vec& v) const {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) continue;
            Rational c = v[i];
            if (!out.empty()) {
                out += c < 0 ? " - " : " + ";
                if (c < 0) c = -c;
            } else if (c < 0) {
                out += "-";
                c = -c;
            }
            if (c != 1) out += c.str() + "*";
            out += basis_[i].label;
        }
        return out.empty() ? "0" : out;
    }

    friend bool operator==(const GradedSpace& a, const GradedSpace& b) {
        return a.basis_ == b.basis_ && a.truncation_ == b.truncation_;
    }

private:
    std::vector<BasisElement> basis_;
    std::optional<int> truncation_;
    std::map<std::string, std::size_t> index_;
    std::map<int, std::pair<std::size_t, std::size_t>> ranges_;
};

/// Linear map of a fixed degree between graded spaces, stored as one matrix
/// over the full bases (rows = target, columns = source) whose only nonzero
/// entries connect degree p to degree p + degree.
class GradedMap {
public:
    GradedMap() = default;

    GradedMap(GradedSpace source, GradedSpace target, int degree)
        : source_(std::move(source)), target_(std::move(target)), degree_(degree),
          matrix_(target_.dim(), source_.dim()) {}

    GradedMap(GradedSpace source, GradedSpace target, int degree, RatMatrix matrix)
        : source_(std::move(source)), target_(std::move(target)), degree_(degree), matrix_(std::move(matrix)) {
        if (matrix_.rows() != target_.dim() || matrix_.cols() != source_.dim())
            throw InputError("graded map matrix has wrong shape");
        for (std::size_t r = 0; r < matrix_.rows(); ++r)
            for (std::size_t c = 0; c < matrix_.cols(); ++c)
                if (matrix_(r, c) != 0 && target_.degree(r) != source_.degree(c) + degree_)
                    throw InputError("graded map sends '" + source_.label(c) + "' to '" + target_.label(r) +
                                     "' outside degree " + std::to_string(degree_));
    }

    static GradedMap identity(const GradedSpace& v) { return GradedMap(v, v, 0, RatMatrix::identity(v.dim())); }

    const GradedSpace& source() const { return source_; }
    const GradedSpace& target() const { return target_; }
    int degree() const { return degree_; }
    const RatMatrix& matrix() const { return matrix_; }

    const Rational& at(std::size_t target_index, std::size_t source_index) const {
        return matrix_(target_index, source_index);
    }

    void set(std::size_t target_index, std::size_t source_index, const Rational& value) {
        if (value != 0 && target_.degree(target_index) != source_.degree(source_index) + degree_)
            throw InputError("graded map entry violates degree");
        matrix_(target_index, source_index) = value;
    }

    /// Block from source degree p to target degree p + degree.
    RatMatrix block(int p) const {
        auto [sb, se] = source_.range(p);
        auto [tb, te] = target_.range(p + degree_);
        RatMatrix b(te - tb, se - sb);
        for (std::size_t r = tb; r < te; ++r)
            for (std::size_t c = sb; c < se; ++c) b(r - tb, c - sb) = matrix_(r, c);
        return b;
    }

    Vec operator()(const Vec& x) const { return matrix_.apply(x); }

    Vec column(std::size_t source_index) const { return matrix_.column(source_index); }

    bool is_zero() const { return matrix_.is_zero(); }

    friend GradedMap compose(const GradedMap& g, const GradedMap& f) {
        if (!(f.target_.basis() == g.source_.basis())) throw InputError("compose: target/source mismatch");
        return GradedMap(f.source_, g.target_, f.degree_ + g.degree_, g.matrix_ * f.matrix_);
    }

    friend bool operator==(const GradedMap& a, const GradedMap& b) {
        return a.degree_ == b.degree_ && a.source_ == b.source_ && a.target_ == b.target_ && a.matrix_ == b.matrix_;
    }

private:
    GradedSpace source_;
    GradedSpace target_;
    int degree_ = 0;
    RatMatrix matrix_;
};

/// Cochain complex: a graded space with a degree +1 endomorphism. Whether the
/// differential squares to zero is checked by `squares_to_zero` and by every
/// cohomology computation; construction itself does not reject d^2 != 0 so
/// that validators can report it.
class CochainComplex {
public:
    CochainComplex() = default;

    CochainComplex(GradedSpace space, GradedMap differential)
        : space_(std::move(space)), differential_(std::move(differential)) {
        if (differential_.degree() != 1) throw InputError("differential must have degree +1");
        if (!(differential_.source() == space_) || !(differential_.target() == space_))
            throw InputError("differential must be an endomorphism of the complex's space");
    }

    static CochainComplex zero_differential(GradedSpace space) {
        GradedMap d(space, space, 1);
        return CochainComplex(std::move(space), std::move(d));
    }

    const GradedSpace& space() const { return space_; }
    const GradedMap& differential() const { return differential_; }
    Vec d(const Vec& x) const { return differential_(x); }

    bool squares_to_zero() const { return (differential_.matrix() * differential_.matrix()).is_zero(); }

private:
    GradedSpace space_;
    GradedMap differential_;
};

inline GradedSpace suspend(const GradedSpace& v, int k) {
    std::vector<BasisElement> basis;
    basis.reserve(v.dim());
    for (const auto& e : v.basis()) basis.push_back({suspended_label(e.label, k), e.degree - k});
    std::optional<int> trunc;
    if (v.truncation()) trunc = *v.truncation() - k;
    return GradedSpace(std::move(basis), trunc);
}

/// s^k C. The differential picks up (-1)^k.
inline CochainComplex suspend(const CochainComplex& c, int k) {
    GradedSpace s = suspend(c.space(), k);
    RatMatrix m = Rational(koszul(k)) * c.differential().matrix();
    GradedMap d(s, s, 1, std::move(m));
    return CochainComplex(s, std::move(d));
}

/// Basis of s^{-n}#V: one dual element per basis element of V, in degree n - |x|.
inline GradedSpace shifted_dual(const GradedSpace& v, int n) {
    if (!v.complete()) throw InputError("shifted dual needs a complete (untruncated) space");
    std::vector<BasisElement> basis;
    basis.reserve(v.dim());
    for (const auto& e : v.basis()) basis.push_back({dual_label(e.label), n - e.degree});
    return GradedSpace(std::move(basis));
}

/// Index of the dual of V's basis element i inside shifted_dual(V, n).
inline std::size_t dual_index(const GradedSpace& dual, const GradedSpace& v, std::size_t i) {
    return dual.index_of(dual_label(v.label(i)));
}

inline CochainComplex shifted_dual(const CochainComplex& c, int n) {
    const GradedSpace& v = c.space();
    GradedSpace dual = shifted_dual(v, n);
    GradedMap d(dual, dual, 1);
    // (d #y)(x) = (-1)^{n - |#y|} #y(dx): coefficient of #x in d(#y) is sign * [coeff of y in dx].
    for (std::size_t x = 0; x < v.dim(); ++x)
        for (std::size_t y = 0; y < v.dim(); ++y) {
            const Rational& dxy = c.differential().at(y, x);
            if (dxy == 0) continue;
            std::size_t fy = dual_index(dual, v, y);
            std::size_t fx = dual_index(dual, v, x);
            d.set(fx, fy, koszul(n - dual.degree(fy)) * dxy);
        }
    return CochainComplex(dual, std::move(d));
}

/// s^{-n}#f : s^{-n}#W -> s^{-n}#V for a degree-0 map f : V -> W (transpose, no sign).
inline GradedMap shifted_dual_map(const GradedMap& f, int n) {
    if (f.degree() != 0) throw InputError("shifted_dual_map expects a degree-0 map");
    GradedSpace src = shifted_dual(f.target(), n);
    GradedSpace tgt = shifted_dual(f.source(), n);
    GradedMap out(src, tgt, 0);
    for (std::size_t w = 0; w < f.target().dim(); ++w)
        for (std::size_t v = 0; v < f.source().dim(); ++v) {
            const Rational& x = f.at(w, v);
            if (x != 0) out.set(dual_index(tgt, f.source(), v), dual_index(src, f.target(), w), x);
        }
    return out;
}

/// Cohomology of a cochain complex in every degree the truncation determines,
/// with representative cocycles (chosen greedily from the kernel basis, skipping
/// anything in the span of the coboundaries and the earlier choices).
class Cohomology {
public:
    explicit Cohomology(const CochainComplex& c) : space_(c.space()) {
        if (!c.squares_to_zero()) throw InvariantError("cohomology: differential does not square to zero");
        if (space_.empty()) return;
        for (int p = space_.min_degree(); p <= space_.max_degree(); ++p) {
            if (!space_.faithful(p)) {
                if (space_.dim(p) > 0) upper_bounded_.insert(p);
                continue;
            }
            Degree deg;
            const std::size_t n = space_.dim(p);
            RatMatrix out = c.differential().block(p);
            RatMatrix in = c.differential().block(p - 1);
            std::vector<Vec> kernel = out.rows() == 0 ? identity_columns(n) : kernel_basis(out);
            SpanTracker span(n);
            for (std::size_t j = 0; j < in.cols(); ++j) {
                Vec col = in.column(j);
                if (span.add(col)) deg.boundaries.push_back(std::move(col));
            }
            for (auto& z : kernel)
                if (span.add(z)) deg.representatives.push_back(std::move(z));
            if (n > 0) {
                std::vector<Vec> all = deg.representatives;
                all.insert(all.end(), deg.boundaries.begin(), deg.boundaries.end());
                deg.solver = RatMatrix::from_columns(all, n);
            }
            degrees_.emplace(p, std::move(deg));
        }
    }

    const GradedSpace& space() const { return space_; }

    /// Degrees where cohomology is known (possibly zero-dimensional).
    bool known(int p) const { return degrees_.count(p) > 0 || (space_.dim(p) == 0 && space_.faithful(p)); }

    std::size_t dim(int p) const {
        if (upper_bounded_.count(p) || !space_.faithful(p))
            throw TruncationError("cohomology in degree " + std::to_string(p) +
                                  " is not determined by the truncation bound");
        auto it = degrees_.find(p);
        return it == degrees_.end() ? 0 : it->second.representatives.size();
    }

    /// Representatives as global vectors.
    std::vector<Vec> representatives(int p) const {
        dim(p);
        std::vector<Vec> out;
        auto it = degrees_.find(p);
        if (it == degrees_.end()) return out;
        for (const auto& z : it->second.representatives) out.push_back(space_.embed(z, p));
        return out;
    }

    /// Coordinates of the class of a homogeneous cocycle of degree p in the representative basis.
    Vec class_of(const Vec& cocycle, int p) const {
        std::size_t h = dim(p);
        auto it = degrees_.find(p);
        if (it == degrees_.end() || space_.dim(p) == 0) return Vec(h);
        auto sol = preimage(it->second.solver, space_.restrict(cocycle, p));
        if (!sol) throw InputError("class_of: vector is not a cocycle in degree " + std::to_string(p));
        return Vec(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(h));
    }

    bool is_coboundary(const Vec& cocycle, int p) const { return is_zero(class_of(cocycle, p)); }

    /// Dimensions in every determined degree from min to max degree of the space.
    std::map<int, std::size_t> dims() const {
        std::map<int, std::size_t> out;
        if (space_.empty()) return out;
        for (int p = space_.min_degree(); p <= space_.max_degree(); ++p)
            if (!upper_bounded_.count(p) && space_.faithful(p)) out[p] = dim(p);
        return out;
    }

    const std::set<int>& upper_bounded() const { return upper_bounded_; }

    bool acyclic() const {
        for (const auto& [p, d] : degrees_)
            if (!d.representatives.empty()) return false;
        return true;
    }

private:
    struct Degree {
        std::vector<Vec> representatives; // local coordinates
        std::vector<Vec> boundaries;      // independent coboundaries, local
        RatMatrix solver;                 // columns: representatives then boundaries
    };

    static std::vector<Vec> identity_columns(std::size_t n) {
        std::vector<Vec> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(unit_vec(n, i));
        return out;
    }

    GradedSpace space_;
    std::map<int, Degree> degrees_;
    std::set<int> upper_bounded_;
};

inline Cohomology cohomology(const CochainComplex& c) { return Cohomology(c); }

/// Matrix of H^p(f) in the representative bases of source and target.
inline RatMatrix induced_map(const Cohomology& hs, const Cohomology& ht, const GradedMap& f, int p) {
    if (f.degree() != 0) throw InputError("induced_map expects a degree-0 chain map");
    auto reps = hs.representatives(p);
    RatMatrix m(ht.dim(p), reps.size());
    for (std::size_t j = 0; j < reps.size(); ++j) {
        Vec img = ht.class_of(f(reps[j]), p);
        for (std::size_t i = 0; i < img.size(); ++i) m(i, j) = img[i];
    }
    return m;
}

inline bool is_chain_map(const CochainComplex& src, const CochainComplex& tgt, const GradedMap& f) {
    return tgt.differential().matrix() * f.matrix() ==
           koszul(f.degree()) * (f.matrix() * src.differential().matrix());
}

struct QuasiIsoResult {
    bool quasi_iso = true;
    std::optional<int> failing_degree;
    std::optional<int> checked_from;
    std::optional<int> checked_to;

    explicit operator bool() const { return quasi_iso; }
};

/// Whether a degree-0 chain map induces isomorphisms in every degree both
/// truncations determine.
inline QuasiIsoResult is_quasi_iso(const CochainComplex& src, const CochainComplex& tgt, const GradedMap& f) {
    if (!is_chain_map(src, tgt, f)) throw InputError("is_quasi_iso: map does not commute with differentials");
    Cohomology hs(src), ht(tgt);
    QuasiIsoResult res;
    int lo = std::min(src.space().empty() ? 0 : src.space().min_degree(),
                      tgt.space().empty() ? 0 : tgt.space().min_degree());
    int hi = std::max(src.space().empty() ? 0 : src.space().max_degree(),
                      tgt.space().empty() ? 0 : tgt.space().max_degree());
    for (int p = lo; p <= hi; ++p) {
        if (!src.space().faithful(p) || !tgt.space().faithful(p)) break;
        if (!res.checked_from) res.checked_from = p;
        res.checked_to = p;
        RatMatrix h = induced_map(hs, ht, f, p);
        if (h.rows() != h.cols() || rank(h) != h.rows()) {
            res.quasi_iso = false;
            res.failing_degree = p;
            return res;
        }
    }
    return res;
}

} // namespace pm
