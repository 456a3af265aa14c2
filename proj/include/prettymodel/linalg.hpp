#pragma once

// Dense exact linear algebra over the rationals.
//
// All routines use the same pivot rule: columns are scanned left to right and
// the pivot is the first row (in index order) with a nonzero entry. Every
// construction built on top (supplements, quotient bases, cohomology
// representatives) is therefore reproducible.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "prettymodel/errors.hpp"

namespace pm {

using Rational = boost::multiprecision::mpq_rational;
using Vec = std::vector<Rational>;

inline std::string to_string(const Rational& q) { return q.str(); }

inline bool is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

inline Vec zero_vec(std::size_t n) { return Vec(n); }

inline Vec unit_vec(std::size_t n, std::size_t i) {
    Vec v(n);
    v.at(i) = 1;
    return v;
}

inline void axpy(Vec& y, const Rational& a, const Vec& x) {
    if (a == 0) return;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0) y[i] += a * x[i];
}

inline Vec scaled(Vec v, const Rational& a) {
    for (auto& x : v) x *= a;
    return v;
}

inline Vec operator+(Vec a, const Vec& b) {
    axpy(a, 1, b);
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    axpy(a, -1, b);
    return a;
}

inline Rational dot(const Vec& a, const Vec& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RatMatrix identity(std::size_t n) {
        RatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static RatMatrix from_rows(std::initializer_list<std::initializer_list<Rational>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r ? rows.begin()->size() : 0;
        RatMatrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw InputError("ragged matrix literal");
            std::size_t j = 0;
            for (const auto& x : row) m(i, j++) = x;
            ++i;
        }
        return m;
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    static RatMatrix from_columns(const std::vector<Vec>& columns, std::size_t rows) {
        RatMatrix m(rows, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != rows) throw InputError("column length does not match row count");
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Vec column(std::size_t c) const {
        Vec v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    Vec row(std::size_t r) const {
        return Vec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    }

    RatMatrix transpose() const {
        RatMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    Vec apply(const Vec& x) const {
        if (x.size() != cols_) throw InputError("vector length does not match matrix columns");
        Vec y(rows_);
        for (std::size_t c = 0; c < cols_; ++c) {
            if (x[c] == 0) continue;
            for (std::size_t r = 0; r < rows_; ++r) {
                const auto& e = (*this)(r, c);
                if (e != 0) y[r] += e * x[c];
            }
        }
        return y;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x == 0; });
    }

    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
        if (a.cols_ != b.rows_) throw InputError("matrix product dimension mismatch");
        RatMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const auto& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const auto& bkj = b(k, j);
                    if (bkj != 0) c(i, j) += aik * bkj;
                }
            }
        return c;
    }

    friend RatMatrix operator+(RatMatrix a, const RatMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix sum dimension mismatch");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }

    friend RatMatrix operator-(RatMatrix a, const RatMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix difference dimension mismatch");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
        return a;
    }

    friend RatMatrix operator*(const Rational& s, RatMatrix a) {
        for (auto& x : a.data_) x *= s;
        return a;
    }

    friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

struct Echelon {
    RatMatrix reduced;                 // reduced row echelon form
    std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

inline Echelon row_reduce(RatMatrix m) {
    Echelon out;
    std::size_t lead_row = 0;
    for (std::size_t c = 0; c < m.cols() && lead_row < m.rows(); ++c) {
        std::size_t p = lead_row;
        while (p < m.rows() && m(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != lead_row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(lead_row, j));
        Rational inv = 1 / m(lead_row, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(lead_row, j) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == lead_row || m(r, c) == 0) continue;
            Rational f = m(r, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (m(lead_row, j) != 0) m(r, j) -= f * m(lead_row, j);
        }
        out.pivots.push_back(c);
        ++lead_row;
    }
    out.reduced = std::move(m);
    return out;
}

inline std::size_t rank(const RatMatrix& m) { return row_reduce(m).pivots.size(); }

/// Basis of {v : M v = 0}; one vector per non-pivot column, with a 1 in that column.
inline std::vector<Vec> kernel_basis(const RatMatrix& m) {
    Echelon e = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : e.pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        Vec v(m.cols());
        v[f] = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Some v with M v = b, or nullopt when b is outside the column space.
inline std::optional<Vec> preimage(const RatMatrix& m, const Vec& b) {
    if (b.size() != m.rows())
        throw InputError("preimage: right-hand side has length " + std::to_string(b.size()) + ", expected " +
                         std::to_string(m.rows()));
    RatMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
        aug(r, m.cols()) = b[r];
    }
    Echelon e = row_reduce(std::move(aug));
    Vec v(m.cols());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
        if (e.pivots[r] == m.cols()) return std::nullopt;
        v[e.pivots[r]] = e.reduced(r, m.cols());
    }
    return v;
}

inline std::optional<RatMatrix> inverse(const RatMatrix& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    const std::size_t n = m.rows();
    RatMatrix aug(n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
        aug(r, n + r) = 1;
    }
    Echelon e = row_reduce(std::move(aug));
    if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
    RatMatrix inv(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) inv(r, c) = e.reduced(r, n + c);
    return inv;
}

/// Incrementally maintained echelon basis of a subspace of Q^n.
class SpanTracker {
public:
    explicit SpanTracker(std::size_t ambient) : ambient_(ambient) {}

    std::size_t ambient() const { return ambient_; }
    std::size_t size() const { return rows_.size(); }

    /// Adds v if it is independent of the current span; returns whether it was.
    bool add(const Vec& v) {
        Vec r = reduce(v);
        auto lead = leading(r);
        if (!lead) return false;
        Rational inv = 1 / r[*lead];
        for (auto& x : r) x *= inv;
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (rows_[i][*lead] != 0) axpy(rows_[i], -rows_[i][*lead], r);
        rows_.push_back(std::move(r));
        pivots_.push_back(*lead);
        return true;
    }

    bool contains(const Vec& v) const { return is_zero(reduce(v)); }

private:
    Vec reduce(Vec v) const {
        if (v.size() != ambient_) throw InputError("vector length does not match ambient dimension");
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (v[pivots_[i]] != 0) axpy(v, -v[pivots_[i]], rows_[i]);
        return v;
    }

    static std::optional<std::size_t> leading(const Vec& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != 0) return i;
        return std::nullopt;
    }

    std::size_t ambient_;
    std::vector<Vec> rows_;
    std::vector<std::size_t> pivots_;
};

/// Standard basis vectors completing the independent family `s` to a basis of
/// Q^ambient, chosen greedily in index order.
inline std::vector<Vec> complement_basis(const std::vector<Vec>& s, std::size_t ambient) {
    SpanTracker span(ambient);
    for (const auto& v : s) {
        if (v.size() != ambient) throw InputError("complement_basis: vector length does not match ambient dimension");
        if (!span.add(v)) throw InputError("complement_basis: input vectors are linearly dependent");
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < ambient && span.size() < ambient; ++i) {
        Vec e = unit_vec(ambient, i);
        if (span.add(e)) out.push_back(std::move(e));
    }
    return out;
}

/// Indices of the standard basis vectors returned by complement_basis.
inline std::vector<std::size_t> complement_indices(const std::vector<Vec>& s, std::size_t ambient) {
    std::vector<std::size_t> idx;
    for (const auto& e : complement_basis(s, ambient))
        for (std::size_t i = 0; i < ambient; ++i)
            if (e[i] != 0) {
                idx.push_back(i);
                break;
            }
    return idx;
}

/// Maximal independent subfamily, in order.
inline std::vector<Vec> independent_subset(const std::vector<Vec>& vs, std::size_t ambient) {
    SpanTracker span(ambient);
    std::vector<Vec> out;
    for (const auto& v : vs)
        if (span.add(v)) out.push_back(v);
    return out;
}

/// Coordinates of v in the independent family `basis`, or nullopt if v is outside its span.
inline std::optional<Vec> coordinates(const std::vector<Vec>& basis, const Vec& v) {
    return preimage(RatMatrix::from_columns(basis, v.size()), v);
}

} // namespace pm
