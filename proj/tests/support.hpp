#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "prettymodel/prettymodel.hpp"

#ifndef PRETTYMODEL_CORPUS_DIR
#define PRETTYMODEL_CORPUS_DIR "data/corpus"
#endif

namespace pmtest {

using namespace pm;
using BigInt = boost::multiprecision::cpp_int;

// Fraction-free Bareiss elimination over the integers after clearing
// denominators row by row. Shares no code with the library's row reduction.
inline std::size_t oracle_rank(const RatMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        BigInt l = 1;
        for (std::size_t j = 0; j < cols; ++j) {
            BigInt den(boost::multiprecision::denominator(m(i, j)).str());
            l = boost::multiprecision::lcm(l, den);
        }
        for (std::size_t j = 0; j < cols; ++j) {
            BigInt num(boost::multiprecision::numerator(m(i, j)).str());
            BigInt den(boost::multiprecision::denominator(m(i, j)).str());
            a[i][j] = num * (l / den);
        }
    }
    std::size_t r = 0;
    BigInt prev = 1;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return r;
}

/// dim ker d_p - rank d_{p-1}, with every rank from the oracle.
inline std::size_t oracle_cohomology_dim(const CochainComplex& c, int p) {
    const GradedMap& d = c.differential();
    std::size_t n = c.space().dim(p);
    std::size_t out_rank = n == 0 ? 0 : oracle_rank(d.block(p));
    std::size_t in_rank = c.space().dim(p - 1) == 0 || n == 0 ? 0 : oracle_rank(d.block(p - 1));
    return n - out_rank - in_rank;
}

inline std::vector<std::size_t> oracle_dims(const CochainComplex& c, int from, int to) {
    std::vector<std::size_t> out;
    for (int p = from; p <= to; ++p) out.push_back(oracle_cohomology_dim(c, p));
    return out;
}

inline std::vector<std::size_t> dims_range(const Cohomology& h, int from, int to) {
    std::vector<std::size_t> out;
    for (int p = from; p <= to; ++p) out.push_back(h.dim(p));
    return out;
}

inline std::string corpus_path(const std::string& name) { return std::string(PRETTYMODEL_CORPUS_DIR) + "/" + name; }

inline std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(PRETTYMODEL_CORPUS_DIR))
        if (e.path().extension() == ".cdga") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline CdgaDocument corpus(const std::string& name) { return parse(slurp(corpus_path(name + ".cdga"))); }

// Small fixtures built directly, without the document format.

inline CdgaTable ground() { return CdgaBuilder().basis("1", 0).unit("1").build(); }

inline CdgaTable sphere(int d, const std::string& x = "x") {
    return CdgaBuilder().basis("1", 0).basis(x, d).unit("1").build();
}

/// Q[a]/a^{k+1} with |a| = deg; labels a, a2, a3, ...
inline CdgaTable truncated_poly(int deg, int k, const std::string& a = "a") {
    CdgaBuilder b;
    b.basis("1", 0).unit("1");
    auto lab = [&](int i) { return i == 1 ? a : a + std::to_string(i); };
    for (int i = 1; i <= k; ++i) b.basis(lab(i), i * deg);
    for (int i = 1; i <= k; ++i)
        for (int j = 1; i + j <= k; ++j) b.mult(lab(i), lab(j), 1, lab(i + j));
    return b.build();
}

inline CdgaTable cp(int k) { return truncated_poly(2, k); }

/// Direct sum of two modules over the same algebra.
inline DgModule direct_sum(const DgModule& m, const DgModule& n, const std::string& tag = "'") {
    const CdgaTable& a = m.algebra();
    std::vector<BasisElement> basis = m.space().basis();
    for (auto e : n.space().basis()) basis.push_back({e.label + tag, e.degree});
    GradedSpace space(basis);
    const std::size_t dm = m.dim(), dn = n.dim(), d = dm + dn;
    std::vector<std::size_t> pos(d);
    for (std::size_t i = 0; i < dm; ++i) pos[i] = space.index_of(m.space().label(i));
    for (std::size_t i = 0; i < dn; ++i) pos[dm + i] = space.index_of(n.space().label(i) + tag);
    RatMatrix diff(d, d);
    std::vector<SparseVec> action(a.dim() * d);
    for (std::size_t i = 0; i < dm; ++i) {
        for (std::size_t r = 0; r < dm; ++r) diff(pos[r], pos[i]) = m.differential().matrix()(r, i);
        for (std::size_t x = 0; x < a.dim(); ++x)
            for (auto [k, c] : m.act(x, i)) action[x * d + pos[i]].emplace_back(pos[k], c);
    }
    for (std::size_t i = 0; i < dn; ++i) {
        for (std::size_t r = 0; r < dn; ++r) diff(pos[dm + r], pos[dm + i]) = n.differential().matrix()(r, i);
        for (std::size_t x = 0; x < a.dim(); ++x)
            for (auto [k, c] : n.act(x, i)) action[x * d + pos[dm + i]].emplace_back(pos[dm + k], c);
    }
    return DgModule(a, space, std::move(diff), std::move(action));
}

struct Random {
    std::mt19937_64 gen;
    explicit Random(std::uint64_t seed) : gen(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
    bool coin() { return uniform(0, 1) == 1; }
    Rational scalar(int range = 3) { return Rational(uniform(-range, range)); }
    Rational nonzero(int range = 3) {
        int v = 0;
        while (v == 0) v = uniform(-range, range);
        return v;
    }

    /// Connected CDGA with per-degree dims <= 3 and top degree <= max_top.
    CdgaTable algebra(int max_top = 8) {
        for (;;) {
            CdgaTable a = factor(max_top);
            if (a.top_degree() < max_top && coin()) {
                CdgaTable b = factor(max_top - a.top_degree());
                a = tensor_product(a, b).algebra;
            }
            bool small = a.top_degree() <= max_top;
            for (int p : a.space().degrees()) small = small && a.dim(p) <= 3;
            if (small) return a;
        }
    }

    CdgaTable factor(int max_top) {
        static int counter = 0;
        std::string tag = "[" + std::to_string(++counter) + "]";
        int kind = uniform(0, 3);
        if (max_top < 2) return ground();
        if (kind == 0) return sphere(uniform(2, std::min(max_top, 5)), "x" + tag);
        if (kind == 1) {
            int k = uniform(1, std::max(1, max_top / 2));
            return truncated_poly(2, std::min(k, 3), "a" + tag);
        }
        if (kind == 2 && max_top >= 3) {
            int d = uniform(1, std::min(3, max_top - 1));
            return contractible_pair("u" + tag, "v" + tag, d);
        }
        return sphere(2 * uniform(1, (std::min(max_top, 5) + 1) / 2) - 1, "y" + tag);
    }

    /// Modules over a: shifted free modules, shifted duals, and sums of them.
    DgModule module(const CdgaTable& a, int min_degree = 1, int max_degree = 8) {
        for (;;) {
            DgModule m = piece(a, min_degree, max_degree);
            if (coin()) m = direct_sum(m, piece(a, min_degree, max_degree));
            bool ok = !m.space().empty() && m.space().min_degree() >= min_degree;
            for (int p : m.space().degrees()) ok = ok && m.space().dim(p) <= 3;
            if (ok) return m;
        }
    }

    DgModule piece(const CdgaTable& a, int min_degree, int max_degree) {
        int top = a.top_degree();
        if (coin() || top + min_degree > max_degree) {
            int g = uniform(min_degree, std::max(min_degree, max_degree - top));
            return suspend(self_module(a), -g);
        }
        int n = uniform(top + min_degree, std::max(top + min_degree, max_degree));
        return shifted_dual_module(a, n);
    }

    RatMatrix combination(const std::vector<RatMatrix>& basis, std::size_t rows, std::size_t cols) {
        RatMatrix m(rows, cols);
        for (const auto& b : basis) m = m + scalar(2) * b;
        return m;
    }

    /// A random degree-0 module map q -> r drawn from the space of all of them.
    DgModuleMap module_map(const DgModule& q, const DgModule& r) {
        auto basis = module_maps(q, r);
        return DgModuleMap(q, r, combination(basis, r.dim(), q.dim()));
    }
};

} // namespace pmtest
