#pragma once

// Exact linear algebra over Q for integer matrices.
//
// Every elimination here is fraction-free: a row/column update is
// x <- p*x - a*y with integer p, a, followed by division by the content gcd.
// Work starts in checked 64-bit arithmetic and is redone in arbitrary
// precision if any intermediate would overflow.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>
#include <boost/multiprecision/cpp_int.hpp>

namespace hodgeformal::exact {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct OverflowError : std::overflow_error
{
    using std::overflow_error::overflow_error;
};

namespace detail {

template <class T>
struct Arith;

template <>
struct Arith<long long>
{
    static long long mul(long long a, long long b)
    {
        long long r;
        if (__builtin_mul_overflow(a, b, &r))
            throw OverflowError("int64 overflow in exact elimination");
        return r;
    }
    static long long sub(long long a, long long b)
    {
        long long r;
        if (__builtin_sub_overflow(a, b, &r))
            throw OverflowError("int64 overflow in exact elimination");
        return r;
    }
    static long long abs(long long a)
    {
        if (a == INT64_MIN)
            throw OverflowError("int64 overflow in exact elimination");
        return a < 0 ? -a : a;
    }
    static long long gcd(long long a, long long b) { return std::gcd(abs(a), abs(b)); }
};

template <>
struct Arith<BigInt>
{
    static BigInt mul(const BigInt& a, const BigInt& b) { return a * b; }
    static BigInt sub(const BigInt& a, const BigInt& b) { return a - b; }
    static BigInt abs(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }
    static BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }
};

}  // namespace detail

/// Sparse vector with strictly increasing indices and nonzero values.
template <class T>
struct SparseVector
{
    std::vector<int> index;
    std::vector<T> value;

    bool empty() const { return index.empty(); }
    int low() const { return index.back(); }
    const T& low_value() const { return value.back(); }

    T coefficient(int i) const
    {
        auto it = std::lower_bound(index.begin(), index.end(), i);
        if (it == index.end() || *it != i)
            return T(0);
        return value[static_cast<std::size_t>(it - index.begin())];
    }
};

/// x <- p*x - a*y
template <class T>
void combine(SparseVector<T>& x, const T& p, const SparseVector<T>& y, const T& a)
{
    using A = detail::Arith<T>;
    SparseVector<T> out;
    out.index.reserve(x.index.size() + y.index.size());
    out.value.reserve(x.index.size() + y.index.size());
    std::size_t i = 0, j = 0;
    while (i < x.index.size() || j < y.index.size())
    {
        if (j == y.index.size() || (i < x.index.size() && x.index[i] < y.index[j]))
        {
            out.index.push_back(x.index[i]);
            out.value.push_back(A::mul(p, x.value[i]));
            ++i;
        }
        else if (i == x.index.size() || y.index[j] < x.index[i])
        {
            out.index.push_back(y.index[j]);
            out.value.push_back(A::sub(T(0), A::mul(a, y.value[j])));
            ++j;
        }
        else
        {
            T v = A::sub(A::mul(p, x.value[i]), A::mul(a, y.value[j]));
            if (v != 0)
            {
                out.index.push_back(x.index[i]);
                out.value.push_back(std::move(v));
            }
            ++i;
            ++j;
        }
    }
    x = std::move(out);
}

template <class T>
T content(const SparseVector<T>& x, T g = T(0))
{
    for (const auto& v : x.value)
    {
        g = detail::Arith<T>::gcd(g, v);
        if (g == 1)
            break;
    }
    return g;
}

template <class T>
void divide(SparseVector<T>& x, const T& g)
{
    if (g == 0 || g == 1)
        return;
    for (auto& v : x.value)
        v /= g;
}

/// Column-major integer matrix.
struct IntegerMatrix
{
    int rows = 0;
    int cols = 0;
    std::vector<SparseVector<long long>> columns;

    static IntegerMatrix from_eigen(const Eigen::SparseMatrix<int>& M)
    {
        IntegerMatrix out;
        out.rows = static_cast<int>(M.rows());
        out.cols = static_cast<int>(M.cols());
        out.columns.resize(static_cast<std::size_t>(M.cols()));
        for (int j = 0; j < M.outerSize(); ++j)
        {
            auto& col = out.columns[static_cast<std::size_t>(j)];
            for (Eigen::SparseMatrix<int>::InnerIterator it(M, j); it; ++it)
            {
                if (it.value() == 0)
                    continue;
                col.index.push_back(static_cast<int>(it.row()));
                col.value.push_back(it.value());
            }
        }
        return out;
    }

    IntegerMatrix transpose() const
    {
        IntegerMatrix out;
        out.rows = cols;
        out.cols = rows;
        out.columns.resize(static_cast<std::size_t>(rows));
        for (int j = 0; j < cols; ++j)
        {
            const auto& c = columns[static_cast<std::size_t>(j)];
            for (std::size_t t = 0; t < c.index.size(); ++t)
            {
                auto& dst = out.columns[static_cast<std::size_t>(c.index[t])];
                dst.index.push_back(j);
                dst.value.push_back(c.value[t]);
            }
        }
        return out;
    }

    /// Keep only the listed columns, in the given order.
    IntegerMatrix select_columns(const std::vector<int>& keep) const
    {
        IntegerMatrix out;
        out.rows = rows;
        out.cols = static_cast<int>(keep.size());
        for (int j : keep)
            out.columns.push_back(columns[static_cast<std::size_t>(j)]);
        return out;
    }
};

struct ReductionOptions
{
    /// Record a kernel basis (columns that reduce to zero, with their
    /// accumulated combinations). Disables column skipping.
    bool track_kernel = false;
    /// Columns known to reduce to zero; they are not processed.
    std::vector<char> skip;
};

struct ReductionResult
{
    int rank = 0;
    /// Lowest nonzero row of each reduced column, -1 when the column is zero.
    std::vector<int> low;
    /// Integer kernel vectors (indexed by column), present when requested.
    std::vector<SparseVector<BigInt>> kernel;
};

namespace detail {

template <class T>
SparseVector<T> convert(const SparseVector<long long>& x)
{
    SparseVector<T> out;
    out.index = x.index;
    out.value.reserve(x.value.size());
    for (auto v : x.value)
        out.value.emplace_back(v);
    return out;
}

template <class T>
SparseVector<BigInt> to_big(const SparseVector<T>& x)
{
    SparseVector<BigInt> out;
    out.index = x.index;
    for (const auto& v : x.value)
        out.value.emplace_back(v);
    return out;
}

template <class T>
ReductionResult reduce_impl(const IntegerMatrix& M, const ReductionOptions& opt)
{
    using A = Arith<T>;
    const auto ncols = static_cast<std::size_t>(M.cols);
    ReductionResult res;
    res.low.assign(ncols, -1);

    std::vector<SparseVector<T>> R(ncols);
    std::vector<SparseVector<T>> V(opt.track_kernel ? ncols : 0);
    std::vector<int> pivot_col(static_cast<std::size_t>(M.rows), -1);

    for (std::size_t j = 0; j < ncols; ++j)
    {
        if (!opt.track_kernel && !opt.skip.empty() && opt.skip[j])
            continue;
        auto col = convert<T>(M.columns[j]);
        SparseVector<T> v;
        if (opt.track_kernel)
        {
            v.index.push_back(static_cast<int>(j));
            v.value.push_back(T(1));
        }
        while (!col.empty())
        {
            const int p = pivot_col[static_cast<std::size_t>(col.low())];
            if (p < 0)
                break;
            const auto& pc = R[static_cast<std::size_t>(p)];
            const T& b = pc.low_value();
            const T& a = col.low_value();
            const T g = A::gcd(a, b);
            const T pb = b / g;
            const T pa = a / g;
            combine(col, pb, pc, pa);
            if (opt.track_kernel)
                combine(v, pb, V[static_cast<std::size_t>(p)], pa);
            T c = content(col);
            if (opt.track_kernel)
                c = content(v, c);
            divide(col, c);
            if (opt.track_kernel)
                divide(v, c);
        }
        if (col.empty())
        {
            if (opt.track_kernel)
            {
                divide(v, content(v));
                res.kernel.push_back(to_big(v));
            }
            continue;
        }
        res.low[j] = col.low();
        pivot_col[static_cast<std::size_t>(col.low())] = static_cast<int>(j);
        ++res.rank;
        R[j] = std::move(col);
        if (opt.track_kernel)
            V[j] = std::move(v);
    }
    return res;
}

template <class T>
int dense_rank_impl(const IntegerMatrix& M)
{
    using A = Arith<T>;
    // Rows of the transpose are the columns of M; rank is unchanged.
    const auto nr = static_cast<std::size_t>(M.cols);
    const auto nc = static_cast<std::size_t>(M.rows);
    std::vector<std::vector<T>> a(nr, std::vector<T>(nc, T(0)));
    for (std::size_t j = 0; j < nr; ++j)
    {
        const auto& c = M.columns[j];
        for (std::size_t t = 0; t < c.index.size(); ++t)
            a[j][static_cast<std::size_t>(c.index[t])] = T(c.value[t]);
    }

    int rank = 0;
    std::size_t top = 0;
    for (std::size_t col = 0; col < nc && top < nr; ++col)
    {
        // Smallest-magnitude pivot keeps the fraction-free updates small.
        std::size_t best = nr;
        for (std::size_t r = top; r < nr; ++r)
            if (a[r][col] != 0 && (best == nr || A::abs(a[r][col]) < A::abs(a[best][col])))
                best = r;
        if (best == nr)
            continue;
        std::swap(a[top], a[best]);
        const T piv = a[top][col];
        for (std::size_t r = top + 1; r < nr; ++r)
        {
            if (a[r][col] == 0)
                continue;
            const T g = A::gcd(piv, a[r][col]);
            const T pp = piv / g;
            const T pr = a[r][col] / g;
            T cont(0);
            for (std::size_t c = col; c < nc; ++c)
            {
                a[r][c] = A::sub(A::mul(pp, a[r][c]), A::mul(pr, a[top][c]));
                if (a[r][c] != 0 && cont != 1)
                    cont = A::gcd(cont, a[r][c]);
            }
            if (cont > 1)
                for (std::size_t c = col; c < nc; ++c)
                    a[r][c] /= cont;
        }
        ++top;
        ++rank;
    }
    return rank;
}

}  // namespace detail

/**
 * Column reduction with lowest-row pivots (the standard boundary-matrix
 * reduction), carried out over Q with fraction-free integer updates.
 */
inline ReductionResult reduce(const IntegerMatrix& M, const ReductionOptions& opt = {})
{
    try
    {
        return detail::reduce_impl<long long>(M, opt);
    }
    catch (const OverflowError&)
    {
        return detail::reduce_impl<BigInt>(M, opt);
    }
}

/// Dense fraction-free Gaussian elimination.
inline int dense_rank(const IntegerMatrix& M)
{
    try
    {
        return detail::dense_rank_impl<long long>(M);
    }
    catch (const OverflowError&)
    {
        return detail::dense_rank_impl<BigInt>(M);
    }
}

/// Matrices with at most this many entries use dense elimination.
inline constexpr long long kDenseEntryLimit = 1'000'000;

inline int rank(const IntegerMatrix& M)
{
    if (M.rows == 0 || M.cols == 0)
        return 0;
    if (static_cast<long long>(M.rows) * M.cols <= kDenseEntryLimit)
        return dense_rank(M);
    return reduce(M).rank;
}

/// Integer basis of the right kernel {x : M x = 0}.
inline std::vector<SparseVector<BigInt>> kernel_basis(const IntegerMatrix& M)
{
    ReductionOptions opt;
    opt.track_kernel = true;
    return reduce(M, opt).kernel;
}

struct Inertia
{
    int positive = 0;
    int negative = 0;
    int zero = 0;
};

/**
 * Inertia of a symmetric rational matrix by congruence diagonalization
 * (Sylvester's law). A zero diagonal with a nonzero off-diagonal entry
 * a_ij is handled by the congruence e_i <- e_i + e_j, which puts 2*a_ij on
 * the diagonal.
 */
inline Inertia inertia(std::vector<std::vector<Rational>> a)
{
    const std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n)
            throw std::invalid_argument("inertia: matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (a[i][j] != a[j][i])
                throw std::invalid_argument("inertia: matrix is not symmetric");

    Inertia out;
    std::vector<char> done(n, 0);
    for (std::size_t step = 0; step < n; ++step)
    {
        std::size_t p = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && a[i][i] != 0)
            {
                p = i;
                break;
            }
        if (p == n)
        {
            std::size_t pi = n, pj = n;
            for (std::size_t i = 0; i < n && pi == n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (!done[i] && !done[j] && a[i][j] != 0)
                    {
                        pi = i;
                        pj = j;
                        break;
                    }
            if (pi == n)
                break;
            // row/column i += row/column j
            for (std::size_t k = 0; k < n; ++k)
                a[pi][k] += a[pj][k];
            for (std::size_t k = 0; k < n; ++k)
                a[k][pi] += a[k][pj];
            p = pi;
        }
        const Rational d = a[p][p];
        (d > 0 ? out.positive : out.negative) += 1;
        done[p] = 1;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (done[i] || a[i][p] == 0)
                continue;
            const Rational f = a[i][p] / d;
            for (std::size_t k = 0; k < n; ++k)
                if (!done[k])
                    a[i][k] -= f * a[p][k];
        }
        for (std::size_t k = 0; k < n; ++k)
            if (!done[k])
                a[k][p] = 0;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!done[i])
            ++out.zero;
    return out;
}

/// Rank of a rational matrix by Gaussian elimination.
inline int rational_rank(std::vector<std::vector<Rational>> a)
{
    if (a.empty())
        return 0;
    const std::size_t nr = a.size();
    const std::size_t nc = a.front().size();
    std::size_t top = 0;
    for (std::size_t c = 0; c < nc && top < nr; ++c)
    {
        std::size_t p = top;
        while (p < nr && a[p][c] == 0)
            ++p;
        if (p == nr)
            continue;
        std::swap(a[top], a[p]);
        for (std::size_t r = top + 1; r < nr; ++r)
        {
            if (a[r][c] == 0)
                continue;
            const Rational f = a[r][c] / a[top][c];
            for (std::size_t k = c; k < nc; ++k)
                a[r][k] -= f * a[top][k];
        }
        ++top;
    }
    return static_cast<int>(top);
}

}  // namespace hodgeformal::exact
