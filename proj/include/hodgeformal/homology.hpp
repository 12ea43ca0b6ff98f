#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "complex.hpp"
#include "exact.hpp"

namespace hodgeformal {

/// Boundary operator from k-chains to (k-1)-chains, entries in {-1, 0, +1}.
struct BoundaryOperator
{
    int degree = 0;
    Eigen::SparseMatrix<int> matrix;  // (#(k-1)-simplices) x (#k-simplices)
};

/// Real Betti numbers b_0..b_n.
struct BettiVector
{
    std::vector<int> values;

    int operator[](std::size_t k) const { return values.at(k); }
    std::size_t size() const { return values.size(); }
    bool operator==(const BettiVector&) const = default;

    long long euler_characteristic() const
    {
        long long chi = 0;
        for (std::size_t k = 0; k < values.size(); ++k)
            chi += (k % 2 == 0 ? 1 : -1) * values[k];
        return chi;
    }
};

enum class RankMethod
{
    exact,
    floating,
};

/// boundary(sigma) = sum_i (-1)^i (sigma with vertex i removed).
inline BoundaryOperator boundary_matrix(const SimplicialComplex& K, int k)
{
    if (k < 1 || k > K.dimension())
        throw std::out_of_range("boundary_matrix: degree out of range");
    const auto& simplices = K.simplices(k);
    std::vector<Eigen::Triplet<int>> trips;
    trips.reserve(simplices.size() * static_cast<std::size_t>(k + 1));
    for (std::size_t j = 0; j < simplices.size(); ++j)
        for (std::size_t i = 0; i < simplices[j].size(); ++i)
        {
            const auto row = K.index_of(detail::drop_vertex(simplices[j], i));
            trips.emplace_back(static_cast<int>(row), static_cast<int>(j), i % 2 == 0 ? 1 : -1);
        }
    BoundaryOperator out;
    out.degree = k;
    out.matrix.resize(static_cast<Eigen::Index>(K.count(k - 1)), static_cast<Eigen::Index>(simplices.size()));
    out.matrix.setFromTriplets(trips.begin(), trips.end());
    return out;
}

/// Coboundary d_k : C^k -> C^{k+1} (transpose of the boundary in degree k+1).
inline Eigen::SparseMatrix<double> coboundary(const SimplicialComplex& K, int k)
{
    if (k < 0 || k >= K.dimension())
        return Eigen::SparseMatrix<double>(static_cast<Eigen::Index>(K.count(k + 1)),
                                           static_cast<Eigen::Index>(K.count(k)));
    Eigen::SparseMatrix<double> d = boundary_matrix(K, k + 1).matrix.cast<double>().transpose();
    d.makeCompressed();
    return d;
}

/// Relative singular-value threshold for numerical rank.
inline constexpr double kRankThreshold = 1e-8;

namespace detail {

/**
 * Column reduction in floating point with lowest-row pivots. Entries whose
 * magnitude falls to kRankThreshold * max|M| or below are treated as zero.
 */
inline int threshold_elimination_rank(const Eigen::SparseMatrix<double>& M)
{
    double scale = 0.0;
    for (int j = 0; j < M.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(M, j); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    if (scale == 0.0)
        return 0;
    const double drop = kRankThreshold * scale;

    using Col = std::vector<std::pair<int, double>>;
    std::vector<Col> reduced(static_cast<std::size_t>(M.cols()));
    std::vector<int> pivot_col(static_cast<std::size_t>(M.rows()), -1);
    int rank = 0;
    Col tmp;
    for (int j = 0; j < M.outerSize(); ++j)
    {
        Col col;
        for (Eigen::SparseMatrix<double>::InnerIterator it(M, j); it; ++it)
            if (std::abs(it.value()) > drop)
                col.emplace_back(static_cast<int>(it.row()), it.value());
        while (!col.empty())
        {
            const int p = pivot_col[static_cast<std::size_t>(col.back().first)];
            if (p < 0)
                break;
            const Col& pc = reduced[static_cast<std::size_t>(p)];
            const double f = col.back().second / pc.back().second;
            tmp.clear();
            std::size_t a = 0, b = 0;
            while (a < col.size() || b < pc.size())
            {
                if (b == pc.size() || (a < col.size() && col[a].first < pc[b].first))
                    tmp.push_back(col[a++]);
                else if (a == col.size() || pc[b].first < col[a].first)
                {
                    tmp.emplace_back(pc[b].first, -f * pc[b].second);
                    ++b;
                }
                else
                {
                    const double v = col[a].second - f * pc[b].second;
                    if (std::abs(v) > drop)
                        tmp.emplace_back(col[a].first, v);
                    ++a;
                    ++b;
                }
            }
            // The pivot row cancels exactly by construction.
            if (!tmp.empty() && tmp.back().first == pc.back().first)
                tmp.pop_back();
            std::swap(col, tmp);
        }
        if (col.empty())
            continue;
        pivot_col[static_cast<std::size_t>(col.back().first)] = j;
        reduced[static_cast<std::size_t>(j)] = std::move(col);
        ++rank;
    }
    return rank;
}

}  // namespace detail

/**
 * Numerical rank. Small matrices use a full SVD thresholded at
 * kRankThreshold * sigma_max; larger ones use floating-point threshold
 * elimination with the same relative cutoff.
 */
inline int floating_rank(const Eigen::SparseMatrix<double>& M)
{
    if (M.rows() == 0 || M.cols() == 0)
        return 0;
    const double r = static_cast<double>(M.rows());
    const double c = static_cast<double>(M.cols());
    if (r * c * std::min(r, c) > 2.0e9)
        return detail::threshold_elimination_rank(M);
    Eigen::MatrixXd D(M);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(D);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > kRankThreshold * s(0))
            ++rank;
    return rank;
}

/**
 * rank(boundary_k) for k = 0..n+1 (the ends are zero).
 *
 * The exact path reduces from the top degree down and skips every column
 * already known to be a pivot row one degree up, since such a column
 * always reduces to zero.
 */
inline std::vector<int> boundary_ranks(const SimplicialComplex& K, RankMethod method = RankMethod::exact)
{
    const int n = K.dimension();
    std::vector<int> ranks(static_cast<std::size_t>(std::max(n + 2, 1)), 0);
    if (method == RankMethod::floating)
    {
        for (int k = 1; k <= n; ++k)
            ranks[static_cast<std::size_t>(k)] = floating_rank(boundary_matrix(K, k).matrix.cast<double>());
        return ranks;
    }
    std::vector<char> skip;
    for (int k = n; k >= 1; --k)
    {
        const auto M = exact::IntegerMatrix::from_eigen(boundary_matrix(K, k).matrix);
        std::vector<char> next_skip(K.count(k - 1), 0);
        if (static_cast<long long>(M.rows) * M.cols <= exact::kDenseEntryLimit)
        {
            ranks[static_cast<std::size_t>(k)] = exact::dense_rank(M);
            next_skip.clear();
        }
        else
        {
            exact::ReductionOptions opt;
            opt.skip = skip;
            const auto red = exact::reduce(M, opt);
            ranks[static_cast<std::size_t>(k)] = red.rank;
            for (int low : red.low)
                if (low >= 0)
                    next_skip[static_cast<std::size_t>(low)] = 1;
        }
        skip = std::move(next_skip);
    }
    return ranks;
}

/// b_k = dim ker(boundary_k) - rank(boundary_{k+1}).
inline BettiVector betti_numbers(const SimplicialComplex& K, RankMethod method = RankMethod::exact)
{
    const int n = K.dimension();
    BettiVector b;
    if (n < 0)
        return b;
    const auto ranks = boundary_ranks(K, method);
    for (int k = 0; k <= n; ++k)
    {
        const auto kk = static_cast<std::size_t>(k);
        b.values.push_back(static_cast<int>(K.count(k)) - ranks[kk] - ranks[kk + 1]);
    }
    return b;
}

/// b_k == b_{n-k} for all k. Requires a closed orientable pseudomanifold.
inline bool poincare_duality_check(const SimplicialComplex& K, const BettiVector& b)
{
    if (!is_closed_pseudomanifold(K))
        throw std::invalid_argument("poincare_duality_check: complex is not a closed pseudomanifold");
    if (!orient(K))
        throw std::invalid_argument("poincare_duality_check: complex is not orientable");
    const std::size_t n = b.size() - 1;
    for (std::size_t k = 0; k <= n; ++k)
        if (b[k] != b[n - k])
            return false;
    return true;
}

inline bool poincare_duality_check(const SimplicialComplex& K)
{
    return poincare_duality_check(K, betti_numbers(K));
}

}  // namespace hodgeformal
