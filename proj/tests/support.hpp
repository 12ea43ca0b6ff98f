#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <hodgeformal/hodgeformal.hpp>

namespace testing {

using namespace hodgeformal;

inline std::string data_path(const std::string& rel) { return std::string(HODGEFORMAL_DATA_DIR) + "/" + rel; }

inline Cochain random_cochain(const SimplicialComplex& K, int k, Rng& rng)
{
    Cochain c = Cochain::zero(K, k);
    for (Eigen::Index i = 0; i < c.values.size(); ++i)
        c.values(i) = rng.uniform(-1.0, 1.0);
    return c;
}

/// Small complexes that keep every test in this suite fast.
inline std::vector<SimplicialComplex> small_zoo()
{
    return {sphere(1), sphere(2), sphere(3), torus(1), torus(2), surface(0), surface(2),
            product_complex(sphere(2), sphere(1)), io::load_complex(data_path("rp2_6.json"))};
}

/// Rank by Gaussian elimination over Q on a dense copy. Independent of the
/// library's fraction-free sparse reduction.
inline int rational_rank_oracle(const Eigen::MatrixXi& D)
{
    std::vector<std::vector<boost::multiprecision::cpp_rational>> a(static_cast<std::size_t>(D.rows()),
                                             std::vector<boost::multiprecision::cpp_rational>(static_cast<std::size_t>(D.cols())));
    for (Eigen::Index i = 0; i < D.rows(); ++i)
        for (Eigen::Index j = 0; j < D.cols(); ++j)
            a[i][j] = D(i, j);
    int rank = 0;
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    for (std::size_t c = 0; c < cols && static_cast<std::size_t>(rank) < rows; ++c)
    {
        std::size_t p = rank;
        while (p < rows && a[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r)
        {
            if (a[r][c] == 0)
                continue;
            const boost::multiprecision::cpp_rational f = a[r][c] / a[rank][c];
            for (std::size_t j = c; j < cols; ++j)
                a[r][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}


/// Dense coboundary d_k : C^k -> C^{k+1} assembled straight from the simplex
/// lists (an empty matrix at the top degree).
inline Eigen::MatrixXd dense_coboundary(const SimplicialComplex& K, int k)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K.count(k + 1)),
                                              static_cast<Eigen::Index>(K.count(k)));
    if (k + 1 > K.dimension())
        return d;
    const auto& top = K.simplices(k + 1);
    for (std::size_t j = 0; j < top.size(); ++j)
        for (std::size_t i = 0; i < top[j].size(); ++i)
        {
            Simplex face = top[j];
            face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(K.index_of(face))) = i % 2 ? -1.0 : 1.0;
        }
    return d;
}

/// Harmonic space as ker d_k intersected with ker(d_{k-1}^T W_k), found by
/// SVD of the stacked constraints. Columns are not orthonormalized.
inline Eigen::MatrixXd harmonic_space_oracle(const SimplicialComplex& K, const MetricWeights& w, int k)
{
    const auto nk = static_cast<Eigen::Index>(K.count(k));
    Eigen::MatrixXd A = dense_coboundary(K, k);
    if (k > 0)
    {
        const Eigen::MatrixXd C = dense_coboundary(K, k - 1).transpose() * w[k].asDiagonal();
        Eigen::MatrixXd S(A.rows() + C.rows(), nk);
        S << A, C;
        A = S;
    }
    if (A.rows() == 0)
        return Eigen::MatrixXd::Identity(nk, nk);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        rank += s(i) > 1e-10 * s(0);
    return svd.matrixV().rightCols(nk - rank);
}

/// Weighted orthogonal projector H (H^T W H)^{-1} H^T W.
inline Eigen::MatrixXd projector_oracle(const Eigen::MatrixXd& H, const Eigen::VectorXd& w)
{
    if (H.cols() == 0)
        return Eigen::MatrixXd::Zero(H.rows(), H.rows());
    const Eigen::MatrixXd G = H.transpose() * w.asDiagonal() * H;
    return H * G.ldlt().solve(H.transpose() * w.asDiagonal());
}

}  // namespace testing
