#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "complex.hpp"
#include "eigensolver.hpp"
#include "homology.hpp"
#include "random.hpp"

namespace hodgeformal {

/**
 * Diagonal inner product on cochains: one strictly positive weight per
 * simplex, for every degree.
 */
struct MetricWeights
{
    std::vector<Eigen::VectorXd> by_degree;

    const Eigen::VectorXd& operator[](int k) const { return by_degree.at(static_cast<std::size_t>(k)); }
    Eigen::VectorXd& operator[](int k) { return by_degree.at(static_cast<std::size_t>(k)); }

    void validate(const SimplicialComplex& K) const
    {
        if (by_degree.size() != static_cast<std::size_t>(K.dimension() + 1))
            throw std::invalid_argument("weights: one vector per degree is required");
        for (int k = 0; k <= K.dimension(); ++k)
        {
            const auto& w = (*this)[k];
            if (static_cast<std::size_t>(w.size()) != K.count(k))
                throw std::invalid_argument("weights: length mismatch in degree " + std::to_string(k));
            for (Eigen::Index i = 0; i < w.size(); ++i)
                if (!(w(i) > 0.0) || !std::isfinite(w(i)))
                    throw std::invalid_argument("weights: entries must be finite and strictly positive");
        }
    }

    /// Multiply every weight of every degree by `factor`.
    MetricWeights scaled(double factor) const
    {
        MetricWeights out = *this;
        for (auto& w : out.by_degree)
            w *= factor;
        return out;
    }
};

inline MetricWeights unit_weights(const SimplicialComplex& K)
{
    MetricWeights w;
    for (int k = 0; k <= K.dimension(); ++k)
        w.by_degree.push_back(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(K.count(k))));
    return w;
}

/// Independent log-uniform weights on [lo, hi] for every simplex.
inline MetricWeights random_weights(const SimplicialComplex& K, std::uint64_t seed, double lo = 1e-2, double hi = 1e2)
{
    Rng rng(seed);
    MetricWeights w;
    for (int k = 0; k <= K.dimension(); ++k)
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(K.count(k)));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = rng.log_uniform(lo, hi);
        w.by_degree.push_back(std::move(v));
    }
    return w;
}

inline double inner(const Eigen::VectorXd& w, const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    return (w.array() * x.array() * y.array()).sum();
}

inline double norm(const Eigen::VectorXd& w, const Eigen::VectorXd& x)
{
    return std::sqrt(inner(w, x, x));
}

inline double inner(const MetricWeights& w, const Cochain& a, const Cochain& b)
{
    if (a.degree != b.degree)
        throw std::invalid_argument("inner: degree mismatch");
    return inner(w[a.degree], a.values, b.values);
}

inline double norm(const MetricWeights& w, const Cochain& a)
{
    return norm(w[a.degree], a.values);
}

namespace detail {

inline Eigen::SparseMatrix<double> diagonal(const Eigen::VectorXd& d)
{
    Eigen::SparseMatrix<double> D(d.size(), d.size());
    D.reserve(Eigen::VectorXi::Ones(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        D.insert(i, i) = d(i);
    D.makeCompressed();
    return D;
}

inline void check_degree(const SimplicialComplex& K, int k)
{
    if (k < 0 || k > K.dimension())
        throw std::out_of_range("degree " + std::to_string(k) + " out of range");
}

}  // namespace detail

/**
 * Symmetric form of the weighted Laplacian, L_k = W^{1/2} Delta_k W^{-1/2}.
 *
 * With A = W_{k+1}^{1/2} d_k W_k^{-1/2} and B = W_k^{1/2} d_{k-1} W_{k-1}^{-1/2}
 * this is A^T A + B B^T, so it is symmetric PSD by construction and has the
 * same spectrum as Delta_k.
 */
inline Eigen::SparseMatrix<double> symmetric_laplacian(const SimplicialComplex& K, const MetricWeights& w, int k)
{
    detail::check_degree(K, k);
    const auto n = static_cast<Eigen::Index>(K.count(k));
    Eigen::SparseMatrix<double> L(n, n);
    const Eigen::VectorXd inv_sqrt_k = w[k].array().rsqrt();
    const Eigen::VectorXd sqrt_k = w[k].array().sqrt();
    if (k < K.dimension())
    {
        Eigen::SparseMatrix<double> A =
            detail::diagonal(w[k + 1].array().sqrt()) * coboundary(K, k) * detail::diagonal(inv_sqrt_k);
        L += Eigen::SparseMatrix<double>(A.transpose()) * A;
    }
    if (k > 0)
    {
        Eigen::SparseMatrix<double> B =
            detail::diagonal(sqrt_k) * coboundary(K, k - 1) * detail::diagonal(w[k - 1].array().rsqrt());
        L += B * Eigen::SparseMatrix<double>(B.transpose());
    }
    L.makeCompressed();
    return L;
}

/**
 * Weighted Hodge Laplacian Delta_k = delta_{k+1} d_k + d_{k-1} delta_k with
 * delta_k = W_{k-1}^{-1} d_{k-1}^T W_k. Self-adjoint for the weighted inner
 * product; not symmetric as a matrix unless the weights are uniform.
 */
inline Eigen::SparseMatrix<double> laplacian(const SimplicialComplex& K, const MetricWeights& w, int k)
{
    const Eigen::SparseMatrix<double> L = symmetric_laplacian(K, w, k);
    Eigen::SparseMatrix<double> D =
        detail::diagonal(w[k].array().rsqrt()) * L * detail::diagonal(w[k].array().sqrt());
    D.makeCompressed();
    return D;
}

/// d : C^k -> C^{k+1}
inline Cochain apply_d(const SimplicialComplex& K, const Cochain& c)
{
    return Cochain(c.degree + 1, coboundary(K, c.degree) * c.values);
}

/// delta : C^k -> C^{k-1}, the weighted adjoint of d.
inline Cochain apply_delta(const SimplicialComplex& K, const MetricWeights& w, const Cochain& c)
{
    if (c.degree == 0)
        return Cochain(-1, Eigen::VectorXd());
    const Eigen::VectorXd wc = w[c.degree].cwiseProduct(c.values);
    Eigen::VectorXd v = coboundary(K, c.degree - 1).transpose() * wc;
    return Cochain(c.degree - 1, v.cwiseQuotient(w[c.degree - 1]));
}

/// Simplex count above which harmonic bases come from shift-invert iteration.
inline constexpr std::size_t kDenseHarmonicLimit = 600;

/// Default nullspace tolerance, relative to the largest eigenvalue.
inline constexpr double kHarmonicTolerance = 1e-9;

/**
 * Orthonormal basis (weighted inner product) of ker Delta_k.
 *
 * `vectors` holds one cochain per column. `spectral_gap` is the smallest
 * nonzero eigenvalue over lambda_max (an upper estimate on the sparse path),
 * `residual_bound` is max ||Delta v||_w over lambda_max.
 */
struct HarmonicBasis
{
    int degree = 0;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd weights;
    double tolerance = kHarmonicTolerance;
    double residual_bound = 0.0;
    double spectral_gap = 0.0;
    double lambda_max = 0.0;
    std::string method;

    int size() const { return static_cast<int>(vectors.cols()); }
    Cochain cochain(int i) const { return Cochain(degree, vectors.col(i)); }
};

/**
 * Harmonic basis with the expected dimension supplied by the caller (normally
 * b_k). A numerical nullspace of a different size is an error.
 */
inline HarmonicBasis harmonic_basis(const SimplicialComplex& K, const MetricWeights& w, int k, double tol, int expected_dim)
{
    detail::check_degree(K, k);
    if (!(tol > 0.0))
        throw std::invalid_argument("harmonic_basis: tolerance must be positive");
    w.validate(K);

    HarmonicBasis hb;
    hb.degree = k;
    hb.weights = w[k];
    hb.tolerance = tol;
    const auto n = static_cast<Eigen::Index>(K.count(k));
    const Eigen::SparseMatrix<double> L = symmetric_laplacian(K, w, k);

    LowSpectrum spec;
    int found = 0;
    if (K.count(k) <= kDenseHarmonicLimit)
    {
        spec = dense_spectrum(Eigen::MatrixXd(L));
        for (Eigen::Index i = 0; i < spec.values.size(); ++i)
            if (spec.values(i) <= tol * spec.lambda_max)
                ++found;
    }
    else
    {
        spec = shift_invert_lowest(L, expected_dim, 1e-10, 0.1 * tol);
        for (int i = 0; i < expected_dim && i < spec.values.size(); ++i)
            if (spec.values(i) <= tol * spec.lambda_max)
                ++found;
        // A Ritz value just above the cutoff beyond the wanted block would
        // contradict the expected dimension too.
        if (spec.values.size() > expected_dim && spec.values(expected_dim) <= tol * spec.lambda_max)
            ++found;
    }
    hb.method = spec.method;
    hb.lambda_max = spec.lambda_max;
    if (found != expected_dim)
    {
        std::ostringstream msg;
        msg << "harmonic_basis: numerical nullspace of Delta_" << k << " has dimension " << found << " but b_" << k
            << " = " << expected_dim << " (tolerance " << tol << ")";
        throw std::runtime_error(msg.str());
    }
    if (spec.values.size() > expected_dim && spec.lambda_max > 0.0)
        hb.spectral_gap = spec.values(expected_dim) / spec.lambda_max;
    else
        hb.spectral_gap = 1.0;

    const Eigen::VectorXd inv_sqrt = w[k].array().rsqrt();
    hb.vectors.resize(n, expected_dim);
    double worst = 0.0;
    for (int i = 0; i < expected_dim; ++i)
    {
        Eigen::VectorXd u = spec.vectors.col(i);
        u.normalize();
        worst = std::max(worst, (L * u).norm());
        hb.vectors.col(i) = inv_sqrt.cwiseProduct(u);
    }
    hb.residual_bound = spec.lambda_max > 0.0 ? worst / spec.lambda_max : worst;
    if (hb.residual_bound > tol)
    {
        std::ostringstream msg;
        msg << "harmonic_basis: residual " << hb.residual_bound << " exceeds tolerance " << tol << " in degree " << k;
        throw std::runtime_error(msg.str());
    }
    return hb;
}

inline HarmonicBasis harmonic_basis(const SimplicialComplex& K, const MetricWeights& w, int k, double tol = kHarmonicTolerance)
{
    const auto b = betti_numbers(K);
    detail::check_degree(K, k);
    return harmonic_basis(K, w, k, tol, b[static_cast<std::size_t>(k)]);
}

/// Weighted orthogonal projection onto the span of `basis`.
inline Cochain harmonic_projection(const HarmonicBasis& basis, const Cochain& c)
{
    if (c.degree != basis.degree)
        throw std::invalid_argument("harmonic_projection: degree mismatch");
    if (basis.size() == 0)
        return Cochain(c.degree, Eigen::VectorXd::Zero(c.values.size()));
    const Eigen::VectorXd coeff = basis.vectors.transpose() * basis.weights.cwiseProduct(c.values);
    return Cochain(c.degree, basis.vectors * coeff);
}

inline Cochain harmonic_projection(const SimplicialComplex& K, const MetricWeights& w, const Cochain& c)
{
    return harmonic_projection(harmonic_basis(K, w, c.degree), c);
}

struct HodgeDecomposition
{
    Cochain exact;     ///< d a
    Cochain coexact;   ///< delta b
    Cochain harmonic;  ///< projection onto ker Delta
    Cochain exact_potential;    ///< a, degree k-1
    Cochain coexact_potential;  ///< b, degree k+1
    double reassembly_error = 0.0;  ///< ||c - (da + delta b + h)||_w / ||c||_w
};

namespace detail {

/// Minimum-residual solve of a consistent symmetric PSD system.
inline Eigen::VectorXd solve_psd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs)
{
    if (A.rows() == 0)
        return Eigen::VectorXd();
    if (A.rows() <= static_cast<Eigen::Index>(kDenseHarmonicLimit))
    {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod{Eigen::MatrixXd(A)};
        return cod.solve(rhs);
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * A.rows()));
    cg.compute(A);
    return cg.solve(rhs);
}

}  // namespace detail

/**
 * c = d a + delta b + h with the three parts pairwise orthogonal.
 *
 * a solves d^T W_k d a = d^T W_k c (degree k-1), and with y = W_{k+1} b,
 * y solves d W_k^{-1} d^T y = d c (degree k+1).
 */
inline HodgeDecomposition hodge_decompose(const SimplicialComplex& K,
                                          const MetricWeights& w,
                                          const Cochain& c,
                                          const HarmonicBasis& basis,
                                          double tolerance = 1e-8)
{
    const int k = c.degree;
    detail::check_degree(K, k);
    if (static_cast<std::size_t>(c.values.size()) != K.count(k))
        throw std::invalid_argument("hodge_decompose: cochain length mismatch");

    HodgeDecomposition out;
    out.harmonic = harmonic_projection(basis, c);

    if (k > 0)
    {
        const auto d = coboundary(K, k - 1);
        const Eigen::SparseMatrix<double> A = Eigen::SparseMatrix<double>(d.transpose()) * detail::diagonal(w[k]) * d;
        const Eigen::VectorXd rhs = d.transpose() * w[k].cwiseProduct(c.values);
        const Eigen::VectorXd a = detail::solve_psd(A, rhs);
        out.exact_potential = Cochain(k - 1, a);
        out.exact = Cochain(k, d * a);
    }
    else
    {
        out.exact = Cochain::zero(K, k);
    }

    if (k < K.dimension())
    {
        const auto d = coboundary(K, k);
        const Eigen::SparseMatrix<double> A =
            d * detail::diagonal(w[k].cwiseInverse()) * Eigen::SparseMatrix<double>(d.transpose());
        const Eigen::VectorXd y = detail::solve_psd(A, d * c.values);
        out.coexact_potential = Cochain(k + 1, y.cwiseQuotient(w[k + 1]));
        out.coexact = Cochain(k, (d.transpose() * y).cwiseQuotient(w[k]));
    }
    else
    {
        out.coexact = Cochain::zero(K, k);
    }

    const double cn = norm(w[k], c.values);
    const Eigen::VectorXd rest = c.values - out.exact.values - out.coexact.values - out.harmonic.values;
    out.reassembly_error = cn > 0.0 ? norm(w[k], rest) / cn : norm(w[k], rest);
    if (out.reassembly_error > tolerance)
        throw std::runtime_error("hodge_decompose: reassembly error " + std::to_string(out.reassembly_error) +
                                 " exceeds tolerance");
    return out;
}

inline HodgeDecomposition hodge_decompose(const SimplicialComplex& K, const MetricWeights& w, const Cochain& c)
{
    return hodge_decompose(K, w, c, harmonic_basis(K, w, c.degree));
}

}  // namespace hodgeformal
