#pragma once

// Lowest eigenpairs of symmetric positive semidefinite operators.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "random.hpp"

namespace hodgeformal {

struct LowSpectrum
{
    /// Ascending eigenvalue (or Ritz value) estimates.
    Eigen::VectorXd values;
    /// Orthonormal columns matching `values`.
    Eigen::MatrixXd vectors;
    /// Largest eigenvalue, exact on the dense path and a power-iteration
    /// estimate on the sparse path.
    double lambda_max = 0.0;
    int iterations = 0;
    std::string method;
};

/// Full dense eigendecomposition; every pair is returned.
inline LowSpectrum dense_spectrum(const Eigen::MatrixXd& L)
{
    LowSpectrum out;
    out.method = "dense";
    if (L.rows() == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    out.lambda_max = std::max(std::abs(out.values(0)), std::abs(out.values(out.values.size() - 1)));
    return out;
}

/// Power iteration from a fixed start vector.
inline double estimate_lambda_max(const Eigen::SparseMatrix<double>& L, int iterations = 60)
{
    const Eigen::Index n = L.rows();
    if (n == 0)
        return 0.0;
    Rng rng(0x5eed);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x(i) = rng.uniform(-1.0, 1.0);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it)
    {
        Eigen::VectorXd y = L * x;
        const double norm = y.norm();
        if (norm == 0.0)
            return 0.0;
        lambda = x.dot(y);
        x = y / norm;
    }
    // Rayleigh quotients approach from below; pad slightly.
    return 1.05 * std::max(lambda, (L * x).norm());
}

/**
 * Shift-invert subspace iteration for the `count` smallest eigenpairs of a
 * sparse symmetric PSD matrix.
 *
 * (L + shift*I) is factored once; each sweep applies its inverse to a block
 * of count + guard vectors, re-orthonormalizes and does a Rayleigh-Ritz step
 * with L itself. Once every wanted Ritz pair has residual
 * ||L v - theta v|| <= residual_target, a few more sweeps are run: they are
 * cheap with the factorization in hand and make the vectors markedly more
 * accurate (closedness of harmonic cochains improves with them).
 */
inline LowSpectrum shift_invert_lowest(const Eigen::SparseMatrix<double>& L,
                                       int count,
                                       double relative_shift,
                                       double residual_target_rel,
                                       int max_iterations = 200)
{
    const Eigen::Index n = L.rows();
    LowSpectrum out;
    out.method = "shift-invert";
    out.lambda_max = estimate_lambda_max(L);
    if (n == 0)
        return out;

    const Eigen::Index guard = std::min<Eigen::Index>(std::max(4, count), n - count);
    const Eigen::Index block = count + guard;
    const double shift = relative_shift * out.lambda_max;

    Eigen::SparseMatrix<double> shifted = L;
    for (Eigen::Index i = 0; i < n; ++i)
        shifted.coeffRef(i, i) += shift;
    shifted.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("shift-invert: factorization failed");

    Rng rng(0xC0FFEE);
    Eigen::MatrixXd X(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            X(i, j) = rng.uniform(-1.0, 1.0);

    const double target = residual_target_rel * out.lambda_max;
    constexpr int kPolishSweeps = 2;
    int converged_at = -1;
    for (int it = 1; it <= max_iterations; ++it)
    {
        Eigen::MatrixXd Y = ldlt.solve(X);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
        Eigen::MatrixXd LQ = L * Q;
        Eigen::MatrixXd H = Q.transpose() * LQ;
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        X = Q * es.eigenvectors();
        Eigen::MatrixXd LX = LQ * es.eigenvectors();
        double worst = 0.0;
        for (int j = 0; j < count; ++j)
            worst = std::max(worst, (LX.col(j) - es.eigenvalues()(j) * X.col(j)).norm());
        out.iterations = it;
        if (worst <= target && converged_at < 0)
            converged_at = it;
        if ((converged_at >= 0 && it >= converged_at + kPolishSweeps) || it == max_iterations)
        {
            out.values = es.eigenvalues();
            out.vectors = X;
            return out;
        }
    }
    return out;
}

}  // namespace hodgeformal
