#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace hodgeformal;
using exact::BigInt;
using exact::Rational;

namespace {

Eigen::MatrixXi random_matrix(Rng& rng, int rows, int cols, int range, double density, int rank_cap = -1)
{
    Eigen::MatrixXi M = Eigen::MatrixXi::Zero(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (rng.uniform() < density)
                M(i, j) = static_cast<int>(static_cast<long long>(rng.below(2ull * static_cast<unsigned>(range) + 1)) - range);
    if (rank_cap >= 0)
    {
        // Force a rank deficit: replace columns past rank_cap by combinations.
        for (int j = rank_cap; j < cols; ++j)
        {
            M.col(j).setZero();
            for (int t = 0; t < std::min(rank_cap, 3); ++t)
                M.col(j) += (static_cast<int>(rng.below(5)) - 2) * M.col(static_cast<int>(rng.below(rank_cap)));
        }
    }
    return M;
}

exact::IntegerMatrix to_integer(const Eigen::MatrixXi& D) { return exact::IntegerMatrix::from_eigen(D.sparseView()); }

std::vector<BigInt> apply(const Eigen::MatrixXi& D, const exact::SparseVector<BigInt>& x)
{
    std::vector<BigInt> y(static_cast<std::size_t>(D.rows()), 0);
    for (std::size_t t = 0; t < x.index.size(); ++t)
        for (int i = 0; i < D.rows(); ++i)
            y[i] += BigInt(D(i, x.index[t])) * x.value[t];
    return y;
}

std::vector<std::vector<Rational>> rational(std::initializer_list<std::initializer_list<int>> rows)
{
    std::vector<std::vector<Rational>> a;
    for (auto r : rows)
    {
        a.emplace_back();
        for (int x : r)
            a.back().emplace_back(x);
    }
    return a;
}

}  // namespace

TEST_CASE("sparse and dense ranks match a rational oracle", "[exact]")
{
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial)
    {
        const int rows = 3 + static_cast<int>(rng.below(20));
        const int cols = 3 + static_cast<int>(rng.below(20));
        const int cap = trial % 2 ? static_cast<int>(rng.below(static_cast<std::uint64_t>(cols))) : -1;
        const auto D = random_matrix(rng, rows, cols, trial < 20 ? 3 : 1000, 0.4, cap);
        const int expected = testing::rational_rank_oracle(D);
        const auto M = to_integer(D);
        INFO("trial " << trial);
        REQUIRE(exact::reduce(M).rank == expected);
        REQUIRE(exact::dense_rank(M) == expected);
        REQUIRE(exact::rank(M) == expected);
        REQUIRE(exact::rank(M.transpose()) == expected);
    }
}

TEST_CASE("large entries fall back to big integers", "[exact]")
{
    Rng rng(5);
    const auto D = random_matrix(rng, 30, 30, 1'000'000'000, 1.0);
    REQUIRE(exact::dense_rank(to_integer(D)) == testing::rational_rank_oracle(D));
    REQUIRE(exact::reduce(to_integer(D)).rank == testing::rational_rank_oracle(D));
}

TEST_CASE("kernel vectors are integral and span the kernel", "[exact]")
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto D = random_matrix(rng, 8, 14, 4, 0.5, 6);
        const auto kernel = exact::kernel_basis(to_integer(D));
        const int r = testing::rational_rank_oracle(D);
        REQUIRE(static_cast<int>(kernel.size()) == D.cols() - r);
        for (const auto& x : kernel)
        {
            REQUIRE_FALSE(x.empty());
            for (const auto& y : apply(D, x))
                REQUIRE(y == 0);
        }
    }
}

TEST_CASE("column selection and transpose", "[exact]")
{
    Eigen::MatrixXi D(2, 3);
    D << 1, 0, 2, 0, 3, 0;
    const auto M = to_integer(D);
    const auto T = M.transpose();
    REQUIRE(T.rows == 3);
    REQUIRE(T.cols == 2);
    REQUIRE(T.columns[0].coefficient(2) == 2);
    const auto S = M.select_columns({2, 0});
    REQUIRE(S.cols == 2);
    REQUIRE(S.columns[0].coefficient(0) == 2);
    REQUIRE(exact::rank(S) == 1);
}

TEST_CASE("inertia of symmetric rational matrices", "[exact]")
{
    auto i1 = exact::inertia(rational({{1, 0, 0}, {0, -1, 0}, {0, 0, 0}}));
    REQUIRE((i1.positive == 1 && i1.negative == 1 && i1.zero == 1));

    // Hyperbolic plane: zero diagonal.
    auto i2 = exact::inertia(rational({{0, 1}, {1, 0}}));
    REQUIRE((i2.positive == 1 && i2.negative == 1 && i2.zero == 0));

    // Negative definite E8 would be large; a 3x3 Cartan-type block is enough.
    auto i3 = exact::inertia(rational({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}));
    REQUIRE((i3.positive == 3 && i3.negative == 0));

    REQUIRE_THROWS_AS(exact::inertia(rational({{1, 2}, {3, 4}})), std::invalid_argument);
}

TEST_CASE("inertia matches eigenvalue signs on random symmetric matrices", "[exact]")
{
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int n = 2 + static_cast<int>(rng.below(6));
        Eigen::MatrixXi B = random_matrix(rng, n, n, 3, 0.6, trial % 3 == 0 ? n - 1 : -1);
        Eigen::MatrixXi S = B + B.transpose();
        std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a[i][j] = S(i, j);
        const auto in = exact::inertia(a);
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S.cast<double>()).eigenvalues();
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        int pos = 0, neg = 0;
        for (double x : ev)
        {
            pos += x > 1e-9 * scale;
            neg += x < -1e-9 * scale;
        }
        INFO("trial " << trial);
        REQUIRE(in.positive == pos);
        REQUIRE(in.negative == neg);
        REQUIRE(in.zero == n - pos - neg);
    }
}

TEST_CASE("rational rank", "[exact]")
{
    REQUIRE(exact::rational_rank(rational({{0, 1}, {-1, 0}})) == 2);
    REQUIRE(exact::rational_rank(rational({{1, 2}, {2, 4}})) == 1);
    REQUIRE(exact::rational_rank({}) == 0);
}
