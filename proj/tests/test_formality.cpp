#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace hodgeformal;
using Catch::Matchers::WithinAbs;

namespace {

/// Residual of the product from the SVD nullspace projector, computed
/// without any of the library's Laplacian or eigensolver code.
double oracle_residual(const SimplicialComplex& K, const MetricWeights& w, const Cochain& a, const Cochain& b)
{
    const Cochain c = cup(K, a, b);
    const int k = c.degree;
    const Eigen::MatrixXd P = testing::projector_oracle(testing::harmonic_space_oracle(K, w, k), w[k]);
    return norm(w[k], c.values - P * c.values) / norm(w[k], c.values);
}

std::vector<std::uint64_t> seeds(int count)
{
    std::vector<std::uint64_t> s;
    for (int i = 0; i < count; ++i)
        s.push_back(1000 + static_cast<std::uint64_t>(i));
    return s;
}

}  // namespace

TEST_CASE("pair residuals match the dense projector oracle", "[formality]")
{
    for (const auto& K : {torus(2), surface(2), product_complex(sphere(2), sphere(1)), torus(3)})
        for (const auto& w : {unit_weights(K), random_weights(K, 5)})
        {
            const HodgeContext ctx(K, w);
            const int n = K.dimension();
            int compared = 0;
            for (int k = 1; k <= n; ++k)
                for (int l = 1; k + l <= n; ++l)
                    for (int i = 0; i < ctx.basis(k).size(); ++i)
                        for (int j = 0; j < ctx.basis(l).size(); ++j)
                        {
                            const auto a = ctx.basis(k).cochain(i), b = ctx.basis(l).cochain(j);
                            const auto r = pair_residual(ctx, a, b);
                            if (r.zero_product)
                                continue;
                            INFO(K.name() << " (" << k << "," << i << ") x (" << l << "," << j << ")");
                            REQUIRE_THAT(r.residual, WithinAbs(oracle_residual(K, w, a, b), 1e-9));
                            REQUIRE(r.residual >= 0.0);
                            REQUIRE(r.residual <= 1.0 + 1e-9);
                            ++compared;
                        }
            REQUIRE(compared > 0);
        }
}

TEST_CASE("unit factor gives residual zero", "[formality]")
{
    const auto K = surface(2);
    const auto w = random_weights(K, 3);
    const HodgeContext ctx(K, w);
    const auto unit = ctx.basis(0).cochain(0);
    for (int k = 0; k <= 2; ++k)
        for (int i = 0; i < ctx.basis(k).size(); ++i)
        {
            const auto r1 = pair_residual(ctx, unit, ctx.basis(k).cochain(i));
            const auto r2 = pair_residual(ctx, ctx.basis(k).cochain(i), unit);
            REQUIRE(r1.residual == 0.0);
            REQUIRE(r2.residual == 0.0);
            REQUIRE(r1.unit_factor);
        }
}

TEST_CASE("non-harmonic input is rejected", "[formality]")
{
    const auto K = torus(2);
    const HodgeContext ctx(K, unit_weights(K));
    Rng rng(1);
    const auto x = testing::random_cochain(K, 1, rng);
    REQUIRE_THROWS_AS(pair_residual(ctx, x, ctx.basis(1).cochain(0)), std::invalid_argument);
    REQUIRE_THROWS_AS(pair_residual(ctx, ctx.basis(2).cochain(0), ctx.basis(1).cochain(0)), std::invalid_argument);
}

TEST_CASE("sphere aggregates are exactly zero", "[formality]")
{
    for (int n = 1; n <= 4; ++n)
        for (const auto& w : {unit_weights(sphere(n)), random_weights(sphere(n), 2)})
        {
            const auto rep = formality_residual(sphere(n), w);
            REQUIRE(rep.aggregate == 0.0);
            REQUIRE(rep.discretely_formal());
            // 1x1, 1xtop and topx1.
            REQUIRE(rep.pairs.size() == 3);
        }
}

TEST_CASE("torus aggregate is the largest pair residual", "[formality]")
{
    const auto K = torus(2);
    const auto rep = formality_residual(K, unit_weights(K));
    double mx = 0.0;
    int degree_one_pairs = 0;
    for (const auto& p : rep.pairs)
    {
        mx = std::max(mx, p.value.residual);
        degree_one_pairs += p.degree_a == 1 && p.degree_b == 1;
        REQUIRE(p.value.residual <= 1.0 + 1e-9);
    }
    REQUIRE(rep.aggregate == mx);
    // Unordered pairs with repetition, both orders: 11, 22, 12, 21.
    REQUIRE(degree_one_pairs == 4);
    REQUIRE(rep.spectral_gaps.size() == 3);
    REQUIRE_FALSE(rep.symmetric_product);
}

TEST_CASE("surface of genus two is never discretely formal", "[formality]")
{
    const auto K = surface(2);
    REQUIRE(formality_residual(K, unit_weights(K)).aggregate > 1e-3);
    for (auto seed : seeds(20))
    {
        const auto w = random_weights(K, seed);
        INFO("seed " << seed);
        REQUIRE(formality_residual(K, w).aggregate > 1e-3);
        FormalityOptions sym;
        sym.symmetric_product = true;
        REQUIRE(formality_residual(K, w, sym).aggregate > 1e-3);
    }
}

// Scaling one degree by c spreads the Laplacian spectrum by c^2, so the
// factor stays moderate to keep the nullspace threshold meaningful.
TEST_CASE("per-degree weight scaling leaves residuals unchanged", "[formality]")
{
    const auto K = torus(2);
    const auto w = random_weights(K, 44);
    FormalityOptions sym;
    sym.symmetric_product = true;
    const auto base = formality_residual(K, w, sym);
    for (int k = 0; k <= 2; ++k)
    {
        auto s = w;
        s[k] *= 3.7;
        const auto rep = formality_residual(K, s, sym);
        REQUIRE_THAT(rep.aggregate, WithinAbs(base.aggregate, 1e-9));
        REQUIRE(rep.pairs.size() == base.pairs.size());
    }
}

TEST_CASE("symmetrized product is graded symmetric", "[formality]")
{
    const auto K = torus(2);
    const HodgeContext ctx(K, random_weights(K, 2));
    const auto a = ctx.basis(1).cochain(0), b = ctx.basis(1).cochain(1);
    const auto ab = product(ctx, a, b, true), ba = product(ctx, b, a, true);
    REQUIRE((ab.values + ba.values).norm() <= 1e-15);
    REQUIRE(product(ctx, a, a, true).values.norm() == 0.0);
    REQUIRE(pair_residual(ctx, a, a, {kHarmonicTolerance, true}).zero_product);
}

TEST_CASE("norm constancy", "[formality]")
{
    SECTION("circle")
    {
        const auto K = torus(1);
        const auto w = unit_weights(K);
        REQUIRE(norm_constancy(K, w, harmonic_basis(K, w, 1).cochain(0)) <= 1e-12);
    }
    SECTION("torus area form")
    {
        const auto K = torus(2);
        const auto w = unit_weights(K);
        REQUIRE(norm_constancy(K, w, harmonic_basis(K, w, 2).cochain(0)) <= 1e-12);
    }
    SECTION("genus two")
    {
        const auto K = surface(2);
        const auto w = unit_weights(K);
        const auto h = harmonic_basis(K, w, 1);
        double mx = 0.0;
        for (int i = 0; i < h.size(); ++i)
            mx = std::max(mx, norm_constancy(K, w, h.cochain(i)));
        REQUIRE(mx > 1e-3);
    }
    SECTION("hand example")
    {
        // Path 0-1-2 with edge values 1 and 3: local squared norms 1, 5, 9.
        const auto K = build_complex({{0, 1}, {1, 2}});
        const Cochain a(1, Eigen::Vector2d(1.0, 3.0));
        const double mean = 5.0, sd = std::sqrt((16.0 + 0.0 + 16.0) / 3.0);
        REQUIRE_THAT(norm_constancy(K, unit_weights(K), a), WithinAbs(sd / mean, 1e-15));
        REQUIRE_THROWS_AS(norm_constancy(K, unit_weights(K), Cochain::zero(K, 1)), std::invalid_argument);
    }
}

TEST_CASE("search on a sphere returns immediately", "[formality][search]")
{
    SearchConfig cfg;
    const auto res = search_formal_weights(sphere(3), cfg);
    REQUIRE(res.trace == std::vector<double>{0.0});
    REQUIRE(res.stop_reason == "zero-residual");
    REQUIRE(res.evaluations == 1);
}

TEST_CASE("search traces are monotone and deterministic", "[formality][search]")
{
    const auto K = torus(2);
    for (bool symmetric : {false, true})
        for (std::uint64_t seed : {1u, 2u})
        {
            SearchConfig cfg;
            cfg.seed = seed;
            cfg.max_iterations = 2;
            cfg.formality.symmetric_product = symmetric;
            const auto a = search_formal_weights(K, cfg);
            const auto b = search_formal_weights(K, cfg);
            REQUIRE(a.trace == b.trace);
            REQUIRE(io::trace_csv(a.trace) == io::trace_csv(b.trace));
            for (std::size_t i = 1; i < a.trace.size(); ++i)
                REQUIRE(a.trace[i] <= a.trace[i - 1]);
            REQUIRE(a.trace.back() <= a.trace.front());
            for (int k = 0; k <= 2; ++k)
                REQUIRE(a.weights[k].minCoeff() > 0.0);
            // The returned weights reproduce the final aggregate.
            REQUIRE(formality_residual(K, a.weights, cfg.formality).aggregate == a.trace.back());
            if (symmetric)
                REQUIRE(a.trace.back() < a.trace.front());
        }
}

TEST_CASE("search from unit weights never ends above the start", "[formality][search]")
{
    const auto K = torus(2);
    SearchConfig cfg;
    cfg.start = SearchStart::unit;
    cfg.max_iterations = 1;
    cfg.formality.symmetric_product = true;
    const auto res = search_formal_weights(K, cfg);
    const double unit = formality_residual(K, unit_weights(K), cfg.formality).aggregate;
    REQUIRE(res.trace.front() == unit);
    REQUIRE(res.trace.back() <= unit + 1e-12);
}

TEST_CASE("search respects free degrees and validates its config", "[formality][search]")
{
    const auto K = torus(2);
    SearchConfig cfg;
    cfg.max_iterations = 1;
    cfg.free_degrees = {1};
    cfg.formality.symmetric_product = true;
    const auto res = search_formal_weights(K, cfg);
    Rng rng(cfg.seed);
    const auto start = random_weights(K, rng.bits(), cfg.start_lo, cfg.start_hi);
    REQUIRE(res.weights[0] == start[0]);
    REQUIRE(res.weights[2] == start[2]);

    SearchConfig bad;
    bad.step = 0.0;
    REQUIRE_THROWS_AS(search_formal_weights(K, bad), std::invalid_argument);
    bad = SearchConfig{};
    bad.free_degrees = {3};
    REQUIRE_THROWS_AS(search_formal_weights(K, bad), std::invalid_argument);
}
