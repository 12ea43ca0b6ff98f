#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "cup.hpp"
#include "hodge.hpp"
#include "homology.hpp"
#include "random.hpp"

namespace hodgeformal {

/// Products with ||a cup b||_w at or below this times ||a||_w ||b||_w are zero.
inline constexpr double kZeroProductThreshold = 1e-12;

/// Aggregate residual at or below this counts as discretely formal.
inline constexpr double kFormalThreshold = 1e-8;

/// Inputs to pair_residual must satisfy ||Delta a||_w <= this * lambda_max * ||a||_w.
inline constexpr double kHarmonicInputTolerance = 1e-7;

struct FormalityOptions
{
    double tolerance = kHarmonicTolerance;
    /// Use (a cup b + (-1)^{kl} b cup a) / 2 instead of the raw
    /// Alexander-Whitney product.
    bool symmetric_product = false;
};

/**
 * Everything the residual computations need for one (complex, weights)
 * pair: harmonic bases and symmetric Laplacians in every degree, plus the
 * cup index tables built on demand.
 */
class HodgeContext
{
public:
    HodgeContext(const SimplicialComplex& K, MetricWeights w, const BettiVector& betti, double tol = kHarmonicTolerance)
        : K_(&K), w_(std::move(w)), betti_(betti)
    {
        w_.validate(K);
        for (int k = 0; k <= K.dimension(); ++k)
        {
            bases_.push_back(harmonic_basis(K, w_, k, tol, betti[static_cast<std::size_t>(k)]));
            laplacians_.push_back(symmetric_laplacian(K, w_, k));
        }
    }

    /// Reuse bases computed elsewhere (for example loaded from a cache).
    HodgeContext(const SimplicialComplex& K, MetricWeights w, const BettiVector& betti, std::vector<HarmonicBasis> bases)
        : K_(&K), w_(std::move(w)), betti_(betti), bases_(std::move(bases))
    {
        w_.validate(K);
        if (bases_.size() != static_cast<std::size_t>(K.dimension() + 1))
            throw std::invalid_argument("HodgeContext: one harmonic basis per degree is required");
        for (int k = 0; k <= K.dimension(); ++k)
        {
            const auto& hb = bases_[static_cast<std::size_t>(k)];
            if (hb.degree != k || hb.size() != betti[static_cast<std::size_t>(k)] ||
                static_cast<std::size_t>(hb.vectors.rows()) != K.count(k))
                throw std::invalid_argument("HodgeContext: harmonic basis does not match degree " + std::to_string(k));
            laplacians_.push_back(symmetric_laplacian(K, w_, k));
        }
    }

    HodgeContext(const SimplicialComplex& K, MetricWeights w, double tol = kHarmonicTolerance)
        : HodgeContext(K, std::move(w), betti_numbers(K), tol)
    {
    }

    const SimplicialComplex& complex() const { return *K_; }
    const MetricWeights& weights() const { return w_; }
    const BettiVector& betti() const { return betti_; }
    const HarmonicBasis& basis(int k) const { return bases_.at(static_cast<std::size_t>(k)); }

    const CupIndex& cup_table(int k, int l) const
    {
        auto it = cups_.find({k, l});
        if (it == cups_.end())
            it = cups_.emplace(std::make_pair(k, l), cup_index(*K_, k, l)).first;
        return it->second;
    }

    /// ||Delta a||_w / (lambda_max ||a||_w), or 0 for the zero cochain.
    double harmonic_defect(const Cochain& a) const
    {
        const auto& wk = w_[a.degree];
        const Eigen::VectorXd u = wk.array().sqrt() * a.values.array();
        const double un = u.norm();
        if (un == 0.0)
            return 0.0;
        const double lmax = basis(a.degree).lambda_max;
        const double r = (laplacians_.at(static_cast<std::size_t>(a.degree)) * u).norm();
        return lmax > 0.0 ? r / (lmax * un) : r / un;
    }

private:
    const SimplicialComplex* K_;
    MetricWeights w_;
    BettiVector betti_;
    std::vector<HarmonicBasis> bases_;
    std::vector<Eigen::SparseMatrix<double>> laplacians_;
    mutable std::map<std::pair<int, int>, CupIndex> cups_;
};

struct PairResidual
{
    double residual = 0.0;
    double product_norm = 0.0;
    bool zero_product = false;
    /// A factor lies in degree 0, so it is locally constant and the product
    /// is harmonic without any projection.
    bool unit_factor = false;
};

inline Cochain product(const HodgeContext& ctx, const Cochain& a, const Cochain& b, bool symmetric)
{
    Cochain c = cup(ctx.cup_table(a.degree, b.degree), a, b);
    if (symmetric)
    {
        const Cochain r = cup(ctx.cup_table(b.degree, a.degree), b, a);
        const double sign = (a.degree * b.degree) % 2 == 0 ? 1.0 : -1.0;
        c.values = 0.5 * (c.values + sign * r.values);
    }
    return c;
}

/**
 * ||c - P_H c||_w / ||c||_w for c = a cup b, where P_H is the weighted
 * projection onto harmonic cochains of degree k + l.
 */
inline PairResidual pair_residual(const HodgeContext& ctx, const Cochain& a, const Cochain& b, const FormalityOptions& opt = {})
{
    const auto& K = ctx.complex();
    if (a.degree + b.degree > K.dimension())
        throw std::invalid_argument("pair_residual: product degree exceeds the dimension");
    for (const Cochain* x : {&a, &b})
        if (ctx.harmonic_defect(*x) > kHarmonicInputTolerance)
            throw std::invalid_argument("pair_residual: input cochain of degree " + std::to_string(x->degree) +
                                        " is not harmonic");

    const auto& w = ctx.weights();
    PairResidual out;
    const Cochain c = product(ctx, a, b, opt.symmetric_product);
    out.product_norm = norm(w[c.degree], c.values);
    const double scale = norm(w[a.degree], a.values) * norm(w[b.degree], b.values);
    if (out.product_norm <= kZeroProductThreshold * scale)
    {
        out.zero_product = true;
        return out;
    }
    if (a.degree == 0 || b.degree == 0)
    {
        out.unit_factor = true;
        return out;
    }
    const Cochain p = harmonic_projection(ctx.basis(c.degree), c);
    out.residual = norm(w[c.degree], c.values - p.values) / out.product_norm;
    return out;
}

inline PairResidual pair_residual(const SimplicialComplex& K, const MetricWeights& w, const Cochain& a, const Cochain& b,
                                  const FormalityOptions& opt = {})
{
    return pair_residual(HodgeContext(K, w, opt.tolerance), a, b, opt);
}

/**
 * Coefficient of variation over vertices of the localized squared norm
 * n_v = sum_{s contains v} w_s a(s)^2 / sum_{s contains v} w_s.
 */
inline double norm_constancy(const SimplicialComplex& K, const MetricWeights& w, const Cochain& a)
{
    const int k = a.degree;
    if (k < 0 || k > K.dimension() || static_cast<std::size_t>(a.values.size()) != K.count(k))
        throw std::invalid_argument("norm_constancy: cochain does not match the complex");
    if (a.values.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("norm_constancy: cochain is identically zero");
    const auto V = static_cast<std::size_t>(K.vertex_count());
    std::vector<double> num(V, 0.0), den(V, 0.0);
    const auto& simplices = K.simplices(k);
    for (std::size_t s = 0; s < simplices.size(); ++s)
    {
        const double ws = w[k](static_cast<Eigen::Index>(s));
        const double x = a.values(static_cast<Eigen::Index>(s));
        for (Vertex v : simplices[s])
        {
            num[static_cast<std::size_t>(v)] += ws * x * x;
            den[static_cast<std::size_t>(v)] += ws;
        }
    }
    double mean = 0.0;
    std::size_t used = 0;
    std::vector<double> local;
    for (std::size_t v = 0; v < V; ++v)
        if (den[v] > 0.0)
        {
            local.push_back(num[v] / den[v]);
            mean += local.back();
            ++used;
        }
    mean /= static_cast<double>(used);
    double var = 0.0;
    for (double x : local)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(used);
    return std::sqrt(var) / mean;
}

struct PairRecord
{
    int degree_a = 0;
    int index_a = 0;
    int degree_b = 0;
    int index_b = 0;
    PairResidual value;
};

struct ConstancyRecord
{
    int degree = 0;
    int index = 0;
    double coefficient_of_variation = 0.0;
};

struct FormalityReport
{
    std::vector<PairRecord> pairs;
    double aggregate = 0.0;
    std::vector<ConstancyRecord> constancy;
    std::vector<double> spectral_gaps;  ///< per degree
    bool symmetric_product = false;

    bool discretely_formal() const { return aggregate <= kFormalThreshold; }
};

/**
 * Residuals of every product of two harmonic basis cochains whose degrees
 * sum to at most n. Each unordered pair is evaluated in both orders; the
 * aggregate is the largest residual.
 */
inline FormalityReport formality_residual(const HodgeContext& ctx, const FormalityOptions& opt = {})
{
    const auto& K = ctx.complex();
    const int n = K.dimension();
    FormalityReport rep;
    rep.symmetric_product = opt.symmetric_product;

    std::vector<std::pair<int, int>> slots;  // (degree, index)
    for (int k = 0; k <= n; ++k)
    {
        rep.spectral_gaps.push_back(ctx.basis(k).spectral_gap);
        for (int i = 0; i < ctx.basis(k).size(); ++i)
            slots.emplace_back(k, i);
    }

    for (std::size_t s = 0; s < slots.size(); ++s)
        for (std::size_t t = s; t < slots.size(); ++t)
        {
            const auto [ka, ia] = slots[s];
            const auto [kb, ib] = slots[t];
            if (ka + kb > n)
                continue;
            const Cochain a = ctx.basis(ka).cochain(ia);
            const Cochain b = ctx.basis(kb).cochain(ib);
            rep.pairs.push_back({ka, ia, kb, ib, pair_residual(ctx, a, b, opt)});
            if (s != t)
                rep.pairs.push_back({kb, ib, ka, ia, pair_residual(ctx, b, a, opt)});
        }
    for (const auto& p : rep.pairs)
        rep.aggregate = std::max(rep.aggregate, p.value.residual);

    for (const auto& [k, i] : slots)
        rep.constancy.push_back({k, i, norm_constancy(K, ctx.weights(), ctx.basis(k).cochain(i))});
    return rep;
}

inline FormalityReport formality_residual(const SimplicialComplex& K, const MetricWeights& w, const FormalityOptions& opt = {})
{
    return formality_residual(HodgeContext(K, w, opt.tolerance), opt);
}

enum class SearchStart
{
    unit,
    random,
};

struct SearchConfig
{
    /// Maximum number of full coordinate sweeps.
    int max_iterations = 20;
    /// Stop once a sweep improves the aggregate by less than this.
    double tolerance = 1e-10;
    /// Initial multiplicative step, as a natural-log increment.
    double step = 0.5;
    /// Stop when the step has been halved below this.
    double min_step = 1e-3;
    std::uint64_t seed = 1;
    /// Degrees whose weights may change; empty means all.
    std::vector<int> free_degrees;
    SearchStart start = SearchStart::random;
    /// Log-uniform range of random starting weights.
    double start_lo = 0.1;
    double start_hi = 10.0;
    FormalityOptions formality;

    void validate() const
    {
        if (max_iterations < 0)
            throw std::invalid_argument("search: max_iterations must be nonnegative");
        if (!(tolerance >= 0.0))
            throw std::invalid_argument("search: tolerance must be nonnegative");
        if (!(step > 0.0) || !(min_step > 0.0))
            throw std::invalid_argument("search: step sizes must be positive");
        if (!(start_lo > 0.0) || !(start_hi >= start_lo))
            throw std::invalid_argument("search: invalid starting weight range");
    }
};

struct SearchResult
{
    MetricWeights weights;
    /// Aggregate residual before the first sweep and after each sweep.
    std::vector<double> trace;
    int evaluations = 0;
    int rejected_evaluations = 0;
    std::string stop_reason;
};

/**
 * Derivative-free coordinate search in log-weight space.
 *
 * Each sweep visits the free weights in a seeded random order and tries
 * w * exp(+step), then w * exp(-step), keeping a move only if the aggregate
 * residual strictly decreases. A sweep with no accepted move halves the step.
 * Candidates whose harmonic bases cannot be certified count as rejected.
 */
inline SearchResult search_formal_weights(const SimplicialComplex& K, const SearchConfig& cfg)
{
    cfg.validate();
    const int n = K.dimension();
    std::vector<int> degrees = cfg.free_degrees;
    if (degrees.empty())
        for (int k = 0; k <= n; ++k)
            degrees.push_back(k);
    for (int k : degrees)
        if (k < 0 || k > n)
            throw std::invalid_argument("search: free degree " + std::to_string(k) + " out of range");

    const BettiVector betti = betti_numbers(K);
    Rng rng(cfg.seed);
    SearchResult res;
    res.weights = cfg.start == SearchStart::unit ? unit_weights(K) : random_weights(K, rng.bits(), cfg.start_lo, cfg.start_hi);

    auto evaluate = [&](const MetricWeights& w) -> std::optional<double> {
        ++res.evaluations;
        try
        {
            return formality_residual(HodgeContext(K, w, betti, cfg.formality.tolerance), cfg.formality).aggregate;
        }
        catch (const std::runtime_error&)
        {
            ++res.rejected_evaluations;
            return std::nullopt;
        }
    };

    const auto initial = evaluate(res.weights);
    if (!initial)
        throw std::runtime_error("search: the starting weights do not give certified harmonic bases");
    double best = *initial;
    res.trace.push_back(best);
    if (best == 0.0)
    {
        res.stop_reason = "zero-residual";
        return res;
    }

    std::vector<std::pair<int, Eigen::Index>> coords;
    for (int k : degrees)
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(K.count(k)); ++i)
            coords.emplace_back(k, i);

    double step = cfg.step;
    res.stop_reason = "max-iterations";
    for (int sweep = 0; sweep < cfg.max_iterations; ++sweep)
    {
        for (std::size_t i = coords.size(); i > 1; --i)
            std::swap(coords[i - 1], coords[static_cast<std::size_t>(rng.below(i))]);

        const double before = best;
        for (const auto& [k, i] : coords)
        {
            for (double dir : {1.0, -1.0})
            {
                MetricWeights trial = res.weights;
                trial[k](i) *= std::exp(dir * step);
                const auto v = evaluate(trial);
                if (v && *v < best)
                {
                    best = *v;
                    res.weights = std::move(trial);
                    break;
                }
            }
        }
        res.trace.push_back(best);
        const double improvement = before - best;
        if (best == 0.0)
        {
            res.stop_reason = "zero-residual";
            break;
        }
        if (improvement == 0.0)
        {
            step *= 0.5;
            if (step < cfg.min_step)
            {
                res.stop_reason = "step-size";
                break;
            }
        }
        else if (improvement < cfg.tolerance)
        {
            res.stop_reason = "tolerance";
            break;
        }
    }
    return res;
}

}  // namespace hodgeformal
