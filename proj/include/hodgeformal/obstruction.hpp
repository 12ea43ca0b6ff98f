#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex.hpp"
#include "cup.hpp"
#include "hodge.hpp"
#include "homology.hpp"

namespace hodgeformal {

enum class SummarySource
{
    computed,
    user_supplied,
};

inline std::string to_string(SummarySource s)
{
    return s == SummarySource::computed ? "computed-from-complex" : "user-supplied";
}

/**
 * Real cohomology data of a closed connected oriented n-manifold.
 *
 * Middle data (b_plus, b_minus) only exists when n is a multiple of 4, where
 * the middle cup pairing is symmetric.
 */
struct CohomologySummary
{
    std::string name;
    int dimension = 0;
    bool orientable = true;
    std::vector<int> betti;
    std::optional<int> b_plus;
    std::optional<int> b_minus;
    SummarySource source = SummarySource::user_supplied;

    bool has_middle_data() const { return b_plus.has_value() && b_minus.has_value(); }

    std::optional<int> signature() const
    {
        if (!has_middle_data())
            return std::nullopt;
        return *b_plus - *b_minus;
    }

    long long euler_characteristic() const
    {
        long long chi = 0;
        for (std::size_t k = 0; k < betti.size(); ++k)
            chi += (k % 2 == 0 ? 1 : -1) * betti[k];
        return chi;
    }

    int b(int k) const { return betti.at(static_cast<std::size_t>(k)); }

    /// Throws std::invalid_argument describing the first inconsistency.
    void validate() const
    {
        const int n = dimension;
        if (n < 1)
            throw std::invalid_argument("summary: dimension must be at least 1");
        if (!orientable)
            throw std::invalid_argument("summary: only oriented manifolds are supported");
        if (betti.size() != static_cast<std::size_t>(n + 1))
            throw std::invalid_argument("summary: Betti vector must have length dimension + 1");
        for (int x : betti)
            if (x < 0)
                throw std::invalid_argument("summary: Betti numbers must be nonnegative");
        if (betti.front() != 1)
            throw std::invalid_argument("summary: b_0 must be 1 (connected input)");
        for (int k = 0; k <= n; ++k)
            if (b(k) != b(n - k))
                throw std::invalid_argument("summary: Betti vector violates Poincare duality");
        if (b_plus.has_value() != b_minus.has_value())
            throw std::invalid_argument("summary: b_plus and b_minus must be given together");
        if (has_middle_data())
        {
            if (n % 4 != 0)
                throw std::invalid_argument("summary: b_plus/b_minus only make sense when the dimension is a multiple of 4");
            if (*b_plus < 0 || *b_minus < 0)
                throw std::invalid_argument("summary: b_plus and b_minus must be nonnegative");
            if (*b_plus + *b_minus != b(n / 2))
                throw std::invalid_argument("summary: b_plus + b_minus must equal the middle Betti number");
        }
    }
};

/// Cohomology summary of a closed oriented pseudomanifold; middle data from
/// the cup pairing when the dimension is a multiple of 4.
inline CohomologySummary summarize(const SimplicialComplex& K, const MetricWeights& w)
{
    if (!is_closed_pseudomanifold(K))
        throw std::invalid_argument("summarize: complex is not a closed pseudomanifold");
    CohomologySummary s;
    s.name = K.name();
    s.dimension = K.dimension();
    s.orientable = orient(K).has_value();
    if (!s.orientable)
        throw std::invalid_argument("summarize: complex is not orientable");
    s.betti = betti_numbers(K).values;
    s.source = SummarySource::computed;
    if (s.dimension % 4 == 0)
    {
        const int m = s.dimension / 2;
        const auto form = intersection_form(K, w, harmonic_basis(K, w, m, kHarmonicTolerance, s.b(m)));
        s.b_plus = form.b_plus;
        s.b_minus = form.b_minus;
    }
    s.validate();
    return s;
}

inline CohomologySummary summarize(const SimplicialComplex& K)
{
    return summarize(K, unit_weights(K));
}

enum class RuleStatus
{
    passed,
    fired,
    not_applicable,
    not_evaluated,
};

inline std::string to_string(RuleStatus s)
{
    switch (s)
    {
    case RuleStatus::passed:
        return "passed";
    case RuleStatus::fired:
        return "fired";
    case RuleStatus::not_applicable:
        return "not-applicable";
    case RuleStatus::not_evaluated:
        return "not-evaluated";
    }
    return "unknown";
}

struct RuleResult
{
    std::string id;
    std::string citation;
    RuleStatus status = RuleStatus::not_applicable;
    /// The instantiated condition, e.g. "b_1 * chi = 4 * -2 = -8 != 0".
    std::string detail;
};

enum class Verdict
{
    obstructed,
    passes_elementary_tests,
};

inline std::string to_string(Verdict v)
{
    return v == Verdict::obstructed ? "obstructed" : "passes-elementary-tests";
}

struct ObstructionReport
{
    Verdict verdict = Verdict::passes_elementary_tests;
    std::vector<RuleResult> rules;
    std::optional<std::string> model;

    std::vector<std::string> fired() const
    {
        std::vector<std::string> ids;
        for (const auto& r : rules)
            if (r.status == RuleStatus::fired)
                ids.push_back(r.id);
        return ids;
    }
};

inline long long binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    long long c = 1;
    for (int i = 1; i <= k; ++i)
        c = c * (n - k + i) / i;
    return c;
}

namespace detail {

template <class T>
std::string join(const std::vector<T>& xs, const char* sep = ", ")
{
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << (i ? sep : "") << xs[i];
    return os.str();
}

inline bool odd_or_zero(int x) { return x == 0 || x % 2 == 1; }

}  // namespace detail

/**
 * Topological restrictions on closed oriented manifolds that admit a metric
 * whose harmonic forms are closed under wedge products. Every rule is
 * evaluated and reported; the verdict is "obstructed" iff any rule fired.
 */
inline ObstructionReport check_obstructions(const CohomologySummary& s)
{
    s.validate();
    const int n = s.dimension;
    const int b1 = s.b(1);
    const long long chi = s.euler_characteristic();
    const bool middle = s.has_middle_data();
    ObstructionReport rep;

    auto add = [&](std::string id, std::string citation, RuleStatus st, std::string detail) {
        rep.rules.push_back({std::move(id), std::move(citation), st, std::move(detail)});
    };
    auto verdict_of = [](bool ok) { return ok ? RuleStatus::passed : RuleStatus::fired; };

    {
        std::vector<std::string> bad;
        for (int k = 0; k <= n; ++k)
            if (s.b(k) > binomial(n, k))
                bad.push_back("b_" + std::to_string(k) + " = " + std::to_string(s.b(k)) + " > C(" + std::to_string(n) +
                              "," + std::to_string(k) + ") = " + std::to_string(binomial(n, k)));
        add("R1", "Betti numbers bounded by those of the n-torus", verdict_of(bad.empty()),
            bad.empty() ? "b_k <= C(n,k) for all k" : detail::join(bad, "; "));
    }
    {
        const std::string cite = "self-dual/anti-self-dual middle Betti numbers bounded by those of the n-torus";
        if (n % 4 != 0)
            add("R2", cite, RuleStatus::not_applicable, "dimension is not a multiple of 4");
        else if (!middle)
            add("R2", cite, RuleStatus::not_evaluated, "b_plus/b_minus not supplied");
        else
        {
            const long long bound = binomial(n, n / 2) / 2;
            const std::string m = std::to_string(n / 2);
            std::vector<std::string> bad;
            if (*s.b_plus > bound)
                bad.push_back("b_" + m + "^+ = " + std::to_string(*s.b_plus) + " > " + std::to_string(bound));
            if (*s.b_minus > bound)
                bad.push_back("b_" + m + "^- = " + std::to_string(*s.b_minus) + " > " + std::to_string(bound));
            add("R2", cite, verdict_of(bad.empty()),
                bad.empty() ? "b_" + m + "^+, b_" + m + "^- <= " + std::to_string(bound) : detail::join(bad, "; "));
        }
    }
    add("R3", "first Betti number differs from n-1", verdict_of(b1 != n - 1),
        "b_1 = " + std::to_string(b1) + (b1 != n - 1 ? " != " : " == ") + "n-1 = " + std::to_string(n - 1));
    {
        const std::string cite = "nonzero first Betti number forces vanishing Euler characteristic";
        if (b1 == 0)
            add("R4", cite, RuleStatus::not_applicable, "b_1 = 0");
        else if (n == 2)
            add("R4", cite, RuleStatus::not_applicable, "same condition as R5 in dimension 2");
        else
            add("R4", cite, verdict_of(chi == 0),
                "b_1 = " + std::to_string(b1) + " and chi = " + std::to_string(chi) + (chi == 0 ? " == 0" : " != 0"));
    }
    {
        const std::string cite = "surfaces: product of first Betti number and Euler characteristic vanishes";
        if (n != 2)
            add("R5", cite, RuleStatus::not_applicable, "dimension is not 2");
        else
            add("R5", cite, verdict_of(b1 * chi == 0),
                "b_1 * chi = " + std::to_string(b1) + " * " + std::to_string(chi) + " = " + std::to_string(b1 * chi) +
                    (b1 * chi == 0 ? " == 0" : " != 0"));
    }
    {
        const std::string cite = "three-manifolds: first Betti number in {0,1,3}";
        if (n != 3)
            add("R6", cite, RuleStatus::not_applicable, "dimension is not 3");
        else
        {
            const bool ok = b1 == 0 || b1 == 1 || b1 == 3;
            add("R6", cite, verdict_of(ok), "b_1 = " + std::to_string(b1) + (ok ? " in " : " not in ") + "{0,1,3}");
        }
    }
    {
        const std::string cite = "four-manifolds: first Betti number in {0,1,2,4}";
        if (n != 4)
            add("R7", cite, RuleStatus::not_applicable, "dimension is not 4");
        else
        {
            const bool ok = b1 == 0 || b1 == 1 || b1 == 2 || b1 == 4;
            add("R7", cite, verdict_of(ok), "b_1 = " + std::to_string(b1) + (ok ? " in " : " not in ") + "{0,1,2,4}");
        }
    }

    // Four-dimensional refinements. They are skipped as a block when the
    // middle data is missing.
    const std::string bp = middle ? std::to_string(*s.b_plus) : "?";
    const std::string bm = middle ? std::to_string(*s.b_minus) : "?";
    struct Dim4Rule
    {
        const char* id;
        const char* citation;
        int b1;  // -1: no condition on b_1
    };
    const Dim4Rule dim4[] = {
        {"R8", "four-manifolds with b_1 = 2 have an indefinite form with b_2^+ = b_2^- = 1", 2},
        {"R9", "four-manifolds with b_1 = 1 have b_2 = 0", 1},
        {"R10", "four-manifolds with b_1 = 0: nonzero b_2^+ and b_2^- are odd", 0},
        {"R11", "four-manifolds with b_1 = 0: b_2^+ and b_2^- differ from 3", 0},
    };
    for (const auto& r : dim4)
    {
        if (n != 4)
        {
            add(r.id, r.citation, RuleStatus::not_applicable, "dimension is not 4");
            continue;
        }
        if (!middle)
        {
            add(r.id, r.citation, RuleStatus::not_evaluated, "b_plus/b_minus not supplied");
            continue;
        }
        if (b1 != r.b1)
        {
            add(r.id, r.citation, RuleStatus::not_applicable, "b_1 = " + std::to_string(b1));
            continue;
        }
        const std::string id = r.id;
        if (id == "R8")
        {
            const bool ok = *s.b_plus == 1 && *s.b_minus == 1;
            add(r.id, r.citation, verdict_of(ok),
                "(b_2^+, b_2^-) = (" + bp + ", " + bm + ")" + (ok ? " == " : " != ") + "(1, 1)");
        }
        else if (id == "R9")
        {
            const bool ok = s.b(2) == 0;
            add(r.id, r.citation, verdict_of(ok), "b_2 = " + std::to_string(s.b(2)) + (ok ? " == 0" : " != 0"));
        }
        else if (id == "R10")
        {
            std::vector<std::string> bad;
            if (!detail::odd_or_zero(*s.b_plus))
                bad.push_back("b_2^+ = " + bp + " is even and nonzero");
            if (!detail::odd_or_zero(*s.b_minus))
                bad.push_back("b_2^- = " + bm + " is even and nonzero");
            add(r.id, r.citation, verdict_of(bad.empty()),
                bad.empty() ? "b_2^+ = " + bp + ", b_2^- = " + bm + " are odd or zero" : detail::join(bad, "; "));
        }
        else
        {
            std::vector<std::string> bad;
            if (*s.b_plus == 3)
                bad.push_back("b_2^+ = 3");
            if (*s.b_minus == 3)
                bad.push_back("b_2^- = 3");
            add(r.id, r.citation, verdict_of(bad.empty()),
                bad.empty() ? "b_2^+ = " + bp + ", b_2^- = " + bm + " differ from 3" : detail::join(bad, "; "));
        }
    }

    rep.verdict = rep.fired().empty() ? Verdict::passes_elementary_tests : Verdict::obstructed;
    return rep;
}

/**
 * Compact globally symmetric space with the same real cohomology, for
 * dimensions 1 to 4. Returns nothing when no listed model matches or when
 * the middle data needed to decide is missing.
 */
inline std::optional<std::string> classify_symmetric_model(const CohomologySummary& s)
{
    s.validate();
    const int n = s.dimension;
    if (n > 4)
        throw std::invalid_argument("classify_symmetric_model: dimension " + std::to_string(n) + " exceeds 4");
    const auto& b = s.betti;
    using V = std::vector<int>;
    switch (n)
    {
    case 1:
        if (b == V{1, 1})
            return "S¹";
        return std::nullopt;
    case 2:
        if (b == V{1, 0, 1})
            return "S²";
        if (b == V{1, 2, 1})
            return "T²";
        return std::nullopt;
    case 3:
        if (b == V{1, 0, 0, 1})
            return "S³-rational";
        if (b == V{1, 1, 1, 1})
            return "S²×S¹";
        if (b == V{1, 3, 3, 1})
            return "T³";
        return std::nullopt;
    default:
        break;
    }
    if (b == V{1, 0, 0, 0, 1})
        return "S⁴-rational";
    if (b == V{1, 1, 0, 1, 1})
        return "S³×S¹";
    if (!s.has_middle_data())
        return std::nullopt;
    const int bp = *s.b_plus;
    const int bm = *s.b_minus;
    if (b == V{1, 0, 1, 0, 1})
        return bp == 1 ? std::optional<std::string>("ℂP²") : std::optional<std::string>("reversed-ℂP²");
    if (b == V{1, 0, 2, 0, 1} && bp == 1 && bm == 1)
        return "S²×S²";
    if (b == V{1, 2, 2, 2, 1} && bp == 1 && bm == 1)
        return "S²×T²";
    if (b == V{1, 4, 6, 4, 1} && bp == 3 && bm == 3)
        return "T⁴";
    return std::nullopt;
}

/// check_obstructions plus the model label when the summary passes.
inline ObstructionReport check_and_classify(const CohomologySummary& s)
{
    ObstructionReport rep = check_obstructions(s);
    if (rep.verdict == Verdict::passes_elementary_tests && s.dimension <= 4)
        rep.model = classify_symmetric_model(s);
    return rep;
}

}  // namespace hodgeformal
