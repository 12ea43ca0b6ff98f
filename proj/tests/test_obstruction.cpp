#include <catch_amalgamated.hpp>

#include <set>

#include "support.hpp"

using namespace hodgeformal;
using testing::data_path;
using Ids = std::vector<std::string>;

namespace {

CohomologySummary make(int n, std::vector<int> betti, std::optional<int> bp = {}, std::optional<int> bm = {})
{
    CohomologySummary s;
    s.name = "test";
    s.dimension = n;
    s.betti = std::move(betti);
    s.b_plus = bp;
    s.b_minus = bm;
    return s;
}

RuleStatus status_of(const ObstructionReport& r, const std::string& id)
{
    for (const auto& rule : r.rules)
        if (rule.id == id)
            return rule.status;
    FAIL("rule " << id << " missing");
    return RuleStatus::not_applicable;
}

/// Every duality-symmetric Betti vector with b_0 = b_n = 1 and entries <= cap.
std::vector<std::vector<int>> symmetric_betti_vectors(int n, int cap)
{
    std::vector<std::vector<int>> out;
    const int free = (n + 1) / 2 - 1 + (n % 2 == 0 ? 1 : 0);  // b_1 .. b_{floor(n/2)}
    std::vector<int> v(static_cast<std::size_t>(free), 0);
    while (true)
    {
        std::vector<int> b(static_cast<std::size_t>(n + 1));
        b[0] = b[n] = 1;
        for (int k = 1; k <= free; ++k)
            b[k] = b[n - k] = v[k - 1];
        out.push_back(b);
        int i = 0;
        while (i < free && v[i] == cap)
            v[i++] = 0;
        if (i == free)
            break;
        ++v[i];
    }
    return out;
}

}  // namespace

TEST_CASE("summaries of complexes", "[obstruction]")
{
    const auto t3 = summarize(torus(3));
    REQUIRE(t3.dimension == 3);
    REQUIRE(t3.betti == std::vector<int>{1, 3, 3, 1});
    REQUIRE_FALSE(t3.has_middle_data());
    REQUIRE(t3.source == SummarySource::computed);

    const auto s2s2 = summarize(product_complex(sphere(2), sphere(2)));
    REQUIRE(s2s2.b_plus == 1);
    REQUIRE(s2s2.b_minus == 1);
    REQUIRE(s2s2.signature() == 0);

    const auto g2 = summarize(surface(2));
    REQUIRE(g2.betti == std::vector<int>{1, 4, 1});
    REQUIRE(g2.euler_characteristic() == -2);

    REQUIRE_THROWS_AS(summarize(io::load_complex(data_path("rp2_6.json"))), std::invalid_argument);
    REQUIRE_THROWS_AS(summarize(build_complex({{0, 1, 2}})), std::invalid_argument);
}

TEST_CASE("summary validation", "[obstruction]")
{
    REQUIRE_THROWS_AS(make(2, {1, 2}).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(make(2, {1, 2, 2}).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(make(2, {2, 0, 2}).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(make(4, {1, 0, 2, 0, 1}, 1, 0).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(make(4, {1, 0, 2, 0, 1}, 1).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(make(2, {1, 0, 1}, 1, 0).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(make(0, {1}).validate(), std::invalid_argument);
    auto s = make(2, {1, 0, 1});
    s.orientable = false;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("obstruction corpus", "[obstruction]")
{
    SECTION("genus two surface")
    {
        const auto r = check_and_classify(summarize(surface(2)));
        REQUIRE(r.verdict == Verdict::obstructed);
        REQUIRE(r.fired() == Ids{"R1", "R5"});
        REQUIRE(status_of(r, "R4") == RuleStatus::not_applicable);
        REQUIRE_FALSE(r.model.has_value());
    }
    SECTION("K3")
    {
        const auto s = io::load_summary(data_path("summaries/k3.json"));
        REQUIRE(s.source == SummarySource::user_supplied);
        const auto r = check_and_classify(s);
        REQUIRE(r.verdict == Verdict::obstructed);
        REQUIRE(r.fired() == Ids{"R1", "R2", "R11"});
    }
    SECTION("b_1 = 3 in dimension four")
    {
        const auto r = check_and_classify(io::load_summary(data_path("summaries/b1_three_4d.json")));
        REQUIRE(r.fired() == Ids{"R3", "R7"});
    }
    SECTION("symmetric models")
    {
        const std::vector<std::pair<std::string, std::string>> cases = {
            {"s2_x_t2", "S²×T²"}, {"s3_x_s1", "S³×S¹"}, {"t4", "T⁴"},
            {"cp2", "ℂP²"},       {"s2_x_s2", "S²×S²"}, {"s2_x_s1", "S²×S¹"},
        };
        for (const auto& [file, label] : cases)
        {
            INFO(file);
            const auto r = check_and_classify(io::load_summary(data_path("summaries/" + file + ".json")));
            REQUIRE(r.verdict == Verdict::passes_elementary_tests);
            REQUIRE(r.fired().empty());
            REQUIRE(r.model == label);
        }
    }
    SECTION("complexes")
    {
        REQUIRE(check_and_classify(summarize(torus(4))).model == "T⁴");
        REQUIRE(check_and_classify(summarize(torus(3))).model == "T³");
        REQUIRE(check_and_classify(summarize(product_complex(sphere(2), sphere(2)))).model == "S²×S²");
        REQUIRE(check_and_classify(summarize(sphere(3))).model == "S³-rational");
    }
}

TEST_CASE("classification examples", "[obstruction]")
{
    REQUIRE(classify_symmetric_model(make(4, {1, 2, 2, 2, 1}, 1, 1)) == "S²×T²");
    REQUIRE(classify_symmetric_model(make(3, {1, 1, 1, 1})) == "S²×S¹");
    REQUIRE(classify_symmetric_model(make(4, {1, 0, 1, 0, 1}, 1, 0)) == "ℂP²");
    REQUIRE(classify_symmetric_model(make(4, {1, 0, 1, 0, 1}, 0, 1)) == "reversed-ℂP²");
    REQUIRE(classify_symmetric_model(make(1, {1, 1})) == "S¹");
    REQUIRE(classify_symmetric_model(make(2, {1, 0, 1})) == "S²");
    REQUIRE_FALSE(classify_symmetric_model(make(4, {1, 0, 2, 0, 1})).has_value());
    REQUIRE_THROWS_AS(classify_symmetric_model(make(5, {1, 0, 0, 0, 0, 1})), std::invalid_argument);
}

TEST_CASE("rules that do not apply are reported as such", "[obstruction]")
{
    const auto r = check_obstructions(make(3, {1, 2, 2, 1}));
    REQUIRE(r.rules.size() == 11);
    REQUIRE(r.fired() == Ids{"R3", "R6"});
    for (const char* id : {"R2", "R5", "R7", "R8", "R9", "R10", "R11"})
        REQUIRE(status_of(r, id) == RuleStatus::not_applicable);

    const auto bare = check_obstructions(make(4, {1, 0, 22, 0, 1}));
    REQUIRE(bare.fired() == Ids{"R1"});
    for (const char* id : {"R2", "R8", "R9", "R10", "R11"})
        REQUIRE(status_of(bare, id) == RuleStatus::not_evaluated);

    // Dimension 4, b_1 = 1 forces b_2 = 0 (and chi = 0).
    REQUIRE(check_obstructions(make(4, {1, 1, 2, 1, 1}, 1, 1)).fired() == Ids{"R4", "R9"});
    // b_1 = 2 with a definite form.
    REQUIRE(check_obstructions(make(4, {1, 2, 2, 2, 1}, 2, 0)).fired() == Ids{"R8"});
    // Even b_2^+ with b_1 = 0.
    REQUIRE(check_obstructions(make(4, {1, 0, 2, 0, 1}, 2, 0)).fired() == Ids{"R10"});
    // Nonzero b_1 with nonzero Euler characteristic in dimension 4.
    REQUIRE(check_obstructions(make(4, {1, 1, 1, 1, 1}, 1, 0)).fired() == Ids{"R4", "R9"});
    // Dimension 6: only the general rules apply.
    REQUIRE(check_obstructions(make(6, {1, 7, 0, 0, 0, 7, 1})).fired() == Ids{"R1", "R4"});
}

TEST_CASE("passing every rule implies a model label", "[obstruction]")
{
    long long checked = 0, passing = 0;
    std::set<std::string> labels;
    for (int n = 1; n <= 4; ++n)
        for (const auto& b : symmetric_betti_vectors(n, 8))
        {
            std::vector<CohomologySummary> variants;
            if (n == 4)
                for (int bp = 0; bp <= b[2]; ++bp)
                    variants.push_back(make(4, b, bp, b[2] - bp));
            else
                variants.push_back(make(n, b));
            for (const auto& s : variants)
            {
                ++checked;
                const auto r = check_and_classify(s);
                if (r.verdict != Verdict::passes_elementary_tests)
                    continue;
                ++passing;
                INFO("n = " << n << ", betti " << detail::join(s.betti));
                REQUIRE(r.model.has_value());
                labels.insert(*r.model);
            }
        }
    REQUIRE(checked == 424);
    REQUIRE(labels.size() == 13);
    REQUIRE(passing == 13);
}

TEST_CASE("rules are monotone in evidence", "[obstruction]")
{
    for (const auto& b : symmetric_betti_vectors(4, 8))
    {
        const auto without = check_obstructions(make(4, b)).fired();
        for (int bp = 0; bp <= b[2]; ++bp)
        {
            const auto with = check_obstructions(make(4, b, bp, b[2] - bp)).fired();
            REQUIRE(std::includes(with.begin(), with.end(), without.begin(), without.end(),
                                  [](const std::string& x, const std::string& y) {
                                      return std::stoi(x.substr(1)) < std::stoi(y.substr(1));
                                  }));
        }
    }
}

TEST_CASE("checker is a pure function", "[obstruction]")
{
    const auto s = io::load_summary(data_path("summaries/k3.json"));
    const auto a = check_and_classify(s), b = check_and_classify(s);
    REQUIRE(io::canonical(io::obstruction_to_json(a)) == io::canonical(io::obstruction_to_json(b)));
}

TEST_CASE("binomial coefficients", "[obstruction]")
{
    REQUIRE(binomial(4, 2) == 6);
    REQUIRE(binomial(8, 4) == 70);
    REQUIRE(binomial(3, 5) == 0);
}
