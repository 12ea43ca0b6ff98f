// hodgeformal command-line front end.
//
// Exit codes: 0 success, 1 obstructed verdict, 2 usage error,
// 3 numerical or internal failure.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hodgeformal/hodgeformal.hpp>

namespace hf = hodgeformal;
using hf::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitObstructed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

class Stopwatch
{
public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void emit(const json& j, const std::string& path)
{
    if (path.empty() || path == "-")
        std::cout << hf::io::canonical(j);
    else
        hf::io::write_json(path, j);
}

/// A complex file path, or a generator identifier when no such file exists.
hf::SimplicialComplex load_input(const std::string& arg)
{
    if (std::filesystem::exists(arg))
        return hf::io::load_complex(arg);
    if (arg.find(':') != std::string::npos)
        return hf::make_complex(arg);
    throw UsageError("no such complex file: " + arg);
}

json tool_json() { return {{"name", "hodgeformal"}, {"version", hf::io::kToolVersion}}; }

json complex_info(const hf::SimplicialComplex& K, bool closed, std::optional<bool> orientable)
{
    json j = {
        {"name", K.name()},
        {"dimension", K.dimension()},
        {"f_vector", K.f_vector()},
        {"euler_characteristic", hf::euler_characteristic(K)},
        {"closed_pseudomanifold", closed},
    };
    j["orientable"] = orientable ? json(*orientable) : json(nullptr);
    return j;
}

// ------------------------------------------------------------------ generate

struct GenerateOptions
{
    std::string identifier;
    std::string output;
};

int run_generate(const GenerateOptions& opt)
{
    const auto K = hf::make_complex(opt.identifier);
    emit(hf::io::complex_to_json(K), opt.output);
    return kExitOk;
}

// ------------------------------------------------------------------- analyze

struct AnalyzeOptions
{
    std::string input;
    std::string weights;
    std::string output;
    bool betti = false;
    bool hodge = false;
    bool formality = false;
    bool obstructions = false;
    bool all = false;
    bool symmetric_product = false;
    bool no_timings = false;
    double tolerance = hf::kHarmonicTolerance;
};

int run_analyze(AnalyzeOptions opt)
{
    if (!(opt.betti || opt.hodge || opt.formality || opt.obstructions))
        opt.all = true;
    if (opt.all)
        opt.betti = opt.hodge = opt.formality = opt.obstructions = true;
    if (opt.formality)
        opt.hodge = true;
    opt.betti = true;

    Stopwatch clock;
    json timings = json::object();
    json errors = json::array();
    int exit_code = kExitOk;

    const auto K = load_input(opt.input);
    const auto w = opt.weights.empty() ? hf::unit_weights(K) : hf::io::weights_from_json(hf::io::read_json(opt.weights), K);
    const bool closed = hf::is_closed_pseudomanifold(K);
    std::optional<bool> orientable;
    if (closed)
        orientable = hf::orient(K).has_value();
    timings["load"] = clock.lap();

    json report = {{"tool", tool_json()}, {"complex", complex_info(K, closed, orientable)}};
    report["weights"] = opt.weights.empty() ? "unit" : opt.weights;
    report["tolerance"] = opt.tolerance;

    const auto betti = hf::betti_numbers(K);
    report["betti"] = betti.values;
    report["euler_characteristic_from_betti"] = betti.euler_characteristic();
    report["duality"] = closed && *orientable ? json(hf::poincare_duality_check(K, betti)) : json(nullptr);
    timings["betti"] = clock.lap();

    std::vector<hf::HarmonicBasis> bases;
    if (opt.hodge)
    {
        const auto cache = hf::io::BasisCache::from_environment();
        json degrees = json::array();
        int hits = 0;
        try
        {
            for (int k = 0; k <= K.dimension(); ++k)
            {
                bool hit = false;
                bases.push_back(hf::io::cached_harmonic_basis(K, w, k, opt.tolerance, betti[static_cast<std::size_t>(k)],
                                                              cache, &hit));
                hits += hit;
                const auto& hb = bases.back();
                degrees.push_back({
                    {"degree", k},
                    {"dimension", hb.size()},
                    {"method", hb.method},
                    {"residual_bound", hb.residual_bound},
                    {"spectral_gap", hb.spectral_gap},
                    {"lambda_max", hb.lambda_max},
                });
            }
            json cache_info = nullptr;
            if (cache)
                cache_info = {{"directory", cache->directory().string()}, {"hits", hits}};
            report["hodge"] = {{"degrees", degrees}, {"cache", cache_info}};
        }
        catch (const std::runtime_error& e)
        {
            errors.push_back({{"stage", "hodge"}, {"message", e.what()}});
            exit_code = kExitNumerical;
            bases.clear();
        }
        timings["hodge"] = clock.lap();
    }

    const bool have_bases = bases.size() == static_cast<std::size_t>(K.dimension() + 1);
    if (opt.hodge && have_bases && closed && *orientable && K.dimension() % 2 == 0)
    {
        try
        {
            const int m = K.dimension() / 2;
            report["intersection_form"] = hf::io::intersection_form_to_json(hf::intersection_form(K, w, bases[static_cast<std::size_t>(m)]));
        }
        catch (const std::runtime_error& e)
        {
            errors.push_back({{"stage", "intersection_form"}, {"message", e.what()}});
            exit_code = kExitNumerical;
        }
        timings["intersection_form"] = clock.lap();
    }

    if (opt.formality && have_bases)
    {
        try
        {
            hf::FormalityOptions fo;
            fo.tolerance = opt.tolerance;
            fo.symmetric_product = opt.symmetric_product;
            const hf::HodgeContext ctx(K, w, betti, bases);
            report["formality"] = hf::io::formality_to_json(hf::formality_residual(ctx, fo));
        }
        catch (const std::exception& e)
        {
            errors.push_back({{"stage", "formality"}, {"message", e.what()}});
            exit_code = kExitNumerical;
        }
        timings["formality"] = clock.lap();
    }

    if (opt.obstructions)
    {
        if (!closed || !*orientable)
        {
            report["obstructions"] = {{"skipped", "requires a closed orientable pseudomanifold"}};
        }
        else
        {
            try
            {
                hf::CohomologySummary s;
                s.name = K.name();
                s.dimension = K.dimension();
                s.orientable = true;
                s.betti = betti.values;
                s.source = hf::SummarySource::computed;
                if (s.dimension % 4 == 0)
                {
                    const int m = s.dimension / 2;
                    const auto form = have_bases
                                          ? hf::intersection_form(K, w, bases[static_cast<std::size_t>(m)])
                                          : hf::intersection_form(K, w);
                    s.b_plus = form.b_plus;
                    s.b_minus = form.b_minus;
                }
                report["summary"] = hf::io::summary_to_json(s);
                const auto rep = s.dimension <= 4 ? hf::check_and_classify(s) : hf::check_obstructions(s);
                report["obstructions"] = hf::io::obstruction_to_json(rep);
                if (rep.verdict == hf::Verdict::obstructed && exit_code == kExitOk)
                    exit_code = kExitObstructed;
            }
            catch (const std::runtime_error& e)
            {
                errors.push_back({{"stage", "obstructions"}, {"message", e.what()}});
                exit_code = kExitNumerical;
            }
        }
        timings["obstructions"] = clock.lap();
    }

    report["errors"] = errors;
    if (!opt.no_timings)
        report["timings"] = timings;
    emit(report, opt.output);
    return exit_code;
}

// --------------------------------------------------------------------- check

struct CheckOptions
{
    std::string input;
    std::string output;
};

int run_check(const CheckOptions& opt)
{
    const auto s = hf::io::load_summary(opt.input);
    const auto rep = s.dimension <= 4 ? hf::check_and_classify(s) : hf::check_obstructions(s);
    json report = {{"tool", tool_json()}, {"summary", hf::io::summary_to_json(s)}, {"obstructions", hf::io::obstruction_to_json(rep)}};
    emit(report, opt.output);
    return rep.verdict == hf::Verdict::obstructed ? kExitObstructed : kExitOk;
}

// -------------------------------------------------------------------- search

struct SearchOptions
{
    std::string input;
    std::string output;
    std::string weights_out;
    std::string trace_out;
    std::string start = "random";
    std::vector<int> free_degrees;
    bool no_timings = false;
    hf::SearchConfig cfg;
};

int run_search(SearchOptions opt)
{
    opt.cfg.start = opt.start == "unit" ? hf::SearchStart::unit : hf::SearchStart::random;
    opt.cfg.free_degrees = opt.free_degrees;
    Stopwatch clock;
    const auto K = load_input(opt.input);
    const auto res = hf::search_formal_weights(K, opt.cfg);
    const double elapsed = clock.lap();

    if (!opt.weights_out.empty())
        hf::io::write_json(opt.weights_out, hf::io::weights_to_json(res.weights));
    if (!opt.trace_out.empty())
        hf::io::write_text(opt.trace_out, hf::io::trace_csv(res.trace));

    json report = {
        {"tool", tool_json()},
        {"complex", {{"name", K.name()}, {"f_vector", K.f_vector()}}},
        {"config",
         {
             {"seed", opt.cfg.seed},
             {"max_iterations", opt.cfg.max_iterations},
             {"tolerance", opt.cfg.tolerance},
             {"step", opt.cfg.step},
             {"min_step", opt.cfg.min_step},
             {"start", opt.start},
             {"free_degrees", opt.free_degrees},
             {"product", opt.cfg.formality.symmetric_product ? "symmetrized" : "alexander-whitney"},
         }},
        {"trace", res.trace},
        {"initial_aggregate", res.trace.front()},
        {"final_aggregate", res.trace.back()},
        {"evaluations", res.evaluations},
        {"rejected_evaluations", res.rejected_evaluations},
        {"stop_reason", res.stop_reason},
    };
    if (!opt.no_timings)
        report["timings"] = {{"search", elapsed}};
    emit(report, opt.output);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weighted combinatorial Hodge theory and formality probes on triangulated manifolds", "hodgeformal"};
    app.set_version_flag("--version", std::string(hf::io::kToolVersion));
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Write a generated complex as JSON");
    g->add_option("identifier", gen.identifier,
                  "sphere:N, torus:N, surface:G, product:A,B, connsum:A,B or file:PATH")
        ->required();
    g->add_option("-o,--output", gen.output, "Output file (default: stdout)");

    AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "Run homology, Hodge, formality and obstruction stages");
    a->add_option("complex", an.input, "Complex JSON file or generator identifier")->required();
    a->add_option("-w,--weights", an.weights, "Weights JSON file (default: unit weights)")->check(CLI::ExistingFile);
    a->add_option("-o,--output", an.output, "Report file (default: stdout)");
    a->add_flag("--betti", an.betti, "Betti numbers and duality");
    a->add_flag("--hodge", an.hodge, "Harmonic bases and intersection form");
    a->add_flag("--formality", an.formality, "Formality residuals (implies --hodge)");
    a->add_flag("--obstructions", an.obstructions, "Obstruction rules and model classification");
    a->add_flag("--all", an.all, "All stages (the default when no stage is selected)");
    a->add_flag("--symmetric-product", an.symmetric_product, "Use the graded-symmetrized cup product");
    a->add_flag("--no-timings", an.no_timings, "Omit wall-clock timings from the report");
    a->add_option("--tol", an.tolerance, "Relative nullspace tolerance")->check(CLI::PositiveNumber);

    CheckOptions ck;
    auto* c = app.add_subcommand("check", "Check a cohomology summary against the obstruction rules");
    c->add_option("summary", ck.input, "Summary JSON file")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--output", ck.output, "Report file (default: stdout)");

    SearchOptions se;
    auto* s = app.add_subcommand("search", "Search weights minimizing the aggregate formality residual");
    s->add_option("complex", se.input, "Complex JSON file or generator identifier")->required();
    s->add_option("--seed", se.cfg.seed, "Random seed (nonnegative integer)");
    s->add_option("--max-iterations", se.cfg.max_iterations, "Maximum number of sweeps")->check(CLI::NonNegativeNumber);
    s->add_option("--tolerance", se.cfg.tolerance, "Stop when a sweep improves by less than this")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--step", se.cfg.step, "Initial log-space step")->check(CLI::PositiveNumber);
    s->add_option("--min-step", se.cfg.min_step, "Smallest log-space step")->check(CLI::PositiveNumber);
    s->add_option("--start", se.start, "Starting weights")->check(CLI::IsMember({"unit", "random"}));
    s->add_option("--free-degrees", se.free_degrees, "Degrees whose weights may change (default: all)")->delimiter(',');
    s->add_flag("--symmetric-product", se.cfg.formality.symmetric_product, "Use the graded-symmetrized cup product");
    s->add_option("--weights-out", se.weights_out, "Write the best weights here");
    s->add_option("--trace-out", se.trace_out, "Write the residual trace as CSV here");
    s->add_option("-o,--output", se.output, "Report file (default: stdout)");
    s->add_flag("--no-timings", se.no_timings, "Omit wall-clock timings from the report");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (*g)
            return run_generate(gen);
        if (*a)
            return run_analyze(an);
        if (*c)
            return run_check(ck);
        return run_search(se);
    }
    catch (const UsageError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const hf::IdentifierError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const hf::io::IoError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const hf::io::SchemaError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
