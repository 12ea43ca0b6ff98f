#pragma once

// JSON and CSV interchange: complexes, weights, cohomology summaries,
// harmonic bases, reports, and the on-disk basis cache.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <json.hpp>

#include "complex.hpp"
#include "cup.hpp"
#include "formality.hpp"
#include "hodge.hpp"
#include "homology.hpp"
#include "obstruction.hpp"

namespace hodgeformal::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Thrown for malformed or schema-violating input files.
struct SchemaError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a file cannot be opened, read or written.
struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string canonical(const json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("error while writing " + path.string());
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, canonical(j)); }

// ---------------------------------------------------------------- complexes

inline json complex_to_json(const SimplicialComplex& K)
{
    json facets = json::array();
    for (const auto& f : K.facets())
        facets.push_back(f);
    return {
        {"name", K.name()},
        {"facets", facets},
        {"f_vector", K.f_vector()},
        {"euler_characteristic", euler_characteristic(K)},
    };
}

/// Validates and canonicalizes; fields other than name/facets are ignored.
inline SimplicialComplex complex_from_json(const json& j)
{
    if (!j.is_object())
        throw SchemaError("complex: expected a JSON object");
    if (!j.contains("facets") || !j.at("facets").is_array())
        throw SchemaError("complex: missing \"facets\" array");
    std::vector<Simplex> facets;
    for (const auto& f : j.at("facets"))
    {
        if (!f.is_array())
            throw SchemaError("complex: each facet must be an array of vertex ids");
        Simplex s;
        for (const auto& v : f)
        {
            if (!v.is_number_integer())
                throw SchemaError("complex: vertex ids must be integers");
            const auto id = v.get<long long>();
            if (id < 0 || id > std::numeric_limits<int>::max())
                throw SchemaError("complex: vertex ids must be nonnegative 32-bit integers");
            s.push_back(static_cast<Vertex>(id));
        }
        facets.push_back(std::move(s));
    }
    std::string name;
    if (j.contains("name"))
    {
        if (!j.at("name").is_string())
            throw SchemaError("complex: \"name\" must be a string");
        name = j.at("name").get<std::string>();
    }
    try
    {
        return build_complex(std::move(facets), name);
    }
    catch (const std::invalid_argument& e)
    {
        throw SchemaError(std::string("complex: ") + e.what());
    }
}

inline SimplicialComplex load_complex(const std::filesystem::path& path) { return complex_from_json(read_json(path)); }

// ------------------------------------------------------------------ weights

inline json weights_to_json(const MetricWeights& w)
{
    json deg = json::array();
    for (const auto& v : w.by_degree)
        deg.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return {{"weights", deg}};
}

inline MetricWeights weights_from_json(const json& j, const SimplicialComplex& K)
{
    if (!j.is_object() || !j.contains("weights") || !j.at("weights").is_array())
        throw SchemaError("weights: expected an object with a \"weights\" array");
    MetricWeights w;
    for (const auto& deg : j.at("weights"))
    {
        if (!deg.is_array())
            throw SchemaError("weights: each degree must be an array of numbers");
        Eigen::VectorXd v(static_cast<Eigen::Index>(deg.size()));
        for (std::size_t i = 0; i < deg.size(); ++i)
        {
            if (!deg[i].is_number())
                throw SchemaError("weights: entries must be numbers");
            v(static_cast<Eigen::Index>(i)) = deg[i].get<double>();
        }
        w.by_degree.push_back(std::move(v));
    }
    try
    {
        w.validate(K);
    }
    catch (const std::invalid_argument& e)
    {
        throw SchemaError(e.what());
    }
    return w;
}

// ---------------------------------------------------------------- summaries

inline json summary_to_json(const CohomologySummary& s)
{
    json j = {
        {"name", s.name},
        {"dimension", s.dimension},
        {"betti", s.betti},
        {"orientable", s.orientable},
        {"source", to_string(s.source)},
        {"euler_characteristic", s.euler_characteristic()},
    };
    if (s.has_middle_data())
    {
        j["b_plus"] = *s.b_plus;
        j["b_minus"] = *s.b_minus;
        j["signature"] = *s.signature();
    }
    return j;
}

inline CohomologySummary summary_from_json(const json& j)
{
    if (!j.is_object())
        throw SchemaError("summary: expected a JSON object");
    auto require = [&](const char* key) -> const json& {
        if (!j.contains(key))
            throw SchemaError(std::string("summary: missing \"") + key + "\"");
        return j.at(key);
    };
    CohomologySummary s;
    s.source = SummarySource::user_supplied;
    if (j.contains("name"))
    {
        if (!j.at("name").is_string())
            throw SchemaError("summary: \"name\" must be a string");
        s.name = j.at("name").get<std::string>();
    }
    const auto& dim = require("dimension");
    if (!dim.is_number_integer())
        throw SchemaError("summary: \"dimension\" must be an integer");
    s.dimension = dim.get<int>();
    const auto& betti = require("betti");
    if (!betti.is_array())
        throw SchemaError("summary: \"betti\" must be an array");
    for (const auto& b : betti)
    {
        if (!b.is_number_integer())
            throw SchemaError("summary: Betti numbers must be integers");
        s.betti.push_back(b.get<int>());
    }
    const auto& orientable = require("orientable");
    if (!orientable.is_boolean())
        throw SchemaError("summary: \"orientable\" must be a boolean");
    s.orientable = orientable.get<bool>();
    for (const char* key : {"b_plus", "b_minus"})
        if (j.contains(key))
        {
            if (!j.at(key).is_number_integer())
                throw SchemaError(std::string("summary: \"") + key + "\" must be an integer");
            (std::string(key) == "b_plus" ? s.b_plus : s.b_minus) = j.at(key).get<int>();
        }
    if (j.contains("signature") && s.has_middle_data())
    {
        if (!j.at("signature").is_number_integer() || j.at("signature").get<int>() != *s.signature())
            throw SchemaError("summary: \"signature\" must equal b_plus - b_minus");
    }
    try
    {
        s.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw SchemaError(e.what());
    }
    return s;
}

inline CohomologySummary load_summary(const std::filesystem::path& path) { return summary_from_json(read_json(path)); }

// ------------------------------------------------------------------ reports

inline json to_json(const exact::BigInt& x)
{
    if (x >= std::numeric_limits<long long>::min() && x <= std::numeric_limits<long long>::max())
        return static_cast<long long>(x);
    return x.str();
}

inline json matrix_to_json(const Eigen::MatrixXd& M)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        std::vector<double> r(static_cast<std::size_t>(M.cols()));
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            r[static_cast<std::size_t>(j)] = M(i, j);
        rows.push_back(r);
    }
    return rows;
}

inline json intersection_form_to_json(const IntersectionForm& f)
{
    json integral = json::array();
    for (const auto& row : f.integral)
    {
        json r = json::array();
        for (const auto& x : row)
            r.push_back(to_json(x));
        integral.push_back(r);
    }
    json j = {
        {"degree", f.degree},
        {"symmetric", f.symmetric},
        {"rank", f.rank},
        {"b_zero", f.b_zero},
        {"harmonic_matrix", matrix_to_json(f.harmonic)},
        {"integral_matrix", integral},
        {"smallest_relative_eigenvalue", f.smallest_relative},
    };
    if (f.b_plus)
    {
        j["b_plus"] = *f.b_plus;
        j["b_minus"] = *f.b_minus;
        j["signature"] = *f.signature;
    }
    return j;
}

inline json harmonic_basis_to_json(const HarmonicBasis& hb)
{
    json vectors = json::array();
    for (int i = 0; i < hb.size(); ++i)
    {
        const auto c = hb.vectors.col(i);
        vectors.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    }
    return {
        {"degree", hb.degree},
        {"tolerance", hb.tolerance},
        {"method", hb.method},
        {"residual_bound", hb.residual_bound},
        {"spectral_gap", hb.spectral_gap},
        {"lambda_max", hb.lambda_max},
        {"vectors", vectors},
    };
}

inline HarmonicBasis harmonic_basis_from_json(const json& j, const Eigen::VectorXd& weights)
{
    HarmonicBasis hb;
    hb.degree = j.at("degree").get<int>();
    hb.tolerance = j.at("tolerance").get<double>();
    hb.method = j.at("method").get<std::string>();
    hb.residual_bound = j.at("residual_bound").get<double>();
    hb.spectral_gap = j.at("spectral_gap").get<double>();
    hb.lambda_max = j.at("lambda_max").get<double>();
    hb.weights = weights;
    const auto& vectors = j.at("vectors");
    hb.vectors.resize(weights.size(), static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i)
    {
        const auto v = vectors[i].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != weights.size())
            throw SchemaError("harmonic basis: vector length mismatch");
        for (std::size_t r = 0; r < v.size(); ++r)
            hb.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = v[r];
    }
    return hb;
}

inline json formality_to_json(const FormalityReport& r)
{
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({
            {"degrees", {p.degree_a, p.degree_b}},
            {"indices", {p.index_a, p.index_b}},
            {"residual", p.value.residual},
            {"product_norm", p.value.product_norm},
            {"zero_product", p.value.zero_product},
            {"unit_factor", p.value.unit_factor},
        });
    json constancy = json::array();
    for (const auto& c : r.constancy)
        constancy.push_back({{"degree", c.degree}, {"index", c.index}, {"coefficient_of_variation", c.coefficient_of_variation}});
    return {
        {"pairs", pairs},
        {"aggregate", r.aggregate},
        {"discretely_formal", r.discretely_formal()},
        {"norm_constancy", constancy},
        {"spectral_gaps", r.spectral_gaps},
        {"product", r.symmetric_product ? "symmetrized" : "alexander-whitney"},
    };
}

inline json obstruction_to_json(const ObstructionReport& r)
{
    json rules = json::array();
    for (const auto& x : r.rules)
        rules.push_back({{"id", x.id}, {"citation", x.citation}, {"status", to_string(x.status)}, {"detail", x.detail}});
    json j = {{"verdict", to_string(r.verdict)}, {"fired", r.fired()}, {"rules", rules}};
    j["model"] = r.model ? json(*r.model) : json(nullptr);
    return j;
}

// -------------------------------------------------------------------- trace

inline std::string trace_csv(const std::vector<double>& trace)
{
    std::ostringstream os;
    os << "iteration,aggregate\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace[i]);
        os << buf;
    }
    return os.str();
}

// -------------------------------------------------------------------- cache

/// 64-bit FNV-1a.
class Fnv1a
{
public:
    void bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i)
        {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    template <class T>
    void value(const T& x)
    {
        bytes(&x, sizeof x);
    }
    std::uint64_t digest() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// Content key of (complex, weights, tolerance, degree).
inline std::string basis_cache_key(const SimplicialComplex& K, const MetricWeights& w, int k, double tol)
{
    Fnv1a h;
    h.bytes(kToolVersion, std::strlen(kToolVersion));
    h.value(K.dimension());
    for (const auto& f : K.facets())
        for (Vertex v : f)
            h.value(v);
    for (const auto& v : w.by_degree)
    {
        h.value(static_cast<std::int64_t>(v.size()));
        h.bytes(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
    }
    h.value(tol);
    h.value(k);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
    return buf;
}

/**
 * Directory of serialized harmonic bases. Writers take an exclusive flock
 * on a per-entry lock file and publish by rename, so readers never observe
 * a partial file.
 */
class BasisCache
{
public:
    explicit BasisCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    /// Cache rooted at $HODGEFORMAL_CACHE_DIR, if set and nonempty.
    static std::optional<BasisCache> from_environment()
    {
        const char* d = std::getenv("HODGEFORMAL_CACHE_DIR");
        if (d == nullptr || *d == '\0')
            return std::nullopt;
        return BasisCache(d);
    }

    std::optional<HarmonicBasis> load(const std::string& key, const Eigen::VectorXd& weights) const
    {
        const auto path = dir_ / (key + ".json");
        Lock lock(dir_ / (key + ".lock"), LOCK_SH);
        if (!std::filesystem::exists(path))
            return std::nullopt;
        try
        {
            return harmonic_basis_from_json(read_json(path), weights);
        }
        catch (const std::exception&)
        {
            return std::nullopt;  // unreadable entries are recomputed
        }
    }

    void store(const std::string& key, const HarmonicBasis& hb) const
    {
        const auto path = dir_ / (key + ".json");
        Lock lock(dir_ / (key + ".lock"), LOCK_EX);
        const auto tmp = dir_ / (key + ".json.tmp." + std::to_string(::getpid()));
        write_json(tmp, harmonic_basis_to_json(hb));
        std::filesystem::rename(tmp, path);
    }

    const std::filesystem::path& directory() const { return dir_; }

private:
    class Lock
    {
    public:
        Lock(const std::filesystem::path& p, int mode) : fd_(::open(p.c_str(), O_CREAT | O_RDWR, 0644))
        {
            if (fd_ < 0)
                throw std::runtime_error("cannot open lock file " + p.string());
            if (::flock(fd_, mode) != 0)
            {
                ::close(fd_);
                throw std::runtime_error("cannot lock " + p.string());
            }
        }
        ~Lock()
        {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
        Lock(const Lock&) = delete;
        Lock& operator=(const Lock&) = delete;

    private:
        int fd_;
    };

    std::filesystem::path dir_;
};

/// harmonic_basis through an optional cache.
inline HarmonicBasis cached_harmonic_basis(const SimplicialComplex& K,
                                           const MetricWeights& w,
                                           int k,
                                           double tol,
                                           int expected_dim,
                                           const std::optional<BasisCache>& cache,
                                           bool* hit = nullptr)
{
    if (hit)
        *hit = false;
    if (!cache)
        return harmonic_basis(K, w, k, tol, expected_dim);
    const auto key = basis_cache_key(K, w, k, tol);
    if (auto hb = cache->load(key, w[k]); hb && hb->degree == k && hb->size() == expected_dim)
    {
        if (hit)
            *hit = true;
        return *hb;
    }
    auto hb = harmonic_basis(K, w, k, tol, expected_dim);
    cache->store(key, hb);
    return hb;
}

}  // namespace hodgeformal::io
