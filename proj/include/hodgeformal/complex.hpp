#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hodgeformal {

using Vertex = int;

/// A simplex is a strictly increasing tuple of vertex ids.
using Simplex = std::vector<Vertex>;

/**
 * Finite pure simplicial complex with a global vertex order.
 *
 * All faces are stored, grouped by dimension. Within one dimension the
 * simplices are sorted lexicographically and that position is the simplex's
 * index everywhere else in the library (boundary rows/columns, cochain
 * coefficients, weights).
 */
class SimplicialComplex
{
public:
    SimplicialComplex() = default;

    /// Top nonempty degree, or -1 for the empty complex.
    int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }

    int vertex_count() const { return vertex_count_; }

    const std::vector<Simplex>& simplices(int k) const
    {
        if (k < 0 || k > dimension())
            throw std::out_of_range("simplex degree out of range");
        return by_dim_[static_cast<std::size_t>(k)];
    }

    std::size_t count(int k) const
    {
        if (k < 0 || k > dimension())
            return 0;
        return by_dim_[static_cast<std::size_t>(k)].size();
    }

    const std::vector<Simplex>& facets() const { return simplices(dimension()); }

    std::vector<std::size_t> f_vector() const
    {
        std::vector<std::size_t> f;
        for (const auto& level : by_dim_)
            f.push_back(level.size());
        return f;
    }

    /// Position of `s` inside simplices(s.size()-1), if present.
    std::optional<std::size_t> find(const Simplex& s) const
    {
        const int k = static_cast<int>(s.size()) - 1;
        if (k < 0 || k > dimension())
            return std::nullopt;
        const auto& level = by_dim_[static_cast<std::size_t>(k)];
        auto it = std::lower_bound(level.begin(), level.end(), s);
        if (it == level.end() || *it != s)
            return std::nullopt;
        return static_cast<std::size_t>(it - level.begin());
    }

    std::size_t index_of(const Simplex& s) const
    {
        auto idx = find(s);
        if (!idx)
            throw std::out_of_range("simplex not in complex");
        return *idx;
    }

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

private:
    friend SimplicialComplex build_complex(std::vector<Simplex> facets, std::string name);

    std::vector<std::vector<Simplex>> by_dim_;
    int vertex_count_ = 0;
    std::string name_;
};

/// Consistent facet signs for an orientable closed pseudomanifold.
struct Orientation
{
    std::vector<int> facet_signs;
};

/// Coefficients indexed consistently with simplices(degree).
struct Cochain
{
    int degree = 0;
    Eigen::VectorXd values;

    Cochain() = default;
    Cochain(int k, Eigen::VectorXd v) : degree(k), values(std::move(v)) {}

    static Cochain zero(const SimplicialComplex& K, int k)
    {
        return Cochain(k, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K.count(k))));
    }

    static Cochain constant(const SimplicialComplex& K, int k, double value)
    {
        return Cochain(k, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(K.count(k)), value));
    }
};

/**
 * Build the downward closure of a list of facets.
 *
 * Facets are sorted internally, duplicates are dropped, and vertex ids are
 * compacted to 0..V-1 preserving their relative order.
 */
inline SimplicialComplex build_complex(std::vector<Simplex> facets, std::string name = {})
{
    if (facets.empty())
        throw std::invalid_argument("facet list is empty");

    const std::size_t arity = facets.front().size();
    if (arity == 0)
        throw std::invalid_argument("facets must contain at least one vertex");

    std::vector<Vertex> used;
    for (auto& f : facets)
    {
        if (f.size() != arity)
            throw std::invalid_argument("all facets must have the same number of vertices");
        std::sort(f.begin(), f.end());
        if (std::adjacent_find(f.begin(), f.end()) != f.end())
            throw std::invalid_argument("facet contains a repeated vertex");
        if (f.front() < 0)
            throw std::invalid_argument("vertex ids must be nonnegative");
        used.insert(used.end(), f.begin(), f.end());
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (auto& f : facets)
        for (auto& v : f)
            v = static_cast<Vertex>(std::lower_bound(used.begin(), used.end(), v) - used.begin());

    std::sort(facets.begin(), facets.end());
    facets.erase(std::unique(facets.begin(), facets.end()), facets.end());

    const int n = static_cast<int>(arity) - 1;
    std::vector<std::vector<Simplex>> by_dim(static_cast<std::size_t>(n + 1));
    const unsigned full = (1u << arity) - 1u;
    for (const auto& f : facets)
    {
        for (unsigned mask = 1; mask <= full; ++mask)
        {
            Simplex s;
            for (std::size_t i = 0; i < arity; ++i)
                if (mask & (1u << i))
                    s.push_back(f[i]);
            by_dim[s.size() - 1].push_back(std::move(s));
        }
    }
    for (auto& level : by_dim)
    {
        std::sort(level.begin(), level.end());
        level.erase(std::unique(level.begin(), level.end()), level.end());
    }

    SimplicialComplex K;
    K.by_dim_ = std::move(by_dim);
    K.vertex_count_ = static_cast<int>(used.size());
    K.name_ = std::move(name);
    return K;
}

inline long long euler_characteristic(const SimplicialComplex& K)
{
    long long chi = 0;
    for (int k = 0; k <= K.dimension(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(K.count(k));
    return chi;
}

namespace detail {

inline Simplex drop_vertex(const Simplex& s, std::size_t position)
{
    Simplex face;
    face.reserve(s.size() - 1);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i != position)
            face.push_back(s[i]);
    return face;
}

/// For each ridge, the (facet, position) pairs that contain it.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>>
ridge_cofaces(const SimplicialComplex& K)
{
    const int n = K.dimension();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cof(K.count(n - 1));
    const auto& facets = K.facets();
    for (std::size_t f = 0; f < facets.size(); ++f)
        for (std::size_t i = 0; i < facets[f].size(); ++i)
            cof[K.index_of(drop_vertex(facets[f], i))].emplace_back(f, i);
    return cof;
}

}  // namespace detail

/**
 * Closed pseudomanifold test: every ridge lies in exactly two facets and the
 * facets are connected through ridges.
 */
inline bool is_closed_pseudomanifold(const SimplicialComplex& K)
{
    const int n = K.dimension();
    if (n < 0)
        return false;
    if (n == 0)
        return K.count(0) == 1;

    const auto cof = detail::ridge_cofaces(K);
    for (const auto& c : cof)
        if (c.size() != 2)
            return false;

    const std::size_t m = K.count(n);
    std::vector<std::vector<std::size_t>> adj(m);
    for (const auto& c : cof)
    {
        adj[c[0].first].push_back(c[1].first);
        adj[c[1].first].push_back(c[0].first);
    }
    std::vector<char> seen(m, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!q.empty())
    {
        const auto f = q.front();
        q.pop();
        for (auto g : adj[f])
            if (!seen[g])
            {
                seen[g] = 1;
                ++reached;
                q.push(g);
            }
    }
    return reached == m;
}

/**
 * Propagate facet signs across shared ridges, starting from facet 0 with +1.
 *
 * A facet with sign s induces coefficient s * (-1)^i on the ridge obtained by
 * dropping its i-th vertex; neighbouring facets must induce opposite
 * coefficients. Returns nullopt when propagation hits a contradiction.
 */
inline std::optional<Orientation> orient(const SimplicialComplex& K)
{
    if (!is_closed_pseudomanifold(K))
        throw std::invalid_argument("orient: complex is not a closed pseudomanifold");
    const int n = K.dimension();
    Orientation o;
    o.facet_signs.assign(K.count(n), 0);
    if (n == 0)
    {
        o.facet_signs[0] = 1;
        return o;
    }

    const auto cof = detail::ridge_cofaces(K);
    const auto& facets = K.facets();
    // facet -> list of (ridge index, position in facet)
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> ridges_of(facets.size());
    for (std::size_t r = 0; r < cof.size(); ++r)
        for (const auto& [f, pos] : cof[r])
            ridges_of[f].emplace_back(r, pos);

    std::queue<std::size_t> q;
    o.facet_signs[0] = 1;
    q.push(0);
    while (!q.empty())
    {
        const auto f = q.front();
        q.pop();
        for (const auto& [r, pos] : ridges_of[f])
        {
            const auto& pair = cof[r];
            const auto& other = pair[0].first == f && pair[0].second == pos ? pair[1] : pair[0];
            const int induced = o.facet_signs[f] * (pos % 2 == 0 ? 1 : -1);
            const int required = -induced * (other.second % 2 == 0 ? 1 : -1);
            int& s = o.facet_signs[other.first];
            if (s == 0)
            {
                s = required;
                q.push(other.first);
            }
            else if (s != required)
            {
                return std::nullopt;
            }
        }
    }
    return o;
}

/**
 * Staircase triangulation of |K1| x |K2|.
 *
 * The product vertex (u, v) gets id u * V2 + v, so the lexicographic order
 * on pairs is the global order. Every pair of facets contributes one
 * simplex per monotone lattice path from (0,0) to (n,m).
 */
inline SimplicialComplex product_complex(const SimplicialComplex& K1, const SimplicialComplex& K2)
{
    if (K1.dimension() < 0 || K2.dimension() < 0)
        throw std::invalid_argument("product_complex: both complexes must be nonempty");
    const int n = K1.dimension();
    const int m = K2.dimension();
    const int V2 = K2.vertex_count();

    // Step patterns: true = advance in the first factor.
    std::vector<std::vector<bool>> paths;
    std::vector<bool> steps(static_cast<std::size_t>(n + m), false);
    std::fill(steps.begin(), steps.begin() + n, true);
    std::sort(steps.begin(), steps.end());
    do
        paths.push_back(steps);
    while (std::next_permutation(steps.begin(), steps.end()));

    std::vector<Simplex> out;
    out.reserve(K1.facets().size() * K2.facets().size() * paths.size());
    for (const auto& a : K1.facets())
        for (const auto& b : K2.facets())
            for (const auto& path : paths)
            {
                Simplex s;
                s.reserve(static_cast<std::size_t>(n + m + 1));
                std::size_t i = 0, j = 0;
                s.push_back(a[i] * V2 + b[j]);
                for (bool first : path)
                {
                    if (first)
                        ++i;
                    else
                        ++j;
                    s.push_back(a[i] * V2 + b[j]);
                }
                out.push_back(std::move(s));
            }
    std::string name;
    if (!K1.name().empty() && !K2.name().empty())
        name = "product:" + K1.name() + "," + K2.name();
    return build_complex(std::move(out), std::move(name));
}

/**
 * Connected sum of two closed oriented pseudomanifolds of equal dimension.
 *
 * Facet 0 is removed from each input. The sorted vertices of K2's removed
 * facet are identified position by position with those of K1's, with the
 * first two positions swapped when that is needed for the glued boundary
 * spheres to carry opposite induced orientations. Remaining vertices of K2
 * are renumbered after K1's, preserving their order.
 */
inline SimplicialComplex connected_sum(const SimplicialComplex& K1, const SimplicialComplex& K2)
{
    const int n = K1.dimension();
    if (n != K2.dimension())
        throw std::invalid_argument("connected_sum: dimension mismatch");
    if (n < 1)
        throw std::invalid_argument("connected_sum: dimension must be at least 1");
    if (!is_closed_pseudomanifold(K1) || !is_closed_pseudomanifold(K2))
        throw std::invalid_argument("connected_sum: inputs must be closed pseudomanifolds");
    const auto o1 = orient(K1);
    const auto o2 = orient(K2);
    if (!o1 || !o2)
        throw std::invalid_argument("connected_sum: inputs must be orientable");

    const Simplex& s1 = K1.facets()[0];
    const Simplex& s2 = K2.facets()[0];
    const int sign1 = o1->facet_signs[0];
    const int sign2 = o2->facet_signs[0];

    // Position permutation applied to s2; its sign must equal -sign1*sign2.
    std::vector<std::size_t> perm(s2.size());
    std::iota(perm.begin(), perm.end(), 0);
    if (sign1 * sign2 == 1)
        std::swap(perm[0], perm[1]);

    std::vector<Vertex> relabel(static_cast<std::size_t>(K2.vertex_count()), -1);
    for (std::size_t i = 0; i < s2.size(); ++i)
        relabel[static_cast<std::size_t>(s2[i])] = s1[perm[i]];
    Vertex next = K1.vertex_count();
    for (auto& r : relabel)
        if (r < 0)
            r = next++;

    std::vector<Simplex> out;
    for (std::size_t f = 1; f < K1.facets().size(); ++f)
        out.push_back(K1.facets()[f]);
    for (std::size_t f = 1; f < K2.facets().size(); ++f)
    {
        Simplex s;
        for (auto v : K2.facets()[f])
            s.push_back(relabel[static_cast<std::size_t>(v)]);
        out.push_back(std::move(s));
    }
    std::string name;
    if (!K1.name().empty() && !K2.name().empty())
        name = "connsum:" + K1.name() + "," + K2.name();
    return build_complex(std::move(out), std::move(name));
}

/// Boundary of the (n+1)-simplex.
inline SimplicialComplex sphere(int n)
{
    if (n < 1)
        throw std::invalid_argument("sphere: n must be >= 1");
    std::vector<Simplex> facets;
    for (int skip = 0; skip <= n + 1; ++skip)
    {
        Simplex s;
        for (int v = 0; v <= n + 1; ++v)
            if (v != skip)
                s.push_back(v);
        facets.push_back(std::move(s));
    }
    return build_complex(std::move(facets), "sphere:" + std::to_string(n));
}

/// n-fold staircase product of the 3-vertex circle.
inline SimplicialComplex torus(int n)
{
    if (n < 1)
        throw std::invalid_argument("torus: n must be >= 1");
    const SimplicialComplex circle = sphere(1);
    SimplicialComplex T = circle;
    for (int i = 1; i < n; ++i)
        T = product_complex(T, circle);
    T.set_name("torus:" + std::to_string(n));
    return T;
}

/// Closed orientable surface of genus g.
inline SimplicialComplex surface(int g)
{
    if (g < 0)
        throw std::invalid_argument("surface: genus must be >= 0");
    if (g == 0)
    {
        auto S = sphere(2);
        S.set_name("surface:0");
        return S;
    }
    SimplicialComplex S = torus(2);
    for (int i = 1; i < g; ++i)
        S = connected_sum(S, torus(2));
    S.set_name("surface:" + std::to_string(g));
    return S;
}

}  // namespace hodgeformal
