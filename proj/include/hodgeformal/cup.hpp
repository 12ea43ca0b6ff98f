#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "exact.hpp"
#include "hodge.hpp"
#include "homology.hpp"

namespace hodgeformal {

/**
 * Front/back face lookup for the Alexander-Whitney product of a k-cochain
 * with an l-cochain: for the j-th (k+l)-simplex (v_0 .. v_{k+l}), front[j]
 * indexes (v_0 .. v_k) and back[j] indexes (v_k .. v_{k+l}).
 */
struct CupIndex
{
    int k = 0;
    int l = 0;
    std::vector<std::size_t> front;
    std::vector<std::size_t> back;
};

inline CupIndex cup_index(const SimplicialComplex& K, int k, int l)
{
    if (k < 0 || l < 0)
        throw std::invalid_argument("cup: negative degree");
    if (k + l > K.dimension())
        throw std::invalid_argument("cup: degree " + std::to_string(k + l) + " exceeds dimension " +
                                    std::to_string(K.dimension()));
    CupIndex idx;
    idx.k = k;
    idx.l = l;
    const auto& top = K.simplices(k + l);
    idx.front.reserve(top.size());
    idx.back.reserve(top.size());
    for (const auto& s : top)
    {
        idx.front.push_back(K.index_of(Simplex(s.begin(), s.begin() + k + 1)));
        idx.back.push_back(K.index_of(Simplex(s.begin() + k, s.end())));
    }
    return idx;
}

inline Cochain cup(const CupIndex& idx, const Cochain& a, const Cochain& b)
{
    if (a.degree != idx.k || b.degree != idx.l)
        throw std::invalid_argument("cup: cochain degrees do not match the index");
    Eigen::VectorXd v(static_cast<Eigen::Index>(idx.front.size()));
    for (std::size_t j = 0; j < idx.front.size(); ++j)
        v(static_cast<Eigen::Index>(j)) =
            a.values(static_cast<Eigen::Index>(idx.front[j])) * b.values(static_cast<Eigen::Index>(idx.back[j]));
    return Cochain(idx.k + idx.l, std::move(v));
}

/// (a cup b)(v_0 .. v_{k+l}) = a(v_0 .. v_k) * b(v_k .. v_{k+l}).
inline Cochain cup(const SimplicialComplex& K, const Cochain& a, const Cochain& b)
{
    if (static_cast<std::size_t>(a.values.size()) != K.count(a.degree) ||
        static_cast<std::size_t>(b.values.size()) != K.count(b.degree))
        throw std::invalid_argument("cup: cochain length mismatch");
    return cup(cup_index(K, a.degree, b.degree), a, b);
}

/// Integer cochain, one coefficient per simplex.
using IntegerCochain = std::vector<exact::BigInt>;

inline IntegerCochain cup(const CupIndex& idx, const IntegerCochain& a, const IntegerCochain& b)
{
    IntegerCochain out(idx.front.size());
    for (std::size_t j = 0; j < idx.front.size(); ++j)
        out[j] = a.at(idx.front[j]) * b.at(idx.back[j]);
    return out;
}

inline double evaluate_on_fundamental_class(const SimplicialComplex& K, const Orientation& o, const Cochain& c)
{
    const int n = K.dimension();
    if (c.degree != n)
        throw std::invalid_argument("evaluate_on_fundamental_class: cochain must have top degree");
    if (o.facet_signs.size() != K.count(n))
        throw std::invalid_argument("evaluate_on_fundamental_class: orientation does not match the complex");
    double sum = 0.0;
    for (std::size_t f = 0; f < o.facet_signs.size(); ++f)
        sum += o.facet_signs[f] * c.values(static_cast<Eigen::Index>(f));
    return sum;
}

inline exact::BigInt evaluate_on_fundamental_class(const Orientation& o, const IntegerCochain& c)
{
    if (o.facet_signs.size() != c.size())
        throw std::invalid_argument("evaluate_on_fundamental_class: orientation does not match the cochain");
    exact::BigInt sum = 0;
    for (std::size_t f = 0; f < c.size(); ++f)
        sum += o.facet_signs[f] > 0 ? c[f] : exact::BigInt(-c[f]);
    return sum;
}

/// Orientation of a closed pseudomanifold; throws when there is none.
inline Orientation require_orientation(const SimplicialComplex& K)
{
    auto o = orient(K);
    if (!o)
        throw std::invalid_argument("complex is not orientable");
    return *o;
}

/**
 * Integer cocycles whose classes form a basis of H^k(K; Q).
 *
 * Reducing d_{k-1} gives pivot rows S; cochains supported off S meet the
 * coboundaries only in zero, so the cocycles supported off S map
 * isomorphically onto cohomology.
 */
inline std::vector<IntegerCochain> cohomology_basis(const SimplicialComplex& K, int k)
{
    const int n = K.dimension();
    if (k < 0 || k > n)
        throw std::out_of_range("cohomology_basis: degree out of range");
    const std::size_t count = K.count(k);
    std::vector<char> pivot(count, 0);
    if (k > 0)
    {
        const auto d_prev = exact::IntegerMatrix::from_eigen(boundary_matrix(K, k).matrix).transpose();
        for (int low : exact::reduce(d_prev).low)
            if (low >= 0)
                pivot[static_cast<std::size_t>(low)] = 1;
    }
    std::vector<int> free_cols;
    for (std::size_t i = 0; i < count; ++i)
        if (!pivot[i])
            free_cols.push_back(static_cast<int>(i));

    std::vector<IntegerCochain> basis;
    if (k == n)
    {
        for (int c : free_cols)
        {
            IntegerCochain z(count, 0);
            z[static_cast<std::size_t>(c)] = 1;
            basis.push_back(std::move(z));
        }
        return basis;
    }
    const auto d = exact::IntegerMatrix::from_eigen(boundary_matrix(K, k + 1).matrix).transpose();
    for (const auto& v : exact::kernel_basis(d.select_columns(free_cols)))
    {
        IntegerCochain z(count, 0);
        for (std::size_t t = 0; t < v.index.size(); ++t)
            z[static_cast<std::size_t>(free_cols[static_cast<std::size_t>(v.index[t])])] = v.value[t];
        basis.push_back(std::move(z));
    }
    return basis;
}

/**
 * Middle-degree cup pairing Q_ij = <h_i cup h_j, [K]> of an even-dimensional
 * closed oriented complex.
 *
 * Two independent routes are computed: a floating matrix on the harmonic
 * basis, and an exact integer matrix on integer cocycle representatives.
 * Their inertia (symmetric case) or rank (skew case) must agree.
 */
struct IntersectionForm
{
    int degree = 0;  ///< middle degree n/2
    bool symmetric = true;
    Eigen::MatrixXd harmonic;  ///< symmetrized (or antisymmetrized) floating form
    std::vector<std::vector<exact::BigInt>> integral;  ///< on integer cocycles
    int rank = 0;
    // Present only in the symmetric case.
    std::optional<int> b_plus;
    std::optional<int> b_minus;
    std::optional<int> signature;
    int b_zero = 0;
    /// Smallest |eigenvalue| (symmetric) or singular value (skew) over the norm.
    double smallest_relative = 0.0;
};

/// |lambda| below this fraction of ||Q|| counts as zero.
inline constexpr double kFormZeroThreshold = 1e-8;

inline std::vector<std::vector<exact::BigInt>> integral_cup_pairing(const SimplicialComplex& K,
                                                                    const Orientation& o,
                                                                    const std::vector<IntegerCochain>& basis,
                                                                    int degree)
{
    const CupIndex idx = cup_index(K, degree, K.dimension() - degree);
    std::vector<std::vector<exact::BigInt>> Q(basis.size(), std::vector<exact::BigInt>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            Q[i][j] = evaluate_on_fundamental_class(o, cup(idx, basis[i], basis[j]));
    return Q;
}

inline IntersectionForm intersection_form(const SimplicialComplex& K, const MetricWeights& w, const HarmonicBasis& middle)
{
    const int n = K.dimension();
    if (n % 2 != 0)
        throw std::invalid_argument("intersection_form: dimension " + std::to_string(n) + " is odd");
    const int m = n / 2;
    if (middle.degree != m)
        throw std::invalid_argument("intersection_form: harmonic basis is not in the middle degree");
    const Orientation o = require_orientation(K);
    (void)w;

    IntersectionForm form;
    form.degree = m;
    form.symmetric = m % 2 == 0;
    const int dim = middle.size();

    const CupIndex idx = cup_index(K, m, m);
    Eigen::MatrixXd Q(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            Q(i, j) = evaluate_on_fundamental_class(K, o, cup(idx, middle.cochain(i), middle.cochain(j)));
    form.harmonic = form.symmetric ? Eigen::MatrixXd(0.5 * (Q + Q.transpose())) : Eigen::MatrixXd(0.5 * (Q - Q.transpose()));

    const auto cocycles = cohomology_basis(K, m);
    if (static_cast<int>(cocycles.size()) != dim)
        throw std::runtime_error("intersection_form: cocycle basis and harmonic basis differ in size");
    form.integral = integral_cup_pairing(K, o, cocycles, m);
    std::vector<std::vector<exact::Rational>> R(static_cast<std::size_t>(dim),
                                                std::vector<exact::Rational>(static_cast<std::size_t>(dim)));
    for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = 0; j < R.size(); ++j)
            R[i][j] = exact::Rational(form.integral[i][j]);

    if (dim == 0)
    {
        if (form.symmetric)
        {
            form.b_plus = 0;
            form.b_minus = 0;
            form.signature = 0;
        }
        return form;
    }

    if (form.symmetric)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form.harmonic, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double scale = ev.cwiseAbs().maxCoeff();
        int pos = 0, neg = 0;
        double smallest = scale;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
        {
            smallest = std::min(smallest, std::abs(ev(i)));
            if (ev(i) > kFormZeroThreshold * scale)
                ++pos;
            else if (ev(i) < -kFormZeroThreshold * scale)
                ++neg;
        }
        form.smallest_relative = scale > 0.0 ? smallest / scale : 0.0;
        if (pos + neg != dim)
        {
            std::ostringstream msg;
            msg << "intersection_form: degenerate harmonic form (smallest |eigenvalue| / norm = "
                << form.smallest_relative << ")";
            throw std::runtime_error(msg.str());
        }
        const auto in = exact::inertia(R);
        if (in.positive != pos || in.negative != neg || in.zero != 0)
        {
            std::ostringstream msg;
            msg << "intersection_form: harmonic inertia (" << pos << ", " << neg << ") disagrees with exact inertia ("
                << in.positive << ", " << in.negative << ", " << in.zero << ")";
            throw std::runtime_error(msg.str());
        }
        form.b_plus = pos;
        form.b_minus = neg;
        form.signature = pos - neg;
        form.rank = pos + neg;
        form.b_zero = 0;
        return form;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(form.harmonic);
    const Eigen::VectorXd s = svd.singularValues();
    const double scale = s(0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > kFormZeroThreshold * scale)
            ++r;
    form.smallest_relative = scale > 0.0 ? s(s.size() - 1) / scale : 0.0;
    if (r != dim)
        throw std::runtime_error("intersection_form: degenerate skew form");
    const int exact_rank = exact::rational_rank(R);
    if (exact_rank != r)
        throw std::runtime_error("intersection_form: harmonic rank disagrees with exact rank");
    form.rank = r;
    form.b_zero = 0;
    return form;
}

inline IntersectionForm intersection_form(const SimplicialComplex& K, const MetricWeights& w)
{
    if (K.dimension() % 2 != 0)
        throw std::invalid_argument("intersection_form: dimension " + std::to_string(K.dimension()) + " is odd");
    if (!is_closed_pseudomanifold(K))
        throw std::invalid_argument("intersection_form: complex is not a closed pseudomanifold");
    require_orientation(K);
    const auto b = betti_numbers(K);
    if (!poincare_duality_check(K, b))
        throw std::invalid_argument("intersection_form: Betti numbers fail Poincare duality");
    const int m = K.dimension() / 2;
    return intersection_form(K, w, harmonic_basis(K, w, m, kHarmonicTolerance, b[static_cast<std::size_t>(m)]));
}

/**
 * Integer 1-cycles forming a basis of H_1(S; Z) for a closed orientable
 * surface, by the tree-cotree construction: a spanning tree of the edge
 * graph, a spanning tree of the dual graph avoiding tree edges, and one loop
 * per leftover edge. Each cycle is one coefficient per edge.
 */
inline std::vector<std::vector<int>> surface_homology_generators(const SimplicialComplex& K)
{
    if (K.dimension() != 2 || !is_closed_pseudomanifold(K))
        throw std::invalid_argument("surface_homology_generators: need a closed 2-dimensional pseudomanifold");
    require_orientation(K);
    const auto& edges = K.simplices(1);
    const auto V = static_cast<std::size_t>(K.vertex_count());

    // Primal BFS tree.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(V);  // (neighbour, edge)
    for (std::size_t e = 0; e < edges.size(); ++e)
    {
        adj[static_cast<std::size_t>(edges[e][0])].emplace_back(static_cast<std::size_t>(edges[e][1]), e);
        adj[static_cast<std::size_t>(edges[e][1])].emplace_back(static_cast<std::size_t>(edges[e][0]), e);
    }
    std::vector<char> in_tree(edges.size(), 0);
    std::vector<long> parent_edge(V, -1);
    std::vector<std::size_t> depth(V, 0);
    std::vector<char> seen(V, 0);
    std::queue<std::size_t> q;
    seen[0] = 1;
    q.push(0);
    while (!q.empty())
    {
        const auto u = q.front();
        q.pop();
        for (const auto& [v, e] : adj[u])
            if (!seen[v])
            {
                seen[v] = 1;
                in_tree[e] = 1;
                parent_edge[v] = static_cast<long>(e);
                depth[v] = depth[u] + 1;
                q.push(v);
            }
    }

    // Dual spanning tree through non-tree edges.
    const auto cof_edges = [&] {
        std::vector<std::vector<std::size_t>> tri_of(edges.size());
        const auto& tris = K.simplices(2);
        for (std::size_t t = 0; t < tris.size(); ++t)
            for (std::size_t i = 0; i < 3; ++i)
                tri_of[K.index_of(detail::drop_vertex(tris[t], i))].push_back(t);
        return tri_of;
    }();
    const std::size_t T = K.count(2);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> dual(T);
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (!in_tree[e])
        {
            dual[cof_edges[e][0]].emplace_back(cof_edges[e][1], e);
            dual[cof_edges[e][1]].emplace_back(cof_edges[e][0], e);
        }
    std::vector<char> in_cotree(edges.size(), 0);
    std::vector<char> tseen(T, 0);
    tseen[0] = 1;
    q.push(0);
    while (!q.empty())
    {
        const auto u = q.front();
        q.pop();
        for (const auto& [v, e] : dual[u])
            if (!tseen[v])
            {
                tseen[v] = 1;
                in_cotree[e] = 1;
                q.push(v);
            }
    }

    // Signed path from the root to v along tree edges, accumulated into c.
    auto add_root_path = [&](std::size_t v, int sign, std::vector<int>& c) {
        while (parent_edge[v] >= 0)
        {
            const auto e = static_cast<std::size_t>(parent_edge[v]);
            const auto a = static_cast<std::size_t>(edges[e][0]);
            const auto b = static_cast<std::size_t>(edges[e][1]);
            const std::size_t up = a == v ? b : a;
            // Walking up -> v along e; the edge is oriented a -> b.
            c[e] += sign * (up == a ? 1 : -1);
            v = up;
        }
    };

    std::vector<std::vector<int>> cycles;
    for (std::size_t e = 0; e < edges.size(); ++e)
    {
        if (in_tree[e] || in_cotree[e])
            continue;
        std::vector<int> c(edges.size(), 0);
        const auto a = static_cast<std::size_t>(edges[e][0]);
        const auto b = static_cast<std::size_t>(edges[e][1]);
        // root -> a, a -> b, then b -> root.
        add_root_path(a, 1, c);
        c[e] += 1;
        add_root_path(b, -1, c);
        cycles.push_back(std::move(c));
    }
    return cycles;
}

/// Kronecker pairing of a 1-cochain with an integer 1-cycle.
inline double evaluate_on_cycle(const Cochain& c, const std::vector<int>& cycle)
{
    double s = 0.0;
    for (std::size_t e = 0; e < cycle.size(); ++e)
        if (cycle[e] != 0)
            s += cycle[e] * c.values(static_cast<Eigen::Index>(e));
    return s;
}

/**
 * Harmonic 1-cochains with integer periods on a surface: g = P^{-1} h with
 * P_ij = <h_i, gamma_j> for a Z-basis gamma of H_1, so <g_i, gamma_j> = delta_ij.
 */
inline std::vector<Cochain> integral_harmonic_generators(const SimplicialComplex& K, const HarmonicBasis& h1)
{
    if (h1.degree != 1)
        throw std::invalid_argument("integral_harmonic_generators: basis must have degree 1");
    const auto cycles = surface_homology_generators(K);
    const int r = h1.size();
    if (static_cast<int>(cycles.size()) != r)
        throw std::runtime_error("integral_harmonic_generators: homology basis size differs from b_1");
    Eigen::MatrixXd P(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            P(i, j) = evaluate_on_cycle(h1.cochain(i), cycles[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd G = P.inverse();
    std::vector<Cochain> out;
    for (int i = 0; i < r; ++i)
    {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(h1.vectors.rows());
        for (int j = 0; j < r; ++j)
            v += G(i, j) * h1.vectors.col(j);
        out.emplace_back(1, std::move(v));
    }
    return out;
}

/// <a cup b, [K]> for every pair of `classes`.
inline Eigen::MatrixXd cup_pairing(const SimplicialComplex& K, const Orientation& o, const std::vector<Cochain>& classes)
{
    const int r = static_cast<int>(classes.size());
    Eigen::MatrixXd Q(r, r);
    if (r == 0)
        return Q;
    const CupIndex idx = cup_index(K, classes[0].degree, K.dimension() - classes[0].degree);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            Q(i, j) = evaluate_on_fundamental_class(K, o, cup(idx, classes[static_cast<std::size_t>(i)],
                                                              classes[static_cast<std::size_t>(j)]));
    return Q;
}

/**
 * Exact counterpart of integral_harmonic_generators: the cup pairing of
 * integer cocycles re-expressed in the basis dual to a Z-basis of H_1,
 * Q' = P^{-1} Q P^{-T} with P_ij = <z_i, gamma_j>. Unimodular on a closed
 * orientable surface.
 */
inline std::vector<std::vector<exact::Rational>> integral_surface_pairing(const SimplicialComplex& K)
{
    const auto cycles = surface_homology_generators(K);
    const auto cocycles = cohomology_basis(K, 1);
    const std::size_t r = cocycles.size();
    if (cycles.size() != r)
        throw std::runtime_error("integral_surface_pairing: homology basis size differs from b_1");
    const auto Q = integral_cup_pairing(K, require_orientation(K), cocycles, 1);

    using Mat = std::vector<std::vector<exact::Rational>>;
    Mat P(r, std::vector<exact::Rational>(r)), Pinv(r, std::vector<exact::Rational>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
        {
            exact::BigInt s = 0;
            for (std::size_t e = 0; e < cycles[j].size(); ++e)
                if (cycles[j][e] != 0)
                    s += cocycles[i][e] * cycles[j][e];
            P[i][j] = exact::Rational(s);
        }
    // Gauss-Jordan inverse over Q.
    Mat A = P;
    for (std::size_t i = 0; i < r; ++i)
        Pinv[i][i] = 1;
    for (std::size_t c = 0; c < r; ++c)
    {
        std::size_t p = c;
        while (p < r && A[p][c] == 0)
            ++p;
        if (p == r)
            throw std::runtime_error("integral_surface_pairing: period matrix is singular");
        std::swap(A[c], A[p]);
        std::swap(Pinv[c], Pinv[p]);
        const exact::Rational d = A[c][c];
        for (std::size_t k = 0; k < r; ++k)
        {
            A[c][k] /= d;
            Pinv[c][k] /= d;
        }
        for (std::size_t i = 0; i < r; ++i)
        {
            if (i == c || A[i][c] == 0)
                continue;
            const exact::Rational f = A[i][c];
            for (std::size_t k = 0; k < r; ++k)
            {
                A[i][k] -= f * A[c][k];
                Pinv[i][k] -= f * Pinv[c][k];
            }
        }
    }
    Mat out(r, std::vector<exact::Rational>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
        {
            exact::Rational s = 0;
            for (std::size_t a = 0; a < r; ++a)
                for (std::size_t b = 0; b < r; ++b)
                    if (Pinv[i][a] != 0 && Pinv[j][b] != 0)
                        s += Pinv[i][a] * exact::Rational(Q[a][b]) * Pinv[j][b];
            out[i][j] = s;
        }
    return out;
}

/// Determinant of a square rational matrix.
inline exact::Rational determinant(std::vector<std::vector<exact::Rational>> a)
{
    const std::size_t n = a.size();
    exact::Rational det = 1;
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t p = c;
        while (p < n && a[p][c] == 0)
            ++p;
        if (p == n)
            return 0;
        if (p != c)
        {
            std::swap(a[c], a[p]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i)
        {
            if (a[i][c] == 0)
                continue;
            const exact::Rational f = a[i][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[i][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace hodgeformal
