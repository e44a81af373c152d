#pragma once

// Brute-force reference implementations used only by tests. Each oracle is
// deliberately independent of the library code paths it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "vdo/point_cloud.hpp"

namespace oracle {

// ----- graph / homology ---------------------------------------------------

// Connected components of the eps-neighborhood graph.
inline int graph_components(const vdo::PointCloud& cloud, double eps) {
    const std::size_t n = cloud.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (vdo::distance(cloud.point(i), cloud.point(j)) <= eps)
                parent[find(i)] = find(j);
    int c = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (find(i) == i) ++c;
    return c;
}

// Rank of a Z/2 matrix given as columns of row indices.
inline std::size_t z2_rank(std::vector<std::vector<std::uint32_t>> cols) {
    std::size_t rank = 0;
    std::vector<std::int64_t> pivots;  // row -> owning column
    std::size_t max_row = 0;
    for (const auto& c : cols)
        for (auto r : c) max_row = std::max<std::size_t>(max_row, r + 1);
    pivots.assign(max_row, -1);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        auto& col = cols[j];
        std::sort(col.begin(), col.end());
        while (!col.empty()) {
            const std::uint32_t low = col.back();
            if (pivots[low] < 0) {
                pivots[low] = static_cast<std::int64_t>(j);
                ++rank;
                break;
            }
            // xor with the owning column
            const auto& other = cols[static_cast<std::size_t>(pivots[low])];
            std::vector<std::uint32_t> merged;
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(merged));
            col = std::move(merged);
        }
    }
    return rank;
}

// Betti numbers (b0, b1) of the Vietoris-Rips clique complex at scale eps.
inline std::pair<int, int> brute_betti(const vdo::PointCloud& cloud, double eps) {
    const std::size_t n = cloud.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (vdo::distance(cloud.point(i), cloud.point(j)) <= eps) edges.push_back({i, j});

    auto edge_index = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
        for (std::uint32_t k = 0; k < edges.size(); ++k)
            if (edges[k].first == std::min(a, b) && edges[k].second == std::max(a, b)) return k;
        return std::numeric_limits<std::uint32_t>::max();
    };

    const int c = graph_components(cloud, eps);
    // boundary of triangles as edge-index columns
    std::vector<std::vector<std::uint32_t>> d2;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b)
            for (std::uint32_t cc = b + 1; cc < n; ++cc) {
                const auto e1 = edge_index(a, b), e2 = edge_index(a, cc), e3 = edge_index(b, cc);
                if (e1 == std::numeric_limits<std::uint32_t>::max() ||
                    e2 == std::numeric_limits<std::uint32_t>::max() ||
                    e3 == std::numeric_limits<std::uint32_t>::max())
                    continue;
                d2.push_back({e1, e2, e3});
            }
    const std::size_t rank2 = z2_rank(std::move(d2));
    // dim ker d1 = E - (V - C); b1 = dim ker d1 - rank d2
    const std::int64_t cycles = static_cast<std::int64_t>(edges.size()) -
                                (static_cast<std::int64_t>(n) - c);
    return {c, static_cast<int>(cycles - static_cast<std::int64_t>(rank2))};
}

// Euclidean minimum spanning tree edge lengths (Prim).
inline std::vector<double> mst_edge_lengths(const vdo::PointCloud& cloud) {
    const std::size_t n = cloud.size();
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<double> out;
    in_tree[0] = true;
    for (std::size_t i = 1; i < n; ++i)
        best[i] = vdo::distance(cloud.point(0), cloud.point(i));
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t pick = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            if (!in_tree[i] && best[i] < bd) {
                bd = best[i];
                pick = i;
            }
        in_tree[pick] = true;
        out.push_back(bd);
        for (std::size_t i = 0; i < n; ++i)
            if (!in_tree[i])
                best[i] = std::min(best[i], vdo::distance(cloud.point(pick), cloud.point(i)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Number of single-linkage clusters when cutting the dendrogram at `cut`.
inline int single_linkage_components(const vdo::PointCloud& cloud, double cut) {
    return graph_components(cloud, cut);
}

// ----- geometry -----------------------------------------------------------

// Point-in-convex-polygon by orientation signs (vertices CCW).
inline bool inside_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y,
                           double tol = 1e-9) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        const double cr = (q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0]);
        if (cr < -tol) return false;
    }
    return true;
}

// ----- one-class SVM dual ------------------------------------------------

// Projection onto { sum a = 1, 0 <= a <= C } by bisection on the shift.
inline void project_simplex_box(std::vector<double>& a, double C) {
    double lo = -2.0 - *std::max_element(a.begin(), a.end());
    double hi = *std::max_element(a.begin(), a.end()) + 2.0;
    for (int it = 0; it < 200; ++it) {
        const double tau = 0.5 * (lo + hi);
        double s = 0.0;
        for (double v : a) s += std::min(std::max(v - tau, 0.0), C);
        (s > 1.0 ? lo : hi) = tau;
    }
    const double tau = 0.5 * (lo + hi);
    for (double& v : a) v = std::min(std::max(v - tau, 0.0), C);
}

// Long projected-gradient run on the one-class SVM dual; returns the
// objective 0.5 a'Ka at the iterate.
inline double pgd_dual_objective(const std::vector<std::vector<double>>& K, double nu,
                                 std::size_t iters = 200000) {
    const std::size_t n = K.size();
    const double C = 1.0 / (nu * static_cast<double>(n));
    std::vector<double> a(n, 1.0 / static_cast<double>(n));
    project_simplex_box(a, C);
    // Lipschitz step from the largest row sum
    double L = 0.0;
    for (const auto& row : K) {
        double s = 0.0;
        for (double v : row) s += std::abs(v);
        L = std::max(L, s);
    }
    const double step = 1.0 / std::max(L, 1e-12);
    std::vector<double> g(n);
    for (std::size_t it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += K[i][j] * a[j];
            g[i] = s;
        }
        for (std::size_t i = 0; i < n; ++i) a[i] -= step * g[i];
        project_simplex_box(a, C);
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) obj += a[i] * K[i][j] * a[j];
    return 0.5 * obj;
}

// Max KKT violation of a trained model recomputed from the full kernel
// matrix: margin duals must sit at gradient = rho, zero duals above, bound
// duals below; also checks the simplex equality.
struct KktReport {
    double residual = 0.0;
    double sum_alpha_error = 0.0;
    double box_violation = 0.0;
};

inline KktReport kkt_residual(const vdo::PointCloud& cloud, const std::vector<double>& alphas,
                              const std::vector<std::size_t>& sv_rows, double rho, double gamma,
                              double nu, double tol) {
    const std::size_t n = cloud.size();
    const double C = 1.0 / (nu * static_cast<double>(n));
    std::vector<double> full_alpha(n, 0.0);
    for (std::size_t k = 0; k < sv_rows.size(); ++k) full_alpha[sv_rows[k]] = alphas[k];

    KktReport rep;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += full_alpha[i];
        rep.box_violation = std::max(rep.box_violation, -full_alpha[i]);
        rep.box_violation = std::max(rep.box_violation, full_alpha[i] - C);
    }
    rep.sum_alpha_error = std::abs(sum - 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        double gi = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (full_alpha[j] == 0.0) continue;
            gi += full_alpha[j] *
                  std::exp(-gamma * vdo::squared_distance(cloud.point(i), cloud.point(j)));
        }
        if (full_alpha[i] <= tol)
            rep.residual = std::max(rep.residual, rho - gi);
        else if (full_alpha[i] >= C - tol)
            rep.residual = std::max(rep.residual, gi - rho);
        else
            rep.residual = std::max(rep.residual, std::abs(gi - rho));
    }
    return rep;
}

// ----- misc ----------------------------------------------------------------

inline std::vector<double> random_point(std::mt19937_64& gen, std::size_t dim, double lo,
                                        double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> x(dim);
    for (auto& v : x) v = d(gen);
    return x;
}

}  // namespace oracle
