#include "vdo/tda.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_map>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];  // path halving
            x = parent[x];
        }
        return x;
    }
    // Returns false if already in the same component.
    bool merge(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        // Deterministic: the component with the larger root index dies.
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
        return true;
    }
};

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RipsFiltration::RipsFiltration(PointCloud cloud, double max_eps,
                               std::vector<FiltrationEdge> edges)
    : cloud_(std::move(cloud)), max_eps_(max_eps), edges_(std::move(edges)) {}

std::vector<RipsFiltration::Triangle> RipsFiltration::triangles(std::size_t cap) const {
    // Adjacency with edge lengths for the max-edge rule.
    const std::size_t n = n_vertices();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    for (const auto& e : edges_) {
        adj[e.u].push_back({e.v, e.eps});
        adj[e.v].push_back({e.u, e.eps});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    std::vector<Triangle> out;
    for (const auto& e : edges_) {
        const auto& au = adj[e.u];
        const auto& av = adj[e.v];
        std::size_t i = 0, j = 0;
        while (i < au.size() && j < av.size()) {
            if (au[i].first < av[j].first)
                ++i;
            else if (au[i].first > av[j].first)
                ++j;
            else {
                const std::uint32_t w = au[i].first;
                if (w > e.v) {
                    // emit each triangle once, from its lexicographically first edge
                    const double eps = std::max({e.eps, au[i].second, av[j].second});
                    out.push_back({e.u, e.v, w, eps});
                    if (out.size() > cap)
                        throw numeric_error("RipsFiltration: triangle cap exceeded");
                }
                ++i;
                ++j;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Triangle& a, const Triangle& b) {
        if (a.eps != b.eps) return a.eps < b.eps;
        return std::tie(a.v0, a.v1, a.v2) < std::tie(b.v0, b.v1, b.v2);
    });
    return out;
}

double enclosing_box_diagonal(const PointCloud& cloud) {
    double s = 0.0;
    for (const auto& [lo, hi] : cloud.bounds()) s += (hi - lo) * (hi - lo);
    return std::sqrt(s);
}

RipsFiltration build_rips(const PointCloud& cloud, double max_eps, std::size_t max_edges) {
    if (cloud.empty()) throw data_error("build_rips: empty point cloud");
    if (!(max_eps > 0.0)) throw config_error("build_rips: max_eps must be positive");

    const std::size_t n = cloud.size();
    std::vector<FiltrationEdge> edges;
    const double cap2 = max_eps * max_eps;
    for (std::size_t u = 0; u + 1 < n; ++u) {
        auto pu = cloud.point(u);
        for (std::size_t v = u + 1; v < n; ++v) {
            const double d2 = squared_distance(pu, cloud.point(v));
            if (d2 <= cap2) {
                edges.push_back({std::sqrt(d2), static_cast<std::uint32_t>(u),
                                 static_cast<std::uint32_t>(v)});
                if (edges.size() > max_edges)
                    throw numeric_error(
                        "build_rips: edge count exceeds cap (" + std::to_string(max_edges) +
                        "); subsample the cloud (maxmin_subsample) or lower max_eps");
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const FiltrationEdge& a, const FiltrationEdge& b) {
        if (a.eps != b.eps) return a.eps < b.eps;
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    return RipsFiltration(cloud, max_eps, std::move(edges));
}

std::size_t PersistenceDiagram::betti(int dim, double eps) const {
    std::size_t count = 0;
    for (const auto& p : pairs)
        if (p.dim == dim && p.birth <= eps && eps < p.death) ++count;
    return count;
}

std::vector<PersistencePair> PersistenceDiagram::pairs_of_dim(int dim) const {
    std::vector<PersistencePair> out;
    for (const auto& p : pairs)
        if (p.dim == dim) out.push_back(p);
    return out;
}

PersistenceDiagram compute_persistence(const RipsFiltration& filtration) {
    const std::size_t n = filtration.n_vertices();
    const auto& edges = filtration.edges();
    const std::size_t n_edges = edges.size();

    PersistenceDiagram diagram;
    diagram.n_points = n;

    // --- H0: Kruskal-style union-find; a merging edge kills one component.
    UnionFind uf(n);
    std::vector<bool> is_tree_edge(n_edges, false);
    for (std::size_t r = 0; r < n_edges; ++r) {
        if (uf.merge(edges[r].u, edges[r].v)) {
            is_tree_edge[r] = true;
            diagram.pairs.push_back({0, 0.0, edges[r].eps});
        }
    }
    std::size_t n_components = 0;
    for (std::uint32_t v = 0; v < n; ++v)
        if (uf.find(v) == v) ++n_components;
    for (std::size_t c = 0; c < n_components; ++c)
        diagram.pairs.push_back({0, 0.0, kInfDeath});

    // --- H1 via the dual (coboundary) reduction with clearing and apparent
    // pairs: one column per non-tree edge, processed in decreasing filtration
    // order; the column lists the triangles containing the edge, ordered by
    // (max-edge rank, mid rank, min rank). The resulting pairs match the
    // standard boundary-matrix reduction.
    struct TriKey {
        std::uint32_t rmax, rmid, rmin;
        bool operator<(const TriKey& o) const {
            return std::tie(rmax, rmid, rmin) < std::tie(o.rmax, o.rmid, o.rmin);
        }
        bool operator==(const TriKey& o) const {
            return rmax == o.rmax && rmid == o.rmid && rmin == o.rmin;
        }
    };
    struct TriKeyHash {
        std::size_t operator()(const TriKey& k) const {
            std::size_t h = k.rmax;
            h = h * 1000003u ^ k.rmid;
            h = h * 1000003u ^ k.rmin;
            return h;
        }
    };
    struct PivotOwner {
        std::uint32_t edge;        // owning column's edge rank
        std::int32_t stored = -1;  // index of the explicit reduced column, or -1
    };

    // full adjacency with edge ranks, sorted by neighbor id
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(n);
    for (std::size_t r = 0; r < n_edges; ++r) {
        adj[edges[r].u].push_back({edges[r].v, static_cast<std::uint32_t>(r)});
        adj[edges[r].v].push_back({edges[r].u, static_cast<std::uint32_t>(r)});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    auto make_key = [](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        TriKey k{a, b, c};
        if (k.rmax < k.rmid) std::swap(k.rmax, k.rmid);
        if (k.rmid < k.rmin) std::swap(k.rmid, k.rmin);
        if (k.rmax < k.rmid) std::swap(k.rmax, k.rmid);
        return k;
    };

    // cofacets of edge r, ascending by key
    auto coboundary = [&](std::uint32_t r) {
        std::vector<TriKey> out;
        const std::uint32_t u = edges[r].u, v = edges[r].v;
        const auto& au = adj[u];
        const auto& av = adj[v];
        std::size_t i = 0, j = 0;
        while (i < au.size() && j < av.size()) {
            if (au[i].first < av[j].first)
                ++i;
            else if (au[i].first > av[j].first)
                ++j;
            else {
                out.push_back(make_key(r, au[i].second, av[j].second));
                ++i;
                ++j;
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    std::unordered_map<TriKey, PivotOwner, TriKeyHash> pivots;
    pivots.reserve(n_edges);
    std::vector<std::vector<TriKey>> stored;
    std::vector<TriKey> col, scratch;

    auto xor_cols = [&](std::vector<TriKey>& a, const std::vector<TriKey>& b) {
        scratch.clear();
        std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                      std::back_inserter(scratch));
        a.swap(scratch);
    };

    for (std::size_t rr = n_edges; rr-- > 0;) {
        const auto r = static_cast<std::uint32_t>(rr);
        if (is_tree_edge[rr]) continue;  // cleared by the dimension-0 pairs

        // apparent pair: some triangle has this edge as its longest edge; the
        // smallest such cofacet is the pivot with no reduction work
        {
            const std::uint32_t u = edges[rr].u, v = edges[rr].v;
            const auto& au = adj[u];
            const auto& av = adj[v];
            std::size_t i = 0, j = 0;
            bool apparent = false;
            TriKey best{};
            while (i < au.size() && j < av.size()) {
                if (au[i].first < av[j].first)
                    ++i;
                else if (au[i].first > av[j].first)
                    ++j;
                else {
                    const std::uint32_t ra = au[i].second, rb = av[j].second;
                    if (ra < r && rb < r) {
                        const TriKey k = make_key(r, ra, rb);
                        if (!apparent || k < best) {
                            apparent = true;
                            best = k;
                        }
                    }
                    ++i;
                    ++j;
                }
            }
            if (apparent) {
                pivots.emplace(best, PivotOwner{r, -1});
                continue;  // zero persistence, never enters the diagram
            }
        }

        col = coboundary(r);
        for (;;) {
            if (col.empty()) {
                diagram.pairs.push_back({1, edges[rr].eps, kInfDeath});
                break;
            }
            const TriKey p = col.front();
            auto hit = pivots.find(p);
            if (hit == pivots.end()) {
                const double birth = edges[rr].eps;
                const double death = edges[p.rmax].eps;
                if (death > birth) diagram.pairs.push_back({1, birth, death});
                pivots.emplace(p, PivotOwner{r, static_cast<std::int32_t>(stored.size())});
                stored.push_back(col);
                break;
            }
            if (hit->second.stored >= 0)
                xor_cols(col, stored[static_cast<std::size_t>(hit->second.stored)]);
            else
                xor_cols(col, coboundary(hit->second.edge));
        }
    }

    return diagram;
}

SubsampleResult maxmin_subsample(const PointCloud& cloud, std::size_t m,
                                 std::uint64_t seed) {
    const std::size_t n = cloud.size();
    if (m < 1 || m > n)
        throw config_error("maxmin_subsample: m must be in [1, N], got " + std::to_string(m));

    std::mt19937_64 gen(seed);
    std::vector<std::size_t> selected;
    selected.reserve(m);
    std::vector<double> mindist(n, kInfDeath);

    std::size_t current = std::uniform_int_distribution<std::size_t>(0, n - 1)(gen);
    for (;;) {
        selected.push_back(current);
        auto pc = cloud.point(current);
        for (std::size_t i = 0; i < n; ++i)
            mindist[i] = std::min(mindist[i], distance(pc, cloud.point(i)));
        if (selected.size() == m) break;
        current = static_cast<std::size_t>(
            std::max_element(mindist.begin(), mindist.end()) - mindist.begin());
    }
    const double hausdorff = *std::max_element(mindist.begin(), mindist.end());
    return {cloud.subset(selected), std::move(selected), hausdorff};
}

std::string validity_model_name(ValidityModelKind kind) {
    return kind == ValidityModelKind::ConvexHull ? "convex_hull" : "one_class_svm";
}

TopologySummary summarize(const PersistenceDiagram& diagram,
                          double persistence_ratio_threshold) {
    if (diagram.pairs.empty()) throw data_error("summarize: empty diagram");
    const double thr = persistence_ratio_threshold;

    std::vector<double> h0_deaths;
    std::size_t h0_infinite = 0;
    for (const auto& p : diagram.pairs) {
        if (p.dim != 0) continue;
        if (p.death == kInfDeath)
            ++h0_infinite;
        else
            h0_deaths.push_back(p.death);
    }
    const double h0_median = median(h0_deaths);

    TopologySummary s;
    s.cluster_gap_scale = h0_deaths.empty()
                              ? 0.0
                              : *std::max_element(h0_deaths.begin(), h0_deaths.end());

    int extra_clusters = h0_infinite > 0 ? static_cast<int>(h0_infinite) - 1 : 0;
    for (double d : h0_deaths)
        if (h0_median > 0.0 && d >= thr * h0_median) ++extra_clusters;
    s.n_long_clusters = 1 + extra_clusters;

    // H1 significance: scale-free persistence ratio, with the median H0 death
    // (the noise scale of the cloud) as an absolute lifespan floor.
    for (const auto& p : diagram.pairs) {
        if (p.dim != 1) continue;
        bool is_long;
        if (p.death == kInfDeath) {
            is_long = true;
        } else {
            const double lifespan = p.death - p.birth;
            const bool ratio_long = p.birth <= 0.0 || p.death / p.birth >= thr;
            const bool above_noise = lifespan >= thr * h0_median;
            is_long = ratio_long && above_noise;
        }
        if (is_long) {
            ++s.n_long_holes;
            s.hole_scales.push_back({p.birth, p.death});
        }
    }

    s.recommendation = (s.n_long_clusters > 1 || s.n_long_holes >= 1)
                           ? ValidityModelKind::OneClassSvm
                           : ValidityModelKind::ConvexHull;
    return s;
}

void write_diagram_csv(const std::string& path, const PersistenceDiagram& diagram) {
    std::ofstream out(path);
    if (!out) throw data_error("write_diagram_csv: cannot write '" + path + "'");
    out << "dim,birth,death\n";
    char buf[128];
    for (const auto& p : diagram.pairs) {
        if (p.death == kInfDeath)
            std::snprintf(buf, sizeof buf, "%d,%.17g,inf", p.dim, p.birth);
        else
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g", p.dim, p.birth, p.death);
        out << buf << "\n";
    }
}

}  // namespace vdo
