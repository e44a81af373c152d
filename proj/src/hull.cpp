#include "vdo/hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

constexpr double kCollinearTol = 1e-12;

double cross(const std::array<double, 2>& o, const std::array<double, 2>& a,
             const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

void normalize_row(std::vector<double>& A, std::vector<double>& b, std::size_t row,
                   std::size_t dim) {
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += A[row * dim + d] * A[row * dim + d];
    norm = std::sqrt(norm);
    if (!(norm > 0.0))
        throw data_error("FacetSystem: zero facet normal in row " + std::to_string(row));
    for (std::size_t d = 0; d < dim; ++d) A[row * dim + d] /= norm;
    b[row] /= norm;
}

// --- 3D incremental hull -------------------------------------------------

struct Vec3 {
    double x, y, z;
};
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 cross3(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double dot3(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm3(Vec3 a) { return std::sqrt(dot3(a, a)); }

struct Face {
    int a, b, c;   // vertex indices, outward orientation
    bool alive = true;
};

double signed_dist(const std::vector<Vec3>& pts, const Face& f, int p) {
    const Vec3 n = cross3(pts[f.b] - pts[f.a], pts[f.c] - pts[f.a]);
    const double nn = norm3(n);
    return dot3(n, pts[p] - pts[f.a]) / (nn > 0 ? nn : 1.0);
}

FacetSystem hull_3d(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = {cloud.coord(i, 0), cloud.coord(i, 1), cloud.coord(i, 2)};

    // scale-aware degeneracy tolerance
    double span = 0.0;
    for (const auto& [lo, hi] : cloud.bounds()) span = std::max(span, hi - lo);
    const double tol = 1e-9 * std::max(1.0, span);

    // initial non-degenerate tetrahedron
    std::size_t i1 = 1;
    while (i1 < n && norm3(pts[i1] - pts[0]) <= tol) ++i1;
    if (i1 == n) throw data_error("convex hull: all points coincide");
    std::size_t i2 = i1 + 1;
    while (i2 < n && norm3(cross3(pts[i1] - pts[0], pts[i2] - pts[0])) <= tol) ++i2;
    if (i2 == n) throw data_error("convex hull: points are collinear");
    std::size_t i3 = i2 + 1;
    while (i3 < n &&
           std::abs(dot3(cross3(pts[i1] - pts[0], pts[i2] - pts[0]), pts[i3] - pts[0])) <= tol)
        ++i3;
    if (i3 == n) throw data_error("convex hull: points are coplanar, use 2D hull instead");

    std::vector<Face> faces;
    auto add_face = [&](int a, int b, int c, int opposite) {
        Face f{a, b, c, true};
        if (signed_dist(pts, f, opposite) > 0) std::swap(f.b, f.c);
        faces.push_back(f);
    };
    add_face(static_cast<int>(0), static_cast<int>(i1), static_cast<int>(i2),
             static_cast<int>(i3));
    add_face(static_cast<int>(0), static_cast<int>(i1), static_cast<int>(i3),
             static_cast<int>(i2));
    add_face(static_cast<int>(0), static_cast<int>(i2), static_cast<int>(i3),
             static_cast<int>(i1));
    add_face(static_cast<int>(i1), static_cast<int>(i2), static_cast<int>(i3), 0);

    for (std::size_t p = 0; p < n; ++p) {
        if (p == 0 || p == i1 || p == i2 || p == i3) continue;
        // faces visible from p
        std::vector<std::size_t> visible;
        for (std::size_t f = 0; f < faces.size(); ++f)
            if (faces[f].alive && signed_dist(pts, faces[f], static_cast<int>(p)) > tol)
                visible.push_back(f);
        if (visible.empty()) continue;

        // horizon = directed edges of visible faces whose reverse is not visible
        std::map<std::pair<int, int>, int> edge_count;
        for (std::size_t f : visible) {
            const Face& fc = faces[f];
            const int vs[3] = {fc.a, fc.b, fc.c};
            for (int k = 0; k < 3; ++k) {
                edge_count[{vs[k], vs[(k + 1) % 3]}] += 1;
            }
            faces[f].alive = false;
        }
        for (const auto& [edge, cnt] : edge_count) {
            (void)cnt;
            auto rev = edge_count.find({edge.second, edge.first});
            if (rev == edge_count.end()) {
                // horizon edge keeps its orientation; new face stays outward
                faces.push_back({edge.first, edge.second, static_cast<int>(p), true});
            }
        }
    }

    // merge coplanar faces into unique facet rows
    std::vector<double> A;
    std::vector<double> b;
    std::vector<std::array<double, 4>> seen;
    for (const auto& f : faces) {
        if (!f.alive) continue;
        Vec3 nrm = cross3(pts[f.b] - pts[f.a], pts[f.c] - pts[f.a]);
        const double len = norm3(nrm);
        if (len <= tol) continue;
        nrm = {nrm.x / len, nrm.y / len, nrm.z / len};
        const double off = -dot3(nrm, pts[f.a]);
        bool dup = false;
        for (const auto& s : seen)
            if (std::abs(s[0] - nrm.x) < 1e-9 && std::abs(s[1] - nrm.y) < 1e-9 &&
                std::abs(s[2] - nrm.z) < 1e-9 && std::abs(s[3] - off) < 1e-9 * std::max(1.0, span)) {
                dup = true;
                break;
            }
        if (dup) continue;
        seen.push_back({nrm.x, nrm.y, nrm.z, off});
        A.insert(A.end(), {nrm.x, nrm.y, nrm.z});
        b.push_back(off);
    }
    return FacetSystem{std::move(A), std::move(b), 3};
}

}  // namespace

double hull_margin(const FacetSystem& fs, std::span<const double> x) {
    if (x.size() != fs.dim)
        throw data_error("hull_margin: point dimension " + std::to_string(x.size()) +
                         " does not match facet dimension " + std::to_string(fs.dim));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fs.facet_count(); ++i) {
        double v = fs.b[i];
        const double* a = fs.A.data() + i * fs.dim;
        for (std::size_t d = 0; d < fs.dim; ++d) v += a[d] * x[d];
        worst = std::max(worst, v);
    }
    return worst;
}

std::vector<std::array<double, 2>> convex_hull_2d(const PointCloud& cloud) {
    if (cloud.dim() != 2) throw data_error("convex_hull_2d: need 2D points");
    if (cloud.size() < 3) throw data_error("convex_hull_2d: need at least 3 points");

    // orientation tests in [-1,1]-rescaled coordinates
    auto bnds = cloud.bounds();
    std::array<double, 2> ctr = {0.5 * (bnds[0].first + bnds[0].second),
                                 0.5 * (bnds[1].first + bnds[1].second)};
    std::array<double, 2> half = {std::max(0.5 * (bnds[0].second - bnds[0].first), 1e-300),
                                  std::max(0.5 * (bnds[1].second - bnds[1].first), 1e-300)};

    std::vector<std::array<double, 2>> scaled(cloud.size());
    std::vector<std::size_t> order(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        scaled[i] = {(cloud.coord(i, 0) - ctr[0]) / half[0],
                     (cloud.coord(i, 1) - ctr[1]) / half[1]};
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scaled[a] < scaled[b];
    });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](std::size_t a, std::size_t b) { return scaled[a] == scaled[b]; }),
                order.end());

    const std::size_t m = order.size();
    std::vector<std::size_t> hull(2 * m);
    std::size_t k = 0;
    for (std::size_t ii = 0; ii < m; ++ii) {  // lower chain
        const std::size_t i = order[ii];
        while (k >= 2 && cross(scaled[hull[k - 2]], scaled[hull[k - 1]], scaled[i]) <= kCollinearTol)
            --k;
        hull[k++] = i;
    }
    const std::size_t lower = k + 1;
    for (std::size_t ii = m; ii-- > 1;) {  // upper chain
        const std::size_t i = order[ii - 1];
        while (k >= lower &&
               cross(scaled[hull[k - 2]], scaled[hull[k - 1]], scaled[i]) <= kCollinearTol)
            --k;
        hull[k++] = i;
    }
    hull.resize(k > 0 ? k - 1 : 0);

    if (hull.size() < 3)
        throw data_error(
            "convex_hull_2d: input is degenerate (collinear points); fall back to box bounds");

    std::vector<std::array<double, 2>> out;
    out.reserve(hull.size());
    for (std::size_t i : hull) out.push_back({cloud.coord(i, 0), cloud.coord(i, 1)});
    return out;
}

FacetSystem facets_from_hull(const std::vector<std::array<double, 2>>& vertices) {
    if (vertices.size() < 3) throw data_error("facets_from_hull: need at least 3 vertices");
    const std::size_t f = vertices.size();
    FacetSystem fs;
    fs.dim = 2;
    fs.A.resize(f * 2);
    fs.b.resize(f);
    for (std::size_t i = 0; i < f; ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % f];
        // CCW polygon: outward normal is the edge direction rotated -90 deg
        fs.A[i * 2 + 0] = q[1] - p[1];
        fs.A[i * 2 + 1] = -(q[0] - p[0]);
        fs.b[i] = -(fs.A[i * 2] * p[0] + fs.A[i * 2 + 1] * p[1]);
        normalize_row(fs.A, fs.b, i, 2);
    }
    return fs;
}

FacetSystem facets_from_cloud(const PointCloud& cloud) {
    if (cloud.dim() == 2) return facets_from_hull(convex_hull_2d(cloud));
    if (cloud.dim() == 3) return hull_3d(cloud);
    throw config_error(
        "facets_from_cloud: exact hulls are implemented for D = 2 and D = 3; import "
        "externally computed facets for higher dimensions");
}

std::vector<std::size_t> facet_violations(const FacetSystem& fs, const PointCloud& cloud,
                                          double tol) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (hull_margin(fs, cloud.point(i)) > tol) out.push_back(i);
    return out;
}

FacetSystem import_facets(const std::string& path, const PointCloud* points, double tol) {
    std::ifstream in(path);
    if (!in) throw data_error("import_facets: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw data_error("import_facets: empty file");

    std::size_t dim = 0;
    {
        std::stringstream ss(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ss, cell, ',')) ++cols;
        if (cols < 2) throw data_error("import_facets: header needs columns a1,...,aD,b");
        dim = cols - 1;
    }

    FacetSystem fs;
    fs.dim = dim;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != dim + 1)
            throw data_error("import_facets: row " + std::to_string(row + 1) + " has " +
                             std::to_string(vals.size()) + " cells, expected " +
                             std::to_string(dim + 1));
        fs.A.insert(fs.A.end(), vals.begin(), vals.end() - 1);
        fs.b.push_back(vals.back());
        normalize_row(fs.A, fs.b, row, dim);
        ++row;
    }
    if (row == 0) throw data_error("import_facets: no facet rows in '" + path + "'");

    if (points != nullptr) {
        const auto bad = facet_violations(fs, *points, tol);
        if (!bad.empty()) {
            std::string msg = "import_facets: validation failed, violating points:";
            for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i)
                msg += " " + std::to_string(bad[i]);
            if (bad.size() > 10) msg += " ... (" + std::to_string(bad.size()) + " total)";
            throw data_error(msg);
        }
    }
    return fs;
}

void export_facets(const std::string& path, const FacetSystem& fs) {
    std::ofstream out(path);
    if (!out) throw data_error("export_facets: cannot write '" + path + "'");
    for (std::size_t d = 0; d < fs.dim; ++d) out << "a" << (d + 1) << ",";
    out << "b\n";
    char buf[64];
    for (std::size_t i = 0; i < fs.facet_count(); ++i) {
        for (std::size_t d = 0; d < fs.dim; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", fs.A[i * fs.dim + d]);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", fs.b[i]);
        out << buf << "\n";
    }
}

}  // namespace vdo
