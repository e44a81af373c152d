#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "vdo/point_cloud.hpp"

namespace vdo {

// Convex polytope as linear inequalities: x is inside iff A x + b <= 0
// componentwise. Rows of A are outward unit normals.
struct FacetSystem {
    std::vector<double> A;  // f x dim, row-major
    std::vector<double> b;  // f entries
    std::size_t dim = 0;

    std::size_t facet_count() const { return b.size(); }
    std::span<const double> row(std::size_t i) const { return {A.data() + i * dim, dim}; }
};

// Signed membership: max over facets of a_i . x + b_i ; <= 0 iff inside.
double hull_margin(const FacetSystem& fs, std::span<const double> x);

// Counter-clockwise hull vertices by monotone chain; collinear boundary points
// are dropped (tolerance 1e-12 on cross products of [-1,1]-rescaled inputs).
// Throws data_error when all points are collinear (use a box fallback).
std::vector<std::array<double, 2>> convex_hull_2d(const PointCloud& cloud);

// Outward unit normals of the CCW polygon edges, b_i = -a_i . v_i.
FacetSystem facets_from_hull(const std::vector<std::array<double, 2>>& vertices);

// Exact hull facets for D = 2 or D = 3 (incremental hull, coplanar faces
// merged). Higher dimensions go through import_facets.
FacetSystem facets_from_cloud(const PointCloud& cloud);

// All training points must satisfy A x + b <= tol; returns violating indices.
std::vector<std::size_t> facet_violations(const FacetSystem& fs, const PointCloud& cloud,
                                          double tol);

// CSV with header "a1,...,aD,b"; rows are renormalized on import and a zero
// row is rejected. When `points` is given the system is validated against it.
FacetSystem import_facets(const std::string& path, const PointCloud* points = nullptr,
                          double tol = 1e-6);
void export_facets(const std::string& path, const FacetSystem& fs);

}  // namespace vdo
