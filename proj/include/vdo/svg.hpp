#pragma once

#include <array>
#include <string>
#include <vector>

#include "vdo/hull.hpp"
#include "vdo/ocsvm.hpp"
#include "vdo/point_cloud.hpp"
#include "vdo/tda.hpp"

namespace vdo {

// Persistence diagram plot: birth on x, death on y, diagonal reference line,
// H0 pairs as triangles, H1 pairs as circles, infinite deaths on a marked
// horizontal line.
void write_diagram_svg(const std::string& path, const PersistenceDiagram& diagram);

// 2D scatter of the cloud with the validity boundary overlaid: the hull
// polygon, or the decision(x) = 0 contour traced by marching squares.
void write_boundary_svg(const std::string& path, const PointCloud& cloud,
                        const FacetSystem* hull, const OneClassSvmModel* svm,
                        const std::vector<double>* x_star = nullptr);

}  // namespace vdo
