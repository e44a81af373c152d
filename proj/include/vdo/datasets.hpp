#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vdo/csv.hpp"
#include "vdo/point_cloud.hpp"

namespace vdo {

// The eight 2D benchmark shapes. Geometry is pinned (see datasets.cpp):
//   box             uniform on [-2,4]^2, the 4 corners emitted first
//   oval            uniform in ellipse, center (1,1), semi-axes (2.8,1.6)
//   box2            rotated rectangle, center (1,1), half-widths (2.8,1.0), 30 deg,
//                   corners emitted first
//   banana          crescent arc, center (0,1.8), radius 3.2, sweep 200..340 deg,
//                   uniform radial jitter +-0.5
//   two_circles     disks of radius 0.8 at (-1.3,-1.0) and (1.7,3.0); centers 5 apart
//   two_ovals       ellipses (0.9,1.5) at (-1.3,0.5) and (0.8,1.3) at (2.6,3.0)
//   box_with_hole   box [-2,4]^2 minus the open disk of radius 1.5 at (1,1),
//                   corners emitted first
//   circle_with_hole annulus at (0.2,1.0), inner radius 1.5, outer 3.5
// Every point is perturbed by Gaussian noise (resampled while any component
// exceeds 4 sigma); hole shapes then reject points inside the exclusion disk.
enum class Shape {
    Box,
    Oval,
    Box2,
    Banana,
    TwoCircles,
    TwoOvals,
    BoxWithHole,
    CircleWithHole,
};

Shape parse_shape(const std::string& name);  // throws config_error on unknown name
std::string shape_name(Shape shape);
const std::vector<Shape>& all_shapes();

struct DatasetSpec {
    Shape shape = Shape::Box;
    std::size_t n_points = 600;
    double noise_sigma = 0.1;
    std::uint64_t seed = 7;
    // Optional bounds override {xlo, xhi, ylo, yhi} for the axis-aligned box shape.
    std::optional<std::array<double, 4>> box_bounds;
};

// Deterministic for a fixed spec (including seed).
PointCloud generate_dataset(const DatasetSpec& spec);

// Documented support of the shape before noise: {xlo, xhi, ylo, yhi}.
std::array<double, 4> nominal_bbox(const DatasetSpec& spec);

// Exclusion disk (center, radius) of the hole shapes; nullopt otherwise.
struct Disk {
    double cx, cy, radius;
};
std::optional<Disk> exclusion_region(const DatasetSpec& spec);

// Cluster centers of the two-cluster shapes; empty otherwise. The documented
// inter-cluster gap is the center distance minus both cluster reaches minus
// 8 * noise_sigma (worst case on both sides).
std::vector<std::array<double, 2>> cluster_centers(const DatasetSpec& spec);

// Lagged regressor layout for time-series data: one feature block per signal,
// each block sampling the signal at (k - lag) for every lag in `lags`.
struct LagSpec {
    std::vector<std::string> base_signals;
    std::vector<int> lags;  // strictly increasing, nonnegative

    int max_lag() const;
    std::size_t feature_dim() const { return base_signals.size() * lags.size(); }
    void validate() const;
};

// Row k of the output concatenates signal values at k - lag for each signal
// and lag; the first max_lag rows (incomplete history) are dropped.
PointCloud build_lag_features(const Table& table, const LagSpec& spec);

}  // namespace vdo
