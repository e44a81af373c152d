#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vdo/point_cloud.hpp"

namespace vdo {

constexpr double kInfDeath = std::numeric_limits<double>::infinity();

struct FiltrationEdge {
    double eps;  // appearance scale = Euclidean distance
    std::uint32_t u, v;
};

// A Vietoris-Rips filtration up to max_eps with simplices of dimension <= 2.
// Vertices appear at eps 0, an edge at its pairwise distance, a triangle at
// its longest edge. Edges are stored sorted by (eps, u, v); triangles are
// implicit (enumerated on demand) so large complexes stay in memory bounds.
class RipsFiltration {
public:
    RipsFiltration(PointCloud cloud, double max_eps, std::vector<FiltrationEdge> edges);

    std::size_t n_vertices() const { return cloud_.size(); }
    double max_eps() const { return max_eps_; }
    const std::vector<FiltrationEdge>& edges() const { return edges_; }
    const PointCloud& cloud() const { return cloud_; }

    // (v0, v1, v2, eps) with v0 < v1 < v2, sorted by (eps, lex). Materializes
    // every triangle; intended for small complexes (guarded by a count cap).
    struct Triangle {
        std::uint32_t v0, v1, v2;
        double eps;
    };
    std::vector<Triangle> triangles(std::size_t cap = 5'000'000) const;

private:
    PointCloud cloud_;
    double max_eps_;
    std::vector<FiltrationEdge> edges_;
};

// Builds the filtration; throws numeric_error when the edge count exceeds
// max_edges (advice: subsample the cloud first).
RipsFiltration build_rips(const PointCloud& cloud, double max_eps,
                          std::size_t max_edges = 5'000'000);

// Default scale: the diagonal of the enclosing box, so the final complex is
// connected.
double enclosing_box_diagonal(const PointCloud& cloud);

struct PersistencePair {
    int dim;       // 0 or 1
    double birth;  // eps at which the feature appears
    double death;  // eps at which it merges/fills, or +inf
};

struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;
    std::size_t n_points = 0;

    // Number of dim-k features alive at scale eps (birth <= eps < death).
    std::size_t betti(int dim, double eps) const;
    std::vector<PersistencePair> pairs_of_dim(int dim) const;
};

// H0 by union-find over the sorted edges (deaths are the Euclidean MST edge
// lengths, one infinite pair per final component); H1 by Z/2 column reduction
// of the edge/triangle boundary matrix. Zero-persistence H1 pairs are omitted;
// every H0 pair is kept so the diagram has exactly one H0 pair per point.
PersistenceDiagram compute_persistence(const RipsFiltration& filtration);

struct SubsampleResult {
    PointCloud cloud;
    std::vector<std::size_t> indices;  // positions in the source cloud
    double hausdorff;                  // sup over source points of dist to sample
};

// Greedy farthest-point (maxmin) subsampling from a seeded random start.
SubsampleResult maxmin_subsample(const PointCloud& cloud, std::size_t m,
                                 std::uint64_t seed);

enum class ValidityModelKind { ConvexHull, OneClassSvm };
std::string validity_model_name(ValidityModelKind kind);

struct TopologySummary {
    int n_long_clusters = 1;
    int n_long_holes = 0;
    double cluster_gap_scale = 0.0;                 // largest finite H0 death
    std::vector<std::array<double, 2>> hole_scales;  // (birth, death) of long holes
    ValidityModelKind recommendation = ValidityModelKind::ConvexHull;
};

// Significance rule (threshold = persistence_ratio_threshold):
//   * an H1 pair is long when death/birth >= threshold and its lifespan
//     clears the same threshold against the median finite H0 death (the
//     noise scale); infinite-death pairs are always long;
//   * clusters are 1 + the number of finite H0 deaths >= threshold x median
//     finite H0 death, plus any extra infinite H0 components (a truncated
//     filtration that never connects is itself cluster evidence);
//   * recommendation is one_class_svm iff clusters > 1 or long holes >= 1.
TopologySummary summarize(const PersistenceDiagram& diagram,
                          double persistence_ratio_threshold = 3.0);

// "dim,birth,death" rows, infinite deaths written as the literal "inf".
void write_diagram_csv(const std::string& path, const PersistenceDiagram& diagram);

}  // namespace vdo
