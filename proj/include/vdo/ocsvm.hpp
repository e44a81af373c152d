#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vdo/point_cloud.hpp"

namespace vdo {

struct KernelSpec {
    double gamma = 1.0;  // RBF: K(x,y) = exp(-gamma * ||x-y||^2)
};

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Trained one-class SVM. decision(x) = sum_i alpha_i K(sv_i, x) - rho is
// positive inside the learned domain. Immutable once trained.
struct OneClassSvmModel {
    PointCloud support_vectors;
    std::vector<double> alphas;  // strictly positive, sum over ALL duals = 1
    double rho = 0.0;
    KernelSpec kernel;
    double nu = 0.0;
    std::size_t n_train = 0;
    std::optional<Scaler> scaler;  // applied to inputs before kernel evaluation

    std::size_t dim() const { return support_vectors.dim(); }
    std::size_t sv_count() const { return alphas.size(); }
};

struct TrainStats {
    std::size_t iterations = 0;
    double final_violation = 0.0;  // max KKT violation at termination
    double dual_objective = 0.0;   // 0.5 * alpha' K alpha
};

// Solves the dual QP
//   min 0.5 sum_ij alpha_i alpha_j K(x_i, x_j)
//   s.t. sum alpha = 1,  0 <= alpha_i <= 1/(nu N)
// by pairwise updates on the maximal violating pair. Requires nu*N > 1.
// rho is the mean gradient over margin support vectors (tol < alpha < C - tol),
// or the midpoint of the KKT bracket when no margin vector exists. Only
// alphas > tol are stored as support vectors.
OneClassSvmModel train(const PointCloud& cloud, double nu, KernelSpec kernel,
                       double tol = 1e-6, std::size_t max_passes = 2000,
                       TrainStats* stats = nullptr);

double decision(const OneClassSvmModel& model, std::span<const double> x);

struct GammaSelection {
    double gamma = 0.0;
    bool plateau_found = false;  // false: schedule exhausted, last gamma returned
    std::vector<std::pair<double, std::size_t>> history;  // (gamma, #SV) per step
};

// Trains a model for each gamma in the strictly decreasing schedule and stops
// at the first step where the support-vector count drops by less than
// rel_drop_threshold relative to the previous step.
GammaSelection select_gamma(const PointCloud& cloud, double nu,
                            const std::vector<double>& schedule,
                            double rel_drop_threshold = 0.05, double tol = 1e-6);

std::vector<double> default_gamma_schedule();

struct NuPropertyReport {
    double outlier_fraction = 0.0;  // decision < -10 tol
    double sv_fraction = 0.0;
    bool pass = false;
};

NuPropertyReport validate_nu_property(const OneClassSvmModel& model, const PointCloud& cloud,
                                      double tol = 1e-6);

// Versioned JSON schema; the contract between training and optimization.
std::string model_to_json(const OneClassSvmModel& model);
OneClassSvmModel model_from_json(const std::string& text);
void save_model(const std::string& path, const OneClassSvmModel& model);
OneClassSvmModel load_model(const std::string& path);

}  // namespace vdo
