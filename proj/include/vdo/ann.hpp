#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vdo/point_cloud.hpp"

namespace vdo {

// Feedforward MLP, tanh hidden layers, linear output. Weights W[l] are
// (out x in) row-major. Input/output scalers are applied inside forward(),
// so the model maps raw units to raw units.
struct MlpModel {
    std::vector<std::size_t> layer_sizes;      // input, hidden..., output
    std::vector<std::vector<double>> weights;  // one matrix per layer transition
    std::vector<std::vector<double>> biases;
    Scaler input_scaler;   // identity when no scaling is wanted
    Scaler output_scaler;

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t n_layers() const { return weights.size(); }
    void validate() const;
};

std::vector<double> forward(const MlpModel& model, std::span<const double> x);

// d output[k] / d x for scalar-output models (k = 0), raw units.
std::vector<double> input_gradient(const MlpModel& model, std::span<const double> x);

struct TrainConfig {
    std::size_t batch_size = 128;
    std::size_t max_epochs = 4000;
    double learning_rate = 1e-2;
    double final_lr_fraction = 1.0;  // optional geometric decay to lr * fraction
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 0;
    bool scale_inputs = true;    // min-max to [-1,1]
    bool scale_outputs = true;   // zero mean, unit variance
};

struct MlpTrainReport {
    double final_mse = 0.0;  // on scaled targets
    std::size_t epochs = 0;
    std::vector<double> epoch_loss;
};

// Minimizes MSE with Adam over shuffled mini-batches; deterministic for a
// fixed seed. `hidden` lists the hidden layer widths. Throws numeric_error
// (with the epoch index) if the loss turns non-finite.
MlpModel train_mlp(const PointCloud& inputs, const std::vector<double>& targets,
                   const std::vector<std::size_t>& hidden, const TrainConfig& config,
                   MlpTrainReport* report = nullptr);

// Adapted peaks surface used as the ground-truth objective of the 2D studies.
double peaks(double x1, double x2);

std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);
void save_mlp(const std::string& path, const MlpModel& model);
MlpModel load_mlp(const std::string& path);

}  // namespace vdo
