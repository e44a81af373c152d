#include "vdo/ann.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vdo/errors.hpp"

namespace vdo {

void MlpModel::validate() const {
    if (layer_sizes.size() < 2) throw data_error("MlpModel: need at least input and output");
    if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
        throw data_error("MlpModel: layer count mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
        if (weights[l].size() != in * out || biases[l].size() != out)
            throw data_error("MlpModel: shape mismatch in layer " + std::to_string(l));
        for (double w : weights[l])
            if (!std::isfinite(w)) throw data_error("MlpModel: non-finite weight");
        for (double b : biases[l])
            if (!std::isfinite(b)) throw data_error("MlpModel: non-finite bias");
    }
    if (input_scaler.dim() != layer_sizes.front() || output_scaler.dim() != layer_sizes.back())
        throw data_error("MlpModel: scaler dimension mismatch");
}

namespace {

// activations per layer on the scaled input; returns the scaled output layer
std::vector<std::vector<double>> forward_scaled(const MlpModel& m,
                                                std::span<const double> x_scaled) {
    std::vector<std::vector<double>> acts;
    acts.reserve(m.n_layers() + 1);
    acts.emplace_back(x_scaled.begin(), x_scaled.end());
    for (std::size_t l = 0; l < m.n_layers(); ++l) {
        const std::size_t in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
        std::vector<double> z(out);
        for (std::size_t o = 0; o < out; ++o) {
            double s = m.biases[l][o];
            const double* w = m.weights[l].data() + o * in;
            for (std::size_t i = 0; i < in; ++i) s += w[i] * acts.back()[i];
            z[o] = (l + 1 < m.n_layers()) ? std::tanh(s) : s;
        }
        acts.push_back(std::move(z));
    }
    return acts;
}

}  // namespace

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim())
        throw data_error("forward: input dimension mismatch");
    const auto xs = model.input_scaler.apply(x);
    const auto acts = forward_scaled(model, xs);
    return model.output_scaler.invert(acts.back());
}

std::vector<double> input_gradient(const MlpModel& model, std::span<const double> x) {
    const auto xs = model.input_scaler.apply(x);
    const auto acts = forward_scaled(model, xs);

    // reverse pass for output 0 w.r.t. the scaled input
    std::vector<double> grad(acts.back().size(), 0.0);
    grad[0] = 1.0;
    for (std::size_t l = model.n_layers(); l-- > 0;) {
        const std::size_t in = model.layer_sizes[l], out = model.layer_sizes[l + 1];
        std::vector<double> next(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            double go = grad[o];
            if (l + 1 < model.n_layers()) {
                const double a = acts[l + 1][o];
                go *= (1.0 - a * a);  // tanh'
            }
            const double* w = model.weights[l].data() + o * in;
            for (std::size_t i = 0; i < in; ++i) next[i] += go * w[i];
        }
        grad = std::move(next);
    }
    // chain through both scalers: y = gain_out * y_scaled + off, x_scaled = (x-off)/gain_in
    for (std::size_t d = 0; d < grad.size(); ++d)
        grad[d] *= model.output_scaler.gains()[0] / model.input_scaler.gains()[d];
    return grad;
}

MlpModel train_mlp(const PointCloud& inputs, const std::vector<double>& targets,
                   const std::vector<std::size_t>& hidden, const TrainConfig& config,
                   MlpTrainReport* report) {
    const std::size_t n = inputs.size();
    if (targets.size() != n) throw data_error("train_mlp: input/target count mismatch");
    if (config.batch_size == 0 || config.max_epochs == 0 || !(config.learning_rate > 0.0))
        throw config_error("train_mlp: batch size, epochs and learning rate must be positive");

    MlpModel m;
    m.layer_sizes.push_back(inputs.dim());
    for (std::size_t h : hidden) m.layer_sizes.push_back(h);
    m.layer_sizes.push_back(1);

    m.input_scaler = config.scale_inputs ? Scaler::fit(inputs, ScalerMode::MinMaxSigned)
                                         : Scaler::identity(inputs.dim());
    if (config.scale_outputs) {
        PointCloud t(1, targets);
        m.output_scaler = Scaler::fit(t, ScalerMode::Standardize);
    } else {
        m.output_scaler = Scaler::identity(1);
    }

    std::mt19937_64 gen(config.seed);
    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
        const std::size_t in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
        const double bound = std::sqrt(1.0 / static_cast<double>(in));  // fan-in rule
        std::uniform_real_distribution<double> dist(-bound, bound);
        m.weights.emplace_back(in * out);
        m.biases.emplace_back(out, 0.0);
        for (auto& w : m.weights.back()) w = dist(gen);
    }

    // pre-scaled training set
    std::vector<double> xs(n * inputs.dim());
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = m.input_scaler.apply(inputs.point(i));
        std::copy(s.begin(), s.end(), xs.begin() + static_cast<std::ptrdiff_t>(i * inputs.dim()));
        ys[i] = m.output_scaler.apply1(targets[i], 0);
    }

    const std::size_t n_layers = m.weights.size();
    std::vector<std::vector<double>> mw(n_layers), vw(n_layers), mb(n_layers), vb(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        mw[l].assign(m.weights[l].size(), 0.0);
        vw[l].assign(m.weights[l].size(), 0.0);
        mb[l].assign(m.biases[l].size(), 0.0);
        vb[l].assign(m.biases[l].size(), 0.0);
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const double eps = 1e-8;
    std::size_t step = 0;
    double epoch_mse = 0.0;

    std::vector<std::vector<double>> gw(n_layers), gb(n_layers);
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        const double progress = config.max_epochs > 1
                                    ? static_cast<double>(epoch) /
                                          static_cast<double>(config.max_epochs - 1)
                                    : 0.0;
        const double lr =
            config.learning_rate * std::pow(std::max(config.final_lr_fraction, 1e-6), progress);
        std::shuffle(perm.begin(), perm.end(), gen);
        epoch_mse = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t stop = std::min(n, start + config.batch_size);
            for (std::size_t l = 0; l < n_layers; ++l) {
                gw[l].assign(m.weights[l].size(), 0.0);
                gb[l].assign(m.biases[l].size(), 0.0);
            }
            for (std::size_t bi = start; bi < stop; ++bi) {
                const std::size_t i = perm[bi];
                std::span<const double> xi(xs.data() + i * inputs.dim(), inputs.dim());
                const auto acts = forward_scaled(m, xi);
                const double err = acts.back()[0] - ys[i];
                epoch_mse += err * err;

                std::vector<double> delta = {2.0 * err};
                for (std::size_t l = n_layers; l-- > 0;) {
                    const std::size_t in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
                    std::vector<double> prev(in, 0.0);
                    for (std::size_t o = 0; o < out; ++o) {
                        double d = delta[o];
                        if (l + 1 < n_layers) {
                            const double a = acts[l + 1][o];
                            d *= (1.0 - a * a);
                        }
                        gb[l][o] += d;
                        double* gwrow = gw[l].data() + o * in;
                        const double* w = m.weights[l].data() + o * in;
                        for (std::size_t k = 0; k < in; ++k) {
                            gwrow[k] += d * acts[l][k];
                            prev[k] += d * w[k];
                        }
                    }
                    delta = std::move(prev);
                }
            }

            ++step;
            const double bs = static_cast<double>(stop - start);
            const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
            for (std::size_t l = 0; l < n_layers; ++l) {
                for (std::size_t k = 0; k < m.weights[l].size(); ++k) {
                    const double g = gw[l][k] / bs;
                    mw[l][k] = config.beta1 * mw[l][k] + (1.0 - config.beta1) * g;
                    vw[l][k] = config.beta2 * vw[l][k] + (1.0 - config.beta2) * g * g;
                    m.weights[l][k] -= lr * (mw[l][k] / c1) /
                                       (std::sqrt(vw[l][k] / c2) + eps);
                }
                for (std::size_t k = 0; k < m.biases[l].size(); ++k) {
                    const double g = gb[l][k] / bs;
                    mb[l][k] = config.beta1 * mb[l][k] + (1.0 - config.beta1) * g;
                    vb[l][k] = config.beta2 * vb[l][k] + (1.0 - config.beta2) * g * g;
                    m.biases[l][k] -= lr * (mb[l][k] / c1) /
                                      (std::sqrt(vb[l][k] / c2) + eps);
                }
            }
        }
        epoch_mse /= static_cast<double>(n);
        if (!std::isfinite(epoch_mse))
            throw numeric_error("train_mlp: loss diverged at epoch " + std::to_string(epoch));
        if (report != nullptr) report->epoch_loss.push_back(epoch_mse);
    }

    if (report != nullptr) {
        report->final_mse = epoch_mse;
        report->epochs = config.max_epochs;
    }
    m.validate();
    return m;
}

double peaks(double x1, double x2) {
    const double a = 3.0 * (1.0 - x1) * (1.0 - x1) * std::exp(-x1 * x1 - (x2 + 1.0) * (x2 + 1.0));
    const double b =
        -10.0 * (x1 / 5.0 - x1 * x1 * x1 - std::pow(x2, 5)) * std::exp(-x1 * x1 - x2 * x2);
    const double c = -(1.0 / 3.0) * std::exp(-(x1 + 1.0) * (x1 + 1.0) - x2 * x2);
    return a + b + c - 1.3 * x2;
}

namespace {

nlohmann::json scaler_json(const Scaler& s) {
    return {{"mode", s.mode() == ScalerMode::MinMaxSigned ? "minmax_signed" : "standardize"},
            {"offsets", s.offsets()},
            {"gains", s.gains()}};
}

Scaler scaler_unjson(const nlohmann::json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    return Scaler(mode == "standardize" ? ScalerMode::Standardize : ScalerMode::MinMaxSigned,
                  j.at("offsets").get<std::vector<double>>(),
                  j.at("gains").get<std::vector<double>>());
}

}  // namespace

std::string mlp_to_json(const MlpModel& model) {
    nlohmann::json j;
    j["schema"] = "mlp-v1";
    j["layer_sizes"] = model.layer_sizes;
    j["weights"] = model.weights;
    j["biases"] = model.biases;
    j["activation"] = "tanh";
    j["output_activation"] = "linear";
    j["input_scaler"] = scaler_json(model.input_scaler);
    j["output_scaler"] = scaler_json(model.output_scaler);
    return j.dump(2);
}

MlpModel mlp_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != "mlp-v1")
        throw data_error("mlp_from_json: unsupported schema tag");
    MlpModel m;
    m.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    m.input_scaler = scaler_unjson(j.at("input_scaler"));
    m.output_scaler = scaler_unjson(j.at("output_scaler"));
    m.validate();
    return m;
}

void save_mlp(const std::string& path, const MlpModel& model) {
    std::ofstream out(path);
    if (!out) throw data_error("save_mlp: cannot write '" + path + "'");
    out << mlp_to_json(model) << "\n";
}

MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("load_mlp: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return mlp_from_json(ss.str());
}

}  // namespace vdo
