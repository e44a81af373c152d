#include "vdo/expr.hpp"

#include <cmath>

#include "vdo/errors.hpp"

namespace vdo {

int ExprTape::push(ExprNode n) {
    nodes_.push_back(n);
    root_ = static_cast<int>(nodes_.size()) - 1;
    return root_;
}

int ExprTape::constant(double v) { return push({Op::Const, -1, -1, v, -1}); }

int ExprTape::var(std::size_t index) {
    if (index >= n_vars_) throw data_error("ExprTape: variable index out of range");
    return push({Op::Var, static_cast<int>(index), -1, 0.0, -1});
}

int ExprTape::affine(AffineTerms terms) {
    affine_.push_back(std::move(terms));
    return push({Op::Affine, -1, -1, 0.0, static_cast<int>(affine_.size()) - 1});
}

int ExprTape::add(int x, int y) { return affine({0.0, {{x, 1.0}, {y, 1.0}}}); }
int ExprTape::sub(int x, int y) { return affine({0.0, {{x, 1.0}, {y, -1.0}}}); }
int ExprTape::scale(int x, double c, double shift) { return affine({shift, {{x, c}}}); }
int ExprTape::mul(int x, int y) { return push({Op::Mul, x, y, 0.0, -1}); }
int ExprTape::square(int x) { return push({Op::Square, x, -1, 0.0, -1}); }
int ExprTape::exp_of(int x) { return push({Op::Exp, x, -1, 0.0, -1}); }
int ExprTape::tanh_of(int x) { return push({Op::Tanh, x, -1, 0.0, -1}); }
int ExprTape::abs_of(int x) { return push({Op::Abs, x, -1, 0.0, -1}); }

int ExprTape::rbf_of_dist(int dist, double gamma) {
    if (!(gamma > 0.0)) throw config_error("rbf_of_dist: gamma must be positive");
    return push({Op::RbfOfDist, dist, -1, gamma, -1});
}

int ExprTape::squared_distance_to(std::span<const int> coords, std::span<const double> center) {
    if (coords.size() != center.size())
        throw data_error("squared_distance_to: size mismatch");
    AffineTerms sum;
    for (std::size_t d = 0; d < coords.size(); ++d) {
        const int diff = scale(coords[d], 1.0, -center[d]);
        sum.terms.push_back({square(diff), 1.0});
    }
    return affine(std::move(sum));
}

double ExprTape::eval(std::span<const double> x) const {
    std::vector<double> v(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        switch (n.op) {
            case Op::Const: v[i] = n.value; break;
            case Op::Var: v[i] = x[static_cast<std::size_t>(n.a)]; break;
            case Op::Affine: {
                const auto& t = affine_[n.payload];
                double s = t.constant;
                for (const auto& [id, c] : t.terms) s += c * v[id];
                v[i] = s;
                break;
            }
            case Op::Mul: v[i] = v[n.a] * v[n.b]; break;
            case Op::Square: v[i] = v[n.a] * v[n.a]; break;
            case Op::Exp: v[i] = std::exp(v[n.a]); break;
            case Op::Tanh: v[i] = std::tanh(v[n.a]); break;
            case Op::Abs: v[i] = std::abs(v[n.a]); break;
            case Op::RbfOfDist: v[i] = std::exp(-n.value * v[n.a]); break;
        }
    }
    return v[static_cast<std::size_t>(root_)];
}

std::vector<double> ExprTape::gradient(std::span<const double> x) const {
    std::vector<double> v(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        switch (n.op) {
            case Op::Const: v[i] = n.value; break;
            case Op::Var: v[i] = x[static_cast<std::size_t>(n.a)]; break;
            case Op::Affine: {
                const auto& t = affine_[n.payload];
                double s = t.constant;
                for (const auto& [id, c] : t.terms) s += c * v[id];
                v[i] = s;
                break;
            }
            case Op::Mul: v[i] = v[n.a] * v[n.b]; break;
            case Op::Square: v[i] = v[n.a] * v[n.a]; break;
            case Op::Exp: v[i] = std::exp(v[n.a]); break;
            case Op::Tanh: v[i] = std::tanh(v[n.a]); break;
            case Op::Abs: v[i] = std::abs(v[n.a]); break;
            case Op::RbfOfDist: v[i] = std::exp(-n.value * v[n.a]); break;
        }
    }

    std::vector<double> bar(nodes_.size(), 0.0);
    bar[static_cast<std::size_t>(root_)] = 1.0;
    std::vector<double> grad(n_vars_, 0.0);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        const double g = bar[i];
        if (g == 0.0) continue;
        const ExprNode& n = nodes_[i];
        switch (n.op) {
            case Op::Const: break;
            case Op::Var: grad[static_cast<std::size_t>(n.a)] += g; break;
            case Op::Affine: {
                const auto& t = affine_[n.payload];
                for (const auto& [id, c] : t.terms) bar[id] += g * c;
                break;
            }
            case Op::Mul:
                bar[n.a] += g * v[n.b];
                bar[n.b] += g * v[n.a];
                break;
            case Op::Square: bar[n.a] += g * 2.0 * v[n.a]; break;
            case Op::Exp: bar[n.a] += g * v[i]; break;
            case Op::Tanh: bar[n.a] += g * (1.0 - v[i] * v[i]); break;
            case Op::Abs:
                bar[n.a] += g * (v[n.a] > 0.0 ? 1.0 : (v[n.a] < 0.0 ? -1.0 : 0.0));
                break;
            case Op::RbfOfDist: bar[n.a] += g * (-n.value) * v[i]; break;
        }
    }
    return grad;
}

std::vector<InputBinding> identity_bindings(std::size_t dim) {
    std::vector<InputBinding> b;
    b.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) b.emplace_back(d);
    return b;
}

namespace {

// model-input nodes from bindings (variable or frozen constant)
std::vector<int> bind_inputs(ExprTape& tape, const std::vector<InputBinding>& bindings) {
    std::vector<int> ids;
    ids.reserve(bindings.size());
    for (const auto& b : bindings) {
        if (std::holds_alternative<std::size_t>(b))
            ids.push_back(tape.var(std::get<std::size_t>(b)));
        else
            ids.push_back(tape.constant(std::get<double>(b)));
    }
    return ids;
}

int append_mlp(ExprTape& tape, const MlpModel& model, const std::vector<int>& raw_inputs) {
    if (raw_inputs.size() != model.input_dim())
        throw data_error("make_mlp_tape: binding count does not match model input");

    // input scaler
    std::vector<int> layer(raw_inputs.size());
    for (std::size_t d = 0; d < raw_inputs.size(); ++d)
        layer[d] = tape.scale(raw_inputs[d], 1.0 / model.input_scaler.gains()[d],
                              -model.input_scaler.offsets()[d] / model.input_scaler.gains()[d]);

    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        const std::size_t in = model.layer_sizes[l], out = model.layer_sizes[l + 1];
        std::vector<int> next(out);
        for (std::size_t o = 0; o < out; ++o) {
            AffineTerms t;
            t.constant = model.biases[l][o];
            const double* w = model.weights[l].data() + o * in;
            for (std::size_t k = 0; k < in; ++k) t.terms.push_back({layer[k], w[k]});
            const int z = tape.affine(std::move(t));
            next[o] = (l + 1 < model.n_layers()) ? tape.tanh_of(z) : z;
        }
        layer = std::move(next);
    }
    // output scaler inverse
    return tape.scale(layer[0], model.output_scaler.gains()[0],
                      model.output_scaler.offsets()[0]);
}

}  // namespace

ExprTape make_peaks_tape() {
    ExprTape t(2);
    const int x1 = t.var(0);
    const int x2 = t.var(1);
    const int sq_x1 = t.square(x1);
    const int sq_x2 = t.square(x2);

    const int one_minus_x1 = t.scale(x1, -1.0, 1.0);
    const int x2_plus_1 = t.scale(x2, 1.0, 1.0);
    const int e_a = t.exp_of(t.affine({0.0, {{sq_x1, -1.0}, {t.square(x2_plus_1), -1.0}}}));
    const int term_a = t.mul(t.square(one_minus_x1), e_a);

    const int x1_cubed = t.mul(x1, sq_x1);
    const int x2_fifth = t.mul(x2, t.square(sq_x2));
    const int poly = t.affine({0.0, {{x1, 0.2}, {x1_cubed, -1.0}, {x2_fifth, -1.0}}});
    const int e_b = t.exp_of(t.affine({0.0, {{sq_x1, -1.0}, {sq_x2, -1.0}}}));
    const int term_b = t.mul(poly, e_b);

    const int x1_plus_1 = t.scale(x1, 1.0, 1.0);
    const int e_c = t.exp_of(t.affine({0.0, {{t.square(x1_plus_1), -1.0}, {sq_x2, -1.0}}}));

    t.set_root(t.affine(
        {0.0, {{term_a, 3.0}, {term_b, -10.0}, {e_c, -1.0 / 3.0}, {x2, -1.3}}}));
    return t;
}

ExprTape make_mlp_tape(const MlpModel& model, std::size_t n_vars,
                       const std::vector<InputBinding>& bindings) {
    ExprTape tape(n_vars);
    const auto inputs = bind_inputs(tape, bindings);
    tape.set_root(append_mlp(tape, model, inputs));
    return tape;
}

ExprTape make_decision_tape(const OneClassSvmModel& model, std::size_t n_vars,
                            const std::vector<InputBinding>& bindings) {
    if (bindings.size() != (model.scaler ? model.scaler->dim() : model.dim()))
        throw data_error("make_decision_tape: binding count does not match model input");
    ExprTape tape(n_vars);
    auto inputs = bind_inputs(tape, bindings);
    if (model.scaler) {
        for (std::size_t d = 0; d < inputs.size(); ++d)
            inputs[d] = tape.scale(inputs[d], 1.0 / model.scaler->gains()[d],
                                   -model.scaler->offsets()[d] / model.scaler->gains()[d]);
    }

    AffineTerms sum;
    sum.constant = -model.rho;
    for (std::size_t i = 0; i < model.sv_count(); ++i) {
        const auto sv = model.support_vectors.point(i);
        const int d = tape.squared_distance_to(inputs, sv);
        sum.terms.push_back({tape.rbf_of_dist(d, model.kernel.gamma), model.alphas[i]});
    }
    tape.set_root(tape.affine(std::move(sum)));
    return tape;
}

ExprTape make_abs_difference_tape(const MlpModel& left, const MlpModel& right, double weight,
                                  std::size_t n_vars,
                                  const std::vector<InputBinding>& bindings) {
    ExprTape tape(n_vars);
    const auto inputs = bind_inputs(tape, bindings);
    const int a = append_mlp(tape, left, inputs);
    const int b = append_mlp(tape, right, inputs);
    tape.set_root(tape.abs_of(tape.affine({0.0, {{a, 1.0}, {b, -weight}}})));
    return tape;
}

}  // namespace vdo
