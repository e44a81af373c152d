#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vdo/ann.hpp"
#include "vdo/ocsvm.hpp"

namespace vdo {

// Factorable expressions as a flat SSA tape. Supported primitives are the
// ones the relaxation machinery knows envelopes for: affine combinations,
// binary products, square, exp, tanh, abs, and the fused RBF-of-distance term.
enum class Op : std::uint8_t {
    Const,
    Var,
    Affine,  // c0 + sum_i c_i * child_i
    Mul,     // child0 * child1
    Square,
    Exp,
    Tanh,
    Abs,
    RbfOfDist,  // exp(-gamma * child0), child0 interpreted as a squared distance
};

struct ExprNode {
    Op op = Op::Const;
    int a = -1, b = -1;   // children (Mul uses both, unary ops use a)
    double value = 0.0;   // Const payload / RbfOfDist gamma
    int payload = -1;     // Affine: index into affine term storage
};

struct AffineTerms {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;  // (node id, coefficient)
};

class ExprTape {
public:
    ExprTape() = default;
    explicit ExprTape(std::size_t n_vars) : n_vars_(n_vars) {}

    std::size_t n_vars() const { return n_vars_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<ExprNode>& nodes() const { return nodes_; }
    const AffineTerms& affine_terms(int payload) const { return affine_[payload]; }
    int root() const { return root_; }
    void set_root(int id) { root_ = id; }

    int constant(double v);
    int var(std::size_t index);
    int affine(AffineTerms terms);
    int add(int x, int y);
    int sub(int x, int y);
    int scale(int x, double c, double shift = 0.0);
    int mul(int x, int y);
    int square(int x);
    int exp_of(int x);
    int tanh_of(int x);
    int abs_of(int x);
    int rbf_of_dist(int dist, double gamma);
    // sum_d (binding_d - center_d)^2 built from square/affine primitives
    int squared_distance_to(std::span<const int> coords, std::span<const double> center);

    double eval(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;  // reverse mode

private:
    int push(ExprNode n);
    std::size_t n_vars_ = 0;
    std::vector<ExprNode> nodes_;
    std::vector<AffineTerms> affine_;
    int root_ = -1;
};

// Per-input binding when embedding a model in an optimization problem:
// either a decision variable index or a fixed constant.
using InputBinding = std::variant<std::size_t, double>;
std::vector<InputBinding> identity_bindings(std::size_t dim);

// Tape of the adapted peaks surface over 2 variables.
ExprTape make_peaks_tape();

// Tape of a scalar-output MLP in raw units (scalers folded in as affine maps).
ExprTape make_mlp_tape(const MlpModel& model, std::size_t n_vars,
                       const std::vector<InputBinding>& bindings);

// Tape of the one-class SVM decision function (positive inside the domain).
ExprTape make_decision_tape(const OneClassSvmModel& model, std::size_t n_vars,
                            const std::vector<InputBinding>& bindings);

// |left - weight * right| over shared variables; used for composition
// objectives like stoichiometric balancing of two predicted concentrations.
ExprTape make_abs_difference_tape(const MlpModel& left, const MlpModel& right, double weight,
                                  std::size_t n_vars,
                                  const std::vector<InputBinding>& bindings);

}  // namespace vdo
