#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vdo/expr.hpp"
#include "vdo/hull.hpp"
#include "vdo/ocsvm.hpp"
#include "vdo/relax.hpp"

namespace vdo {

// One-class SVM validity constraint compiled against the problem variables.
// `decision` is the exact decision function over the decision variables;
// feasible iff decision(x) >= 0.
struct SvmConstraint {
    OneClassSvmModel model;
    std::vector<InputBinding> bindings;
    ExprTape decision;
};

SvmConstraint make_svm_constraint(OneClassSvmModel model, std::size_t n_vars,
                                  std::vector<InputBinding> bindings);

// Box-constrained minimization of `objective` subject to an optional validity
// constraint (facets or SVM decision function).
struct Problem {
    std::vector<Interval> box;
    ExprTape objective;
    std::optional<FacetSystem> facets;
    std::optional<SvmConstraint> svm;

    std::size_t dim() const { return box.size(); }
};

enum class SolveStatus { Optimal, TimeLimit, Infeasible };
std::string status_name(SolveStatus s);

struct SolveOptions {
    double abs_tol = 1e-3;
    double rel_tol = 1e-3;
    double time_limit_s = 1000.0;
    std::size_t max_nodes = 2'000'000;
    double feas_tol = 1e-6;        // SVM decision feasibility tolerance
    double facet_feas_tol = 1e-9;  // facet feasibility tolerance
    std::uint64_t seed = 0;
    int improve_iters = 5;         // subgradient re-linearizations per bound
    int multistart = 16;           // root upper-bounding starts
    std::string trace_csv;         // per-node trace when nonempty
};

struct SolveReport {
    std::vector<double> x_star;
    double f_star = 0.0;
    double lower_bound = 0.0;
    double gap_abs = 0.0;
    double gap_rel = 0.0;
    std::size_t nodes_processed = 0;
    double cpu_seconds = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    std::string mode;            // "rs" or "fs"
    std::size_t n_variables = 0;  // branched/modeled variable count diagnostic
};

// Best-first branch and bound over the decision variables only; the validity
// constraint is handled through interval/subgradient bounds of its expression.
SolveReport solve_reduced_space(const Problem& problem, const SolveOptions& opts = {});

// Lifted formulation: one distance and one kernel auxiliary per support
// vector plus an objective auxiliary become interval variables coupled by
// their defining equations (geometry onto distances, exp both ways, ball
// back-tightening of x, and the weighted kernel sum against rho). Branching
// runs the widest-relative rule over x and the objective auxiliary. Same
// feasible set and optimum as the reduced-space mode, weaker pruning.
SolveReport solve_full_space(const Problem& problem, const SolveOptions& opts = {});

// Projected descent from x0: gradient steps on the objective, validity kept
// by bisection along the step (SVM) or successive halfspace projection
// (facets). Returns a feasible point or nullopt.
std::optional<std::vector<double>> local_refine(const Problem& problem,
                                                std::vector<double> x0,
                                                const SolveOptions& opts = {});

std::string report_to_json(const SolveReport& report);
void save_report(const std::string& path, const SolveReport& report);

}  // namespace vdo
