#pragma once

#include <span>
#include <vector>

#include "vdo/expr.hpp"

namespace vdo {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Convex/concave bounds at a point, with subgradients in the original
// variables; interval encloses the range over the whole box.
struct RelaxValue {
    Interval iv;
    double cv = 0.0;
    double cc = 0.0;
    std::vector<double> cv_sub;
    std::vector<double> cc_sub;
};

Interval interval_eval(const ExprTape& tape, std::span<const Interval> box);
RelaxValue relax_eval(const ExprTape& tape, std::span<const Interval> box,
                      std::span<const double> x);

// Best affine-underestimator bound over the box (subgradient at a point,
// minimized over corners, improved over a few re-linearizations), never
// below the interval bound. Valid lower bound of min f over the box.
double lower_bound_objective(const ExprTape& tape, std::span<const Interval> box,
                             int improve_iters = 5);

// Mirror image: valid upper bound of max f over the box.
double upper_bound_max(const ExprTape& tape, std::span<const Interval> box,
                       int improve_iters = 5);

// Enclosure of the expression's range over the box.
Interval constraint_bounds(const ExprTape& tape, std::span<const Interval> box,
                           int improve_iters = 5);

// Relaxation of exp(-gamma * ||center - x||^2): the exp-of-distance composite
// uses the monotone decreasing convex shape of exp(-gamma t), so the concave
// side is the secant in the distance evaluated at the convex distance
// underestimate and the convex side composes exp with the concave distance
// overestimate.
RelaxValue rbf_term_relax(std::span<const double> center, double gamma,
                          std::span<const Interval> box, std::span<const double> x);

}  // namespace vdo
