#include "vdo/relax.hpp"

#include <algorithm>
#include <cmath>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

constexpr double kInflate = 1e-12;

Interval inflate(Interval i) {
    i.lo -= kInflate * (1.0 + std::abs(i.lo));
    i.hi += kInflate * (1.0 + std::abs(i.hi));
    return i;
}

Interval iv_affine_term(Interval i, double c) {
    return c >= 0.0 ? Interval{c * i.lo, c * i.hi} : Interval{c * i.hi, c * i.lo};
}

Interval iv_mul(Interval a, Interval b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return inflate({std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})});
}

Interval iv_square(Interval a) {
    const double l2 = a.lo * a.lo, h2 = a.hi * a.hi;
    if (a.lo <= 0.0 && a.hi >= 0.0) return inflate({0.0, std::max(l2, h2)});
    return inflate({std::min(l2, h2), std::max(l2, h2)});
}

Interval iv_exp(Interval a) { return inflate({std::exp(a.lo), std::exp(a.hi)}); }
Interval iv_tanh(Interval a) { return inflate({std::tanh(a.lo), std::tanh(a.hi)}); }

Interval iv_abs(Interval a) {
    const double l = std::abs(a.lo), h = std::abs(a.hi);
    if (a.lo <= 0.0 && a.hi >= 0.0) return inflate({0.0, std::max(l, h)});
    return inflate({std::min(l, h), std::max(l, h)});
}

Interval iv_rbf(Interval d, double gamma) {
    return inflate({std::exp(-gamma * d.hi), std::exp(-gamma * d.lo)});
}

double mid3(double lo, double hi, double z) { return std::min(std::max(z, lo), hi); }

struct Lin {
    double val = 0.0;
    std::vector<double> sub;
};

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// c * (relaxation of w), choosing the side that keeps the result convex (for
// underestimates) or concave (for overestimates).
void add_under(Lin& acc, double c, const RelaxValue& w) {
    if (c >= 0.0) {
        acc.val += c * w.cv;
        axpy(acc.sub, c, w.cv_sub);
    } else {
        acc.val += c * w.cc;
        axpy(acc.sub, c, w.cc_sub);
    }
}

void add_over(Lin& acc, double c, const RelaxValue& w) {
    if (c >= 0.0) {
        acc.val += c * w.cc;
        axpy(acc.sub, c, w.cc_sub);
    } else {
        acc.val += c * w.cv;
        axpy(acc.sub, c, w.cv_sub);
    }
}

// convex envelope of tanh on [lo, hi]: (value, slope) at z
struct TanhEnv {
    double knee;      // tangent touch point; z <= knee follows tanh
    double slope;     // tangent/secant slope beyond the knee
    bool secant;      // whole envelope is the secant
};

double dtanh(double z) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

TanhEnv tanh_cv_envelope(double lo, double hi) {
    if (hi <= 0.0) return {hi, 0.0, false};  // convex region, pure tanh
    const double span = hi - lo;
    if (lo >= 0.0 || span <= 0.0) {
        const double s = span > 0.0 ? (std::tanh(hi) - std::tanh(lo)) / span : dtanh(lo);
        return {lo, s, true};
    }
    // tangent at t through (hi, tanh hi): psi(t) = tanh t + tanh'(t)(hi-t) - tanh hi
    auto psi = [&](double t) { return std::tanh(t) + dtanh(t) * (hi - t) - std::tanh(hi); };
    if (psi(lo) >= 0.0) {
        const double s = (std::tanh(hi) - std::tanh(lo)) / span;
        return {lo, s, true};
    }
    double a = lo, b = 0.0;  // psi(lo) < 0, psi(0) >= 0
    for (int it = 0; it < 80 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        (psi(m) < 0.0 ? a : b) = m;
    }
    const double knee = 0.5 * (a + b);
    return {knee, dtanh(knee), false};
}

// value/slope of the convex envelope at z
std::pair<double, double> tanh_cv_at(const TanhEnv& env, double lo, double z) {
    if (env.secant) return {std::tanh(lo) + env.slope * (z - lo), env.slope};
    if (z <= env.knee) return {std::tanh(z), dtanh(z)};
    return {std::tanh(env.knee) + env.slope * (z - env.knee), env.slope};
}

}  // namespace

Interval interval_eval(const ExprTape& tape, std::span<const Interval> box) {
    if (box.size() != tape.n_vars()) throw data_error("interval_eval: box dimension mismatch");
    std::vector<Interval> iv(tape.size());
    const auto& nodes = tape.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const ExprNode& n = nodes[i];
        switch (n.op) {
            case Op::Const: iv[i] = {n.value, n.value}; break;
            case Op::Var: iv[i] = box[static_cast<std::size_t>(n.a)]; break;
            case Op::Affine: {
                const auto& t = tape.affine_terms(n.payload);
                Interval s{t.constant, t.constant};
                for (const auto& [id, c] : t.terms) {
                    const Interval term = iv_affine_term(iv[id], c);
                    s.lo += term.lo;
                    s.hi += term.hi;
                }
                iv[i] = inflate(s);
                break;
            }
            case Op::Mul: iv[i] = iv_mul(iv[n.a], iv[n.b]); break;
            case Op::Square: iv[i] = iv_square(iv[n.a]); break;
            case Op::Exp: iv[i] = iv_exp(iv[n.a]); break;
            case Op::Tanh: iv[i] = iv_tanh(iv[n.a]); break;
            case Op::Abs: iv[i] = iv_abs(iv[n.a]); break;
            case Op::RbfOfDist: iv[i] = iv_rbf(iv[n.a], n.value); break;
        }
    }
    return iv[static_cast<std::size_t>(tape.root())];
}

RelaxValue relax_eval(const ExprTape& tape, std::span<const Interval> box,
                      std::span<const double> x) {
    if (box.size() != tape.n_vars()) throw data_error("relax_eval: box dimension mismatch");
    if (x.size() != tape.n_vars()) throw data_error("relax_eval: point dimension mismatch");
    const std::size_t nv = tape.n_vars();
    const auto& nodes = tape.nodes();
    std::vector<RelaxValue> rv(nodes.size());

    auto cut = [&](RelaxValue& r) {
        if (r.cv < r.iv.lo) {
            r.cv = r.iv.lo;
            std::fill(r.cv_sub.begin(), r.cv_sub.end(), 0.0);
        }
        if (r.cc > r.iv.hi) {
            r.cc = r.iv.hi;
            std::fill(r.cc_sub.begin(), r.cc_sub.end(), 0.0);
        }
    };

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const ExprNode& n = nodes[i];
        RelaxValue& r = rv[i];
        r.cv_sub.assign(nv, 0.0);
        r.cc_sub.assign(nv, 0.0);

        switch (n.op) {
            case Op::Const:
                r.iv = {n.value, n.value};
                r.cv = r.cc = n.value;
                break;
            case Op::Var: {
                const auto d = static_cast<std::size_t>(n.a);
                r.iv = box[d];
                r.cv = r.cc = x[d];
                r.cv_sub[d] = 1.0;
                r.cc_sub[d] = 1.0;
                break;
            }
            case Op::Affine: {
                const auto& t = tape.affine_terms(n.payload);
                Interval s{t.constant, t.constant};
                Lin lo{t.constant, std::vector<double>(nv, 0.0)};
                Lin hi{t.constant, std::vector<double>(nv, 0.0)};
                for (const auto& [id, c] : t.terms) {
                    const Interval term = iv_affine_term(rv[id].iv, c);
                    s.lo += term.lo;
                    s.hi += term.hi;
                    add_under(lo, c, rv[id]);
                    add_over(hi, c, rv[id]);
                }
                r.iv = inflate(s);
                r.cv = lo.val;
                r.cv_sub = std::move(lo.sub);
                r.cc = hi.val;
                r.cc_sub = std::move(hi.sub);
                break;
            }
            case Op::Mul: {
                const RelaxValue& u = rv[n.a];
                const RelaxValue& v = rv[n.b];
                r.iv = iv_mul(u.iv, v.iv);
                const double ul = u.iv.lo, uu = u.iv.hi, vl = v.iv.lo, vu = v.iv.hi;

                Lin a1{-ul * vl, std::vector<double>(nv, 0.0)};
                add_under(a1, vl, u);
                add_under(a1, ul, v);
                Lin a2{-uu * vu, std::vector<double>(nv, 0.0)};
                add_under(a2, vu, u);
                add_under(a2, uu, v);
                if (a1.val >= a2.val) {
                    r.cv = a1.val;
                    r.cv_sub = std::move(a1.sub);
                } else {
                    r.cv = a2.val;
                    r.cv_sub = std::move(a2.sub);
                }

                Lin b1{-uu * vl, std::vector<double>(nv, 0.0)};
                add_over(b1, vl, u);
                add_over(b1, uu, v);
                Lin b2{-ul * vu, std::vector<double>(nv, 0.0)};
                add_over(b2, vu, u);
                add_over(b2, ul, v);
                if (b1.val <= b2.val) {
                    r.cc = b1.val;
                    r.cc_sub = std::move(b1.sub);
                } else {
                    r.cc = b2.val;
                    r.cc_sub = std::move(b2.sub);
                }
                break;
            }
            case Op::Square: {
                const RelaxValue& u = rv[n.a];
                r.iv = iv_square(u.iv);
                const double zmin = mid3(u.iv.lo, u.iv.hi, 0.0);
                const double t = mid3(std::min(u.cv, u.cc), std::max(u.cv, u.cc), zmin);
                r.cv = t * t;
                const double slope = 2.0 * t;
                axpy(r.cv_sub, slope, slope >= 0.0 ? u.cv_sub : u.cc_sub);

                const double s = u.iv.lo + u.iv.hi;  // secant slope
                const double te = s >= 0.0 ? u.cc : u.cv;
                r.cc = s * te - u.iv.lo * u.iv.hi;
                axpy(r.cc_sub, s, s >= 0.0 ? u.cc_sub : u.cv_sub);
                break;
            }
            case Op::Exp: {
                const RelaxValue& u = rv[n.a];
                r.iv = iv_exp(u.iv);
                r.cv = std::exp(u.cv);
                axpy(r.cv_sub, r.cv, u.cv_sub);

                const double span = u.iv.width();
                const double s =
                    span > 0.0 ? (std::exp(u.iv.hi) - std::exp(u.iv.lo)) / span : std::exp(u.iv.lo);
                r.cc = std::exp(u.iv.lo) + s * (u.cc - u.iv.lo);
                axpy(r.cc_sub, s, u.cc_sub);
                break;
            }
            case Op::Tanh: {
                const RelaxValue& u = rv[n.a];
                r.iv = iv_tanh(u.iv);
                {
                    const auto env = tanh_cv_envelope(u.iv.lo, u.iv.hi);
                    const auto [val, slope] = tanh_cv_at(env, u.iv.lo, u.cv);
                    r.cv = val;
                    axpy(r.cv_sub, slope, u.cv_sub);
                }
                {
                    // concave side by odd symmetry
                    const auto env = tanh_cv_envelope(-u.iv.hi, -u.iv.lo);
                    const auto [val, slope] = tanh_cv_at(env, -u.iv.hi, -u.cc);
                    r.cc = -val;
                    axpy(r.cc_sub, slope, u.cc_sub);
                }
                break;
            }
            case Op::Abs: {
                const RelaxValue& u = rv[n.a];
                r.iv = iv_abs(u.iv);
                const double zmin = mid3(u.iv.lo, u.iv.hi, 0.0);
                const double t = mid3(std::min(u.cv, u.cc), std::max(u.cv, u.cc), zmin);
                r.cv = std::abs(t);
                const double slope = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
                if (slope != 0.0) axpy(r.cv_sub, slope, slope >= 0.0 ? u.cv_sub : u.cc_sub);

                const double span = u.iv.width();
                const double s =
                    span > 0.0 ? (std::abs(u.iv.hi) - std::abs(u.iv.lo)) / span : 0.0;
                const double te = s >= 0.0 ? u.cc : u.cv;
                r.cc = std::abs(u.iv.lo) + s * (te - u.iv.lo);
                axpy(r.cc_sub, s, s >= 0.0 ? u.cc_sub : u.cv_sub);
                break;
            }
            case Op::RbfOfDist: {
                const RelaxValue& d = rv[n.a];
                const double gamma = n.value;
                r.iv = iv_rbf(d.iv, gamma);

                r.cv = std::exp(-gamma * d.cc);
                axpy(r.cv_sub, -gamma * r.cv, d.cc_sub);

                const double span = d.iv.width();
                const double glo = std::exp(-gamma * d.iv.lo);
                const double ghi = std::exp(-gamma * d.iv.hi);
                const double s = span > 0.0 ? (ghi - glo) / span : 0.0;
                r.cc = glo + s * (d.cv - d.iv.lo);
                axpy(r.cc_sub, s, s >= 0.0 ? d.cc_sub : d.cv_sub);
                break;
            }
        }
        cut(r);
    }
    return rv[static_cast<std::size_t>(tape.root())];
}

namespace {

double affine_min_over_box(const RelaxValue& r, std::span<const Interval> box,
                           std::span<const double> x, std::vector<double>* corner) {
    double v = r.cv;
    for (std::size_t d = 0; d < box.size(); ++d) {
        const double g = r.cv_sub[d];
        const double target = g >= 0.0 ? box[d].lo : box[d].hi;
        v += g * (target - x[d]);
        if (corner != nullptr) (*corner)[d] = target;
    }
    return v;
}

double affine_max_over_box(const RelaxValue& r, std::span<const Interval> box,
                           std::span<const double> x, std::vector<double>* corner) {
    double v = r.cc;
    for (std::size_t d = 0; d < box.size(); ++d) {
        const double g = r.cc_sub[d];
        const double target = g >= 0.0 ? box[d].hi : box[d].lo;
        v += g * (target - x[d]);
        if (corner != nullptr) (*corner)[d] = target;
    }
    return v;
}

}  // namespace

double lower_bound_objective(const ExprTape& tape, std::span<const Interval> box,
                             int improve_iters) {
    std::vector<double> x(box.size());
    for (std::size_t d = 0; d < box.size(); ++d) x[d] = box[d].mid();
    std::vector<double> corner(box.size());
    double best = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < std::max(improve_iters, 1); ++it) {
        const RelaxValue r = relax_eval(tape, box, x);
        best = std::max(best, r.iv.lo);
        best = std::max(best, affine_min_over_box(r, box, x, &corner));
        // re-linearize halfway toward the minimizing corner
        bool moved = false;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double nx = 0.5 * (x[d] + corner[d]);
            if (nx != x[d]) moved = true;
            x[d] = nx;
        }
        if (!moved) break;
    }
    return best;
}

double upper_bound_max(const ExprTape& tape, std::span<const Interval> box,
                       int improve_iters) {
    std::vector<double> x(box.size());
    for (std::size_t d = 0; d < box.size(); ++d) x[d] = box[d].mid();
    std::vector<double> corner(box.size());
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < std::max(improve_iters, 1); ++it) {
        const RelaxValue r = relax_eval(tape, box, x);
        best = std::min(best, r.iv.hi);
        best = std::min(best, affine_max_over_box(r, box, x, &corner));
        bool moved = false;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double nx = 0.5 * (x[d] + corner[d]);
            if (nx != x[d]) moved = true;
            x[d] = nx;
        }
        if (!moved) break;
    }
    return best;
}

Interval constraint_bounds(const ExprTape& tape, std::span<const Interval> box,
                           int improve_iters) {
    return {lower_bound_objective(tape, box, improve_iters),
            upper_bound_max(tape, box, improve_iters)};
}

RelaxValue rbf_term_relax(std::span<const double> center, double gamma,
                          std::span<const Interval> box, std::span<const double> x) {
    ExprTape tape(center.size());
    std::vector<int> coords;
    coords.reserve(center.size());
    for (std::size_t d = 0; d < center.size(); ++d)
        coords.push_back(tape.var(d));
    const int dist = tape.squared_distance_to(coords, center);
    tape.set_root(tape.rbf_of_dist(dist, gamma));
    return relax_eval(tape, box, x);
}

}  // namespace vdo
