#include "vdo/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>

#include <json.hpp>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> box_midpoint(std::span<const Interval> box) {
    std::vector<double> x(box.size());
    for (std::size_t d = 0; d < box.size(); ++d) x[d] = box[d].mid();
    return x;
}

void clamp_to_box(std::vector<double>& x, std::span<const Interval> box) {
    for (std::size_t d = 0; d < box.size(); ++d)
        x[d] = std::min(std::max(x[d], box[d].lo), box[d].hi);
}

bool point_feasible(const Problem& p, std::span<const double> x, const SolveOptions& o) {
    if (p.facets && hull_margin(*p.facets, x) > o.facet_feas_tol) return false;
    if (p.svm && p.svm->decision.eval(x) < -o.feas_tol) return false;
    return true;
}

// min over the box of a facet row a.x + b
double facet_min_over_box(const FacetSystem& fs, std::size_t row,
                          std::span<const Interval> box) {
    double v = fs.b[row];
    const double* a = fs.A.data() + row * fs.dim;
    for (std::size_t d = 0; d < fs.dim; ++d)
        v += a[d] >= 0.0 ? a[d] * box[d].lo : a[d] * box[d].hi;
    return v;
}

bool facets_possibly_feasible(const FacetSystem& fs, std::span<const Interval> box) {
    for (std::size_t i = 0; i < fs.facet_count(); ++i)
        if (facet_min_over_box(fs, i, box) > 0.0) return false;
    return true;
}

// successive projection onto violated halfspaces, box kept by clamping
bool project_onto_facets(const FacetSystem& fs, std::vector<double>& x,
                         std::span<const Interval> box, double tol) {
    for (int round = 0; round < 600; ++round) {
        double worst = -std::numeric_limits<double>::infinity();
        std::size_t worst_row = 0;
        for (std::size_t i = 0; i < fs.facet_count(); ++i) {
            double v = fs.b[i];
            const double* a = fs.A.data() + i * fs.dim;
            for (std::size_t d = 0; d < fs.dim; ++d) v += a[d] * x[d];
            if (v > worst) {
                worst = v;
                worst_row = i;
            }
        }
        if (worst <= tol) return true;
        const double* a = fs.A.data() + worst_row * fs.dim;
        for (std::size_t d = 0; d < fs.dim; ++d) x[d] -= worst * a[d];
        clamp_to_box(x, box);
    }
    return false;
}

// climb the decision function until it is nonnegative
bool ascend_to_feasible(const ExprTape& decision, std::vector<double>& x,
                        std::span<const Interval> box) {
    double scale = 0.0;
    for (const auto& b : box) scale = std::max(scale, b.width());
    double step = 0.1 * scale;
    double fx = decision.eval(x);
    for (int it = 0; it < 300 && fx < 0.0; ++it) {
        const auto g = decision.gradient(x);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        if (gn < 1e-14 || step < 1e-14 * scale) return false;
        std::vector<double> cand = x;
        for (std::size_t d = 0; d < x.size(); ++d) cand[d] += step * g[d] / gn;
        clamp_to_box(cand, box);
        const double fc = decision.eval(cand);
        if (fc > fx) {
            x = std::move(cand);
            fx = fc;
            step *= 1.2;
        } else {
            step *= 0.5;
        }
    }
    return fx >= 0.0;
}

}  // namespace

SvmConstraint make_svm_constraint(OneClassSvmModel model, std::size_t n_vars,
                                  std::vector<InputBinding> bindings) {
    ExprTape decision = make_decision_tape(model, n_vars, bindings);
    return SvmConstraint{std::move(model), std::move(bindings), std::move(decision)};
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

std::optional<std::vector<double>> local_refine(const Problem& problem,
                                                std::vector<double> x0,
                                                const SolveOptions& opts) {
    const auto& box = problem.box;
    if (x0.size() != box.size()) throw data_error("local_refine: dimension mismatch");
    clamp_to_box(x0, box);

    // reach feasibility first
    if (problem.facets &&
        !project_onto_facets(*problem.facets, x0, box, 0.5 * opts.facet_feas_tol))
        return std::nullopt;
    if (problem.svm && problem.svm->decision.eval(x0) < 0.0) {
        if (!ascend_to_feasible(problem.svm->decision, x0, box)) return std::nullopt;
    }

    double scale = 0.0;
    for (const auto& b : box) scale = std::max(scale, b.width());
    double step = 0.05 * scale;
    double fx = problem.objective.eval(x0);

    for (int it = 0; it < 120 && step > 1e-12 * scale; ++it) {
        const auto g = problem.objective.gradient(x0);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        if (gn < 1e-14) break;

        std::vector<double> cand(x0.size());
        for (std::size_t d = 0; d < x0.size(); ++d) cand[d] = x0[d] - step * g[d] / gn;
        clamp_to_box(cand, box);

        if (problem.facets) {
            if (!project_onto_facets(*problem.facets, cand, box, 0.5 * opts.facet_feas_tol)) {
                step *= 0.5;
                continue;
            }
        }
        if (problem.svm && problem.svm->decision.eval(cand) < 0.0) {
            // bisect along the step for the last feasible point
            double lo = 0.0, hi = 1.0;
            for (int b = 0; b < 50; ++b) {
                const double m = 0.5 * (lo + hi);
                std::vector<double> xm(x0.size());
                for (std::size_t d = 0; d < x0.size(); ++d)
                    xm[d] = x0[d] + m * (cand[d] - x0[d]);
                (problem.svm->decision.eval(xm) >= 0.0 ? lo : hi) = m;
            }
            for (std::size_t d = 0; d < x0.size(); ++d)
                cand[d] = x0[d] + lo * (cand[d] - x0[d]);
        }

        const double fc = problem.objective.eval(cand);
        if (fc < fx - 1e-14 * (1.0 + std::abs(fx))) {
            x0 = std::move(cand);
            fx = fc;
            step *= 1.3;
        } else {
            step *= 0.5;
        }
    }

    if (!point_feasible(problem, x0, opts)) return std::nullopt;
    return x0;
}

namespace {

struct Incumbent {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    bool found() const { return !x.empty(); }
};

void try_improve(Incumbent& inc, const Problem& p, const SolveOptions& o,
                 std::span<const double> x) {
    if (!point_feasible(p, x, o)) return;
    const double f = p.objective.eval(x);
    if (f < inc.f) {
        inc.f = f;
        inc.x.assign(x.begin(), x.end());
    }
}

void refine_and_improve(Incumbent& inc, const Problem& p, const SolveOptions& o,
                        std::vector<double> start) {
    if (auto ref = local_refine(p, std::move(start), o)) try_improve(inc, p, o, *ref);
}

double prune_margin(const SolveOptions& o, double f_star) {
    return std::max(o.abs_tol, o.rel_tol * std::abs(f_star));
}

struct TraceWriter {
    std::ofstream out;
    explicit TraceWriter(const std::string& path) {
        if (!path.empty()) {
            out.open(path);
            out << "node,depth,lb,incumbent,box\n";
        }
    }
    void line(std::uint64_t id, int depth, double lb, double inc,
              std::span<const Interval> box) {
        if (!out.is_open()) return;
        out << id << "," << depth << "," << lb << "," << inc << ",\"";
        for (std::size_t d = 0; d < box.size(); ++d)
            out << (d ? " " : "") << "[" << box[d].lo << ";" << box[d].hi << "]";
        out << "\"\n";
    }
};

// ---------- reduced space ----------

struct RsNode {
    std::vector<Interval> box;
    double lb;
    double volume;
    int depth;
    std::uint64_t id;
};

struct RsOrder {
    bool operator()(const RsNode& a, const RsNode& b) const {
        if (a.lb != b.lb) return a.lb > b.lb;          // min lb first
        if (a.volume != b.volume) return a.volume < b.volume;  // larger volume first
        return a.id > b.id;                             // FIFO
    }
};

double box_volume(std::span<const Interval> box) {
    double v = 1.0;
    for (const auto& b : box) v *= std::max(b.width(), 1e-300);
    return v;
}

}  // namespace

SolveReport solve_reduced_space(const Problem& problem, const SolveOptions& opts) {
    const auto t0 = Clock::now();
    const std::size_t dim = problem.dim();
    if (dim == 0) throw config_error("solve: empty box");

    SolveReport rep;
    rep.mode = "rs";
    rep.n_variables = dim;

    TraceWriter trace(opts.trace_csv);
    std::mt19937_64 rng(opts.seed);
    auto sample_in = [&](std::span<const Interval> box) {
        std::vector<double> x(box.size());
        for (std::size_t d = 0; d < box.size(); ++d)
            x[d] = std::uniform_real_distribution<double>(box[d].lo, box[d].hi)(rng);
        return x;
    };

    Incumbent inc;
    refine_and_improve(inc, problem, opts, box_midpoint(problem.box));
    for (int k = 1; k < opts.multistart; ++k)
        refine_and_improve(inc, problem, opts, sample_in(problem.box));

    std::vector<double> root_width(dim);
    for (std::size_t d = 0; d < dim; ++d)
        root_width[d] = std::max(problem.box[d].width(), 1e-300);

    std::priority_queue<RsNode, std::vector<RsNode>, RsOrder> heap;
    std::uint64_t next_id = 0;
    heap.push({problem.box, lower_bound_objective(problem.objective, problem.box, opts.improve_iters),
               box_volume(problem.box), 0, next_id++});

    double fathom_floor = std::numeric_limits<double>::infinity();
    double final_lb = -std::numeric_limits<double>::infinity();
    SolveStatus status = SolveStatus::TimeLimit;

    for (;;) {
        if (heap.empty()) {
            final_lb = std::min(fathom_floor, inc.found() ? inc.f : fathom_floor);
            status = inc.found() ? SolveStatus::Optimal : SolveStatus::Infeasible;
            break;
        }
        const double heap_lb = heap.top().lb;
        final_lb = std::min(heap_lb, fathom_floor);
        if (inc.found() && inc.f - final_lb <= prune_margin(opts, inc.f)) {
            status = SolveStatus::Optimal;
            break;
        }
        if (elapsed_s(t0) > opts.time_limit_s || rep.nodes_processed >= opts.max_nodes) {
            status = SolveStatus::TimeLimit;
            break;
        }

        RsNode node = heap.top();
        heap.pop();
        ++rep.nodes_processed;
        trace.line(node.id, node.depth, node.lb,
                   inc.found() ? inc.f : std::numeric_limits<double>::infinity(), node.box);

        if (problem.facets && !facets_possibly_feasible(*problem.facets, node.box)) continue;
        if (problem.svm &&
            upper_bound_max(problem.svm->decision, node.box, opts.improve_iters) < 0.0)
            continue;
        if (inc.found() && node.lb >= inc.f - prune_margin(opts, inc.f)) {
            fathom_floor = std::min(fathom_floor, node.lb);
            continue;
        }

        // upper bounding inside this node
        refine_and_improve(inc, problem, opts, box_midpoint(node.box));
        try_improve(inc, problem, opts, sample_in(node.box));

        // branch on the relative-widest dimension
        std::size_t bd = 0;
        double wmax = -1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double w = node.box[d].width() / root_width[d];
            if (w > wmax) {
                wmax = w;
                bd = d;
            }
        }
        if (wmax < 1e-9) {
            fathom_floor = std::min(fathom_floor, node.lb);
            continue;
        }
        const double split = node.box[bd].mid();
        for (int side = 0; side < 2; ++side) {
            RsNode child;
            child.box = node.box;
            if (side == 0)
                child.box[bd].hi = split;
            else
                child.box[bd].lo = split;
            child.lb = std::max(node.lb, lower_bound_objective(problem.objective, child.box,
                                                               opts.improve_iters));
            child.volume = box_volume(child.box);
            child.depth = node.depth + 1;
            child.id = next_id++;
            heap.push(std::move(child));
        }
    }

    rep.cpu_seconds = elapsed_s(t0);
    rep.status = status;
    if (inc.found()) {
        rep.x_star = inc.x;
        rep.f_star = inc.f;
        rep.lower_bound = std::min(final_lb, inc.f);
        rep.gap_abs = std::max(0.0, rep.f_star - rep.lower_bound);
        rep.gap_rel = rep.gap_abs / std::max(1e-12, std::abs(rep.f_star));
    } else {
        rep.lower_bound = final_lb;
        if (status == SolveStatus::Optimal) status = rep.status = SolveStatus::Infeasible;
    }
    return rep;
}

// ---------- full space ----------

namespace {

struct FsNode {
    std::vector<Interval> xbox;
    std::vector<Interval> dbox;  // squared distances, one per support vector
    std::vector<Interval> kbox;  // kernel values, one per support vector
    Interval zbox;               // objective auxiliary
    double lb;
    double volume;
    int depth;
    std::uint64_t id;
};

struct FsOrder {
    bool operator()(const FsNode& a, const FsNode& b) const {
        if (a.lb != b.lb) return a.lb > b.lb;
        if (a.volume != b.volume) return a.volume < b.volume;
        return a.id > b.id;
    }
};

// Distance auxiliaries live in the model's kernel space; bound dimensions of
// the raw x-box are mapped through the model scaler before differencing.
struct FsContext {
    const Problem& p;
    const OneClassSvmModel* svm = nullptr;
    // per model-input dimension: scaled(v) = (v - off) / gain
    std::vector<double> off, gain;

    double to_model(double v, std::size_t d) const { return (v - off[d]) / gain[d]; }
    double from_model(double v, std::size_t d) const { return v * gain[d] + off[d]; }
};

Interval sqdist_interval(const FsContext& ctx, std::span<const double> sv,
                         const std::vector<InputBinding>& bind,
                         std::span<const Interval> xbox) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t d = 0; d < sv.size(); ++d) {
        double vlo, vhi;
        if (std::holds_alternative<std::size_t>(bind[d])) {
            const auto& b = xbox[std::get<std::size_t>(bind[d])];
            vlo = ctx.to_model(b.lo, d) - sv[d];
            vhi = ctx.to_model(b.hi, d) - sv[d];
        } else {
            vlo = vhi = ctx.to_model(std::get<double>(bind[d]), d) - sv[d];
        }
        const double l2 = vlo * vlo, h2 = vhi * vhi;
        if (vlo <= 0.0 && vhi >= 0.0)
            hi += std::max(l2, h2);
        else {
            lo += std::min(l2, h2);
            hi += std::max(l2, h2);
        }
    }
    return {lo, hi};
}

bool intersect(Interval& a, const Interval& b) {
    a.lo = std::max(a.lo, b.lo);
    a.hi = std::min(a.hi, b.hi);
    return a.lo <= a.hi + 1e-12 * (1.0 + std::abs(a.hi));
}

bool fs_tighten(const FsContext& ctx, FsNode& n, const SolveOptions& opts) {
    const auto* svm = ctx.svm;
    if (svm != nullptr) {
        const double gamma = svm->kernel.gamma;
        const auto& bind = ctx.p.svm->bindings;
        for (std::size_t i = 0; i < svm->sv_count(); ++i) {
            const auto sv = svm->support_vectors.point(i);
            if (!intersect(n.dbox[i], sqdist_interval(ctx, sv, bind, n.xbox)))
                return false;
            if (!intersect(n.kbox[i],
                           {std::exp(-gamma * n.dbox[i].hi), std::exp(-gamma * n.dbox[i].lo)}))
                return false;
            // invert k = exp(-gamma d) back onto d
            const double dlo = n.kbox[i].hi >= 1.0 ? 0.0 : -std::log(n.kbox[i].hi) / gamma;
            const double dhi = n.kbox[i].lo <= 0.0 ? n.dbox[i].hi
                                                   : -std::log(n.kbox[i].lo) / gamma;
            if (!intersect(n.dbox[i], {dlo, dhi})) return false;
        }
        // sum_i alpha_i k_i >= rho over the k boxes
        double ub = 0.0;
        for (std::size_t i = 0; i < svm->sv_count(); ++i) ub += svm->alphas[i] * n.kbox[i].hi;
        if (ub < svm->rho) return false;
        for (std::size_t i = 0; i < svm->sv_count(); ++i) {
            const double others = ub - svm->alphas[i] * n.kbox[i].hi;
            const double need = (svm->rho - others) / svm->alphas[i];
            if (need > n.kbox[i].lo && !intersect(n.kbox[i], {need, n.kbox[i].hi + 1.0}))
                return false;
        }
    }
    if (ctx.p.facets && !facets_possibly_feasible(*ctx.p.facets, n.xbox)) return false;
    if (!intersect(n.zbox, interval_eval(ctx.p.objective, n.xbox))) return false;
    n.lb = std::max({n.lb, n.zbox.lo,
                     lower_bound_objective(ctx.p.objective, n.xbox, opts.improve_iters)});
    return true;
}

double fs_volume(const FsNode& n) {
    double v = 1.0;
    for (const auto& b : n.xbox) v *= std::max(b.width(), 1e-300);
    return v;
}

}  // namespace

SolveReport solve_full_space(const Problem& problem, const SolveOptions& opts) {
    const auto t0 = Clock::now();
    const std::size_t dim = problem.dim();
    if (dim == 0) throw config_error("solve: empty box");

    SolveReport rep;
    rep.mode = "fs";
    const std::size_t n_sv = problem.svm ? problem.svm->model.sv_count() : 0;
    rep.n_variables = dim + 2 * n_sv + 1 /*z_dd*/ + 1 /*z_obj*/;

    FsContext ctx{problem, problem.svm ? &problem.svm->model : nullptr, {}, {}};
    if (problem.svm) {
        const auto& m = problem.svm->model;
        if (m.scaler) {
            ctx.off = m.scaler->offsets();
            ctx.gain = m.scaler->gains();
        } else {
            ctx.off.assign(m.dim(), 0.0);
            ctx.gain.assign(m.dim(), 1.0);
        }
    }

    TraceWriter trace(opts.trace_csv);
    std::mt19937_64 rng(opts.seed);
    auto sample_in = [&](std::span<const Interval> box) {
        std::vector<double> x(box.size());
        for (std::size_t d = 0; d < box.size(); ++d)
            x[d] = std::uniform_real_distribution<double>(box[d].lo, box[d].hi)(rng);
        return x;
    };

    Incumbent inc;
    refine_and_improve(inc, problem, opts, box_midpoint(problem.box));
    for (int k = 1; k < opts.multistart; ++k)
        refine_and_improve(inc, problem, opts, sample_in(problem.box));

    // root node and per-dimension reference widths (x, d, k, z)
    FsNode root;
    root.xbox = problem.box;
    root.zbox = interval_eval(problem.objective, problem.box);
    if (problem.svm) {
        const auto& m = problem.svm->model;
        const double gamma = m.kernel.gamma;
        for (std::size_t i = 0; i < m.sv_count(); ++i) {
            const Interval dv = sqdist_interval(ctx, m.support_vectors.point(i),
                                                problem.svm->bindings, problem.box);
            root.dbox.push_back(dv);
            root.kbox.push_back({std::exp(-gamma * dv.hi), std::exp(-gamma * dv.lo)});
        }
    }
    root.depth = 0;
    root.id = 0;
    root.lb = -std::numeric_limits<double>::infinity();
    root.volume = fs_volume(root);

    std::vector<double> wx(dim);
    for (std::size_t d = 0; d < dim; ++d) wx[d] = std::max(root.xbox[d].width(), 1e-300);
    const double wz = std::max(root.zbox.width(), 1e-300);

    std::priority_queue<FsNode, std::vector<FsNode>, FsOrder> heap;
    std::uint64_t next_id = 1;
    heap.push(std::move(root));

    double fathom_floor = std::numeric_limits<double>::infinity();
    double final_lb = -std::numeric_limits<double>::infinity();
    SolveStatus status = SolveStatus::TimeLimit;

    for (;;) {
        if (heap.empty()) {
            final_lb = std::min(fathom_floor, inc.found() ? inc.f : fathom_floor);
            status = inc.found() ? SolveStatus::Optimal : SolveStatus::Infeasible;
            break;
        }
        final_lb = std::min(heap.top().lb, fathom_floor);
        if (inc.found() && inc.f - final_lb <= prune_margin(opts, inc.f)) {
            status = SolveStatus::Optimal;
            break;
        }
        if (elapsed_s(t0) > opts.time_limit_s || rep.nodes_processed >= opts.max_nodes) {
            status = SolveStatus::TimeLimit;
            break;
        }

        FsNode node = heap.top();
        heap.pop();
        ++rep.nodes_processed;
        trace.line(node.id, node.depth, node.lb,
                   inc.found() ? inc.f : std::numeric_limits<double>::infinity(), node.xbox);

        // subproblem work happens at the node: couple the auxiliaries, then bound
        if (!fs_tighten(ctx, node, opts)) continue;
        if (inc.found() && node.lb >= inc.f - prune_margin(opts, inc.f)) {
            fathom_floor = std::min(fathom_floor, node.lb);
            continue;
        }

        refine_and_improve(inc, problem, opts, box_midpoint(node.xbox));
        try_improve(inc, problem, opts, sample_in(node.xbox));

        // Relative-widest over the decision variables and the objective
        // auxiliary. The kernel auxiliaries stay interval variables whose
        // boxes tighten with every split; branching them directly dilutes the
        // tree by 2^(2 #SV) without coupled bounds, so they are not split.
        enum class Which { X, Z } which = Which::X;
        std::size_t bi = 0;
        double wmax = -1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double w = node.xbox[d].width() / wx[d];
            if (w > wmax) {
                wmax = w;
                which = Which::X;
                bi = d;
            }
        }
        if (node.zbox.width() / wz > wmax) {
            wmax = node.zbox.width() / wz;
            which = Which::Z;
        }
        if (wmax < 1e-9) {
            fathom_floor = std::min(fathom_floor, node.lb);
            continue;
        }

        for (int side = 0; side < 2; ++side) {
            FsNode child = node;
            child.id = next_id++;
            child.depth = node.depth + 1;
            Interval* target = nullptr;
            switch (which) {
                case Which::X: target = &child.xbox[bi]; break;
                case Which::Z: target = &child.zbox; break;
            }
            const double split = target->mid();
            if (side == 0)
                target->hi = split;
            else
                target->lo = split;
            child.lb = node.lb;  // refreshed when the child is processed
            child.volume = fs_volume(child);
            heap.push(std::move(child));
        }
    }

    rep.cpu_seconds = elapsed_s(t0);
    rep.status = status;
    if (inc.found()) {
        rep.x_star = inc.x;
        rep.f_star = inc.f;
        rep.lower_bound = std::min(final_lb, inc.f);
        rep.gap_abs = std::max(0.0, rep.f_star - rep.lower_bound);
        rep.gap_rel = rep.gap_abs / std::max(1e-12, std::abs(rep.f_star));
    } else {
        rep.lower_bound = final_lb;
        if (status == SolveStatus::Optimal) rep.status = SolveStatus::Infeasible;
    }
    return rep;
}

std::string report_to_json(const SolveReport& report) {
    nlohmann::json j;
    j["schema"] = "solve-report-v1";
    j["status"] = status_name(report.status);
    j["mode"] = report.mode;
    j["n_variables"] = report.n_variables;
    j["nodes_processed"] = report.nodes_processed;
    j["cpu_seconds"] = report.cpu_seconds;
    if (!report.x_star.empty()) {
        j["x_star"] = report.x_star;
        j["f_star"] = report.f_star;
        j["lower_bound"] = report.lower_bound;
        j["gap_abs"] = report.gap_abs;
        j["gap_rel"] = report.gap_rel;
    } else {
        j["x_star"] = nullptr;
        j["f_star"] = nullptr;
    }
    return j.dump(2);
}

void save_report(const std::string& path, const SolveReport& report) {
    std::ofstream out(path);
    if (!out) throw data_error("save_report: cannot write '" + path + "'");
    out << report_to_json(report) << "\n";
}

}  // namespace vdo
