#include "vdo/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>

#include <json.hpp>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

// Kernel rows computed on demand with an LRU cap on resident rows.
class KernelCache {
public:
    KernelCache(const PointCloud& cloud, double gamma, std::size_t max_rows)
        : cloud_(cloud), gamma_(gamma), max_rows_(std::max<std::size_t>(max_rows, 2)),
          rows_(cloud.size()), where_(cloud.size(), lru_.end()) {}

    const std::vector<double>& row(std::size_t i) {
        if (where_[i] != lru_.end()) {
            lru_.splice(lru_.begin(), lru_, where_[i]);
            return rows_[i];
        }
        if (lru_.size() >= max_rows_) {
            const std::size_t evict = lru_.back();
            lru_.pop_back();
            where_[evict] = lru_.end();
            rows_[evict].clear();
            rows_[evict].shrink_to_fit();
        }
        auto& r = rows_[i];
        const std::size_t n = cloud_.size();
        r.resize(n);
        const auto pi = cloud_.point(i);
        for (std::size_t j = 0; j < n; ++j)
            r[j] = std::exp(-gamma_ * squared_distance(pi, cloud_.point(j)));
        lru_.push_front(i);
        where_[i] = lru_.begin();
        return r;
    }

private:
    const PointCloud& cloud_;
    double gamma_;
    std::size_t max_rows_;
    std::vector<std::vector<double>> rows_;
    std::list<std::size_t> lru_;
    std::vector<std::list<std::size_t>::iterator> where_;
};

constexpr std::size_t kCacheBudgetDoubles = 32u << 20;  // ~256 MB of kernel rows

}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    return std::exp(-gamma * squared_distance(x, y));
}

OneClassSvmModel train(const PointCloud& cloud, double nu, KernelSpec kernel, double tol,
                       std::size_t max_passes, TrainStats* stats) {
    const std::size_t n = cloud.size();
    if (!(nu > 0.0 && nu < 1.0)) throw config_error("train: nu must be in (0,1)");
    if (n < 2) throw config_error("train: need at least 2 training points");
    if (!(kernel.gamma > 0.0)) throw config_error("train: gamma must be positive");
    if (!(nu * static_cast<double>(n) > 1.0))
        throw config_error("train: nu*N must exceed 1 (box constraints infeasible with "
                           "the equality otherwise)");

    const double C = 1.0 / (nu * static_cast<double>(n));
    KernelCache cache(cloud, kernel.gamma, kCacheBudgetDoubles / n);

    // Uniform feasible start: 1/N is inside the box whenever nu < 1.
    std::vector<double> alpha(n, 1.0 / static_cast<double>(n));

    // gradient of the dual objective: g = K alpha
    std::vector<double> g(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] <= 0.0) continue;
        const auto& kj = cache.row(j);
        for (std::size_t i = 0; i < n; ++i) g[i] += alpha[j] * kj[i];
    }

    const std::size_t max_iters = max_passes * n;
    const double bound_eps = 1e-12 * C;
    double violation = 0.0;
    std::size_t iter = 0;
    for (;; ++iter) {
        std::size_t up = n, dn = n;
        double g_up = std::numeric_limits<double>::infinity();
        double g_dn = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] < C - bound_eps && g[i] < g_up) {
                g_up = g[i];
                up = i;
            }
            if (alpha[i] > bound_eps && g[i] > g_dn) {
                g_dn = g[i];
                dn = i;
            }
        }
        violation = (up < n && dn < n) ? g_dn - g_up : 0.0;
        if (violation <= tol) break;
        if (iter >= max_iters)
            throw numeric_error("train: SMO did not converge in " + std::to_string(max_iters) +
                                " iterations, KKT violation " + std::to_string(violation));

        const auto& row_up = cache.row(up);
        const auto& row_dn = cache.row(dn);
        const double eta = std::max(row_up[up] + row_dn[dn] - 2.0 * row_up[dn], 1e-12);
        double t = violation / eta;
        t = std::min(t, C - alpha[up]);
        t = std::min(t, alpha[dn]);
        alpha[up] += t;
        alpha[dn] -= t;
        if (alpha[dn] < bound_eps) alpha[dn] = 0.0;
        if (alpha[up] > C - bound_eps) alpha[up] = C;
        for (std::size_t i = 0; i < n; ++i) g[i] += t * (row_up[i] - row_dn[i]);
        // periodic exact refresh of the incremental gradient
        if ((iter + 1) % 100000 == 0) {
            std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (alpha[j] <= 0.0) continue;
                const auto& kj = cache.row(j);
                for (std::size_t i = 0; i < n; ++i) g[i] += alpha[j] * kj[i];
            }
        }
    }

    // rho: mean gradient over margin vectors, else KKT bracket midpoint
    double rho = 0.0;
    {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (alpha[i] > tol && alpha[i] < C - tol) {
                sum += g[i];
                ++count;
            }
        if (count > 0) {
            rho = sum / static_cast<double>(count);
        } else {
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                if (alpha[i] >= C - tol) lo = std::max(lo, g[i]);
                if (alpha[i] <= tol) hi = std::min(hi, g[i]);
            }
            if (!std::isfinite(lo)) rho = hi;
            else if (!std::isfinite(hi)) rho = lo;
            else rho = 0.5 * (lo + hi);
        }
    }

    if (stats != nullptr) {
        stats->iterations = iter;
        stats->final_violation = violation;
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (alpha[i] > 0.0) obj += alpha[i] * g[i];
        stats->dual_objective = 0.5 * obj;
    }

    // keep only duals above the pruning threshold
    std::vector<std::size_t> sv_idx;
    std::vector<double> sv_alpha;
    for (std::size_t i = 0; i < n; ++i)
        if (alpha[i] > tol) {
            sv_idx.push_back(i);
            sv_alpha.push_back(alpha[i]);
        }
    if (sv_idx.empty()) throw numeric_error("train: no support vectors above threshold");

    OneClassSvmModel model;
    model.support_vectors = cloud.subset(sv_idx);
    model.alphas = std::move(sv_alpha);
    model.rho = rho;
    model.kernel = kernel;
    model.nu = nu;
    model.n_train = n;
    return model;
}

double decision(const OneClassSvmModel& model, std::span<const double> x) {
    std::vector<double> scaled;
    std::span<const double> q = x;
    if (model.scaler) {
        scaled = model.scaler->apply(x);
        q = scaled;
    }
    if (q.size() != model.dim())
        throw data_error("decision: point dimension " + std::to_string(q.size()) +
                         " does not match model dimension " + std::to_string(model.dim()));
    double s = 0.0;
    for (std::size_t i = 0; i < model.sv_count(); ++i)
        s += model.alphas[i] * rbf_kernel(model.support_vectors.point(i), q, model.kernel.gamma);
    return s - model.rho;
}

GammaSelection select_gamma(const PointCloud& cloud, double nu,
                            const std::vector<double>& schedule, double rel_drop_threshold,
                            double tol) {
    if (schedule.empty()) throw config_error("select_gamma: empty schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0)) throw config_error("select_gamma: gammas must be positive");
        if (i > 0 && schedule[i] >= schedule[i - 1])
            throw config_error("select_gamma: schedule must be strictly decreasing");
    }

    GammaSelection out;
    std::size_t prev_svs = 0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto model = train(cloud, nu, KernelSpec{schedule[k]}, tol);
        out.history.push_back({schedule[k], model.sv_count()});
        if (k == 0 && schedule.size() == 1) {
            out.gamma = schedule[k];
            out.plateau_found = true;
            return out;
        }
        if (k > 0) {
            const double drop =
                (static_cast<double>(prev_svs) - static_cast<double>(model.sv_count())) /
                static_cast<double>(prev_svs);
            if (drop < rel_drop_threshold) {
                out.gamma = schedule[k];
                out.plateau_found = true;
                return out;
            }
        }
        prev_svs = model.sv_count();
    }
    out.gamma = schedule.back();
    out.plateau_found = false;
    return out;
}

std::vector<double> default_gamma_schedule() {
    // geometric decay 2.0 * 0.8^k, 15 steps down to ~0.09
    std::vector<double> s;
    double g = 2.0;
    for (int k = 0; k < 15; ++k) {
        s.push_back(g);
        g *= 0.8;
    }
    return s;
}

NuPropertyReport validate_nu_property(const OneClassSvmModel& model, const PointCloud& cloud,
                                      double tol) {
    NuPropertyReport r;
    const std::size_t n = cloud.size();
    std::size_t outliers = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (decision(model, cloud.point(i)) < -10.0 * tol) ++outliers;
    r.outlier_fraction = static_cast<double>(outliers) / static_cast<double>(n);
    r.sv_fraction = static_cast<double>(model.sv_count()) / static_cast<double>(n);
    const double slack = 2.0 / static_cast<double>(n);
    r.pass = r.outlier_fraction <= model.nu + slack && r.sv_fraction >= model.nu - slack;
    return r;
}

namespace {

nlohmann::json scaler_to_json(const Scaler& s) {
    return {{"mode", s.mode() == ScalerMode::MinMaxSigned ? "minmax_signed" : "standardize"},
            {"offsets", s.offsets()},
            {"gains", s.gains()}};
}

Scaler scaler_from_json(const nlohmann::json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    return Scaler(mode == "standardize" ? ScalerMode::Standardize : ScalerMode::MinMaxSigned,
                  j.at("offsets").get<std::vector<double>>(),
                  j.at("gains").get<std::vector<double>>());
}

}  // namespace

std::string model_to_json(const OneClassSvmModel& model) {
    nlohmann::json j;
    j["schema"] = "ocsvm-v1";
    j["nu"] = model.nu;
    j["gamma"] = model.kernel.gamma;
    j["rho"] = model.rho;
    j["n_train"] = model.n_train;
    std::vector<std::vector<double>> svs;
    svs.reserve(model.sv_count());
    for (std::size_t i = 0; i < model.sv_count(); ++i) {
        auto p = model.support_vectors.point(i);
        svs.emplace_back(p.begin(), p.end());
    }
    j["support_vectors"] = svs;
    j["alphas"] = model.alphas;
    j["scaler"] = model.scaler ? scaler_to_json(*model.scaler) : nlohmann::json(nullptr);
    return j.dump(2);
}

OneClassSvmModel model_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != "ocsvm-v1")
        throw data_error("model_from_json: unsupported schema tag");
    OneClassSvmModel m;
    m.nu = j.at("nu").get<double>();
    m.kernel.gamma = j.at("gamma").get<double>();
    m.rho = j.at("rho").get<double>();
    m.n_train = j.at("n_train").get<std::size_t>();
    m.support_vectors =
        PointCloud::from_rows(j.at("support_vectors").get<std::vector<std::vector<double>>>());
    m.alphas = j.at("alphas").get<std::vector<double>>();
    if (m.alphas.size() != m.support_vectors.size())
        throw data_error("model_from_json: alpha/support vector count mismatch");
    if (!j.at("scaler").is_null()) m.scaler = scaler_from_json(j.at("scaler"));
    return m;
}

void save_model(const std::string& path, const OneClassSvmModel& model) {
    std::ofstream out(path);
    if (!out) throw data_error("save_model: cannot write '" + path + "'");
    out << model_to_json(model) << "\n";
}

OneClassSvmModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("load_model: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace vdo
