#include "vdo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vdo/errors.hpp"
#include "vdo/expr.hpp"
#include "vdo/sru.hpp"
#include "vdo/svg.hpp"

namespace vdo {

namespace {

namespace fs = std::filesystem;

template <typename F>
auto stage(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const config_error& e) {
        throw config_error("stage '" + name + "': " + e.what());
    } catch (const std::exception& e) {
        throw data_error("stage '" + name + "': " + e.what());
    }
}

PointCloud load_points(const RunConfig& cfg) {
    if (cfg.generator) return generate_dataset(*cfg.generator);
    if (cfg.points_csv.empty())
        throw config_error("no data source: set a generator shape or a points CSV");
    const auto t = load_timeseries_csv(cfg.points_csv);
    if (t.values.size() < 2) throw data_error("points CSV needs at least two columns");
    std::vector<double> flat;
    const std::size_t dim = t.values.size();
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < dim; ++c) flat.push_back(t.values[c][r]);
    return PointCloud(dim, std::move(flat));
}

nlohmann::json summary_json(const TopologySummary& s) {
    nlohmann::json holes = nlohmann::json::array();
    for (const auto& h : s.hole_scales) {
        nlohmann::json pair;
        pair.push_back(h[0]);
        pair.push_back(h[1] == kInfDeath ? nlohmann::json("inf") : nlohmann::json(h[1]));
        holes.push_back(pair);
    }
    return {{"n_long_clusters", s.n_long_clusters},
            {"n_long_holes", s.n_long_holes},
            {"cluster_gap_scale", s.cluster_gap_scale},
            {"hole_scales", holes},
            {"recommendation", validity_model_name(s.recommendation)}};
}

std::vector<Interval> cloud_box(const PointCloud& cloud) {
    std::vector<Interval> box;
    for (const auto& [lo, hi] : cloud.bounds()) box.push_back({lo, hi});
    return box;
}

std::vector<double> peaks_targets(const PointCloud& cloud) {
    if (cloud.dim() != 2)
        throw config_error("trained-surrogate objective needs 2D data (targets come "
                           "from the analytic surface)");
    std::vector<double> y(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        y[i] = peaks(cloud.coord(i, 0), cloud.coord(i, 1));
    return y;
}

// TDA over the (possibly subsampled) cloud
struct TopologyStage {
    PersistenceDiagram diagram;
    TopologySummary summary;
};

TopologyStage analyze_topology(const PointCloud& cloud, double max_eps,
                               std::size_t subsample_cap, double threshold,
                               std::uint64_t seed) {
    PointCloud analysis = cloud;
    if (subsample_cap >= 1 && cloud.size() > subsample_cap)
        analysis = maxmin_subsample(cloud, subsample_cap, seed).cloud;
    const double eps = max_eps > 0.0 ? max_eps : enclosing_box_diagonal(analysis);
    const auto filtration = build_rips(analysis, eps);
    TopologyStage out;
    out.diagram = compute_persistence(filtration);
    out.summary = summarize(out.diagram, threshold);
    return out;
}

OneClassSvmModel fit_svm(const PointCloud& cloud, const RunConfig& cfg) {
    double gamma = cfg.gamma;
    if (gamma <= 0.0) {
        const auto schedule =
            cfg.gamma_schedule.empty() ? default_gamma_schedule() : cfg.gamma_schedule;
        gamma = select_gamma(cloud, cfg.nu, schedule).gamma;
    }
    return train(cloud, cfg.nu, KernelSpec{gamma});
}

}  // namespace

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }

    RunConfig cfg;
    if (j.contains("shape")) {
        DatasetSpec spec;
        spec.shape = parse_shape(j.at("shape").get<std::string>());
        spec.n_points = j.value("n_points", std::size_t{600});
        spec.noise_sigma = j.value("noise_sigma", 0.1);
        spec.seed = j.value("seed", std::uint64_t{7});
        cfg.generator = spec;
    }
    cfg.points_csv = j.value("points_csv", std::string{});
    cfg.max_eps = j.value("max_eps", 0.0);
    cfg.tda_subsample_cap = j.value("tda_subsample_cap", std::size_t{512});
    cfg.significance_threshold = j.value("significance_threshold", 3.0);
    const std::string model = j.value("model", std::string("auto"));
    if (model == "auto") cfg.model_choice = ModelChoice::Auto;
    else if (model == "hull") cfg.model_choice = ModelChoice::Hull;
    else if (model == "svm") cfg.model_choice = ModelChoice::Svm;
    else throw config_error("config: model must be auto|hull|svm");
    cfg.nu = j.value("nu", 0.03);
    cfg.gamma = j.value("gamma", 0.0);
    if (j.contains("gamma_schedule"))
        cfg.gamma_schedule = j.at("gamma_schedule").get<std::vector<double>>();
    const std::string obj = j.value("objective", std::string("ann"));
    if (obj == "ann") cfg.objective = ObjectiveKind::TrainedAnn;
    else if (obj == "peaks") cfg.objective = ObjectiveKind::AnalyticPeaks;
    else throw config_error("config: objective must be ann|peaks");
    if (j.contains("ann_hidden"))
        cfg.ann_hidden = j.at("ann_hidden").get<std::vector<std::size_t>>();
    cfg.ann_train.max_epochs = j.value("ann_epochs", std::size_t{4000});
    cfg.ann_train.batch_size = j.value("batch_size", std::size_t{128});
    cfg.ann_train.learning_rate = j.value("learning_rate", 1e-3);
    cfg.solver_mode = j.value("mode", std::string("rs"));
    if (cfg.solver_mode != "rs" && cfg.solver_mode != "fs")
        throw config_error("config: mode must be rs|fs");
    cfg.solve.abs_tol = j.value("abs_tol", 1e-3);
    cfg.solve.rel_tol = j.value("rel_tol", 1e-3);
    cfg.solve.time_limit_s = j.value("time_limit", 1000.0);
    cfg.solve.feas_tol = j.value("feas_tol", 1e-6);
    cfg.out_dir = j.value("out_dir", std::string("runs/run"));
    cfg.seed = j.value("seed", std::uint64_t{7});
    cfg.ann_train.seed = cfg.seed;
    cfg.solve.seed = cfg.seed;
    return cfg;
}

PipelineResult run_pipeline(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    const auto art = [&](const std::string& name) {
        return (fs::path(config.out_dir) / name).string();
    };

    PipelineResult result;
    result.out_dir = config.out_dir;

    const PointCloud cloud = stage("dataset", [&] { return load_points(config); });

    // --- step 1: topology
    const auto topo = stage("topology", [&] {
        auto t = analyze_topology(cloud, config.max_eps, config.tda_subsample_cap,
                                  config.significance_threshold, config.seed);
        write_diagram_csv(art("diagram.csv"), t.diagram);
        write_diagram_svg(art("diagram.svg"), t.diagram);
        std::ofstream(art("summary.json")) << summary_json(t.summary).dump(2) << "\n";
        return t;
    });
    result.diagram = topo.diagram;
    result.summary = topo.summary;

    // --- step 2: validity-domain model
    result.model_used = config.model_choice == ModelChoice::Auto
                            ? topo.summary.recommendation
                            : (config.model_choice == ModelChoice::Hull
                                   ? ValidityModelKind::ConvexHull
                                   : ValidityModelKind::OneClassSvm);
    stage("validity-model", [&] {
        if (result.model_used == ValidityModelKind::ConvexHull) {
            result.facets = facets_from_cloud(cloud);
            export_facets(art("facets.csv"), *result.facets);
        } else {
            result.svm = fit_svm(cloud, config);
            save_model(art("model.json"), *result.svm);
        }
        return 0;
    });

    if (cloud.dim() == 2)
        stage("boundary-plot", [&] {
            write_boundary_svg(art("boundary.svg"), cloud,
                               result.facets ? &*result.facets : nullptr,
                               result.svm ? &*result.svm : nullptr);
            return 0;
        });

    // --- step 3: global optimization
    stage("optimize", [&] {
        Problem problem;
        problem.box = cloud_box(cloud);
        if (config.objective == ObjectiveKind::AnalyticPeaks) {
            if (cloud.dim() != 2) throw config_error("peaks objective needs 2D data");
            problem.objective = make_peaks_tape();
        } else {
            TrainConfig tc = config.ann_train;
            tc.seed = config.seed;
            MlpTrainReport rep;
            result.ann = train_mlp(cloud, peaks_targets(cloud), config.ann_hidden, tc, &rep);
            save_mlp(art("ann.json"), *result.ann);
            {
                std::ofstream log(art("ann_train.csv"));
                log << "epoch,mse\n";
                for (std::size_t e = 0; e < rep.epoch_loss.size(); ++e)
                    log << e << "," << rep.epoch_loss[e] << "\n";
            }
            problem.objective =
                make_mlp_tape(*result.ann, cloud.dim(), identity_bindings(cloud.dim()));
        }
        if (result.facets) problem.facets = result.facets;
        if (result.svm)
            problem.svm = make_svm_constraint(*result.svm, cloud.dim(),
                                              identity_bindings(cloud.dim()));

        SolveOptions opts = config.solve;
        opts.seed = config.seed;
        result.report = config.solver_mode == "fs" ? solve_full_space(problem, opts)
                                                   : solve_reduced_space(problem, opts);
        save_report(art("solve.json"), result.report);
        return 0;
    });

    if (cloud.dim() == 2 && !result.report.x_star.empty())
        stage("boundary-plot", [&] {
            write_boundary_svg(art("boundary.svg"), cloud,
                               result.facets ? &*result.facets : nullptr,
                               result.svm ? &*result.svm : nullptr, &result.report.x_star);
            return 0;
        });

    // --- summary table
    stage("report", [&] {
        if (!result.report.x_star.empty() && cloud.dim() == 2) {
            const auto& xs = result.report.x_star;
            result.delta_vs_peaks = std::abs(result.report.f_star - peaks(xs[0], xs[1]));
        }
        std::ofstream out(art("table.txt"));
        char buf[256];
        out << "validity-domain optimization run\n";
        out << "--------------------------------\n";
        if (config.generator)
            out << "dataset          " << shape_name(config.generator->shape) << " (n="
                << config.generator->n_points << ", seed=" << config.generator->seed << ")\n";
        else
            out << "dataset          " << config.points_csv << "\n";
        out << "clusters/holes   " << result.summary.n_long_clusters << " / "
            << result.summary.n_long_holes << "\n";
        out << "recommendation   " << validity_model_name(result.summary.recommendation)
            << "\n";
        out << "model used       " << validity_model_name(result.model_used) << "\n";
        out << "solver mode      " << result.report.mode << "\n";
        out << "status           " << status_name(result.report.status) << "\n";
        if (!result.report.x_star.empty()) {
            std::string xs;
            for (double v : result.report.x_star) {
                std::snprintf(buf, sizeof buf, "%s%.6g", xs.empty() ? "" : ", ", v);
                xs += buf;
            }
            std::snprintf(buf, sizeof buf, "x*               (%s)\n", xs.c_str());
            out << buf;
            std::snprintf(buf, sizeof buf, "f*               %.8g\n", result.report.f_star);
            out << buf;
            std::snprintf(buf, sizeof buf, "gap              %.3g abs / %.3g rel\n",
                          result.report.gap_abs, result.report.gap_rel);
            out << buf;
            if (cloud.dim() == 2) {
                std::snprintf(buf, sizeof buf, "delta vs peaks   %.6g\n",
                              result.delta_vs_peaks);
                out << buf;
            }
        }
        out << "nodes            " << result.report.nodes_processed << "\n";
        std::snprintf(buf, sizeof buf, "cpu seconds      %.3f\n", result.report.cpu_seconds);
        out << buf;
        return 0;
    });

    return result;
}

SuiteResult run_case_study_suite(const SuiteOptions& opts) {
    fs::create_directories(opts.out_dir);
    SuiteResult out;

    for (Shape shape : all_shapes()) {
        DatasetSpec spec;
        spec.shape = shape;
        spec.n_points = opts.n_points;
        spec.seed = opts.seed;
        const auto cloud = generate_dataset(spec);

        TrainConfig tc;
        tc.max_epochs = opts.ann_epochs;
        tc.seed = opts.seed;
        const auto ann = train_mlp(cloud, peaks_targets(cloud), {6, 8}, tc);

        const auto facets = facets_from_cloud(cloud);
        const auto sel = select_gamma(cloud, opts.nu, default_gamma_schedule());
        const auto svm = train(cloud, opts.nu, KernelSpec{sel.gamma});

        const auto box = cloud_box(cloud);
        for (const std::string constraint : {"hull", "svm"}) {
            for (const std::string mode : {"rs", "fs"}) {
                if (mode == "fs" && !opts.include_fs) continue;
                Problem p;
                p.box = box;
                p.objective = make_mlp_tape(ann, 2, identity_bindings(2));
                if (constraint == "hull")
                    p.facets = facets;
                else
                    p.svm = make_svm_constraint(svm, 2, identity_bindings(2));

                SolveOptions so;
                so.seed = opts.seed;
                so.time_limit_s = opts.time_limit_s;
                SuiteCell cell;
                cell.shape = shape;
                cell.constraint = constraint;
                cell.mode = mode;
                cell.sv_count = svm.sv_count();
                cell.report = mode == "fs" ? solve_full_space(p, so)
                                           : solve_reduced_space(p, so);
                if (!cell.report.x_star.empty()) {
                    const auto& xs = cell.report.x_star;
                    cell.delta_vs_peaks = std::abs(cell.report.f_star - peaks(xs[0], xs[1]));
                }
                out.cells.push_back(std::move(cell));
            }
        }
    }

    // CSV and aligned text renderings
    out.csv_path = (fs::path(opts.out_dir) / "suite.csv").string();
    {
        std::ofstream csv(out.csv_path);
        csv << "shape,constraint,mode,status,x1,x2,f_star,delta,nodes,cpu_seconds,sv_count\n";
        char buf[256];
        for (const auto& c : out.cells) {
            const bool has_x = !c.report.x_star.empty();
            std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%.6g,%.6g,%.8g,%.6g,%zu,%.3f,%zu\n",
                          shape_name(c.shape).c_str(), c.constraint.c_str(), c.mode.c_str(),
                          status_name(c.report.status).c_str(),
                          has_x ? c.report.x_star[0] : 0.0, has_x ? c.report.x_star[1] : 0.0,
                          has_x ? c.report.f_star : 0.0, c.delta_vs_peaks,
                          c.report.nodes_processed, c.report.cpu_seconds, c.sv_count);
            csv << buf;
        }
    }
    out.table_path = (fs::path(opts.out_dir) / "suite.txt").string();
    {
        std::ofstream txt(out.table_path);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-16s %-5s %-3s %-10s %-22s %-12s %-10s %8s %9s\n",
                      "case", "const", "mod", "status", "x*", "f*", "delta", "nodes", "cpu_s");
        txt << buf;
        for (const auto& c : out.cells) {
            char xbuf[64] = "-";
            if (!c.report.x_star.empty())
                std::snprintf(xbuf, sizeof xbuf, "(%.3f, %.3f)", c.report.x_star[0],
                              c.report.x_star[1]);
            std::snprintf(buf, sizeof buf, "%-16s %-5s %-3s %-10s %-22s %-12.6g %-10.4g %8zu %9.3f\n",
                          shape_name(c.shape).c_str(), c.constraint.c_str(), c.mode.c_str(),
                          status_name(c.report.status).c_str(), xbuf,
                          c.report.x_star.empty() ? 0.0 : c.report.f_star, c.delta_vs_peaks,
                          c.report.nodes_processed, c.report.cpu_seconds);
            txt << buf;
        }
    }
    return out;
}

SruResult run_sru(const SruOptions& opts) {
    fs::create_directories(opts.out_dir);
    const auto art = [&](const std::string& name) {
        return (fs::path(opts.out_dir) / name).string();
    };

    // --- data
    Table table = stage("sru-data", [&] {
        if (opts.csv_path.empty()) {
            SruSeriesSpec spec;
            spec.seed = opts.seed + 4;
            auto t = generate_sru_like_series(spec);
            write_csv(art("sru_synthetic.csv"), t);
            return t;
        }
        if (!fs::exists(opts.csv_path))
            throw data_error("SRU dataset not found at '" + opts.csv_path +
                             "'. Export the plant data from https://www.openml.org/d/23515 "
                             "as CSV with columns x1..x5,y1,y2, or omit --csv to use the "
                             "synthetic stand-in series.");
        return load_timeseries_csv(opts.csv_path, kSruColumns);
    });

    const LagSpec lag_spec = sru_lag_spec();
    const auto X_all = stage("sru-lags", [&] { return build_lag_features(table, lag_spec); });
    const std::size_t max_lag = static_cast<std::size_t>(lag_spec.max_lag());

    const std::size_t n_train =
        static_cast<std::size_t>(opts.train_fraction * static_cast<double>(X_all.size()));
    std::vector<std::size_t> train_rows(n_train);
    for (std::size_t i = 0; i < n_train; ++i) train_rows[i] = i;
    const PointCloud X = X_all.subset(train_rows);

    std::vector<double> y1(n_train), y2(n_train);
    for (std::size_t i = 0; i < n_train; ++i) {
        y1[i] = table.column("y1")[i + max_lag];
        y2[i] = table.column("y2")[i + max_lag];
    }

    SruResult result;
    result.out_dir = opts.out_dir;

    // --- topology of the 20-D input cloud
    stage("sru-topology", [&] {
        const auto sub = maxmin_subsample(X, std::min(opts.tda_subsample_cap, X.size()),
                                          opts.seed);
        const auto filtration = build_rips(sub.cloud, enclosing_box_diagonal(sub.cloud));
        const auto diagram = compute_persistence(filtration);
        result.topology = summarize(diagram);
        write_diagram_csv(art("diagram.csv"), diagram);
        write_diagram_svg(art("diagram.svg"), diagram);
        std::ofstream(art("summary.json")) << summary_json(result.topology).dump(2) << "\n";
        return 0;
    });

    // --- one-class SVM on the lag features
    const auto svm = stage("sru-svm", [&] {
        auto schedule = opts.gamma_schedule;
        if (schedule.empty()) {
            double g = 50.0;
            for (int k = 0; k < 12; ++k) {
                schedule.push_back(g);
                g *= 0.7;
            }
        }
        PointCloud sel_cloud = X;
        if (X.size() > opts.gamma_select_subsample)
            sel_cloud = maxmin_subsample(X, opts.gamma_select_subsample, opts.seed).cloud;
        const auto sel = select_gamma(sel_cloud, opts.nu, schedule);
        auto model = train(X, opts.nu, KernelSpec{sel.gamma});
        save_model(art("model.json"), model);
        return model;
    });

    // --- concentration surrogates
    TrainConfig tc;
    tc.max_epochs = opts.ann_epochs;
    tc.seed = opts.seed;
    const auto ann_h2s = stage("sru-ann-h2s", [&] {
        auto m = train_mlp(X, y1, {8, 8}, tc);
        save_mlp(art("ann_h2s.json"), m);
        return m;
    });
    const auto ann_so2 = stage("sru-ann-so2", [&] {
        auto m = train_mlp(X, y2, {8}, tc);
        save_mlp(art("ann_so2.json"), m);
        return m;
    });

    // --- the open-loop step at the historic operating point
    stage("sru-optimize", [&] {
        std::vector<InputBinding> bindings;
        for (std::size_t s = 0; s < 5; ++s)
            for (std::size_t l = 0; l < 4; ++l) {
                if (s == 2 && l == 0)
                    bindings.emplace_back(std::size_t{0});  // x3 at lag 0 is free
                else
                    bindings.emplace_back(kSruOperatingPoint[s][l]);
            }

        Problem p;
        p.box = {Interval{0.0, 1.0}};
        p.objective = make_abs_difference_tape(ann_h2s, ann_so2, 2.0, 1, bindings);
        p.svm = make_svm_constraint(svm, 1, bindings);

        SolveOptions so = opts.solve;
        result.report = solve_reduced_space(p, so);
        save_report(art("solve.json"), result.report);
        if (result.report.x_star.empty())
            throw numeric_error("SRU control step found no feasible secondary air flow");
        result.x3_star = result.report.x_star[0];
        result.objective = result.report.f_star;

        std::ofstream out(art("control.txt"));
        char buf[128];
        std::snprintf(buf, sizeof buf, "x3_k            %.6f\n", result.x3_star);
        out << buf;
        std::snprintf(buf, sizeof buf, "|c_H2S - 2 c_SO2|  %.3e\n", result.objective);
        out << buf;
        out << "status          " << status_name(result.report.status) << "\n";
        return 0;
    });

    return result;
}

}  // namespace vdo
