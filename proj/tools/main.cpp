// Command-line front end for the validity-domain optimization pipeline.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vdo/ann.hpp"
#include "vdo/csv.hpp"
#include "vdo/datasets.hpp"
#include "vdo/errors.hpp"
#include "vdo/expr.hpp"
#include "vdo/hull.hpp"
#include "vdo/ocsvm.hpp"
#include "vdo/pipeline.hpp"
#include "vdo/solver.hpp"
#include "vdo/sru.hpp"
#include "vdo/svg.hpp"
#include "vdo/tda.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitTimeLimit = 4;

vdo::PointCloud load_or_generate(const std::string& points_csv, const std::string& shape,
                                 std::size_t n, double noise, std::uint64_t seed) {
    if (!points_csv.empty()) {
        const auto t = vdo::load_timeseries_csv(points_csv);
        std::vector<double> flat;
        for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < t.values.size(); ++c)
                flat.push_back(t.values[c][r]);
        return vdo::PointCloud(t.values.size(), std::move(flat));
    }
    if (shape.empty()) throw vdo::config_error("either --points or --shape is required");
    vdo::DatasetSpec spec;
    spec.shape = vdo::parse_shape(shape);
    spec.n_points = n;
    spec.noise_sigma = noise;
    spec.seed = seed;
    return vdo::generate_dataset(spec);
}

void write_points_csv(const std::string& path, const vdo::PointCloud& cloud) {
    vdo::Table t;
    for (std::size_t d = 0; d < cloud.dim(); ++d) {
        t.columns.push_back("x" + std::to_string(d + 1));
        t.values.emplace_back();
        for (std::size_t i = 0; i < cloud.size(); ++i)
            t.values.back().push_back(cloud.coord(i, d));
    }
    vdo::write_csv(path, t);
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate optimization inside learned validity domains"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Generate one of the benchmark datasets");
    std::string g_shape = "box", g_out = "points.csv";
    std::size_t g_n = 600;
    double g_noise = 0.1;
    std::uint64_t g_seed = 7;
    gen->add_option("--shape", g_shape,
                    "box|oval|box2|banana|two_circles|two_ovals|box_with_hole|circle_with_hole");
    gen->add_option("--n", g_n, "number of points");
    gen->add_option("--noise", g_noise, "noise sigma");
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--out", g_out, "output CSV");

    auto* ana = app.add_subcommand("analyze", "Persistent homology and model recommendation");
    std::string a_points, a_shape, a_out = "runs/analyze";
    std::size_t a_n = 600, a_sub = 512;
    double a_noise = 0.1, a_eps = 0.0, a_thr = 3.0;
    std::uint64_t a_seed = 7;
    ana->add_option("--points", a_points, "points CSV (numeric columns)");
    ana->add_option("--shape", a_shape, "generator shape instead of --points");
    ana->add_option("--n", a_n);
    ana->add_option("--noise", a_noise);
    ana->add_option("--seed", a_seed);
    ana->add_option("--max-eps", a_eps, "filtration scale cap (0 = box diagonal)");
    ana->add_option("--subsample", a_sub, "maxmin subsample cap before the filtration");
    ana->add_option("--threshold", a_thr, "persistence significance threshold");
    ana->add_option("--out-dir", a_out);

    auto* hul = app.add_subcommand("hull", "Convex hull facets of a point cloud");
    std::string h_points, h_shape, h_out = "facets.csv";
    std::size_t h_n = 600;
    double h_noise = 0.1;
    std::uint64_t h_seed = 7;
    hul->add_option("--points", h_points);
    hul->add_option("--shape", h_shape);
    hul->add_option("--n", h_n);
    hul->add_option("--noise", h_noise);
    hul->add_option("--seed", h_seed);
    hul->add_option("--out", h_out);

    auto* tsv = app.add_subcommand("train-svm", "Train the one-class SVM validity model");
    std::string s_points, s_shape, s_out = "model.json", s_schedule;
    std::size_t s_n = 600;
    double s_noise = 0.1, s_nu = 0.03, s_gamma = 0.0;
    std::uint64_t s_seed = 7;
    tsv->add_option("--points", s_points);
    tsv->add_option("--shape", s_shape);
    tsv->add_option("--n", s_n);
    tsv->add_option("--noise", s_noise);
    tsv->add_option("--seed", s_seed);
    tsv->add_option("--nu", s_nu, "outlier fraction bound");
    tsv->add_option("--gamma", s_gamma, "kernel width (0 = pick from schedule)");
    tsv->add_option("--schedule", s_schedule, "comma-separated decreasing gammas");
    tsv->add_option("--out", s_out);

    auto* tan = app.add_subcommand("train-ann",
                                   "Train the surrogate network on the surface samples");
    std::string n_points, n_shape, n_out = "ann.json", n_hidden = "6,8";
    std::size_t n_n = 600, n_epochs = 4000, n_batch = 128;
    double n_noise = 0.1, n_lr = 1e-2;
    std::uint64_t n_seed = 7;
    tan->add_option("--points", n_points);
    tan->add_option("--shape", n_shape);
    tan->add_option("--n", n_n);
    tan->add_option("--noise", n_noise);
    tan->add_option("--seed", n_seed);
    tan->add_option("--hidden", n_hidden, "comma-separated hidden layer widths");
    tan->add_option("--epochs", n_epochs);
    tan->add_option("--batch", n_batch);
    tan->add_option("--lr", n_lr);
    tan->add_option("--out", n_out);

    auto* opt = app.add_subcommand(
        "optimize", "Run the full pipeline: topology, validity model, global solve");
    std::string o_config, o_shape, o_points, o_model = "auto", o_mode = "rs",
                o_objective = "ann", o_out = "runs/run";
    std::size_t o_n = 600;
    double o_noise = 0.1, o_nu = 0.03, o_gamma = 0.0, o_abs = 1e-3, o_rel = 1e-3,
           o_time = 1000.0;
    std::uint64_t o_seed = 7;
    opt->add_option("--config", o_config, "JSON config; flags override its values");
    opt->add_option("--shape", o_shape);
    opt->add_option("--points", o_points);
    opt->add_option("--n", o_n);
    opt->add_option("--noise", o_noise);
    opt->add_option("--model", o_model, "auto|hull|svm");
    opt->add_option("--objective", o_objective, "ann|peaks");
    opt->add_option("--mode", o_mode, "rs|fs");
    opt->add_option("--nu", o_nu);
    opt->add_option("--gamma", o_gamma);
    opt->add_option("--abs-tol", o_abs);
    opt->add_option("--rel-tol", o_rel);
    opt->add_option("--time-limit", o_time);
    opt->add_option("--seed", o_seed);
    opt->add_option("--out-dir", o_out);
    bool o_trace = false;
    opt->add_flag("--trace", o_trace, "write a per-node search trace CSV");

    auto* sui = app.add_subcommand("suite", "All case studies x {hull,svm} x {rs,fs}");
    std::string u_out = "runs/suite";
    std::size_t u_n = 600, u_epochs = 4000;
    double u_time = 1000.0, u_nu = 0.03;
    std::uint64_t u_seed = 7;
    bool u_no_fs = false;
    sui->add_option("--seed", u_seed);
    sui->add_option("--n", u_n);
    sui->add_option("--nu", u_nu);
    sui->add_option("--epochs", u_epochs);
    sui->add_option("--time-limit", u_time);
    sui->add_flag("--no-fs", u_no_fs, "skip the full-space runs");
    sui->add_option("--out-dir", u_out);

    auto* sru = app.add_subcommand("sru",
                                   "Open-loop control step of the sulfur recovery unit");
    std::string r_csv, r_out = "runs/sru";
    std::size_t r_epochs = 500;
    double r_nu = 0.03, r_time = 600.0;
    std::uint64_t r_seed = 7;
    sru->add_option("--csv", r_csv,
                    "plant data CSV (x1..x5,y1,y2); omit for the synthetic stand-in");
    sru->add_option("--seed", r_seed);
    sru->add_option("--nu", r_nu);
    sru->add_option("--epochs", r_epochs);
    sru->add_option("--time-limit", r_time);
    sru->add_option("--out-dir", r_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            vdo::DatasetSpec spec;
            spec.shape = vdo::parse_shape(g_shape);
            spec.n_points = g_n;
            spec.noise_sigma = g_noise;
            spec.seed = g_seed;
            write_points_csv(g_out, vdo::generate_dataset(spec));
            std::printf("wrote %zu points to %s\n", g_n, g_out.c_str());
            return kExitOk;
        }

        if (ana->parsed()) {
            const auto cloud = load_or_generate(a_points, a_shape, a_n, a_noise, a_seed);
            vdo::PointCloud analysis = cloud;
            if (a_sub >= 1 && cloud.size() > a_sub)
                analysis = vdo::maxmin_subsample(cloud, a_sub, a_seed).cloud;
            const double eps = a_eps > 0.0 ? a_eps : vdo::enclosing_box_diagonal(analysis);
            const auto diagram = vdo::compute_persistence(vdo::build_rips(analysis, eps));
            const auto summary = vdo::summarize(diagram, a_thr);
            std::filesystem::create_directories(a_out);
            vdo::write_diagram_csv(a_out + "/diagram.csv", diagram);
            vdo::write_diagram_svg(a_out + "/diagram.svg", diagram);
            std::printf("clusters=%d holes=%d recommendation=%s\n", summary.n_long_clusters,
                        summary.n_long_holes,
                        vdo::validity_model_name(summary.recommendation).c_str());
            return kExitOk;
        }

        if (hul->parsed()) {
            const auto cloud = load_or_generate(h_points, h_shape, h_n, h_noise, h_seed);
            const auto fs = vdo::facets_from_cloud(cloud);
            vdo::export_facets(h_out, fs);
            std::printf("wrote %zu facets to %s\n", fs.facet_count(), h_out.c_str());
            return kExitOk;
        }

        if (tsv->parsed()) {
            const auto cloud = load_or_generate(s_points, s_shape, s_n, s_noise, s_seed);
            double gamma = s_gamma;
            if (gamma <= 0.0) {
                const auto schedule = s_schedule.empty() ? vdo::default_gamma_schedule()
                                                         : parse_double_list(s_schedule);
                const auto sel = vdo::select_gamma(cloud, s_nu, schedule);
                gamma = sel.gamma;
                std::printf("selected gamma %.4f (%splateau)\n", gamma,
                            sel.plateau_found ? "" : "no ");
            }
            const auto model = vdo::train(cloud, s_nu, vdo::KernelSpec{gamma});
            vdo::save_model(s_out, model);
            const auto nu_rep = vdo::validate_nu_property(model, cloud);
            std::printf("svs=%zu outlier_fraction=%.4f sv_fraction=%.4f nu_property=%s\n",
                        model.sv_count(), nu_rep.outlier_fraction, nu_rep.sv_fraction,
                        nu_rep.pass ? "pass" : "FAIL");
            return kExitOk;
        }

        if (tan->parsed()) {
            const auto cloud = load_or_generate(n_points, n_shape, n_n, n_noise, n_seed);
            if (cloud.dim() != 2)
                throw vdo::config_error(
                    "train-ann fits the 2D benchmark surface; need 2D data");
            std::vector<double> targets(cloud.size());
            for (std::size_t i = 0; i < cloud.size(); ++i)
                targets[i] = vdo::peaks(cloud.coord(i, 0), cloud.coord(i, 1));
            std::vector<std::size_t> hidden;
            for (double v : parse_double_list(n_hidden))
                hidden.push_back(static_cast<std::size_t>(v));
            vdo::TrainConfig tc;
            tc.max_epochs = n_epochs;
            tc.batch_size = n_batch;
            tc.learning_rate = n_lr;
            tc.seed = n_seed;
            vdo::MlpTrainReport rep;
            const auto model = vdo::train_mlp(cloud, targets, hidden, tc, &rep);
            vdo::save_mlp(n_out, model);
            std::printf("final scaled RMSE %.5f, wrote %s\n", std::sqrt(rep.final_mse),
                        n_out.c_str());
            return kExitOk;
        }

        if (opt->parsed()) {
            vdo::RunConfig cfg;
            if (!o_config.empty()) cfg = vdo::config_from_json_file(o_config);
            if (!o_shape.empty()) {
                vdo::DatasetSpec spec;
                spec.shape = vdo::parse_shape(o_shape);
                spec.n_points = o_n;
                spec.noise_sigma = o_noise;
                spec.seed = o_seed;
                cfg.generator = spec;
            }
            if (!o_points.empty()) {
                cfg.points_csv = o_points;
                cfg.generator.reset();
            }
            const bool fresh = o_config.empty();
            auto override_if = [&](const std::string& flag, auto&& apply) {
                if (fresh || opt->count(flag) > 0) apply();
            };
            override_if("--model", [&] {
                cfg.model_choice = o_model == "hull"  ? vdo::ModelChoice::Hull
                                   : o_model == "svm" ? vdo::ModelChoice::Svm
                                                      : vdo::ModelChoice::Auto;
            });
            override_if("--objective", [&] {
                cfg.objective = o_objective == "peaks" ? vdo::ObjectiveKind::AnalyticPeaks
                                                       : vdo::ObjectiveKind::TrainedAnn;
            });
            override_if("--mode", [&] { cfg.solver_mode = o_mode; });
            override_if("--nu", [&] { cfg.nu = o_nu; });
            override_if("--gamma", [&] { cfg.gamma = o_gamma; });
            override_if("--abs-tol", [&] { cfg.solve.abs_tol = o_abs; });
            override_if("--rel-tol", [&] { cfg.solve.rel_tol = o_rel; });
            override_if("--time-limit", [&] { cfg.solve.time_limit_s = o_time; });
            override_if("--seed", [&] {
                cfg.seed = o_seed;
                cfg.solve.seed = o_seed;
                cfg.ann_train.seed = o_seed;
            });
            override_if("--out-dir", [&] { cfg.out_dir = o_out; });
            if (o_trace) cfg.solve.trace_csv = cfg.out_dir + "/trace.csv";
            if (cfg.solver_mode != "rs" && cfg.solver_mode != "fs")
                throw vdo::config_error("mode must be rs|fs");

            const auto result = vdo::run_pipeline(cfg);
            std::printf("model=%s status=%s",
                        vdo::validity_model_name(result.model_used).c_str(),
                        vdo::status_name(result.report.status).c_str());
            if (!result.report.x_star.empty()) {
                std::printf(" f*=%.6g x*=(", result.report.f_star);
                for (std::size_t d = 0; d < result.report.x_star.size(); ++d)
                    std::printf("%s%.4g", d ? ", " : "", result.report.x_star[d]);
                std::printf(")");
            }
            std::printf(" artifacts=%s\n", result.out_dir.c_str());
            return result.report.status == vdo::SolveStatus::TimeLimit ? kExitTimeLimit
                                                                       : kExitOk;
        }

        if (sui->parsed()) {
            vdo::SuiteOptions so;
            so.seed = u_seed;
            so.n_points = u_n;
            so.nu = u_nu;
            so.ann_epochs = u_epochs;
            so.time_limit_s = u_time;
            so.include_fs = !u_no_fs;
            so.out_dir = u_out;
            const auto result = vdo::run_case_study_suite(so);
            std::ifstream table(result.table_path);
            std::cout << table.rdbuf();
            bool any_timeout = false;
            for (const auto& c : result.cells)
                any_timeout |= c.report.status == vdo::SolveStatus::TimeLimit;
            return any_timeout ? kExitTimeLimit : kExitOk;
        }

        if (sru->parsed()) {
            vdo::SruOptions so;
            so.csv_path = r_csv;
            so.seed = r_seed;
            so.nu = r_nu;
            so.ann_epochs = r_epochs;
            so.solve.time_limit_s = r_time;
            so.solve.abs_tol = 1e-4;
            so.out_dir = r_out;
            const auto result = vdo::run_sru(so);
            std::printf("x3=%.6f |c_H2S - 2 c_SO2|=%.3e status=%s artifacts=%s\n",
                        result.x3_star, result.objective,
                        vdo::status_name(result.report.status).c_str(),
                        result.out_dir.c_str());
            return result.report.status == vdo::SolveStatus::TimeLimit ? kExitTimeLimit
                                                                       : kExitOk;
        }
    } catch (const vdo::config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitStage;
    }
    return kExitConfig;
}
