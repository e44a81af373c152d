#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vdo/ann.hpp"
#include "vdo/datasets.hpp"
#include "vdo/hull.hpp"
#include "vdo/ocsvm.hpp"
#include "vdo/solver.hpp"
#include "vdo/tda.hpp"

namespace vdo {

enum class ModelChoice { Auto, Hull, Svm };
enum class ObjectiveKind { TrainedAnn, AnalyticPeaks };

struct RunConfig {
    // data source: a generator spec, or a CSV of points
    std::optional<DatasetSpec> generator;
    std::string points_csv;

    // topology stage
    double max_eps = 0.0;  // 0 -> enclosing box diagonal
    std::size_t tda_subsample_cap = 512;
    double significance_threshold = 3.0;

    // validity model stage
    ModelChoice model_choice = ModelChoice::Auto;
    double nu = 0.03;
    double gamma = 0.0;  // 0 -> pick from the schedule
    std::vector<double> gamma_schedule;  // empty -> default schedule

    // surrogate objective
    ObjectiveKind objective = ObjectiveKind::TrainedAnn;
    std::vector<std::size_t> ann_hidden = {6, 8};
    TrainConfig ann_train;

    // optimization stage
    std::string solver_mode = "rs";  // "rs" or "fs"
    SolveOptions solve;

    std::string out_dir = "runs/run";
    std::uint64_t seed = 7;
};

RunConfig config_from_json_file(const std::string& path);

struct PipelineResult {
    PersistenceDiagram diagram;
    TopologySummary summary;
    ValidityModelKind model_used = ValidityModelKind::ConvexHull;
    std::optional<FacetSystem> facets;
    std::optional<OneClassSvmModel> svm;
    std::optional<MlpModel> ann;
    SolveReport report;
    double delta_vs_peaks = 0.0;  // |f_surrogate(x*) - peaks(x*)| for 2D runs
    std::string out_dir;
};

// The three-stage run: topology analysis, validity-domain model, global
// optimization. Emits diagram.csv/diagram.svg, summary.json, facets.csv or
// model.json, boundary.svg (2D), solve.json and table.txt under out_dir.
PipelineResult run_pipeline(const RunConfig& config);

struct SuiteOptions {
    std::uint64_t seed = 7;
    std::size_t n_points = 600;
    double nu = 0.03;
    double time_limit_s = 1000.0;
    bool include_fs = true;
    std::size_t ann_epochs = 4000;
    std::string out_dir = "runs/suite";
};

struct SuiteCell {
    Shape shape;
    std::string constraint;  // "hull" or "svm"
    std::string mode;        // "rs" or "fs"
    SolveReport report;
    double delta_vs_peaks = 0.0;
    std::size_t sv_count = 0;
};

struct SuiteResult {
    std::vector<SuiteCell> cells;
    std::string table_path;
    std::string csv_path;
};

// All eight case studies x {hull, svm} x {rs, fs}: solution, objective,
// surrogate error against the analytic surface, node and time comparisons.
SuiteResult run_case_study_suite(const SuiteOptions& opts);

struct SruOptions {
    std::string csv_path;  // empty -> deterministic synthetic stand-in
    std::uint64_t seed = 7;
    double nu = 0.03;
    std::vector<double> gamma_schedule;  // empty -> SRU default (wider range)
    std::size_t gamma_select_subsample = 2000;
    std::size_t tda_subsample_cap = 512;
    double train_fraction = 0.9;
    std::size_t ann_epochs = 500;
    SolveOptions solve;
    std::string out_dir = "runs/sru";
};

struct SruResult {
    double x3_star = 0.0;
    double objective = 0.0;  // |c_H2S - 2 c_SO2| at the optimum
    SolveReport report;
    TopologySummary topology;
    std::string out_dir;
};

// Open-loop control step of the sulfur recovery unit: lag features, topology
// check, 20-D one-class SVM, two concentration ANNs, and the 1-D decision on
// the secondary air flow at the historic operating point.
SruResult run_sru(const SruOptions& opts);

}  // namespace vdo
