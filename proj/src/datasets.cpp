#include "vdo/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Pinned shape geometry.
constexpr std::array<double, 4> kBoxBounds = {-2.0, 4.0, -2.0, 4.0};
constexpr std::array<double, 2> kOvalCenter = {1.0, 1.0};
constexpr std::array<double, 2> kOvalSemi = {2.8, 1.6};
constexpr std::array<double, 2> kBox2Center = {1.0, 1.0};
constexpr std::array<double, 2> kBox2Half = {2.8, 1.0};
constexpr double kBox2AngleDeg = 30.0;
constexpr std::array<double, 2> kBananaCenter = {0.0, 1.8};
constexpr double kBananaRadius = 3.2;
constexpr double kBananaThetaLoDeg = 200.0;
constexpr double kBananaThetaHiDeg = 340.0;
constexpr double kBananaJitter = 0.5;
constexpr std::array<double, 2> kCircleACenter = {-1.3, -1.0};
constexpr std::array<double, 2> kCircleBCenter = {1.7, 3.0};
constexpr double kCircleRadius = 0.8;
constexpr std::array<double, 2> kOvalACenter = {-1.3, 0.5};
constexpr std::array<double, 2> kOvalASemi = {0.9, 1.5};
constexpr std::array<double, 2> kOvalBCenter = {2.6, 3.0};
constexpr std::array<double, 2> kOvalBSemi = {0.8, 1.3};
constexpr std::array<double, 2> kHoleCenter = {1.0, 1.0};
constexpr double kHoleRadius = 1.5;
constexpr std::array<double, 2> kAnnulusCenter = {0.2, 1.0};
constexpr double kAnnulusInner = 1.5;
constexpr double kAnnulusOuter = 3.5;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    double normal(double sigma) {
        return std::normal_distribution<double>(0.0, sigma)(gen);
    }
};

std::array<double, 4> box_bounds(const DatasetSpec& spec) {
    return spec.box_bounds.value_or(kBoxBounds);
}

// Gaussian displacement, resampled while any component exceeds 4 sigma so the
// documented bbox-plus-4-sigma envelope holds.
std::array<double, 2> truncated_noise(Rng& rng, double sigma) {
    if (sigma <= 0.0) return {0.0, 0.0};
    for (;;) {
        const double nx = rng.normal(sigma);
        const double ny = rng.normal(sigma);
        if (std::abs(nx) <= 4.0 * sigma && std::abs(ny) <= 4.0 * sigma) return {nx, ny};
    }
}

std::array<double, 2> sample_in_ellipse(Rng& rng, std::array<double, 2> center,
                                        std::array<double, 2> semi) {
    // Uniform by area: uniform in unit disk, then axis scaling.
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(rng.uniform(0.0, 1.0));
    return {center[0] + semi[0] * r * std::cos(theta),
            center[1] + semi[1] * r * std::sin(theta)};
}

std::array<double, 2> rotate(std::array<double, 2> p, double angle_rad) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    return {c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

std::array<std::array<double, 2>, 4> box2_corners() {
    const double a = kBox2AngleDeg * kPi / 180.0;
    std::array<std::array<double, 2>, 4> out;
    const std::array<std::array<double, 2>, 4> local = {{{-kBox2Half[0], -kBox2Half[1]},
                                                         {kBox2Half[0], -kBox2Half[1]},
                                                         {kBox2Half[0], kBox2Half[1]},
                                                         {-kBox2Half[0], kBox2Half[1]}}};
    for (std::size_t i = 0; i < 4; ++i) {
        auto r = rotate(local[i], a);
        out[i] = {kBox2Center[0] + r[0], kBox2Center[1] + r[1]};
    }
    return out;
}

std::array<double, 2> sample_shape_point(const DatasetSpec& spec, std::size_t index,
                                         Rng& rng) {
    switch (spec.shape) {
        case Shape::Box: {
            const auto b = box_bounds(spec);
            if (index < 4) {
                // Corners first, so the support is realized for any n >= 4.
                const bool hi_x = index == 1 || index == 2;
                const bool hi_y = index >= 2;
                return {hi_x ? b[1] : b[0], hi_y ? b[3] : b[2]};
            }
            return {rng.uniform(b[0], b[1]), rng.uniform(b[2], b[3])};
        }
        case Shape::Oval:
            return sample_in_ellipse(rng, kOvalCenter, kOvalSemi);
        case Shape::Box2: {
            if (index < 4) return box2_corners()[index];
            const double a = kBox2AngleDeg * kPi / 180.0;
            const std::array<double, 2> local = {rng.uniform(-kBox2Half[0], kBox2Half[0]),
                                                 rng.uniform(-kBox2Half[1], kBox2Half[1])};
            const auto r = rotate(local, a);
            return {kBox2Center[0] + r[0], kBox2Center[1] + r[1]};
        }
        case Shape::Banana: {
            const double theta =
                rng.uniform(kBananaThetaLoDeg * kPi / 180.0, kBananaThetaHiDeg * kPi / 180.0);
            const double r = kBananaRadius + rng.uniform(-kBananaJitter, kBananaJitter);
            return {kBananaCenter[0] + r * std::cos(theta),
                    kBananaCenter[1] + r * std::sin(theta)};
        }
        default:
            throw config_error("sample_shape_point: unsupported shape");
    }
}

bool inside_exclusion(const DatasetSpec& spec, std::array<double, 2> p) {
    const auto hole = exclusion_region(spec);
    if (!hole) return false;
    const double dx = p[0] - hole->cx, dy = p[1] - hole->cy;
    return dx * dx + dy * dy < hole->radius * hole->radius;
}

}  // namespace

Shape parse_shape(const std::string& name) {
    if (name == "box") return Shape::Box;
    if (name == "oval") return Shape::Oval;
    if (name == "box2") return Shape::Box2;
    if (name == "banana") return Shape::Banana;
    if (name == "two_circles") return Shape::TwoCircles;
    if (name == "two_ovals") return Shape::TwoOvals;
    if (name == "box_with_hole") return Shape::BoxWithHole;
    if (name == "circle_with_hole") return Shape::CircleWithHole;
    throw config_error("unknown dataset shape '" + name + "'");
}

std::string shape_name(Shape shape) {
    switch (shape) {
        case Shape::Box: return "box";
        case Shape::Oval: return "oval";
        case Shape::Box2: return "box2";
        case Shape::Banana: return "banana";
        case Shape::TwoCircles: return "two_circles";
        case Shape::TwoOvals: return "two_ovals";
        case Shape::BoxWithHole: return "box_with_hole";
        case Shape::CircleWithHole: return "circle_with_hole";
    }
    throw config_error("invalid shape enum value");
}

const std::vector<Shape>& all_shapes() {
    static const std::vector<Shape> shapes = {
        Shape::Box,       Shape::Oval,     Shape::Box2,        Shape::Banana,
        Shape::TwoCircles, Shape::TwoOvals, Shape::BoxWithHole, Shape::CircleWithHole};
    return shapes;
}

PointCloud generate_dataset(const DatasetSpec& spec) {
    if (spec.n_points == 0) throw config_error("generate_dataset: n_points must be >= 1");
    if (spec.noise_sigma < 0.0)
        throw config_error("generate_dataset: noise_sigma must be nonnegative");

    Rng rng(spec.seed);
    std::vector<double> flat;
    flat.reserve(spec.n_points * 2);

    const std::size_t n = spec.n_points;
    const std::size_t first_cluster = (n + 1) / 2;  // two-cluster shapes: A then B

    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 2> p{};
        int attempts = 0;
        for (;;) {
            switch (spec.shape) {
                case Shape::Box:
                case Shape::Oval:
                case Shape::Box2:
                case Shape::Banana:
                    p = sample_shape_point(spec, i, rng);
                    break;
                case Shape::TwoCircles: {
                    const auto c = i < first_cluster ? kCircleACenter : kCircleBCenter;
                    p = sample_in_ellipse(rng, c, {kCircleRadius, kCircleRadius});
                    break;
                }
                case Shape::TwoOvals: {
                    if (i < first_cluster)
                        p = sample_in_ellipse(rng, kOvalACenter, kOvalASemi);
                    else
                        p = sample_in_ellipse(rng, kOvalBCenter, kOvalBSemi);
                    break;
                }
                case Shape::BoxWithHole: {
                    const auto b = kBoxBounds;
                    if (i < 4) {
                        // corners first, like the other box-family shapes
                        const bool hi_x = i == 1 || i == 2;
                        const bool hi_y = i >= 2;
                        p = {hi_x ? b[1] : b[0], hi_y ? b[3] : b[2]};
                    } else {
                        p = {rng.uniform(b[0], b[1]), rng.uniform(b[2], b[3])};
                    }
                    break;
                }
                case Shape::CircleWithHole: {
                    const double theta = rng.uniform(0.0, 2.0 * kPi);
                    const double r = std::sqrt(rng.uniform(kAnnulusInner * kAnnulusInner,
                                                           kAnnulusOuter * kAnnulusOuter));
                    p = {kAnnulusCenter[0] + r * std::cos(theta),
                         kAnnulusCenter[1] + r * std::sin(theta)};
                    break;
                }
            }
            const auto noise = truncated_noise(rng, spec.noise_sigma);
            p[0] += noise[0];
            p[1] += noise[1];
            if (!inside_exclusion(spec, p)) break;
            if (++attempts > 10000)
                throw numeric_error("generate_dataset: rejection sampling stalled");
        }
        flat.push_back(p[0]);
        flat.push_back(p[1]);
    }
    return PointCloud(2, std::move(flat));
}

std::array<double, 4> nominal_bbox(const DatasetSpec& spec) {
    switch (spec.shape) {
        case Shape::Box:
        case Shape::BoxWithHole:
            return box_bounds(spec);
        case Shape::Oval:
            return {kOvalCenter[0] - kOvalSemi[0], kOvalCenter[0] + kOvalSemi[0],
                    kOvalCenter[1] - kOvalSemi[1], kOvalCenter[1] + kOvalSemi[1]};
        case Shape::Box2: {
            double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
            for (const auto& c : box2_corners()) {
                xlo = std::min(xlo, c[0]);
                xhi = std::max(xhi, c[0]);
                ylo = std::min(ylo, c[1]);
                yhi = std::max(yhi, c[1]);
            }
            return {xlo, xhi, ylo, yhi};
        }
        case Shape::Banana: {
            const double rmax = kBananaRadius + kBananaJitter;
            const double rmin = kBananaRadius - kBananaJitter;
            const double t0 = kBananaThetaLoDeg * kPi / 180.0;
            const double t1 = kBananaThetaHiDeg * kPi / 180.0;
            // Sweep contains 270 deg, so y minimum is at the bottom of the arc;
            // x extremes are at the sweep end angles with maximal radius.
            const double xmax = rmax * std::max(std::abs(std::cos(t0)), std::abs(std::cos(t1)));
            const double ymax = kBananaCenter[1] + rmin * std::max(std::sin(t0), std::sin(t1));
            return {kBananaCenter[0] - xmax, kBananaCenter[0] + xmax,
                    kBananaCenter[1] - rmax, ymax};
        }
        case Shape::TwoCircles: {
            const double r = kCircleRadius;
            return {std::min(kCircleACenter[0], kCircleBCenter[0]) - r,
                    std::max(kCircleACenter[0], kCircleBCenter[0]) + r,
                    std::min(kCircleACenter[1], kCircleBCenter[1]) - r,
                    std::max(kCircleACenter[1], kCircleBCenter[1]) + r};
        }
        case Shape::TwoOvals:
            return {std::min(kOvalACenter[0] - kOvalASemi[0], kOvalBCenter[0] - kOvalBSemi[0]),
                    std::max(kOvalACenter[0] + kOvalASemi[0], kOvalBCenter[0] + kOvalBSemi[0]),
                    std::min(kOvalACenter[1] - kOvalASemi[1], kOvalBCenter[1] - kOvalBSemi[1]),
                    std::max(kOvalACenter[1] + kOvalASemi[1], kOvalBCenter[1] + kOvalBSemi[1])};
        case Shape::CircleWithHole:
            return {kAnnulusCenter[0] - kAnnulusOuter, kAnnulusCenter[0] + kAnnulusOuter,
                    kAnnulusCenter[1] - kAnnulusOuter, kAnnulusCenter[1] + kAnnulusOuter};
    }
    throw config_error("invalid shape enum value");
}

std::optional<Disk> exclusion_region(const DatasetSpec& spec) {
    if (spec.shape == Shape::BoxWithHole)
        return Disk{kHoleCenter[0], kHoleCenter[1], kHoleRadius};
    if (spec.shape == Shape::CircleWithHole)
        return Disk{kAnnulusCenter[0], kAnnulusCenter[1], kAnnulusInner};
    return std::nullopt;
}

std::vector<std::array<double, 2>> cluster_centers(const DatasetSpec& spec) {
    if (spec.shape == Shape::TwoCircles) return {kCircleACenter, kCircleBCenter};
    if (spec.shape == Shape::TwoOvals) return {kOvalACenter, kOvalBCenter};
    return {};
}

int LagSpec::max_lag() const {
    return lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
}

void LagSpec::validate() const {
    if (base_signals.empty()) throw config_error("LagSpec: no base signals");
    if (lags.empty()) throw config_error("LagSpec: no lags");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 0) throw config_error("LagSpec: lags must be nonnegative");
        if (i > 0 && lags[i] <= lags[i - 1])
            throw config_error("LagSpec: lags must be strictly increasing");
    }
}

PointCloud build_lag_features(const Table& table, const LagSpec& spec) {
    spec.validate();
    const int max_lag = spec.max_lag();
    const std::size_t rows = table.rows();
    if (rows <= static_cast<std::size_t>(max_lag))
        throw data_error("build_lag_features: table has " + std::to_string(rows) +
                         " rows, need more than max lag " + std::to_string(max_lag));

    std::vector<const std::vector<double>*> cols;
    cols.reserve(spec.base_signals.size());
    for (const auto& name : spec.base_signals) cols.push_back(&table.column(name));

    const std::size_t dim = spec.feature_dim();
    std::vector<double> flat;
    flat.reserve((rows - max_lag) * dim);
    for (std::size_t k = static_cast<std::size_t>(max_lag); k < rows; ++k)
        for (const auto* col : cols)
            for (int lag : spec.lags) flat.push_back((*col)[k - static_cast<std::size_t>(lag)]);
    return PointCloud(dim, std::move(flat));
}

}  // namespace vdo
