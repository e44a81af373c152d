#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vdo {

// Row-major container for N points in R^D. Immutable after construction
// (mutating access only through rebuild helpers), safe to share across threads.
class PointCloud {
public:
    PointCloud() = default;
    PointCloud(std::size_t dim, std::vector<double> flat_data,
               std::vector<std::string> labels = {});

    static PointCloud from_rows(const std::vector<std::vector<double>>& rows,
                                std::vector<std::string> labels = {});

    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return data_.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    double coord(std::size_t i, std::size_t d) const { return data_[i * dim_ + d]; }

    const std::vector<double>& data() const { return data_; }
    const std::vector<std::string>& labels() const { return labels_; }

    PointCloud subset(const std::vector<std::size_t>& indices) const;

    // Per-dimension [min, max] over all points.
    std::vector<std::pair<double, double>> bounds() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
    std::vector<std::string> labels_;  // optional, empty or one per point
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

enum class ScalerMode {
    MinMaxSigned,  // per-dimension min -> -1, max -> +1
    Standardize,   // per-dimension mean 0, population variance 1
};

// Per-dimension affine map x' = (x - offset) / gain with strictly positive gains.
class Scaler {
public:
    Scaler() = default;
    Scaler(ScalerMode mode, std::vector<double> offsets, std::vector<double> gains);

    static Scaler fit(const PointCloud& data, ScalerMode mode);
    static Scaler identity(std::size_t dim);

    std::size_t dim() const { return offsets_.size(); }
    ScalerMode mode() const { return mode_; }
    const std::vector<double>& offsets() const { return offsets_; }
    const std::vector<double>& gains() const { return gains_; }

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> invert(std::span<const double> x_scaled) const;
    PointCloud apply(const PointCloud& cloud) const;
    PointCloud invert(const PointCloud& cloud) const;

    double apply1(double x, std::size_t d) const { return (x - offsets_[d]) / gains_[d]; }
    double invert1(double x, std::size_t d) const { return x * gains_[d] + offsets_[d]; }

private:
    ScalerMode mode_ = ScalerMode::MinMaxSigned;
    std::vector<double> offsets_;
    std::vector<double> gains_;
};

}  // namespace vdo
