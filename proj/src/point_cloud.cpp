#include "vdo/point_cloud.hpp"

#include <algorithm>
#include <limits>

#include "vdo/errors.hpp"

namespace vdo {

PointCloud::PointCloud(std::size_t dim, std::vector<double> flat_data,
                       std::vector<std::string> labels)
    : dim_(dim), data_(std::move(flat_data)), labels_(std::move(labels)) {
    if (dim_ == 0) throw data_error("PointCloud: dimension must be >= 1");
    if (data_.empty()) throw data_error("PointCloud: need at least one point");
    if (data_.size() % dim_ != 0)
        throw data_error("PointCloud: data length not a multiple of dimension");
    if (!labels_.empty() && labels_.size() != data_.size() / dim_)
        throw data_error("PointCloud: label count does not match point count");
    for (double v : data_)
        if (!std::isfinite(v)) throw data_error("PointCloud: non-finite coordinate");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows,
                                 std::vector<std::string> labels) {
    if (rows.empty()) throw data_error("PointCloud: need at least one point");
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        if (r.size() != dim) throw data_error("PointCloud: ragged rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return PointCloud(dim, std::move(flat), std::move(labels));
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& indices) const {
    std::vector<double> flat;
    flat.reserve(indices.size() * dim_);
    std::vector<std::string> labels;
    for (std::size_t i : indices) {
        auto p = point(i);
        flat.insert(flat.end(), p.begin(), p.end());
        if (!labels_.empty()) labels.push_back(labels_[i]);
    }
    return PointCloud(dim_, std::move(flat), std::move(labels));
}

std::vector<std::pair<double, double>> PointCloud::bounds() const {
    std::vector<std::pair<double, double>> b(
        dim_, {std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()});
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t d = 0; d < dim_; ++d) {
            b[d].first = std::min(b[d].first, coord(i, d));
            b[d].second = std::max(b[d].second, coord(i, d));
        }
    return b;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

Scaler::Scaler(ScalerMode mode, std::vector<double> offsets, std::vector<double> gains)
    : mode_(mode), offsets_(std::move(offsets)), gains_(std::move(gains)) {
    if (offsets_.size() != gains_.size())
        throw data_error("Scaler: offset/gain size mismatch");
    for (double g : gains_)
        if (!(g > 0.0)) throw data_error("Scaler: gains must be strictly positive");
}

Scaler Scaler::fit(const PointCloud& data, ScalerMode mode) {
    if (data.empty()) throw data_error("Scaler: cannot fit on empty data");
    const std::size_t dim = data.dim();
    const std::size_t n = data.size();
    std::vector<double> offsets(dim), gains(dim);
    if (mode == ScalerMode::MinMaxSigned) {
        auto b = data.bounds();
        for (std::size_t d = 0; d < dim; ++d) {
            const double range = b[d].second - b[d].first;
            if (range == 0.0)
                throw data_error("Scaler: dimension " + std::to_string(d) +
                                 " has zero range, min-max scaling is degenerate");
            offsets[d] = 0.5 * (b[d].first + b[d].second);
            gains[d] = 0.5 * range;
        }
    } else {
        for (std::size_t d = 0; d < dim; ++d) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += data.coord(i, d);
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = data.coord(i, d) - mean;
                var += t * t;
            }
            var /= static_cast<double>(n);
            if (var == 0.0)
                throw data_error("Scaler: dimension " + std::to_string(d) +
                                 " has zero variance, standardization is degenerate");
            offsets[d] = mean;
            gains[d] = std::sqrt(var);
        }
    }
    return Scaler(mode, std::move(offsets), std::move(gains));
}

Scaler Scaler::identity(std::size_t dim) {
    return Scaler(ScalerMode::MinMaxSigned, std::vector<double>(dim, 0.0),
                  std::vector<double>(dim, 1.0));
}

std::vector<double> Scaler::apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) out[d] = apply1(x[d], d);
    return out;
}

std::vector<double> Scaler::invert(std::span<const double> x_scaled) const {
    std::vector<double> out(x_scaled.size());
    for (std::size_t d = 0; d < x_scaled.size(); ++d) out[d] = invert1(x_scaled[d], d);
    return out;
}

PointCloud Scaler::apply(const PointCloud& cloud) const {
    std::vector<double> flat(cloud.data());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t d = 0; d < cloud.dim(); ++d)
            flat[i * cloud.dim() + d] = apply1(flat[i * cloud.dim() + d], d);
    return PointCloud(cloud.dim(), std::move(flat), cloud.labels());
}

PointCloud Scaler::invert(const PointCloud& cloud) const {
    std::vector<double> flat(cloud.data());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t d = 0; d < cloud.dim(); ++d)
            flat[i * cloud.dim() + d] = invert1(flat[i * cloud.dim() + d], d);
    return PointCloud(cloud.dim(), std::move(flat), cloud.labels());
}

}  // namespace vdo
