#include "vdo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

constexpr double kSize = 480.0;
constexpr double kMargin = 50.0;

struct Frame {
    double xlo, xhi, ylo, yhi;
    double px(double x) const { return kMargin + (x - xlo) / (xhi - xlo) * (kSize - 2 * kMargin); }
    double py(double y) const {
        return kSize - kMargin - (y - ylo) / (yhi - ylo) * (kSize - 2 * kMargin);
    }
};

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("svg: cannot write '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\""
        << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

void axes(std::ofstream& out, const Frame& f, const std::string& xlabel,
          const std::string& ylabel) {
    out << "<line x1=\"" << f.px(f.xlo) << "\" y1=\"" << f.py(f.ylo) << "\" x2=\""
        << f.px(f.xhi) << "\" y2=\"" << f.py(f.ylo) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << f.px(f.xlo) << "\" y1=\"" << f.py(f.ylo) << "\" x2=\""
        << f.px(f.xlo) << "\" y2=\"" << f.py(f.yhi) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">" << xlabel << "</text>\n";
    out << "<text x=\"14\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
        << "transform=\"rotate(-90 14 " << kSize / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

void write_diagram_svg(const std::string& path, const PersistenceDiagram& diagram) {
    double max_finite = 0.0;
    for (const auto& p : diagram.pairs) {
        max_finite = std::max(max_finite, p.birth);
        if (p.death != kInfDeath) max_finite = std::max(max_finite, p.death);
    }
    if (max_finite <= 0.0) max_finite = 1.0;
    const double inf_line = max_finite * 1.08;
    Frame f{0.0, max_finite * 1.15, 0.0, max_finite * 1.15};

    auto out = open_svg(path);
    axes(out, f, "birth", "death");
    // diagonal and the infinite-death line
    out << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(max_finite)
        << "\" y2=\"" << f.py(max_finite) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(inf_line) << "\" x2=\""
        << f.px(max_finite * 1.15) << "\" y2=\"" << f.py(inf_line)
        << "\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>\n";
    out << "<text x=\"" << f.px(0) + 4 << "\" y=\"" << f.py(inf_line) - 4
        << "\" font-size=\"12\" fill=\"gray\">inf</text>\n";

    for (const auto& p : diagram.pairs) {
        const double y = p.death == kInfDeath ? inf_line : p.death;
        const double cx = f.px(p.birth), cy = f.py(y);
        if (p.dim == 0) {
            out << "<polygon points=\"" << cx << "," << cy - 5 << " " << cx - 4.5 << ","
                << cy + 3.5 << " " << cx + 4.5 << "," << cy + 3.5
                << "\" fill=\"steelblue\" fill-opacity=\"0.8\"/>\n";
        } else {
            out << "<circle cx=\"" << cx << "\" cy=\"" << cy
                << "\" r=\"4\" fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n";
        }
    }
    out << "</svg>\n";
}

void write_boundary_svg(const std::string& path, const PointCloud& cloud,
                        const FacetSystem* hull, const OneClassSvmModel* svm,
                        const std::vector<double>* x_star) {
    if (cloud.dim() != 2) throw data_error("write_boundary_svg: need a 2D cloud");
    auto b = cloud.bounds();
    const double padx = 0.1 * (b[0].second - b[0].first);
    const double pady = 0.1 * (b[1].second - b[1].first);
    Frame f{b[0].first - padx, b[0].second + padx, b[1].first - pady, b[1].second + pady};

    auto out = open_svg(path);
    axes(out, f, "x1", "x2");
    for (std::size_t i = 0; i < cloud.size(); ++i)
        out << "<circle cx=\"" << f.px(cloud.coord(i, 0)) << "\" cy=\""
            << f.py(cloud.coord(i, 1)) << "\" r=\"1.6\" fill=\"black\" fill-opacity=\"0.5\"/>\n";

    if (hull != nullptr && hull->dim == 2) {
        // facet lines drawn as the polygon of consecutive line intersections is
        // not recoverable from rows alone; draw each facet clipped to the frame
        // by sampling its boundary segment
        out << "<g stroke=\"darkorange\" stroke-width=\"2\" fill=\"none\">\n";
        for (std::size_t i = 0; i < hull->facet_count(); ++i) {
            const double a0 = hull->A[i * 2], a1 = hull->A[i * 2 + 1], bb = hull->b[i];
            // param line a.x + b = 0, direction (-a1, a0)
            const double px0 = -bb * a0, py0 = -bb * a1;
            std::vector<std::pair<double, double>> pts;
            for (double t = -50.0; t <= 50.0; t += 0.05) {
                const double x = px0 - t * a1, y = py0 + t * a0;
                if (x >= f.xlo && x <= f.xhi && y >= f.ylo && y <= f.yhi &&
                    hull_margin(*hull, std::array<double, 2>{x, y}) <= 1e-6)
                    pts.push_back({x, y});
            }
            if (pts.size() >= 2)
                out << "<line x1=\"" << f.px(pts.front().first) << "\" y1=\""
                    << f.py(pts.front().second) << "\" x2=\"" << f.px(pts.back().first)
                    << "\" y2=\"" << f.py(pts.back().second) << "\"/>\n";
        }
        out << "</g>\n";
    }

    if (svm != nullptr) {
        // marching squares on decision(x) = 0
        const int n = 160;
        std::vector<double> grid(static_cast<std::size_t>((n + 1) * (n + 1)));
        auto val = [&](int i, int j) { return grid[static_cast<std::size_t>(j * (n + 1) + i)]; };
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                const double x = f.xlo + (f.xhi - f.xlo) * i / n;
                const double y = f.ylo + (f.yhi - f.ylo) * j / n;
                grid[static_cast<std::size_t>(j * (n + 1) + i)] =
                    decision(*svm, std::array<double, 2>{x, y});
            }
        out << "<g stroke=\"seagreen\" stroke-width=\"1.5\">\n";
        auto lerp = [](double a, double b) { return a / (a - b); };
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x0 = f.xlo + (f.xhi - f.xlo) * i / n;
                const double x1 = f.xlo + (f.xhi - f.xlo) * (i + 1) / n;
                const double y0 = f.ylo + (f.yhi - f.ylo) * j / n;
                const double y1 = f.ylo + (f.yhi - f.ylo) * (j + 1) / n;
                const double v00 = val(i, j), v10 = val(i + 1, j);
                const double v01 = val(i, j + 1), v11 = val(i + 1, j + 1);
                std::vector<std::pair<double, double>> cut;
                if ((v00 < 0) != (v10 < 0)) cut.push_back({x0 + lerp(v00, v10) * (x1 - x0), y0});
                if ((v01 < 0) != (v11 < 0)) cut.push_back({x0 + lerp(v01, v11) * (x1 - x0), y1});
                if ((v00 < 0) != (v01 < 0)) cut.push_back({x0, y0 + lerp(v00, v01) * (y1 - y0)});
                if ((v10 < 0) != (v11 < 0)) cut.push_back({x1, y0 + lerp(v10, v11) * (y1 - y0)});
                if (cut.size() >= 2)
                    out << "<line x1=\"" << f.px(cut[0].first) << "\" y1=\"" << f.py(cut[0].second)
                        << "\" x2=\"" << f.px(cut[1].first) << "\" y2=\"" << f.py(cut[1].second)
                        << "\"/>\n";
            }
        out << "</g>\n";
    }

    if (x_star != nullptr && x_star->size() == 2) {
        out << "<circle cx=\"" << f.px((*x_star)[0]) << "\" cy=\"" << f.py((*x_star)[1])
            << "\" r=\"6\" fill=\"none\" stroke=\"blue\" stroke-width=\"2.5\"/>\n";
        out << "<line x1=\"" << f.px((*x_star)[0]) - 8 << "\" y1=\"" << f.py((*x_star)[1])
            << "\" x2=\"" << f.px((*x_star)[0]) + 8 << "\" y2=\"" << f.py((*x_star)[1])
            << "\" stroke=\"blue\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace vdo
