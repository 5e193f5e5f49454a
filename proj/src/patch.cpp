#include "racf/patch.hpp"

#include <algorithm>

namespace racf {

namespace {

constexpr double kLatticeEps = 1e-9;

double lerp2(const Grid<double>& g, double row, double col) {
    const auto R = g.rows(), C = g.cols();
    const auto r0 = static_cast<Eigen::Index>(std::floor(row));
    const auto c0 = static_cast<Eigen::Index>(std::floor(col));
    const double fr = row - double(r0), fc = col - double(c0);
    const auto r1 = std::min<Eigen::Index>(r0 + 1, R - 1);
    const auto c1 = std::min<Eigen::Index>(c0 + 1, C - 1);
    const double top = (1 - fc) * g(r0, c0) + fc * g(r0, c1);
    const double bot = (1 - fc) * g(r1, c0) + fc * g(r1, c1);
    return (1 - fr) * top + fr * bot;
}

}  // namespace

double sample_replicate(const Grid<double>& g, double row, double col) {
    row = std::clamp(row, 0.0, double(g.rows() - 1));
    col = std::clamp(col, 0.0, double(g.cols() - 1));
    return lerp2(g, row, col);
}

double sample_zero(const Grid<double>& g, double row, double col) {
    const double rmax = double(g.rows() - 1), cmax = double(g.cols() - 1);
    if (row < -kLatticeEps || col < -kLatticeEps || row > rmax + kLatticeEps || col > cmax + kLatticeEps) return 0.0;
    return lerp2(g, std::clamp(row, 0.0, rmax), std::clamp(col, 0.0, cmax));
}

Patch extract_patch(const Image& img, const Point& center, const Size& base_size, double scale,
                    int out_rows, int out_cols) {
    require(base_size.width > 0 && base_size.height > 0, "extract_patch: base_size must be positive");
    require(scale > 0, "extract_patch: scale must be positive");
    require(out_rows >= 1 && out_cols >= 1, "extract_patch: out_size must be at least 1x1");
    const double rw = base_size.width * scale, rh = base_size.height * scale;
    const double sx = rw / out_cols, sy = rh / out_rows;
    const double x0 = center.x() - rw / 2, y0 = center.y() - rh / 2;

    Patch p;
    p.data.resize(out_rows, out_cols);
    for (int i = 0; i < out_rows; ++i) {
        const double row = y0 + (i + 0.5) * sy - 0.5;
        for (int j = 0; j < out_cols; ++j) p.data(i, j) = sample_replicate(img.pixels, row, x0 + (j + 0.5) * sx - 0.5);
    }
    p.center = center;
    p.scale = scale;
    return p;
}

Patch rotate_patch(const Patch& p, double theta) {
    require(std::isfinite(theta), "rotate_patch: theta must be finite");
    const auto [c, s] = cos_sin_deg(theta);
    const double cm = (p.data.rows() - 1) / 2.0, cn = (p.data.cols() - 1) / 2.0;
    Patch out = p;
    for (Eigen::Index i = 0; i < p.data.rows(); ++i) {
        const double mo = double(i) - cm;
        for (Eigen::Index j = 0; j < p.data.cols(); ++j) {
            const double no = double(j) - cn;
            const double n = c * no - s * mo;
            const double m = s * no + c * mo;
            out.data(i, j) = sample_zero(p.data, m + cm, n + cn);
        }
    }
    out.angle = normalize_degrees(p.angle + theta);
    return out;
}

Grid<double> hann_window(int rows, int cols) {
    auto axis = [](int n) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w[i] = n == 1 ? 1.0 : 0.5 * (1 - std::cos(2 * kPi * i / (n - 1)));
        return w;
    };
    return axis(rows) * axis(cols).transpose();
}

Patch cosine_window(const Patch& p) {
    Patch out = p;
    out.data = p.data.cwiseProduct(hann_window(int(p.data.rows()), int(p.data.cols())));
    return out;
}

}  // namespace racf
