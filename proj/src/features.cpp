#include "racf/features.hpp"

#include <algorithm>

namespace racf {

namespace {

constexpr double kHistEps = 1e-3;

}  // namespace

FeatureMap extract_features(const Patch& p, int cell_size, bool apply_window) {
    require(cell_size >= 1, "extract_features: cell_size must be >= 1");
    const auto P = p.data.rows(), Q = p.data.cols();
    require(P % cell_size == 0 && Q % cell_size == 0,
            "extract_features: patch dimensions must be divisible by cell_size");
    const auto M = P / cell_size, N = Q / cell_size;
    require(M >= 4 && N >= 4, "extract_features: feature grid must be at least 4x4 cells");

    FeatureMap fm;
    fm.cell_size = cell_size;
    fm.channels.assign(kFeatureChannels, Grid<double>::Zero(M, N));
    const double cell_area = double(cell_size) * cell_size;

    for (Eigen::Index i = 0; i < P; ++i) {
        const Eigen::Index up = std::max<Eigen::Index>(i - 1, 0), down = std::min<Eigen::Index>(i + 1, P - 1);
        for (Eigen::Index j = 0; j < Q; ++j) {
            const Eigen::Index left = std::max<Eigen::Index>(j - 1, 0), right = std::min<Eigen::Index>(j + 1, Q - 1);
            const Eigen::Index cm = i / cell_size, cn = j / cell_size;
            fm.channels[0](cm, cn) += p.data(i, j) / cell_area;

            const double gx = 0.5 * (p.data(i, right) - p.data(i, left));
            const double gy = 0.5 * (p.data(down, j) - p.data(up, j));
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double deg = rad2deg(std::atan2(gy, gx));
            if (deg < 0) deg += 180.0;
            if (deg >= 180.0) deg -= 180.0;
            const double pos = deg / (180.0 / kOrientationBins);
            const int b0 = static_cast<int>(std::floor(pos)) % kOrientationBins;
            const int b1 = (b0 + 1) % kOrientationBins;
            const double frac = pos - std::floor(pos);
            fm.channels[1 + b0](cm, cn) += (1 - frac) * mag;
            fm.channels[1 + b1](cm, cn) += frac * mag;
        }
    }

    fm.channels[0] = fm.channels[0] / 255.0 - Grid<double>::Constant(M, N, 0.5);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index n = 0; n < N; ++n) {
            double sq = 0;
            for (int b = 1; b < kFeatureChannels; ++b) sq += fm.channels[b](m, n) * fm.channels[b](m, n);
            const double norm = std::sqrt(sq + kHistEps * kHistEps);
            for (int b = 1; b < kFeatureChannels; ++b) fm.channels[b](m, n) /= norm;
        }

    const Grid<double> window = hann_window(int(M), int(N));
    for (auto& ch : fm.channels) {
        ch.array() -= ch.mean();
        if (apply_window) ch = ch.cwiseProduct(window);
    }
    return fm;
}

FeatureMap scaled(const FeatureMap& x, double a) {
    FeatureMap out = x;
    for (auto& ch : out.channels) ch *= a;
    return out;
}

FeatureMap operator+(const FeatureMap& a, const FeatureMap& b) {
    require(a.depth() == b.depth() && a.rows() == b.rows() && a.cols() == b.cols(),
            "FeatureMap +: shape mismatch");
    FeatureMap out = a;
    for (int l = 0; l < a.depth(); ++l) out.channels[l] += b.channels[l];
    return out;
}

}  // namespace racf
