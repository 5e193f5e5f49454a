#pragma once

#include "racf/patch.hpp"

#include <vector>

namespace racf {

inline constexpr int kOrientationBins = 9;
inline constexpr int kFeatureChannels = 1 + kOrientationBins;

struct FeatureMap {
    std::vector<Grid<double>> channels;  // d stacked M x N grids
    int cell_size = 4;

    int depth() const { return static_cast<int>(channels.size()); }
    Eigen::Index rows() const { return channels.empty() ? 0 : channels.front().rows(); }
    Eigen::Index cols() const { return channels.empty() ? 0 : channels.front().cols(); }
};

/// Channel 0: cell-mean intensity mapped to [-0.5, 0.5]. Channels 1..9:
/// unsigned gradient-orientation histograms (bin centers at 0, 20, ..., 160
/// degrees, soft linear binning, magnitude weighted, L2 normalized per cell).
/// Every channel is made zero-mean and then Hann windowed (unless apply_window is false).
FeatureMap extract_features(const Patch& p, int cell_size, bool apply_window = true);

FeatureMap scaled(const FeatureMap& x, double a);
FeatureMap operator+(const FeatureMap& a, const FeatureMap& b);

}  // namespace racf
