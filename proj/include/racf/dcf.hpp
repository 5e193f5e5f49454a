#pragma once

#include "racf/features.hpp"
#include "racf/fft.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace racf {

using FeatureSpectrum = std::vector<Spectrum<double>>;

FeatureSpectrum transform(const FeatureMap& x);

/// Multi-channel filter held as unnormalized DFT coefficients per channel.
struct CorrelationFilter {
    std::vector<Spectrum<double>> coeffs;

    int depth() const { return static_cast<int>(coeffs.size()); }
    Eigen::Index rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
    Eigen::Index cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }

    static CorrelationFilter zeros(int depth, Eigen::Index rows, Eigen::Index cols);
    std::vector<Grid<double>> spatial() const;
};

/// Shape header ("RACFFLT1", u32 depth, rows, cols) followed by
/// depth*rows*cols (re, im) float64 pairs, channel-major then column-major.
void write_filter_dump(const CorrelationFilter& f, std::ostream& out);
CorrelationFilter read_filter_dump(std::istream& in);

struct Labels {
    Grid<double> y;
    Spectrum<double> y_hat;
};

/// Gaussian peaked at the grid origin with circularly wrapped offsets.
Labels make_labels(int rows, int cols, double sigma);

struct RegWeights {
    Grid<double> w;           // quadratic bowl, minimum at cell (M/2, N/2)
    Spectrum<double> w_hat;   // DFT of w restricted to the K x K lowest frequencies
    int kernel = 0;           // K; 0 keeps every coefficient

    /// Real spatial weights whose DFT is exactly w_hat.
    Grid<double> effective() const;
};

/// w(m,n) = w_min + w_scale * ((2 dm / h)^2 + (2 dn / w)^2), dm = m - M/2, dn = n - N/2.
RegWeights make_reg_weights(int rows, int cols, double target_rows, double target_cols, double w_min,
                            double w_scale, int kernel = 5);

struct Sample {
    FeatureMap x;
    FeatureSpectrum x_hat;
    double theta = 0.0;
    double weight = 0.0;
    std::uint64_t serial = 0;
};

struct SampleMemory {
    std::vector<Sample> samples;
    std::size_t capacity = 30;
    std::uint64_t next_serial = 0;

    double total_weight() const;
};

/// Appends x with weight `learning_rate` (1 for the first sample), decays the
/// others by (1 - learning_rate) and evicts the lightest sample (oldest on
/// ties) when over capacity, renormalizing to unit total weight.
SampleMemory update_memory(SampleMemory mem, const FeatureMap& x, double theta, double learning_rate);

struct TrainOptions {
    int sweeps = 4;
    double tolerance = 1e-3;  // relative residual target
};

struct TrainResult {
    CorrelationFilter filter;
    bool converged = false;
    double relative_residual = 0.0;
    std::vector<double> residual_history;  // ||b - A f|| before sweep 1, after each sweep
};

/// Block Gauss-Seidel on the Fourier-domain normal equations
/// (sum_k a_k X_k^H X_k + I (x) C^H C) f = sum_k a_k X_k^H y,
/// with C the circular convolution by w_hat / (MN). One block per frequency.
TrainResult train(const SampleMemory& mem, const Labels& labels, const RegWeights& reg,
                  const std::optional<CorrelationFilter>& warm_start, const TrainOptions& opts);

/// Weighted data misfit plus spatial penalty, evaluated directly on spatial grids.
double spatial_cost(const CorrelationFilter& f, const SampleMemory& mem, const Labels& labels,
                    const RegWeights& reg);

/// The same objective evaluated on DFT coefficients (with the 1/MN Parseval factor).
double fourier_cost(const CorrelationFilter& f, const SampleMemory& mem, const Labels& labels,
                    const RegWeights& reg);

struct ScoreMap {
    Grid<double> s;
    Spectrum<double> s_hat;
    int scale_index = 0;
    double theta = 0.0;
};

ScoreMap response(const CorrelationFilter& f, const FeatureSpectrum& x_hat);
ScoreMap response(const CorrelationFilter& f, const FeatureMap& x);

/// Spatial circular convolution, O(M^2 N^2).
Grid<double> circular_convolve(const Grid<double>& a, const Grid<double>& b);

}  // namespace racf
