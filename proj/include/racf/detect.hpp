#pragma once

#include "racf/dcf.hpp"

#include <vector>

namespace racf {

/// Continuous position on the response grid: u along rows, v along columns.
struct GridPoint {
    double u = 0.0;
    double v = 0.0;
};

struct SearchConfig {
    int scales = 5;          // S, odd
    double scale_step = 1.01;  // a
    int rot_halfcount = 2;   // A
    double rot_delta = 5.0;  // degrees
    double rho = 1.0;        // cells
    int newton_iters = 5;
    bool fpe = true;

    void validate() const;
    std::vector<int> scale_exponents() const;
    std::vector<double> orientations(double theta_k) const;
};

/// sqrt(du^2 + dv^2 + rho^2) with (du, dv) the shortest offset on the M x N torus.
double fpe_denominator(const GridPoint& p, const GridPoint& prev, double rho, Eigen::Index rows, Eigen::Index cols);

struct ScoreSample {
    double value = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
    double imag_residue = 0.0;
};

/// Trigonometric interpolation of the score map and its first two derivatives.
/// The Nyquist row/column of even-length axes is split symmetrically so the
/// interpolant stays real between grid points.
ScoreSample interpolate_score(const ScoreMap& sm, double u, double v);

/// Score divided by the FPE denominator (or the plain score when fpe is off).
ScoreSample fpe_objective(const ScoreMap& sm, const GridPoint& p, const GridPoint& prev, double rho, bool fpe);

struct GridPeak {
    GridPoint at;
    double score = 0.0;
};

/// Grid maximizer of s/D (first in row-major order on ties).
GridPeak fpe_grid_peak(const ScoreMap& sm, const GridPoint& prev, double rho, bool fpe = true);

/// Sum over the grid of (s / D)^2.
double orientation_energy(const ScoreMap& sm, const GridPoint& prev, double rho, bool fpe = true);

/// Picks the candidate theta with the largest orientation energy; ties go to
/// the smallest |theta - theta_k| and then the smaller theta.
double detect_orientation(const std::vector<ScoreMap>& responses, double theta_k, const GridPoint& prev, double rho,
                          bool fpe = true);

struct Refinement {
    GridPoint at;
    double fpe_score = 0.0;
    double raw_score = 0.0;
};

/// Safeguarded Newton ascent of s/D from a grid start; never returns a point
/// with a lower objective than the start.
Refinement newton_refine(const ScoreMap& sm, const GridPoint& start, const GridPoint& prev, double rho, int iters,
                         bool fpe = true);

/// Geometry of the search window in image pixels at unit scale.
struct SearchWindow {
    Size region;
    int rows = 0;  // patch pixels
    int cols = 0;
    int cell_size = 4;
};

struct Pose {
    Point center{0, 0};
    double scale = 1.0;
    double theta = 0.0;       // relative to the canonical orientation
    double base_angle = 0.0;  // angle of the initial box
};

struct DetectionResult {
    double u_star = 0.0;
    double v_star = 0.0;
    int scale_index = 0;  // exponent r of a^r
    double theta = 0.0;
    double fpe_score = 0.0;
    double raw_score = 0.0;
    Point displacement{0, 0};  // image pixels
    double scale_factor = 1.0;
    bool low_confidence = false;
    ScoreMap winner;
};

inline constexpr double kLowConfidenceScore = 0.01;

/// Samples the oriented test patch for one (scale, theta) pair and featurizes it.
FeatureMap oriented_features(const Image& frame, const Pose& pose, const SearchWindow& win, double scale,
                             double theta);

/// Full scale x orientation search on an already preprocessed frame.
DetectionResult detect(const CorrelationFilter& f, const Image& frame, const Pose& pose, const SearchWindow& win,
                       const SearchConfig& cfg);

}  // namespace racf
