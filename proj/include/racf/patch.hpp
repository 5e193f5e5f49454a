#pragma once

#include "racf/types.hpp"

namespace racf {

struct Patch {
    Grid<double> data;  // P x Q intensities
    Point center{0, 0};
    double scale = 1.0;
    double angle = 0.0;  // degrees anticlockwise, (-180, 180]
};

/// Bilinear lookup at fractional (row, col), borders replicated.
double sample_replicate(const Grid<double>& g, double row, double col);

/// Bilinear lookup at fractional (row, col); zero outside the sample lattice.
double sample_zero(const Grid<double>& g, double row, double col);

/// Crops a (w*scale) x (h*scale) region around `center` and resamples it
/// bilinearly onto out_rows x out_cols.
Patch extract_patch(const Image& img, const Point& center, const Size& base_size, double scale,
                    int out_rows, int out_cols);

/// Rotates the content anticlockwise by `theta` degrees about the patch center.
/// output(m', n') = input(m, n) with [n; m] = [c -s; s c] [n'; m'], zero outside.
Patch rotate_patch(const Patch& p, double theta);

/// Separable Hann window; a length-1 axis contributes a factor of 1.
Grid<double> hann_window(int rows, int cols);

Patch cosine_window(const Patch& p);

}  // namespace racf
