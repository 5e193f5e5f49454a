#pragma once

#include "racf/types.hpp"

#include <filesystem>

namespace racf {

/// Loads PNG (8-bit gray/RGB, alpha dropped) or binary PGM/PPM as grayscale.
/// Color is reduced with luminance weights 0.299 R + 0.587 G + 0.114 B.
Image load_frame(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG; values are rounded and clamped to [0,255].
void save_png(const Image& img, const std::filesystem::path& path);

/// Writes a binary 8-bit PGM (P5).
void save_pgm(const Image& img, const std::filesystem::path& path);

double luminance(double r, double g, double b);

/// Linear min-max rescale onto [0,255]; a constant image is returned as is.
Image contrast_stretch(const Image& img);

/// Separable Gaussian blur, kernel radius ceil(3 sigma), replicated borders.
Image gaussian_blur(const Image& img, double sigma);

/// out = in + amount * (in - blur(in)) wherever |in - blur(in)| / 255 > threshold.
Image unsharp_mask(const Image& img, double amount, double sigma, double threshold);

struct IcParams {
    double amount = 0.8;
    double sigma = 1.0;
    double threshold = 0.5;
};

/// Illumination correction: contrast stretch followed by unsharp masking.
Image illumination_correct(const Image& img, const IcParams& params = {});

}  // namespace racf
