#pragma once

#include <algorithm>
#include <cmath>

#include "texturekit/image.hpp"

namespace texturekit {

/// Rescales so the mean of the top `top_fraction` pixel values maps to 1;
/// anything above the reference clips to 1.
GrayImage normalize_intensity(const GrayImage& img, double top_fraction = 0.001);

/// Edge-preserving smoothing: Gaussian-spatial x Gaussian-range weighted
/// average over a (2*radius+1)^2 window, borders clamped.
GrayImage bilateral_filter(const GrayImage& img, double sigma_spatial,
                           double sigma_range, int radius);

inline int default_bilateral_radius(double sigma_spatial) {
    return 2 * static_cast<int>(std::max(1.0, std::ceil(sigma_spatial)));
}

/// Plain separable Gaussian blur, borders clamped. radius = ceil(3*sigma).
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// level = min(floor(intensity * n_levels), n_levels - 1)
QuantizedImage quantize(const GrayImage& img, int n_levels);

}  // namespace texturekit
