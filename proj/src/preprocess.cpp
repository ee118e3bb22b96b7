#include "texturekit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "texturekit/errors.hpp"

namespace texturekit {

GrayImage normalize_intensity(const GrayImage& img, double top_fraction) {
    validate_image(img);
    if (!(top_fraction > 0.0) || top_fraction > 1.0)
        throw ValidationError("top_fraction must be in (0, 1]");
    for (const double p : img.pixels)
        if (p < 0.0 || !std::isfinite(p))
            throw ValidationError("normalize_intensity requires finite nonnegative intensities");

    const size_t n = img.size();
    const size_t k = std::max<size_t>(1, static_cast<size_t>(std::ceil(top_fraction * n)));
    std::vector<double> sorted = img.pixels;
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(),
                     std::greater<double>());
    const double reference =
        std::accumulate(sorted.begin(), sorted.begin() + k, 0.0) / static_cast<double>(k);
    if (reference <= 0.0) throw NumericError("degenerate image (zero reference)");

    GrayImage out = img;
    for (double& p : out.pixels) p = std::min(p / reference, 1.0);
    return out;
}

GrayImage bilateral_filter(const GrayImage& img, double sigma_spatial, double sigma_range,
                           int radius) {
    validate_image(img);
    if (!(sigma_spatial > 0.0)) throw ValidationError("sigma_spatial must be > 0");
    if (!(sigma_range > 0.0)) throw ValidationError("sigma_range must be > 0");
    if (radius < 1) throw ValidationError("radius must be >= 1");

    // Spatial weights are separable-shaped but the range term is not, so the
    // window kernel is precomputed once and applied per pixel.
    const int w = 2 * radius + 1;
    std::vector<double> spatial(static_cast<size_t>(w) * w);
    const double inv2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial);
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
            spatial[static_cast<size_t>(dr + radius) * w + (dc + radius)] =
                std::exp(-(dr * dr + dc * dc) * inv2ss);

    const double inv2sr = 1.0 / (2.0 * sigma_range * sigma_range);
    GrayImage out(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double center = img.at(r, c);
            double acc = 0.0, wsum = 0.0;
            for (int dr = -radius; dr <= radius; ++dr) {
                const int rr = std::clamp(r + dr, 0, img.height - 1);
                for (int dc = -radius; dc <= radius; ++dc) {
                    const int cc = std::clamp(c + dc, 0, img.width - 1);
                    const double v = img.at(rr, cc);
                    const double d = v - center;
                    const double wgt =
                        spatial[static_cast<size_t>(dr + radius) * w + (dc + radius)] *
                        std::exp(-d * d * inv2sr);
                    acc += wgt * v;
                    wsum += wgt;
                }
            }
            out.at(r, c) = acc / wsum;  // wsum >= center weight 1
        }
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    validate_image(img);
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        kernel[d + radius] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        ksum += kernel[d + radius];
    }
    for (double& k : kernel) k /= ksum;

    GrayImage tmp(img.width, img.height);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int d = -radius; d <= radius; ++d)
                acc += kernel[d + radius] * img.at(r, std::clamp(c + d, 0, img.width - 1));
            tmp.at(r, c) = acc;
        }
    GrayImage out(img.width, img.height);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int d = -radius; d <= radius; ++d)
                acc += kernel[d + radius] * tmp.at(std::clamp(r + d, 0, img.height - 1), c);
            out.at(r, c) = acc;
        }
    return out;
}

QuantizedImage quantize(const GrayImage& img, int n_levels) {
    validate_image(img);
    if (n_levels < 2) throw ValidationError("quantize requires at least 2 gray levels");
    QuantizedImage out(img.width, img.height, n_levels);
    for (size_t i = 0; i < img.size(); ++i) {
        const double v = img.pixels[i];
        if (v < 0.0 || v > 1.0 || !std::isfinite(v))
            throw ValidationError("quantize requires intensities in [0, 1]");
        out.data[i] = std::min(static_cast<int>(std::floor(v * n_levels)), n_levels - 1);
    }
    return out;
}

}  // namespace texturekit
