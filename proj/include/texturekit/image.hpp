#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace texturekit {

/// Row-major grayscale raster. Intensities are real numbers; after
/// normalize_intensity they live in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    double& at(int r, int c) { return pixels[static_cast<size_t>(r) * width + c]; }
    double at(int r, int c) const { return pixels[static_cast<size_t>(r) * width + c]; }
    size_t size() const { return pixels.size(); }
};

/// Gray-level indices in {0, ..., levels-1}.
struct QuantizedImage {
    int width = 0;
    int height = 0;
    int levels = 0;
    std::vector<int> data;

    QuantizedImage() = default;
    QuantizedImage(int w, int h, int n_levels)
        : width(w), height(h), levels(n_levels), data(static_cast<size_t>(w) * h, 0) {}

    int& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    int at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
};

void validate_image(const GrayImage& img);

/// Box-filter (area-average) resize; exact block averaging when the ratio is integral.
GrayImage resize_area(const GrayImage& img, int out_width, int out_height);

// --- I/O ---------------------------------------------------------------
// PGM P2/P5 up to maxval 65535; PNG restricted to 8/16-bit grayscale.
// Intensities are read as value / maxval.

GrayImage read_image(const std::string& path);
GrayImage read_pgm(const std::string& path);
GrayImage read_png_gray(const std::string& path);

/// Writes binary PGM (P5). maxval 255 or 65535 selects 8- vs 16-bit samples.
/// `comment`, when nonempty, is embedded as a single `#` header line.
void write_pgm(const GrayImage& img, const std::string& path, int maxval = 65535,
               const std::string& comment = "");

}  // namespace texturekit
