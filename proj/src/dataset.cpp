#include "texturekit/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "texturekit/errors.hpp"
#include "texturekit/preprocess.hpp"

namespace texturekit {

namespace {

// Fixed 53-bit mantissa mapping keeps generated pixels identical across
// standard library implementations.
double unit_interval(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

GrayImage noise_image(int size, std::uint64_t sub_seed) {
    std::mt19937_64 rng(sub_seed);
    GrayImage img(size, size);
    for (double& p : img.pixels) p = unit_interval(rng);
    return img;
}

void contrast_stretch(GrayImage& img) {
    const auto [lo_it, hi_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    // Copy before the loop: the iterators alias the pixels being rewritten.
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (range < 1e-12) return;
    for (double& p : img.pixels) p = (p - lo) / range;
}

void add_checkerboard(GrayImage& img, double amp, int cell) {
    if (amp <= 0.0) return;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            const double sign = ((r / cell + c / cell) % 2 == 0) ? 1.0 : -1.0;
            img.at(r, c) = std::clamp(img.at(r, c) + sign * amp, 0.0, 1.0);
        }
}

std::string sample_id(char prefix, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%03d", prefix, index);
    return buf;
}

}  // namespace

std::vector<LabeledImage> generate(const SynthConfig& cfg) {
    if (cfg.n_per_class < 2) throw ValidationError("n_per_class must be >= 2");
    if (cfg.size < 8) throw ValidationError("image size must be >= 8");
    if (cfg.difficulty < 0.0 || cfg.difficulty > 1.0)
        throw ValidationError("difficulty must be in [0, 1]");
    if (!(cfg.sigma_smooth > 0.0) || !(cfg.sigma_speckle > 0.0))
        throw ValidationError("blur sigmas must be > 0");
    if (cfg.checker_cell < 1) throw ValidationError("checker_cell must be >= 1");

    const double t = cfg.difficulty;
    // Class B drifts toward class A's parameters as difficulty rises; at
    // t = 1 the two recipes coincide.
    const double sigma_b = cfg.sigma_speckle + t * (cfg.sigma_smooth - cfg.sigma_speckle);
    const double amp_b = cfg.checker_amp * (1.0 - t);

    std::vector<LabeledImage> out;
    out.reserve(static_cast<size_t>(2) * cfg.n_per_class);
    for (int k = 0; k < 2 * cfg.n_per_class; ++k) {
        const bool class_b = k >= cfg.n_per_class;
        const std::uint64_t sub_seed = cfg.seed ^ static_cast<std::uint64_t>(k);

        GrayImage img = noise_image(cfg.size, sub_seed);
        img = gaussian_blur(img, class_b ? sigma_b : cfg.sigma_smooth);
        contrast_stretch(img);
        if (class_b) add_checkerboard(img, amp_b, cfg.checker_cell);

        LabeledImage sample;
        sample.id = sample_id(class_b ? 'b' : 'a', class_b ? k - cfg.n_per_class : k);
        sample.image = std::move(img);
        sample.label = class_b ? 1 : -1;
        out.push_back(std::move(sample));
    }
    return out;
}

}  // namespace texturekit
