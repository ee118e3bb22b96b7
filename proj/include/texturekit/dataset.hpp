#pragma once

#include <cstdint>
#include <vector>

#include "texturekit/eval.hpp"

namespace texturekit {

/// Two-class texture generator. Class A (nonstroke, -1) is smooth blurred
/// noise; class B (stroke, +1) is speckled noise with a checkerboard
/// overlay. difficulty in [0, 1] interpolates class B's parameters toward
/// class A's, so the classes coincide at difficulty 1.
struct SynthConfig {
    int n_per_class = 10;
    int size = 128;
    double difficulty = 0.0;
    std::uint64_t seed = 42;

    double sigma_smooth = 3.0;    // class A blur
    double sigma_speckle = 0.6;   // class B blur at difficulty 0
    double checker_amp = 0.4;     // class B overlay amplitude at difficulty 0
    int checker_cell = 4;         // overlay cell size in pixels
};

/// Deterministic under seed: image k uses sub-seed seed ^ k. Class A
/// samples come first (ids a000...), then class B (b000...).
std::vector<LabeledImage> generate(const SynthConfig& cfg);

}  // namespace texturekit
