#include "texturekit/glcm.hpp"

#include <string>

#include "texturekit/errors.hpp"

namespace texturekit {

std::pair<int, int> direction_offset(Direction dir) {
    switch (dir) {
        case Direction::Horizontal: return {0, 1};
        case Direction::Vertical: return {1, 0};
        case Direction::LeftDiagonal: return {1, -1};
        case Direction::RightDiagonal: return {1, 1};
    }
    throw ValidationError("unknown direction");
}

const char* direction_name(Direction dir) {
    switch (dir) {
        case Direction::Horizontal: return "h";
        case Direction::Vertical: return "v";
        case Direction::LeftDiagonal: return "ld";
        case Direction::RightDiagonal: return "rd";
    }
    return "?";
}

Direction parse_direction(const std::string& s) {
    if (s == "h" || s == "horizontal") return Direction::Horizontal;
    if (s == "v" || s == "vertical") return Direction::Vertical;
    if (s == "ld" || s == "left-diagonal") return Direction::LeftDiagonal;
    if (s == "rd" || s == "right-diagonal") return Direction::RightDiagonal;
    throw ValidationError("unknown direction '" + s + "' (expected h|v|ld|rd)");
}

Glcm compute_glcm(const QuantizedImage& img, Direction dir, int distance) {
    if (img.width < 1 || img.height < 1) throw ValidationError("empty image");
    if (img.levels < 2) throw ValidationError("quantized image needs at least 2 levels");
    if (distance < 1) throw ValidationError("distance must be >= 1");
    for (const int v : img.data)
        if (v < 0 || v >= img.levels)
            throw ValidationError("quantized level out of range");

    const auto [dr, dc] = direction_offset(dir);
    const int step_r = dr * distance;
    const int step_c = dc * distance;

    Glcm g;
    g.levels = img.levels;
    g.counts.assign(static_cast<size_t>(img.levels) * img.levels, 0);
    for (int r = 0; r < img.height; ++r) {
        const int rr = r + step_r;
        if (rr < 0 || rr >= img.height) continue;
        for (int c = 0; c < img.width; ++c) {
            const int cc = c + step_c;
            if (cc < 0 || cc >= img.width) continue;
            const int a = img.at(r, c);
            const int b = img.at(rr, cc);
            // Symmetric accumulation: both orderings of the pair.
            ++g.counts[static_cast<size_t>(a) * g.levels + b];
            ++g.counts[static_cast<size_t>(b) * g.levels + a];
            g.total += 2;
        }
    }
    if (g.total == 0) throw ValidationError("empty co-occurrence domain");

    g.probs.resize(g.counts.size());
    for (size_t i = 0; i < g.counts.size(); ++i)
        g.probs[i] = static_cast<double>(g.counts[i]) / static_cast<double>(g.total);
    return g;
}

std::array<Glcm, 4> glcm_all_directions(const QuantizedImage& img, int distance) {
    const auto dirs = all_directions();
    return {compute_glcm(img, dirs[0], distance), compute_glcm(img, dirs[1], distance),
            compute_glcm(img, dirs[2], distance), compute_glcm(img, dirs[3], distance)};
}

}  // namespace texturekit
