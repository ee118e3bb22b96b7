#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "texturekit/image.hpp"

namespace texturekit {

enum class Direction { Horizontal, Vertical, LeftDiagonal, RightDiagonal };

/// (row, col) step for one unit of distance.
std::pair<int, int> direction_offset(Direction dir);

constexpr std::array<Direction, 4> all_directions() {
    return {Direction::Horizontal, Direction::Vertical, Direction::LeftDiagonal,
            Direction::RightDiagonal};
}

const char* direction_name(Direction dir);
Direction parse_direction(const std::string& s);

/// One directional gray-tone spatial dependence matrix. Both pixel orderings
/// of every pair are tallied, so counts (and probs) are symmetric.
struct Glcm {
    int levels = 0;
    std::vector<std::int64_t> counts;  // levels x levels, row-major
    std::vector<double> probs;         // counts / total
    std::int64_t total = 0;

    std::int64_t count(int i, int j) const { return counts[static_cast<size_t>(i) * levels + j]; }
    double prob(int i, int j) const { return probs[static_cast<size_t>(i) * levels + j]; }
};

Glcm compute_glcm(const QuantizedImage& img, Direction dir, int distance = 1);

/// Fixed order: Horizontal, Vertical, LeftDiagonal, RightDiagonal.
std::array<Glcm, 4> glcm_all_directions(const QuantizedImage& img, int distance = 1);

}  // namespace texturekit
