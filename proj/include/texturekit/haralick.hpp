#pragma once

#include <array>
#include <vector>

#include "texturekit/glcm.hpp"

namespace texturekit {

/// Marginal distributions and entropies of one GLCM probability matrix.
/// Gray levels are 0-based internally; p_sum[s] covers s = i+j in
/// {0..2N-2} (the 1-based convention's i+j in {2..2N} shifted by 2) and
/// p_diff[k] covers k = |i-j|. Entropies use natural log, 0*log 0 = 0.
struct GlcmMarginals {
    std::vector<double> p_x, p_y;
    std::vector<double> p_sum;   // length 2N-1
    std::vector<double> p_diff;  // length N
    double mu_x = 0, mu_y = 0;
    double sigma_x = 0, sigma_y = 0;
    double hx = 0, hy = 0;
    double hxy = 0, hxy1 = 0, hxy2 = 0;
};

/// The 14 Haralick statistics in paper order:
///  f1  angular second moment        f8  sum entropy
///  f2  contrast                     f9  entropy
///  f3  correlation                  f10 difference variance
///  f4  sum of squares: variance     f11 difference entropy
///  f5  inverse difference moment    f12 info. measure of correlation 1
///  f6  sum average                  f13 info. measure of correlation 2
///  f7  sum variance                 f14 maximal correlation coefficient
struct HaralickFeatures {
    std::array<double, 14> f{};
    bool degenerate_correlation = false;  // sigma_x * sigma_y == 0, f3 set to 0
    bool degenerate_imc1 = false;         // max(HX, HY) == 0, f12 set to 0
};

/// Mean and range (max - min) of each statistic over the four directions.
struct HaralickVector28 {
    std::array<double, 14> mean{};
    std::array<double, 14> range{};

    std::vector<double> to_vector() const;
};

extern const std::array<const char*, 14> kHaralickFeatureNames;

/// P is a row-major n x n probability matrix; must sum to 1 within 1e-9.
GlcmMarginals compute_marginals(const std::vector<double>& P, int n);
GlcmMarginals compute_marginals(const Glcm& g);

HaralickFeatures compute_features(const std::vector<double>& P, int n);
HaralickFeatures compute_features(const Glcm& g);

HaralickVector28 aggregate_directions(const std::array<HaralickFeatures, 4>& per_direction);

/// Full per-image pipeline: four directional GLCMs -> 14 features each ->
/// mean/range aggregation.
HaralickVector28 haralick28(const QuantizedImage& img, int distance = 1);

}  // namespace texturekit
