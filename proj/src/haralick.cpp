#include "texturekit/haralick.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "texturekit/errors.hpp"

namespace texturekit {

const std::array<const char*, 14> kHaralickFeatureNames = {
    "angular_second_moment", "contrast", "correlation", "sum_of_squares_variance",
    "inverse_difference_moment", "sum_average", "sum_variance", "sum_entropy",
    "entropy", "difference_variance", "difference_entropy", "info_correlation_1",
    "info_correlation_2", "max_correlation_coefficient"};

namespace {

inline double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// sqrt(second-largest eigenvalue of Q), Q(i,j) = sum_k P(i,k)P(j,k) / (p_x(i) p_y(k)),
// restricted to rows/columns with nonzero marginal mass. For the symmetric
// GLCMs produced here Q is similar to the square of a symmetric stochastic-like
// matrix, so its spectrum is real with largest eigenvalue 1.
double max_correlation_coefficient(const std::vector<double>& P, int n,
                                   const std::vector<double>& px,
                                   const std::vector<double>& py) {
    std::vector<int> rows, cols;
    for (int i = 0; i < n; ++i) {
        if (px[i] > 0.0) rows.push_back(i);
        if (py[i] > 0.0) cols.push_back(i);
    }
    const int m = static_cast<int>(rows.size());
    if (m < 2) return 0.0;  // a single populated level has no second eigenvalue

    Eigen::MatrixXd q(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            double acc = 0.0;
            for (const int k : cols) {
                acc += P[static_cast<size_t>(rows[a]) * n + k] *
                       P[static_cast<size_t>(rows[b]) * n + k] / (px[rows[a]] * py[k]);
            }
            q(a, b) = acc;
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(q, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigenvalue computation failed for Q");
    std::vector<double> mags(m);
    for (int i = 0; i < m; ++i) mags[i] = std::abs(solver.eigenvalues()[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    return std::sqrt(std::max(0.0, std::min(mags[1], 1.0)));
}

}  // namespace

GlcmMarginals compute_marginals(const std::vector<double>& P, int n) {
    if (n < 1 || P.size() != static_cast<size_t>(n) * n)
        throw ValidationError("probability matrix must be n x n");
    double total = 0.0;
    for (const double p : P) {
        if (p < 0.0 || !std::isfinite(p))
            throw ValidationError("probability matrix entries must be finite and >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("probability matrix must sum to 1 within 1e-9");

    GlcmMarginals m;
    m.p_x.assign(n, 0.0);
    m.p_y.assign(n, 0.0);
    m.p_sum.assign(2 * n - 1, 0.0);
    m.p_diff.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double p = P[static_cast<size_t>(i) * n + j];
            m.p_x[i] += p;
            m.p_y[j] += p;
            m.p_sum[i + j] += p;
            m.p_diff[std::abs(i - j)] += p;
        }
    }
    for (int i = 0; i < n; ++i) {
        m.mu_x += i * m.p_x[i];
        m.mu_y += i * m.p_y[i];
    }
    double var_x = 0.0, var_y = 0.0;
    for (int i = 0; i < n; ++i) {
        var_x += (i - m.mu_x) * (i - m.mu_x) * m.p_x[i];
        var_y += (i - m.mu_y) * (i - m.mu_y) * m.p_y[i];
    }
    m.sigma_x = std::sqrt(var_x);
    m.sigma_y = std::sqrt(var_y);

    for (int i = 0; i < n; ++i) {
        m.hx -= xlogx(m.p_x[i]);
        m.hy -= xlogx(m.p_y[i]);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double p = P[static_cast<size_t>(i) * n + j];
            const double q = m.p_x[i] * m.p_y[j];
            m.hxy -= xlogx(p);
            if (p > 0.0 && q > 0.0) m.hxy1 -= p * std::log(q);
            m.hxy2 -= xlogx(q);
        }
    }
    return m;
}

GlcmMarginals compute_marginals(const Glcm& g) { return compute_marginals(g.probs, g.levels); }

HaralickFeatures compute_features(const std::vector<double>& P, int n) {
    const GlcmMarginals m = compute_marginals(P, n);
    HaralickFeatures out;
    auto& f = out.f;

    double asm_ = 0.0, idm = 0.0, corr_num = 0.0, ssq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double p = P[static_cast<size_t>(i) * n + j];
            asm_ += p * p;
            idm += p / (1.0 + (i - j) * (i - j));
            corr_num += static_cast<double>(i) * j * p;
            ssq += (i - m.mu_x) * (i - m.mu_x) * p;
        }
    }
    f[0] = asm_;

    // Difference variance is defined as the same weighted sum over p_diff
    // as contrast, so the two statistics coincide by construction.
    double contrast = 0.0, diff_var = 0.0, diff_ent = 0.0;
    for (int k = 0; k < n; ++k) {
        contrast += static_cast<double>(k) * k * m.p_diff[k];
        diff_var += static_cast<double>(k) * k * m.p_diff[k];
        diff_ent -= xlogx(m.p_diff[k]);
    }
    f[1] = contrast;

    if (m.sigma_x * m.sigma_y > 0.0) {
        f[2] = (corr_num - m.mu_x * m.mu_y) / (m.sigma_x * m.sigma_y);
    } else {
        f[2] = 0.0;
        out.degenerate_correlation = true;
    }
    f[3] = ssq;
    f[4] = idm;

    // Sum statistics follow the 1-based gray-level convention, where the
    // summed index runs over {2, ..., 2N}; stored p_sum[s0] covers s0 = s-2.
    double sum_avg = 0.0, sum_ent = 0.0;
    for (int s0 = 0; s0 < 2 * n - 1; ++s0) {
        sum_avg += (s0 + 2) * m.p_sum[s0];
        sum_ent -= xlogx(m.p_sum[s0]);
    }
    double sum_var = 0.0;
    for (int s0 = 0; s0 < 2 * n - 1; ++s0)
        sum_var += (s0 + 2 - sum_ent) * (s0 + 2 - sum_ent) * m.p_sum[s0];
    f[5] = sum_avg;
    f[6] = sum_var;
    f[7] = sum_ent;

    f[8] = m.hxy;
    f[9] = diff_var;
    f[10] = diff_ent;

    const double hmax = std::max(m.hx, m.hy);
    if (hmax > 0.0) {
        f[11] = (m.hxy - m.hxy1) / hmax;
    } else {
        f[11] = 0.0;
        out.degenerate_imc1 = true;
    }
    f[12] = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (m.hxy2 - m.hxy))));
    f[13] = max_correlation_coefficient(P, n, m.p_x, m.p_y);
    return out;
}

HaralickFeatures compute_features(const Glcm& g) { return compute_features(g.probs, g.levels); }

HaralickVector28 aggregate_directions(const std::array<HaralickFeatures, 4>& per_direction) {
    HaralickVector28 v;
    for (int k = 0; k < 14; ++k) {
        double lo = per_direction[0].f[k], hi = lo, sum = 0.0;
        for (const auto& d : per_direction) {
            sum += d.f[k];
            lo = std::min(lo, d.f[k]);
            hi = std::max(hi, d.f[k]);
        }
        v.mean[k] = sum / 4.0;
        v.range[k] = hi - lo;
    }
    return v;
}

std::vector<double> HaralickVector28::to_vector() const {
    std::vector<double> out;
    out.reserve(28);
    out.insert(out.end(), mean.begin(), mean.end());
    out.insert(out.end(), range.begin(), range.end());
    return out;
}

HaralickVector28 haralick28(const QuantizedImage& img, int distance) {
    const auto glcms = glcm_all_directions(img, distance);
    std::array<HaralickFeatures, 4> per_dir;
    for (size_t d = 0; d < 4; ++d) per_dir[d] = compute_features(glcms[d]);
    return aggregate_directions(per_dir);
}

}  // namespace texturekit
