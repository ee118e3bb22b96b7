#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "support/testutil.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/haralick.hpp"

using namespace texturekit;

namespace {

// Outer product of two marginals: a statistically independent GLCM.
std::vector<double> independent_probs(const std::vector<double>& px,
                                      const std::vector<double>& py) {
    const int n = static_cast<int>(px.size());
    std::vector<double> P(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P[static_cast<size_t>(i) * n + j] = px[i] * py[j];
    return P;
}

}  // namespace

TEST_CASE("marginals of the hand example") {
    const std::vector<double> P = {0.5, 0.0, 0.0, 0.5};
    const GlcmMarginals m = compute_marginals(P, 2);

    CHECK(m.p_x == std::vector<double>{0.5, 0.5});
    CHECK(m.p_y == std::vector<double>{0.5, 0.5});
    CHECK(m.p_sum == std::vector<double>{0.5, 0.0, 0.5});
    CHECK(m.p_diff == std::vector<double>{1.0, 0.0});
    CHECK(m.mu_x == doctest::Approx(0.5));
    CHECK(m.sigma_x == doctest::Approx(0.5));
}

TEST_CASE("marginal entropies") {
    SUBCASE("single-entry matrix has zero entropy everywhere") {
        std::vector<double> P(9, 0.0);
        P[4] = 1.0;  // probs[1][1]
        const GlcmMarginals m = compute_marginals(P, 3);
        CHECK(m.hx == doctest::Approx(0.0));
        CHECK(m.hxy == doctest::Approx(0.0));
        CHECK(m.sigma_x == doctest::Approx(0.0));
    }

    SUBCASE("uniform 2x2 matrix is independent") {
        const std::vector<double> P(4, 0.25);
        const GlcmMarginals m = compute_marginals(P, 2);
        CHECK(m.hx == doctest::Approx(std::log(2.0)));
        CHECK(m.hy == doctest::Approx(std::log(2.0)));
        CHECK(m.hxy == doctest::Approx(std::log(4.0)));
        CHECK(m.hxy1 == doctest::Approx(m.hxy));
        CHECK(m.hxy2 == doctest::Approx(m.hxy));
    }
}

TEST_CASE("boundary feature values") {
    SUBCASE("single-entry matrix") {
        std::vector<double> P(16, 0.0);
        P[5] = 1.0;
        const HaralickFeatures h = compute_features(P, 4);
        CHECK(h.f[0] == doctest::Approx(1.0));   // f1
        CHECK(h.f[1] == doctest::Approx(0.0));   // f2
        CHECK(h.f[4] == doctest::Approx(1.0));   // f5
        CHECK(h.f[7] == doctest::Approx(0.0));   // f8
        CHECK(h.f[8] == doctest::Approx(0.0));   // f9
        CHECK(h.f[10] == doctest::Approx(0.0));  // f11
        CHECK(h.f[13] == doctest::Approx(0.0));  // f14: one populated level
        CHECK(h.degenerate_correlation);
        CHECK(h.degenerate_imc1);
    }

    SUBCASE("uniform 2x2 matrix") {
        const HaralickFeatures h = compute_features(std::vector<double>(4, 0.25), 2);
        CHECK(h.f[0] == doctest::Approx(0.25));
        CHECK(h.f[1] == doctest::Approx(0.5));  // 1^2 * p_diff(1)
        CHECK(h.f[2] == doctest::Approx(0.0));  // independence
        CHECK(h.f[8] == doctest::Approx(std::log(4.0)));
        CHECK(h.f[11] == doctest::Approx(0.0));
        CHECK(h.f[12] == doctest::Approx(0.0));
        CHECK_FALSE(h.degenerate_correlation);
    }

    SUBCASE("diagonal matrix is perfectly correlated") {
        const std::vector<double> P = {0.5, 0.0, 0.0, 0.5};
        const HaralickFeatures h = compute_features(P, 2);
        CHECK(h.f[1] == doctest::Approx(0.0));
        CHECK(h.f[2] == doctest::Approx(1.0));
        CHECK(h.f[13] == doctest::Approx(1.0));  // Q eigenvalues {1, 1}
    }
}

TEST_CASE("all 14 features match the naive oracle on random symmetric GLCMs") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> size(2, 8);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        const std::vector<double> P = testutil::random_symmetric_probs(rng, n);
        const HaralickFeatures got = compute_features(P, n);
        const oracle::NaiveHaralick want = oracle::naive_haralick(P, n);
        for (int k = 0; k < 14; ++k) {
            INFO("trial ", trial, " feature f", k + 1);
            CHECK(std::abs(got.f[k] - want.f[k]) < 1e-9);
        }
        // Q is row-stochastic on the populated levels, so its top eigenvalue
        // is 1 whenever two or more levels are populated.
        if (want.q_top_eigenvalue != 0.0)
            CHECK(want.q_top_eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(got.f[13] >= 0.0);
        CHECK(got.f[13] <= 1.0);
    }
}

TEST_CASE("feature invariants") {
    std::mt19937_64 rng(4242);

    SUBCASE("difference variance equals contrast by construction") {
        for (int trial = 0; trial < 10; ++trial) {
            const std::vector<double> P = testutil::random_symmetric_probs(rng, 6);
            const HaralickFeatures h = compute_features(P, 6);
            CHECK(h.f[9] == doctest::Approx(h.f[1]));
        }
    }

    SUBCASE("permutation-invariant statistics") {
        const std::vector<double> P = testutil::random_symmetric_probs(rng, 5);
        const int perm[5] = {3, 0, 4, 1, 2};
        std::vector<double> Q(25);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                Q[static_cast<size_t>(perm[i]) * 5 + perm[j]] = P[static_cast<size_t>(i) * 5 + j];

        const HaralickFeatures a = compute_features(P, 5);
        const HaralickFeatures b = compute_features(Q, 5);
        // Only features blind to the level ordering qualify: energy, entropy,
        // and the information measures. Sum/difference statistics do not.
        for (const int k : {0, 8, 11, 12}) {  // f1, f9, f12, f13
            INFO("feature f", k + 1);
            CHECK(a.f[k] == doctest::Approx(b.f[k]).epsilon(1e-12));
        }
        // The Q-matrix eigenvalues are preserved under joint permutation.
        CHECK(a.f[13] == doctest::Approx(b.f[13]).epsilon(1e-9));
    }

    SUBCASE("independent matrix has zero correlation and zero IMC1") {
        // Dyadic marginals keep the outer product and its row sums exact, so
        // the entropy identities hold to the last bit.
        const std::vector<double> px = {0.125, 0.5, 0.25, 0.125};
        const std::vector<double> P = independent_probs(px, px);
        const HaralickFeatures h = compute_features(P, 4);
        CHECK(std::abs(h.f[2]) < 1e-12);
        CHECK(std::abs(h.f[11]) < 1e-12);
        CHECK(std::abs(h.f[12]) < 1e-7);  // HXY = HXY2 under independence
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(compute_features(std::vector<double>(4, 0.3), 2), ValidationError);
        CHECK_THROWS_AS(compute_features({0.5, 0.5, -0.1, 0.1}, 2), ValidationError);
        CHECK_THROWS_AS(compute_features(std::vector<double>(6, 1.0 / 6), 2), ValidationError);
    }
}

TEST_CASE("aggregate_directions takes the mean and spread per statistic") {
    std::array<HaralickFeatures, 4> dirs{};
    for (int d = 0; d < 4; ++d) dirs[d].f[0] = 0.1 * (d + 1);  // .1 .2 .3 .4
    for (int d = 0; d < 4; ++d) dirs[d].f[5] = 2.0;

    const HaralickVector28 v = aggregate_directions(dirs);
    CHECK(v.mean[0] == doctest::Approx(0.25));
    CHECK(v.range[0] == doctest::Approx(0.3));
    CHECK(v.mean[5] == doctest::Approx(2.0));
    CHECK(v.range[5] == doctest::Approx(0.0));

    SUBCASE("order independence") {
        std::array<HaralickFeatures, 4> shuffled = {dirs[2], dirs[0], dirs[3], dirs[1]};
        const HaralickVector28 w = aggregate_directions(shuffled);
        CHECK(w.mean == v.mean);
        CHECK(w.range == v.range);
    }

    SUBCASE("to_vector lays out means then ranges") {
        const std::vector<double> flat = v.to_vector();
        REQUIRE(flat.size() == 28);
        CHECK(flat[0] == v.mean[0]);
        CHECK(flat[14] == v.range[0]);
        CHECK(flat[27] == v.range[13]);
    }
}

TEST_CASE("haralick28 runs the full per-image pipeline") {
    std::mt19937_64 rng(5150);
    const QuantizedImage img = [&] {
        QuantizedImage q(12, 12, 8);
        std::uniform_int_distribution<int> level(0, 7);
        for (auto& v : q.data) v = level(rng);
        return q;
    }();

    const HaralickVector28 v = haralick28(img);
    const auto glcms = glcm_all_directions(img);
    std::array<HaralickFeatures, 4> per_dir;
    for (size_t d = 0; d < 4; ++d) per_dir[d] = compute_features(glcms[d]);
    const HaralickVector28 expect = aggregate_directions(per_dir);
    CHECK(v.mean == expect.mean);
    CHECK(v.range == expect.range);
}
