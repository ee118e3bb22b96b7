#pragma once

#include <cstdint>
#include <Eigen/Dense>
#include <vector>

namespace texturekit {

struct NmfConfig {
    int rank = 8;
    int max_iters = 500;
    double rel_tol = 1e-6;  // stop when relative objective decrease falls below this
    std::uint64_t seed = 0;
};

/// Nonnegative basis (mixing) matrix V with one column per latent component.
struct NmfModel {
    Eigen::MatrixXd basis;  // m x r, all entries >= 0
    std::vector<double> column_norms;
    double train_residual = 0.0;  // final ||A - VH||_F
    NmfConfig config;

    int rows() const { return static_cast<int>(basis.rows()); }
    int rank() const { return static_cast<int>(basis.cols()); }
};

struct NmfResult {
    NmfModel model;
    Eigen::MatrixXd weights;  // H, r x n
    std::vector<double> objective_trace;  // ||A - VH||_F^2 after each iteration
};

/// Multiplicative-update factorization of A (m x n, nonnegative) at the
/// configured rank. The squared Frobenius objective is non-increasing
/// across iterations.
NmfResult nmf_factorize(const Eigen::MatrixXd& A, const NmfConfig& cfg);

/// Nonnegative least-squares encoding of a single sample against a fixed
/// basis, using the same multiplicative H-update and stopping rule.
Eigen::VectorXd nmf_encode(const NmfModel& model, const Eigen::VectorXd& a,
                           int max_iters = 2000, double rel_tol = 1e-10);

}  // namespace texturekit
