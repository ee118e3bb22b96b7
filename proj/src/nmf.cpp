#include "texturekit/nmf.hpp"

#include <cmath>
#include <random>

#include "texturekit/errors.hpp"

namespace texturekit {

namespace {

constexpr double kDenomEps = 1e-12;

void validate_nonnegative(const Eigen::MatrixXd& A, const char* what) {
    if (A.size() == 0) throw ValidationError(std::string(what) + " is empty");
    if ((A.array() < 0.0).any() || !A.allFinite())
        throw ValidationError(std::string(what) + " must be finite and nonnegative");
}

// Engine output mapped to (0, 1]; fully specified so seeds reproduce
// bit-identically everywhere.
double unit_open_closed(std::mt19937_64& rng) {
    return 1.0 - (rng() >> 11) * 0x1.0p-53;
}

}  // namespace

NmfResult nmf_factorize(const Eigen::MatrixXd& A, const NmfConfig& cfg) {
    validate_nonnegative(A, "data matrix");
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (cfg.rank < 1) throw ValidationError("rank must be >= 1");
    if (cfg.rank >= std::min(m, n))
        throw ValidationError("rank must be strictly less than both matrix dimensions");
    if (cfg.max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (!(cfg.rel_tol > 0.0)) throw ValidationError("rel_tol must be > 0");

    std::mt19937_64 rng(cfg.seed);
    const double scale = std::sqrt(std::max(A.mean(), kDenomEps) / cfg.rank);
    Eigen::MatrixXd V(m, cfg.rank), H(cfg.rank, n);
    for (int j = 0; j < cfg.rank; ++j)
        for (int i = 0; i < m; ++i) V(i, j) = scale * unit_open_closed(rng);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < cfg.rank; ++i) H(i, j) = scale * unit_open_closed(rng);

    NmfResult result;
    result.objective_trace.reserve(cfg.max_iters);
    double prev = (A - V * H).squaredNorm();
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        {
            const Eigen::MatrixXd numer = A * H.transpose();
            const Eigen::MatrixXd denom = V * (H * H.transpose());
            V.array() *= numer.array() / (denom.array() + kDenomEps);
        }
        {
            const Eigen::MatrixXd numer = V.transpose() * A;
            const Eigen::MatrixXd denom = (V.transpose() * V) * H;
            H.array() *= numer.array() / (denom.array() + kDenomEps);
        }
        const double obj = (A - V * H).squaredNorm();
        result.objective_trace.push_back(obj);
        const double decrease = prev - obj;
        const bool converged = decrease < cfg.rel_tol * std::max(prev, kDenomEps);
        prev = obj;
        if (converged) break;
    }

    result.model.basis = std::move(V);
    result.model.config = cfg;
    result.model.train_residual = std::sqrt(prev);
    result.model.column_norms.resize(cfg.rank);
    for (int j = 0; j < cfg.rank; ++j)
        result.model.column_norms[j] = result.model.basis.col(j).norm();
    result.weights = std::move(H);
    return result;
}

Eigen::VectorXd nmf_encode(const NmfModel& model, const Eigen::VectorXd& a, int max_iters,
                           double rel_tol) {
    validate_nonnegative(a, "sample vector");
    if (a.rows() != model.basis.rows())
        throw ValidationError("sample dimension does not match basis rows");
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");

    const Eigen::MatrixXd& V = model.basis;
    const Eigen::VectorXd vta = V.transpose() * a;
    const Eigen::MatrixXd vtv = V.transpose() * V;

    // Per-column least-squares start: linear in a, so encoding stays
    // positively homogeneous.
    const int r = model.rank();
    Eigen::VectorXd h(r);
    for (int j = 0; j < r; ++j) h[j] = vta[j] / (vtv(j, j) + kDenomEps);

    double prev = (a - V * h).squaredNorm();
    for (int iter = 0; iter < max_iters; ++iter) {
        const Eigen::VectorXd denom = vtv * h;
        h.array() *= vta.array() / (denom.array() + kDenomEps);
        const double obj = (a - V * h).squaredNorm();
        const double decrease = prev - obj;
        const bool converged = decrease < rel_tol * std::max(prev, kDenomEps);
        prev = obj;
        if (converged) break;
    }
    return h;
}

}  // namespace texturekit
