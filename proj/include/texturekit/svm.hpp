#pragma once

#include <string>
#include <vector>

namespace texturekit {

struct KernelSpec {
    enum class Kind { Linear, Rbf, Sigmoid };
    Kind kind = Kind::Linear;
    double sigma = 40.0;  // Rbf: exp(-|u-v|^2 / (2 sigma^2))
    double a = 1.0;       // Sigmoid: tanh(a * u.v + b)
    double b = -9.0;

    static KernelSpec linear() { return {}; }
    static KernelSpec rbf(double sigma);
    static KernelSpec sigmoid(double a, double b);
};

std::string kernel_name(const KernelSpec& k);

double kernel_eval(const KernelSpec& spec, const std::vector<double>& u,
                   const std::vector<double>& v);

/// Labeled samples; labels are -1 / +1 and both classes must be present.
struct TrainingSet {
    std::vector<std::vector<double>> x;
    std::vector<int> y;

    size_t size() const { return x.size(); }
    int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

/// Per-dimension z-scoring fitted on a training split. Empty = identity.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    bool identity() const { return mean.empty(); }
    std::vector<double> apply(const std::vector<double>& x) const;
};

Standardizer fit_standardizer(const std::vector<std::vector<double>>& samples);

struct SvmModel {
    KernelSpec kernel;
    double c_box = 1.0;
    double bias = 0.0;
    double w_norm = 0.0;  // sqrt(|sum_ij a_i a_j y_i y_j K(x_i, x_j)|)
    std::vector<std::vector<double>> support_vectors;  // stored in standardized space
    std::vector<double> alpha;
    std::vector<int> sv_labels;
    Standardizer standardizer;   // applied to inputs before kernel evaluation
    bool kernel_warning = false; // an SMO pair had non-positive curvature (non-PSD kernel)
};

/// Soft-margin dual via SMO with maximal-violating-pair selection.
/// Trains on the samples exactly as given; see train_svm_standardized for
/// the pipeline variant that z-scores first.
SvmModel train_svm(const TrainingSet& data, const KernelSpec& kernel, double c_box,
                   double tol = 1e-3, long long max_iter = 0);

/// Fits a Standardizer on the training set, trains in z-scored space, and
/// embeds the standardizer in the model so decision_value/score accept raw
/// feature vectors.
SvmModel train_svm_standardized(const TrainingSet& data, const KernelSpec& kernel,
                                double c_box, double tol = 1e-3);

/// f(x) = sum_i alpha_i y_i K(x_i, x) + b
double decision_value(const SvmModel& model, const std::vector<double>& x);

/// Signed geometric distance f(x) / |w|; its magnitude is the fusion confidence.
double score(const SvmModel& model, const std::vector<double>& x);

/// sign(f(x)) with f(x) = 0 mapped to +1.
int predict(const SvmModel& model, const std::vector<double>& x);

}  // namespace texturekit
