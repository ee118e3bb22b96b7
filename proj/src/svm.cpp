#include "texturekit/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "texturekit/errors.hpp"

namespace texturekit {

KernelSpec KernelSpec::rbf(double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("RBF sigma must be > 0");
    KernelSpec k;
    k.kind = Kind::Rbf;
    k.sigma = sigma;
    return k;
}

KernelSpec KernelSpec::sigmoid(double a, double b) {
    KernelSpec k;
    k.kind = Kind::Sigmoid;
    k.a = a;
    k.b = b;
    return k;
}

std::string kernel_name(const KernelSpec& k) {
    switch (k.kind) {
        case KernelSpec::Kind::Linear: return "linear";
        case KernelSpec::Kind::Rbf: return "rbf";
        case KernelSpec::Kind::Sigmoid: return "sigmoid";
    }
    return "?";
}

double kernel_eval(const KernelSpec& spec, const std::vector<double>& u,
                   const std::vector<double>& v) {
    if (u.size() != v.size()) throw ValidationError("kernel operands have different dimensions");
    switch (spec.kind) {
        case KernelSpec::Kind::Linear: {
            double dot = 0.0;
            for (size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
            return dot;
        }
        case KernelSpec::Kind::Rbf: {
            double d2 = 0.0;
            for (size_t i = 0; i < u.size(); ++i) {
                const double d = u[i] - v[i];
                d2 += d * d;
            }
            return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
        }
        case KernelSpec::Kind::Sigmoid: {
            double dot = 0.0;
            for (size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
            return std::tanh(spec.a * dot + spec.b);
        }
    }
    throw ValidationError("unknown kernel kind");
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    if (identity()) return x;
    if (x.size() != mean.size())
        throw ValidationError("feature dimension does not match standardizer");
    std::vector<double> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean[i]) / scale[i];
    return z;
}

Standardizer fit_standardizer(const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) throw ValidationError("cannot fit standardizer on empty set");
    const size_t d = samples.front().size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (const auto& x : samples) {
        if (x.size() != d) throw ValidationError("inconsistent feature dimensions");
        for (size_t i = 0; i < d; ++i) s.mean[i] += x[i];
    }
    for (double& m : s.mean) m /= static_cast<double>(samples.size());
    std::vector<double> var(d, 0.0);
    for (const auto& x : samples)
        for (size_t i = 0; i < d; ++i) var[i] += (x[i] - s.mean[i]) * (x[i] - s.mean[i]);
    for (size_t i = 0; i < d; ++i) {
        const double sd = std::sqrt(var[i] / static_cast<double>(samples.size()));
        s.scale[i] = sd > 1e-12 ? sd : 1.0;  // constant dimensions pass through
    }
    return s;
}

namespace {

void validate_training_set(const TrainingSet& data, double c_box) {
    if (data.x.size() != data.y.size())
        throw ValidationError("training samples and labels differ in count");
    if (data.x.size() < 2) throw ValidationError("need at least 2 training samples");
    if (!(c_box > 0.0)) throw ValidationError("C must be > 0");
    const size_t d = data.x.front().size();
    if (d == 0) throw ValidationError("feature dimension must be >= 1");
    bool pos = false, neg = false;
    for (size_t i = 0; i < data.y.size(); ++i) {
        if (data.x[i].size() != d) throw ValidationError("inconsistent feature dimensions");
        for (const double v : data.x[i])
            if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
        if (data.y[i] == 1)
            pos = true;
        else if (data.y[i] == -1)
            neg = true;
        else
            throw ValidationError("labels must be -1 or +1");
    }
    if (!pos || !neg) throw ValidationError("degenerate training set: only one class present");
}

}  // namespace

SvmModel train_svm(const TrainingSet& data, const KernelSpec& kernel, double c_box, double tol,
                   long long max_iter) {
    validate_training_set(data, c_box);
    const int n = static_cast<int>(data.size());
    if (max_iter <= 0) max_iter = std::max<long long>(200000, 2000LL * n);

    // Dense kernel cache; desk-scale n keeps this small.
    std::vector<double> K(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = kernel_eval(kernel, data.x[i], data.x[j]);
            K[static_cast<size_t>(i) * n + j] = v;
            K[static_cast<size_t>(j) * n + i] = v;
        }
    auto k_at = [&](int i, int j) { return K[static_cast<size_t>(i) * n + j]; };

    // Minimize W(a) = 1/2 sum a_p a_q y_p y_q K_pq - sum a_p over the box
    // [0, C]^n intersected with y.a = 0. G_p = dW/da_p = y_p u_p - 1 with
    // u_p = sum_q a_q y_q K_pq. -y_p G_p is the bias candidate y_p - u_p used
    // for both working-set selection and the stopping gap.
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    bool kernel_warning = false;

    for (long long iter = 0; iter < max_iter; ++iter) {
        int i = -1, j = -1;
        double up = -std::numeric_limits<double>::infinity();
        double low = std::numeric_limits<double>::infinity();
        for (int t = 0; t < n; ++t) {
            const double v = -data.y[t] * grad[t];
            const bool in_up = (data.y[t] == 1 && alpha[t] < c_box) ||
                               (data.y[t] == -1 && alpha[t] > 0.0);
            const bool in_low = (data.y[t] == -1 && alpha[t] < c_box) ||
                                (data.y[t] == 1 && alpha[t] > 0.0);
            if (in_up && v > up) {
                up = v;
                i = t;
            }
            if (in_low && v < low) {
                low = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || up - low <= tol) break;

        // Feasible direction da_i = +y_i, da_j = -y_j keeps y.a constant.
        double eta = k_at(i, i) + k_at(j, j) - 2.0 * k_at(i, j);
        if (eta <= 0.0) {
            kernel_warning = true;  // non-PSD 2x2 minor (sigmoid kernel)
            eta = 1e-12;
        }
        double t_max = std::numeric_limits<double>::infinity();
        t_max = std::min(t_max, data.y[i] == 1 ? c_box - alpha[i] : alpha[i]);
        t_max = std::min(t_max, data.y[j] == 1 ? alpha[j] : c_box - alpha[j]);
        const double step = std::min((up - low) / eta, t_max);
        if (!(step > 0.0)) break;

        alpha[i] += data.y[i] * step;
        alpha[j] -= data.y[j] * step;
        alpha[i] = std::clamp(alpha[i], 0.0, c_box);
        alpha[j] = std::clamp(alpha[j], 0.0, c_box);
        for (int t = 0; t < n; ++t) grad[t] += data.y[t] * step * (k_at(t, i) - k_at(t, j));
    }

    // Bias: average of y_p - u_p over free SVs, else midpoint of the
    // feasible interval from the bound samples.
    double b_sum = 0.0;
    int b_count = 0;
    double b_up = -std::numeric_limits<double>::infinity();
    double b_low = std::numeric_limits<double>::infinity();
    const double bound_eps = 1e-9 * std::max(1.0, c_box);
    for (int t = 0; t < n; ++t) {
        const double v = -data.y[t] * grad[t];
        const bool in_up = (data.y[t] == 1 && alpha[t] < c_box - bound_eps) ||
                           (data.y[t] == -1 && alpha[t] > bound_eps);
        const bool in_low = (data.y[t] == -1 && alpha[t] < c_box - bound_eps) ||
                            (data.y[t] == 1 && alpha[t] > bound_eps);
        if (in_up && in_low) {
            b_sum += v;
            ++b_count;
        }
        if (in_up) b_up = std::max(b_up, v);
        if (in_low) b_low = std::min(b_low, v);
    }
    double bias = b_count > 0 ? b_sum / b_count : 0.5 * (b_up + b_low);
    if (!std::isfinite(bias)) bias = 0.0;  // both bound sets empty at one end

    SvmModel model;
    model.kernel = kernel;
    model.c_box = c_box;
    model.bias = bias;
    model.kernel_warning = kernel_warning;
    for (int t = 0; t < n; ++t) {
        if (alpha[t] > 1e-12) {
            model.support_vectors.push_back(data.x[t]);
            model.alpha.push_back(alpha[t]);
            model.sv_labels.push_back(data.y[t]);
        }
    }
    if (model.support_vectors.empty())
        throw NumericError("training produced no support vectors");

    double quad = 0.0;
    const int nsv = static_cast<int>(model.support_vectors.size());
    for (int p = 0; p < nsv; ++p)
        for (int q = 0; q < nsv; ++q)
            quad += model.alpha[p] * model.alpha[q] * model.sv_labels[p] * model.sv_labels[q] *
                    kernel_eval(kernel, model.support_vectors[p], model.support_vectors[q]);
    if (quad < 0.0) model.kernel_warning = true;  // indefinite kernel geometry
    model.w_norm = std::sqrt(std::abs(quad));
    return model;
}

SvmModel train_svm_standardized(const TrainingSet& data, const KernelSpec& kernel, double c_box,
                                double tol) {
    validate_training_set(data, c_box);
    TrainingSet z;
    z.y = data.y;
    const Standardizer std_ = fit_standardizer(data.x);
    z.x.reserve(data.x.size());
    for (const auto& x : data.x) z.x.push_back(std_.apply(x));
    SvmModel model = train_svm(z, kernel, c_box, tol);
    model.standardizer = std_;
    return model;
}

double decision_value(const SvmModel& model, const std::vector<double>& x) {
    const std::vector<double> z = model.standardizer.apply(x);
    if (!model.support_vectors.empty() && z.size() != model.support_vectors.front().size())
        throw ValidationError("input dimension does not match model");
    double f = model.bias;
    for (size_t p = 0; p < model.support_vectors.size(); ++p)
        f += model.alpha[p] * model.sv_labels[p] *
             kernel_eval(model.kernel, model.support_vectors[p], z);
    return f;
}

double score(const SvmModel& model, const std::vector<double>& x) {
    if (!(model.w_norm > 1e-12)) throw NumericError("degenerate model: |w| is zero");
    return decision_value(model, x) / model.w_norm;
}

int predict(const SvmModel& model, const std::vector<double>& x) {
    return decision_value(model, x) >= 0.0 ? 1 : -1;
}

}  // namespace texturekit
