#include "texturekit/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "texturekit/errors.hpp"

namespace texturekit {

void ConfusionMatrix::add(int truth, int prediction) {
    if (truth != 1 && truth != -1) throw ValidationError("truth label must be -1 or +1");
    if (prediction != 1 && prediction != -1)
        throw ValidationError("prediction must be -1 or +1");
    if (truth == 1)
        prediction == 1 ? ++tp : ++fn;
    else
        prediction == -1 ? ++tn : ++fp;
}

Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    if (cm.tp + cm.fn > 0)
        m.sensitivity = 100.0 * static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (cm.tn + cm.fp > 0)
        m.specificity = 100.0 * static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    if (cm.total() > 0)
        m.accuracy =
            100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    return m;
}

const char* classifier_kind_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::HaralickOnly: return "haralick";
        case ClassifierKind::NmfOnly: return "nmf";
        case ClassifierKind::Concatenated: return "concat";
        case ClassifierKind::MultiLevel: return "multilevel";
    }
    return "?";
}

ClassifierKind parse_classifier_kind(const std::string& s) {
    if (s == "haralick") return ClassifierKind::HaralickOnly;
    if (s == "nmf") return ClassifierKind::NmfOnly;
    if (s == "concat") return ClassifierKind::Concatenated;
    if (s == "multilevel") return ClassifierKind::MultiLevel;
    throw ValidationError("unknown classifier kind: " + s);
}

std::vector<double> concat_features(const std::vector<double>& hvec,
                                    const std::vector<double>& nvec) {
    std::vector<double> out;
    out.reserve(hvec.size() + nvec.size());
    out.insert(out.end(), hvec.begin(), hvec.end());
    out.insert(out.end(), nvec.begin(), nvec.end());
    return out;
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

bool needs_nmf(ClassifierKind k) { return k != ClassifierKind::HaralickOnly; }

}  // namespace

LoocvResult loocv(const std::vector<LabeledImage>& dataset, const EvalConfig& cfg) {
    const int n = static_cast<int>(dataset.size());
    if (n < 3) throw ValidationError("leave-one-out needs at least 3 samples");
    int pos = 0, neg = 0;
    for (const auto& s : dataset) {
        if (s.label == 1)
            ++pos;
        else if (s.label == -1)
            ++neg;
        else
            throw ValidationError("sample " + s.id + " has label outside {-1, +1}");
    }
    if (pos == 0 || neg == 0) throw ValidationError("dataset contains a single class");

    // Per-sample feature vectors involve no fitting, so computing them once
    // up front leaks nothing across folds.
    std::vector<std::vector<double>> hvecs(n);
    std::vector<Eigen::VectorXd> avecs(n);
    for (int i = 0; i < n; ++i) {
        validate_image(dataset[i].image);
        hvecs[i] = haralick_vector_for(dataset[i].image, cfg.features);
        if (needs_nmf(cfg.kind)) avecs[i] = nmf_input_vector(dataset[i].image, cfg.features);
    }

    std::vector<SampleRecord> records(n);

    auto run_fold = [&](int fold) {
        SampleRecord rec;
        rec.id = dataset[fold].id;
        rec.fold = fold;
        rec.truth = dataset[fold].label;

        std::vector<int> train;
        train.reserve(n - 1);
        int train_pos = 0, train_neg = 0;
        for (int t = 0; t < n; ++t) {
            if (t == fold) continue;
            train.push_back(t);
            (dataset[t].label == 1 ? train_pos : train_neg)++;
        }
        if (train_pos == 0 || train_neg == 0) {
            rec.degenerate_fold = true;
            records[fold] = rec;
            return;
        }

        std::vector<int> labels;
        labels.reserve(train.size());
        for (const int t : train) labels.push_back(dataset[t].label);

        // Fold-local NMF refit; the basis never sees the held-out sample.
        std::vector<std::vector<double>> train_w;
        std::vector<double> test_w;
        if (needs_nmf(cfg.kind)) {
            Eigen::MatrixXd A(avecs[fold].size(), static_cast<Eigen::Index>(train.size()));
            for (size_t c = 0; c < train.size(); ++c) A.col(static_cast<Eigen::Index>(c)) = avecs[train[c]];
            NmfConfig ncfg = cfg.nmf;
            ncfg.seed = cfg.seed + static_cast<std::uint64_t>(fold);
            const NmfResult fit = nmf_factorize(A, ncfg);
            train_w.reserve(train.size());
            for (size_t c = 0; c < train.size(); ++c)
                train_w.push_back(to_std(fit.weights.col(static_cast<Eigen::Index>(c))));
            test_w = to_std(
                nmf_encode(fit.model, avecs[fold], cfg.encode.max_iters, cfg.encode.rel_tol));
        }

        switch (cfg.kind) {
            case ClassifierKind::HaralickOnly: {
                TrainingSet ts;
                for (const int t : train) ts.x.push_back(hvecs[t]);
                ts.y = labels;
                const SvmModel m = train_svm_standardized(ts, cfg.kernel_haralick, cfg.c_box);
                rec.score_haralick = score(m, hvecs[fold]);
                rec.prediction = rec.score_haralick >= 0.0 ? 1 : -1;
                break;
            }
            case ClassifierKind::NmfOnly: {
                TrainingSet ts;
                ts.x = train_w;
                ts.y = labels;
                const SvmModel m = train_svm_standardized(ts, cfg.kernel_nmf, cfg.c_box);
                rec.score_nmf = score(m, test_w);
                rec.prediction = rec.score_nmf >= 0.0 ? 1 : -1;
                break;
            }
            case ClassifierKind::Concatenated: {
                TrainingSet ts;
                for (size_t c = 0; c < train.size(); ++c)
                    ts.x.push_back(concat_features(hvecs[train[c]], train_w[c]));
                ts.y = labels;
                const SvmModel m = train_svm_standardized(ts, cfg.kernel_haralick, cfg.c_box);
                const double s = score(m, concat_features(hvecs[fold], test_w));
                rec.score_haralick = s;  // single joint model, reported on the first channel
                rec.prediction = s >= 0.0 ? 1 : -1;
                break;
            }
            case ClassifierKind::MultiLevel: {
                TrainingSet th, tn_;
                for (const int t : train) th.x.push_back(hvecs[t]);
                th.y = labels;
                tn_.x = train_w;
                tn_.y = labels;
                FusionModel fm;
                fm.haralick_model = train_svm_standardized(th, cfg.kernel_haralick, cfg.c_box);
                fm.nmf_model = train_svm_standardized(tn_, cfg.kernel_nmf, cfg.c_box);
                fm.features = cfg.features;
                fm.encode = cfg.encode;
                const FusionDecision d = classify_features(fm, hvecs[fold], test_w);
                rec.score_haralick = d.score_haralick;
                rec.score_nmf = d.score_nmf;
                rec.winner = d.winner;
                rec.prediction = d.label;
                break;
            }
        }
        records[fold] = rec;
    };

    const int jobs = std::max(1, std::min(cfg.jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) run_fold(i);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mu;
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        run_fold(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mu);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    // Deterministic merge in fold order, independent of job count.
    LoocvResult result;
    result.records = std::move(records);
    for (const auto& rec : result.records) {
        if (rec.degenerate_fold)
            ++result.degenerate_folds;
        else
            result.cm.add(rec.truth, rec.prediction);
    }
    return result;
}

}  // namespace texturekit
