#pragma once

#include <optional>
#include <string>
#include <vector>

#include "texturekit/fusion.hpp"
#include "texturekit/image.hpp"
#include "texturekit/nmf.hpp"
#include "texturekit/svm.hpp"

namespace texturekit {

struct ConfusionMatrix {
    long long tp = 0, tn = 0, fp = 0, fn = 0;

    long long total() const { return tp + tn + fp + fn; }
    void add(int truth, int prediction);
};

/// Percentages; a metric whose denominator is zero is undefined, never 0.
struct Metrics {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> accuracy;
};

Metrics metrics(const ConfusionMatrix& cm);

enum class ClassifierKind { HaralickOnly, NmfOnly, Concatenated, MultiLevel };

const char* classifier_kind_name(ClassifierKind k);
ClassifierKind parse_classifier_kind(const std::string& s);

struct EvalConfig {
    ClassifierKind kind = ClassifierKind::HaralickOnly;
    KernelSpec kernel_haralick;  // HaralickOnly and Concatenated models
    KernelSpec kernel_nmf;       // NmfOnly and the MultiLevel NMF side
    double c_box = 1.0;
    NmfConfig nmf;
    FeatureConfig features;
    EncodeConfig encode;
    std::uint64_t seed = 0;
    int jobs = 1;  // fold-level parallelism; results independent of job count
};

struct LabeledImage {
    std::string id;
    GrayImage image;
    int label = 0;  // -1 / +1
};

struct SampleRecord {
    std::string id;
    int fold = 0;
    int truth = 0;
    int prediction = 0;  // 0 when the fold was degenerate
    double score_haralick = 0.0;
    double score_nmf = 0.0;
    std::optional<Winner> winner;  // MultiLevel only
    bool degenerate_fold = false;
};

struct LoocvResult {
    ConfusionMatrix cm;
    std::vector<SampleRecord> records;
    int degenerate_folds = 0;
};

/// Leave-one-out harness. Every fold refits the full pipeline on its N-1
/// training samples: NMF basis (seeded seed + fold_index), feature
/// standardization, and the SVM(s). Degenerate folds (training split
/// missing a class) are recorded and excluded from the counts.
LoocvResult loocv(const std::vector<LabeledImage>& dataset, const EvalConfig& cfg);

/// Haralick block first, then NMF block, verbatim.
std::vector<double> concat_features(const std::vector<double>& hvec,
                                    const std::vector<double>& nvec);

}  // namespace texturekit
