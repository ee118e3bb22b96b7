#pragma once

#include "texturekit/image.hpp"
#include "texturekit/nmf.hpp"
#include "texturekit/svm.hpp"

namespace texturekit {

/// Feature-pipeline parameters shared by training and classification.
struct FeatureConfig {
    int levels = 16;    // gray levels for the GLCM path
    int distance = 1;   // co-occurrence offset distance
    int nmf_size = 64;  // images are area-resized to nmf_size^2 before encoding
};

struct EncodeConfig {
    int max_iters = 2000;
    double rel_tol = 1e-10;
};

enum class Winner { Haralick, Nmf };

const char* winner_name(Winner w);

struct FusionDecision {
    int label = 0;  // -1 / +1
    Winner winner = Winner::Haralick;
    double score_haralick = 0.0;
    double score_nmf = 0.0;
};

/// Two independently trained SVMs plus the NMF encoder they were trained
/// with. The prediction of the model with the larger |score| wins; exact
/// ties go to Haralick.
struct FusionModel {
    SvmModel haralick_model;
    SvmModel nmf_model;
    NmfModel basis;
    FeatureConfig features;
    EncodeConfig encode;
};

/// Raw Haralick-28 vector for an image under the given pipeline config.
std::vector<double> haralick_vector_for(const GrayImage& img, const FeatureConfig& cfg);

/// Downsampled, flattened pixel vector fed to the NMF encoder.
Eigen::VectorXd nmf_input_vector(const GrayImage& img, const FeatureConfig& cfg);

FusionDecision classify(const FusionModel& fm, const GrayImage& img);

/// Same rule starting from precomputed raw feature vectors (each model
/// applies its own standardizer).
FusionDecision classify_features(const FusionModel& fm, const std::vector<double>& hvec,
                                 const std::vector<double>& nvec);

}  // namespace texturekit
