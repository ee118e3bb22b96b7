#include "texturekit/fusion.hpp"

#include <cmath>
#include <string>

#include "texturekit/errors.hpp"
#include "texturekit/haralick.hpp"
#include "texturekit/preprocess.hpp"

namespace texturekit {

const char* winner_name(Winner w) { return w == Winner::Haralick ? "haralick" : "nmf"; }

std::vector<double> haralick_vector_for(const GrayImage& img, const FeatureConfig& cfg) {
    const QuantizedImage q = quantize(img, cfg.levels);
    return haralick28(q, cfg.distance).to_vector();
}

Eigen::VectorXd nmf_input_vector(const GrayImage& img, const FeatureConfig& cfg) {
    if (cfg.nmf_size < 1) throw ValidationError("nmf_size must be >= 1");
    const GrayImage small = resize_area(img, cfg.nmf_size, cfg.nmf_size);
    Eigen::VectorXd v(small.size());
    for (size_t i = 0; i < small.size(); ++i) v[static_cast<Eigen::Index>(i)] = small.pixels[i];
    return v;
}

FusionDecision classify_features(const FusionModel& fm, const std::vector<double>& hvec,
                                 const std::vector<double>& nvec) {
    const double sh = score(fm.haralick_model, hvec);
    const double sn = score(fm.nmf_model, nvec);
    if (!std::isfinite(sh))
        throw NumericError("non-finite score in the co-occurrence pipeline");
    if (!std::isfinite(sn)) throw NumericError("non-finite score in the basis pipeline");

    FusionDecision d;
    d.score_haralick = sh;
    d.score_nmf = sn;
    // Larger geometric distance wins; ties (within fp noise) stay with the
    // co-occurrence model.
    d.winner = (std::abs(sn) - std::abs(sh) > 1e-12) ? Winner::Nmf : Winner::Haralick;
    const double s = d.winner == Winner::Haralick ? sh : sn;
    d.label = s >= 0.0 ? 1 : -1;
    return d;
}

FusionDecision classify(const FusionModel& fm, const GrayImage& img) {
    validate_image(img);
    const std::vector<double> hvec = haralick_vector_for(img, fm.features);
    const Eigen::VectorXd a = nmf_input_vector(img, fm.features);
    const Eigen::VectorXd w = nmf_encode(fm.basis, a, fm.encode.max_iters, fm.encode.rel_tol);
    return classify_features(fm, hvec, std::vector<double>(w.data(), w.data() + w.size()));
}

}  // namespace texturekit
