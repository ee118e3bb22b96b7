#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "texturekit/dataset.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/eval.hpp"
#include "texturekit/fusion.hpp"
#include "texturekit/glcm.hpp"
#include "texturekit/haralick.hpp"
#include "texturekit/nmf.hpp"
#include "texturekit/preprocess.hpp"
#include "texturekit/svm.hpp"

namespace py = pybind11;
using namespace texturekit;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const DoubleArray& a) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-D array");
    GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const double* src = a.data();
    std::copy(src, src + img.size(), img.pixels.begin());
    return img;
}

DoubleArray from_image(const GrayImage& img) {
    DoubleArray a({img.height, img.width});
    std::copy(img.pixels.begin(), img.pixels.end(), a.mutable_data());
    return a;
}

QuantizedImage to_quantized(const IntArray& a, int levels) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-D array");
    QuantizedImage q(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), levels);
    const int* src = a.data();
    std::copy(src, src + q.data.size(), q.data.begin());
    return q;
}

Eigen::MatrixXd to_matrix(const DoubleArray& a) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-D array");
    Eigen::MatrixXd m(a.shape(0), a.shape(1));
    for (py::ssize_t r = 0; r < a.shape(0); ++r)
        for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = a.at(r, c);
    return m;
}

DoubleArray from_matrix(const Eigen::MatrixXd& m) {
    DoubleArray a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    auto buf = a.mutable_unchecked<2>();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) buf(r, c) = m(r, c);
    return a;
}

DoubleArray from_vector(const std::vector<double>& v) {
    // The explicit shape overload derives strides from the element type;
    // the count overload goes through the runtime dtype, which mismatched
    // pybind11/numpy header combinations get wrong.
    DoubleArray a(py::array::ShapeContainer{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

std::vector<double> to_vector(const DoubleArray& a) {
    if (a.ndim() != 1) throw ValidationError("expected a 1-D array");
    return std::vector<double>(a.data(), a.data() + a.shape(0));
}

KernelSpec kernel_from_args(const std::string& kernel, double sigma, double mlp_a,
                            double mlp_b) {
    if (kernel == "linear") return KernelSpec::linear();
    if (kernel == "rbf") return KernelSpec::rbf(sigma);
    if (kernel == "mlp" || kernel == "sigmoid") return KernelSpec::sigmoid(mlp_a, mlp_b);
    throw ValidationError("unknown kernel: " + kernel);
}

py::object opt_to_py(const std::optional<double>& v) {
    return v.has_value() ? py::cast(*v) : py::none();
}

py::dict metrics_dict(const ConfusionMatrix& cm) {
    const Metrics m = metrics(cm);
    py::dict d;
    d["tp"] = cm.tp;
    d["tn"] = cm.tn;
    d["fp"] = cm.fp;
    d["fn"] = cm.fn;
    d["sn"] = opt_to_py(m.sensitivity);
    d["sp"] = opt_to_py(m.specificity);
    d["ac"] = opt_to_py(m.accuracy);
    return d;
}

}  // namespace

PYBIND11_MODULE(texturekit, m) {
    m.doc() = "GLCM texture features, NMF weights, and multi-level SVM fusion";

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    // --- preprocessing -------------------------------------------------------

    m.def(
        "normalize_intensity",
        [](const DoubleArray& img, double top_fraction) {
            return from_image(normalize_intensity(to_image(img), top_fraction));
        },
        py::arg("image"), py::arg("top_fraction") = 0.001);

    m.def(
        "bilateral_filter",
        [](const DoubleArray& img, double sigma_spatial, double sigma_range, int radius) {
            if (radius <= 0) radius = default_bilateral_radius(sigma_spatial);
            return from_image(bilateral_filter(to_image(img), sigma_spatial, sigma_range, radius));
        },
        py::arg("image"), py::arg("sigma_spatial"), py::arg("sigma_range"),
        py::arg("radius") = 0);

    m.def(
        "gaussian_blur",
        [](const DoubleArray& img, double sigma) {
            return from_image(gaussian_blur(to_image(img), sigma));
        },
        py::arg("image"), py::arg("sigma"));

    m.def(
        "quantize",
        [](const DoubleArray& img, int levels) {
            const QuantizedImage q = quantize(to_image(img), levels);
            IntArray a({q.height, q.width});
            std::copy(q.data.begin(), q.data.end(), a.mutable_data());
            return a;
        },
        py::arg("image"), py::arg("levels"));

    // --- GLCM and Haralick ----------------------------------------------------

    m.def(
        "glcm",
        [](const IntArray& levels_img, int levels, const std::string& direction, int distance) {
            const Glcm g =
                compute_glcm(to_quantized(levels_img, levels), parse_direction(direction),
                             distance);
            DoubleArray a({g.levels, g.levels});
            std::copy(g.probs.begin(), g.probs.end(), a.mutable_data());
            return a;
        },
        py::arg("levels_image"), py::arg("levels"), py::arg("direction") = "h",
        py::arg("distance") = 1,
        "Symmetric co-occurrence probability matrix for one direction (h|v|ld|rd).");

    m.def(
        "haralick_features",
        [](const DoubleArray& P) {
            if (P.ndim() != 2 || P.shape(0) != P.shape(1))
                throw ValidationError("expected a square probability matrix");
            const int n = static_cast<int>(P.shape(0));
            std::vector<double> probs(P.data(), P.data() + n * n);
            const HaralickFeatures f = compute_features(probs, n);
            return from_vector(std::vector<double>(f.f.begin(), f.f.end()));
        },
        py::arg("P"), "The 14 statistics of one co-occurrence probability matrix.");

    m.def(
        "haralick28",
        [](const DoubleArray& img, int levels, int distance) {
            FeatureConfig fc;
            fc.levels = levels;
            fc.distance = distance;
            return from_vector(haralick_vector_for(to_image(img), fc));
        },
        py::arg("image"), py::arg("levels") = 16, py::arg("distance") = 1,
        "Mean and range of each statistic over the four directions (28 values).");

    // --- NMF -------------------------------------------------------------------

    m.def(
        "nmf_factorize",
        [](const DoubleArray& A, int rank, int max_iters, double rel_tol, std::uint64_t seed) {
            NmfConfig cfg;
            cfg.rank = rank;
            cfg.max_iters = max_iters;
            cfg.rel_tol = rel_tol;
            cfg.seed = seed;
            const NmfResult r = nmf_factorize(to_matrix(A), cfg);
            return py::make_tuple(from_matrix(r.model.basis), from_matrix(r.weights),
                                  from_vector(r.objective_trace));
        },
        py::arg("A"), py::arg("rank") = 8, py::arg("max_iters") = 500,
        py::arg("rel_tol") = 1e-6, py::arg("seed") = 0,
        "Multiplicative-update factorization; returns (V, H, objective_trace).");

    m.def(
        "nmf_encode",
        [](const DoubleArray& V, const DoubleArray& a, int max_iters, double rel_tol) {
            NmfModel model;
            model.basis = to_matrix(V);
            const std::vector<double> av = to_vector(a);
            const Eigen::VectorXd w = nmf_encode(
                model, Eigen::Map<const Eigen::VectorXd>(av.data(), av.size()), max_iters,
                rel_tol);
            return from_vector(std::vector<double>(w.data(), w.data() + w.size()));
        },
        py::arg("V"), py::arg("a"), py::arg("max_iters") = 2000, py::arg("rel_tol") = 1e-10,
        "Nonnegative encoding of one sample against a fixed basis.");

    // --- SVM --------------------------------------------------------------------

    py::class_<SvmModel>(m, "SvmModel")
        .def_readonly("bias", &SvmModel::bias)
        .def_readonly("w_norm", &SvmModel::w_norm)
        .def_readonly("kernel_warning", &SvmModel::kernel_warning)
        .def_property_readonly(
            "n_support",
            [](const SvmModel& s) { return s.support_vectors.size(); })
        .def("decision_value",
             [](const SvmModel& s, const DoubleArray& x) {
                 return decision_value(s, to_vector(x));
             })
        .def("score", [](const SvmModel& s, const DoubleArray& x) { return score(s, to_vector(x)); })
        .def("predict",
             [](const SvmModel& s, const DoubleArray& x) { return predict(s, to_vector(x)); });

    m.def(
        "train_svm",
        [](const DoubleArray& X, const std::vector<int>& y, const std::string& kernel,
           double sigma, double mlp_a, double mlp_b, double c, double tol, bool standardize) {
            if (X.ndim() != 2) throw ValidationError("X must be 2-D (samples x features)");
            TrainingSet data;
            data.y = y;
            for (py::ssize_t r = 0; r < X.shape(0); ++r)
                data.x.emplace_back(X.data() + r * X.shape(1),
                                    X.data() + (r + 1) * X.shape(1));
            const KernelSpec spec = kernel_from_args(kernel, sigma, mlp_a, mlp_b);
            return standardize ? train_svm_standardized(data, spec, c, tol)
                               : train_svm(data, spec, c, tol);
        },
        py::arg("X"), py::arg("y"), py::arg("kernel") = "linear", py::arg("sigma") = 40.0,
        py::arg("mlp_a") = 1.0, py::arg("mlp_b") = -9.0, py::arg("c") = 1.0,
        py::arg("tol") = 1e-3, py::arg("standardize") = true);

    // --- metrics, data, evaluation -----------------------------------------------

    m.def(
        "metrics",
        [](long long tp, long long tn, long long fp, long long fn) {
            ConfusionMatrix cm;
            cm.tp = tp;
            cm.tn = tn;
            cm.fp = fp;
            cm.fn = fn;
            return metrics_dict(cm);
        },
        py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"),
        "SN/SP/AC percentages; a zero-denominator metric comes back as None.");

    m.def(
        "synth",
        [](int n_per_class, int size, double difficulty, std::uint64_t seed) {
            SynthConfig cfg;
            cfg.n_per_class = n_per_class;
            cfg.size = size;
            cfg.difficulty = difficulty;
            cfg.seed = seed;
            const std::vector<LabeledImage> images = generate(cfg);
            DoubleArray stack({static_cast<py::ssize_t>(images.size()),
                               static_cast<py::ssize_t>(size), static_cast<py::ssize_t>(size)});
            std::vector<int> labels;
            std::vector<std::string> ids;
            double* dst = stack.mutable_data();
            for (const auto& s : images) {
                std::copy(s.image.pixels.begin(), s.image.pixels.end(), dst);
                dst += s.image.size();
                labels.push_back(s.label);
                ids.push_back(s.id);
            }
            return py::make_tuple(stack, labels, ids);
        },
        py::arg("n_per_class") = 10, py::arg("size") = 128, py::arg("difficulty") = 0.0,
        py::arg("seed") = 42, "Synthetic two-class set; returns (images, labels, ids).");

    m.def(
        "loocv",
        [](const DoubleArray& images, const std::vector<int>& labels,
           const std::string& classifier, const std::string& kernel,
           const std::string& kernel_nmf, double sigma, double mlp_a, double mlp_b, double c,
           int rank, int levels, int distance, int size, std::uint64_t seed, int jobs) {
            if (images.ndim() != 3) throw ValidationError("images must be 3-D (n, h, w)");
            if (static_cast<size_t>(images.shape(0)) != labels.size())
                throw ValidationError("images and labels differ in count");
            std::vector<LabeledImage> dataset;
            const py::ssize_t h = images.shape(1), w = images.shape(2);
            for (py::ssize_t i = 0; i < images.shape(0); ++i) {
                LabeledImage s;
                s.id = "s" + std::to_string(i);
                s.image = GrayImage(static_cast<int>(w), static_cast<int>(h));
                const double* src = images.data() + i * h * w;
                std::copy(src, src + h * w, s.image.pixels.begin());
                s.label = labels[static_cast<size_t>(i)];
                dataset.push_back(std::move(s));
            }
            EvalConfig cfg;
            cfg.kind = parse_classifier_kind(classifier);
            cfg.kernel_haralick = kernel_from_args(kernel, sigma, mlp_a, mlp_b);
            cfg.kernel_nmf = kernel_nmf.empty()
                                 ? cfg.kernel_haralick
                                 : kernel_from_args(kernel_nmf, sigma, mlp_a, mlp_b);
            cfg.c_box = c;
            cfg.nmf.rank = rank;
            cfg.features.levels = levels;
            cfg.features.distance = distance;
            cfg.features.nmf_size = size;
            cfg.seed = seed;
            cfg.jobs = jobs;
            const LoocvResult r = loocv(dataset, cfg);

            py::dict out = metrics_dict(r.cm);
            out["degenerate_folds"] = r.degenerate_folds;
            py::list records;
            for (const auto& rec : r.records) {
                py::dict d;
                d["id"] = rec.id;
                d["fold"] = rec.fold;
                d["truth"] = rec.truth;
                d["prediction"] = rec.prediction;
                d["score_haralick"] = rec.score_haralick;
                d["score_nmf"] = rec.score_nmf;
                d["winner"] =
                    rec.winner.has_value() ? py::cast(winner_name(*rec.winner)) : py::none();
                d["degenerate_fold"] = rec.degenerate_fold;
                records.append(std::move(d));
            }
            out["records"] = std::move(records);
            return out;
        },
        py::arg("images"), py::arg("labels"), py::arg("classifier") = "multilevel",
        py::arg("kernel") = "linear", py::arg("kernel_nmf") = "", py::arg("sigma") = 40.0,
        py::arg("mlp_a") = 1.0, py::arg("mlp_b") = -9.0, py::arg("c") = 1.0,
        py::arg("rank") = 8, py::arg("levels") = 16, py::arg("distance") = 1,
        py::arg("size") = 64, py::arg("seed") = 0, py::arg("jobs") = 1,
        "Leave-one-out evaluation; returns confusion counts, metrics, and per-fold records.");
}
