#include "texturekit/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "texturekit/dataset.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/eval.hpp"
#include "texturekit/fusion.hpp"
#include "texturekit/glcm.hpp"
#include "texturekit/haralick.hpp"
#include "texturekit/modelio.hpp"
#include "texturekit/nmf.hpp"
#include "texturekit/preprocess.hpp"
#include "texturekit/svm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace texturekit {

namespace {

// --- config file support -----------------------------------------------------

std::string config_scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ValidationError("config values must be scalars or arrays of scalars");
}

void add_config_option(CLI::App* sub) {
    sub->add_option("--config", "flat JSON object providing defaults for unset flags");
}

/// CLI11 only reads config files on the app that starts the parse, so each
/// subcommand's --config is spliced into the raw argument list instead.
/// Explicit flags always win; keys the subcommand does not define are ignored
/// so one config can serve several subcommands.
void apply_config_defaults(const CLI::App& app, std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return;

    const CLI::App* sub = nullptr;
    for (const std::string& a : args) {
        if (!a.empty() && a[0] != '-') {
            sub = app.get_subcommand_no_throw(a);
            break;
        }
    }
    if (sub == nullptr) return;

    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object");

    for (const auto& [key, value] : j.items()) {
        if (key == "config") continue;
        const std::string flag = "--" + key;
        if (sub->get_option_no_throw(flag) == nullptr) continue;
        bool given = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                given = true;
                break;
            }
        if (given) continue;
        if (value.is_array())
            for (const auto& e : value) args.push_back(flag + "=" + config_scalar(e));
        else
            args.push_back(flag + "=" + config_scalar(value));
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("TEXTUREKIT_SEED");
    if (s == nullptr || *s == '\0') return std::nullopt;
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (*s == '-' || used != std::string(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("TEXTUREKIT_SEED must be an unsigned integer");
    }
}

// --- shared helpers ------------------------------------------------------------

KernelSpec make_kernel(const std::string& name, double sigma, double mlp_a, double mlp_b) {
    if (name == "linear") return KernelSpec::linear();
    if (name == "rbf") return KernelSpec::rbf(sigma);
    if (name == "mlp" || name == "sigmoid") return KernelSpec::sigmoid(mlp_a, mlp_b);
    throw ValidationError("unknown kernel: " + name + " (expected linear|rbf|mlp)");
}

json kernel_config_json(const KernelSpec& k) {
    json j{{"kind", kernel_name(k)}};
    if (k.kind == KernelSpec::Kind::Rbf) j["sigma"] = k.sigma;
    if (k.kind == KernelSpec::Kind::Sigmoid) {
        j["a"] = k.a;
        j["b"] = k.b;
    }
    return j;
}

GrayImage levels_to_gray(const QuantizedImage& q) {
    GrayImage img(q.width, q.height);
    const double denom = q.levels > 1 ? q.levels - 1.0 : 1.0;
    for (size_t i = 0; i < q.data.size(); ++i) img.pixels[i] = q.data[i] / denom;
    return img;
}

bool has_image_suffix(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pgm" || ext == ".png";
}

/// Samples named either by a manifest CSV or by globbing a directory.
std::vector<std::pair<ManifestEntry, GrayImage>> load_samples(const std::string& data) {
    std::vector<ManifestEntry> entries;
    fs::path base;
    if (fs::is_directory(data)) {
        const fs::path manifest = fs::path(data) / "manifest.csv";
        if (fs::exists(manifest)) {
            entries = read_dataset_manifest(manifest.string());
            base = manifest.parent_path();
        } else {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(data))
                if (e.is_regular_file() && has_image_suffix(e.path())) files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files)
                entries.push_back({f.stem().string(), f.filename().string(), 0});
            base = data;
        }
    } else if (fs::exists(data)) {
        entries = read_dataset_manifest(data);
        base = fs::path(data).parent_path();
    } else {
        throw IoError("no such file or directory: " + data);
    }
    if (entries.empty()) throw ValidationError("no samples found in " + data);

    std::vector<std::pair<ManifestEntry, GrayImage>> out;
    out.reserve(entries.size());
    for (const auto& e : entries)
        out.emplace_back(e, read_image((base / e.path).string()));
    return out;
}

std::vector<LabeledImage> load_labeled_dataset(const std::string& data) {
    std::vector<LabeledImage> out;
    for (auto& [entry, img] : load_samples(data)) {
        if (entry.label != 1 && entry.label != -1)
            throw ValidationError("sample " + entry.id +
                                  " has no label; labeled manifest.csv required");
        out.push_back({entry.id, std::move(img), entry.label});
    }
    return out;
}

int infer_square_side(int rows, const char* what) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows))));
    if (side * side != rows)
        throw ValidationError(std::string(what) + " length " + std::to_string(rows) +
                              " is not a perfect square");
    return side;
}

std::string format_metric(const std::optional<double>& v) {
    if (!v.has_value()) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

void print_report_table(const std::vector<ClassifierReport>& entries) {
    std::printf("%-12s %4s %4s %4s %4s %10s %10s %10s\n", "classifier", "tp", "tn", "fp", "fn",
                "sn", "sp", "ac");
    for (const auto& r : entries) {
        std::printf("%-12s %4lld %4lld %4lld %4lld %10s %10s %10s\n", r.classifier.c_str(),
                    r.cm.tp, r.cm.tn, r.cm.fp, r.cm.fn, format_metric(r.m.sensitivity).c_str(),
                    format_metric(r.m.specificity).c_str(),
                    format_metric(r.m.accuracy).c_str());
        if (r.degenerate_folds > 0)
            std::printf("%-12s (%d degenerate folds excluded)\n", "", r.degenerate_folds);
    }
}

std::string xml_comment_safe(std::string s) {
    size_t pos = 0;
    while ((pos = s.find("--", pos)) != std::string::npos) s.replace(pos, 2, "- -");
    return s;
}

/// Grouped SN/SP/AC bar chart, one group per classifier.
std::string bar_chart_svg(const std::vector<ClassifierReport>& entries,
                          const RunManifest* manifest) {
    constexpr int kBarW = 26, kGap = 8, kGroupGap = 42;
    constexpr int kLeft = 64, kTop = 40, kPlotH = 240, kBottom = 64;
    const int group_w = 3 * kBarW + 2 * kGap;
    const int width =
        kLeft + static_cast<int>(entries.size()) * (group_w + kGroupGap) + 24;
    const int height = kTop + kPlotH + kBottom;
    const char* colors[3] = {"#4e79a7", "#f28e2b", "#59a14c"};
    const char* names[3] = {"SN", "SP", "AC"};

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    if (manifest != nullptr)
        s << "<!-- manifest: " << xml_comment_safe(manifest_json(*manifest).dump())
          << " -->\n";
    s << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    for (int tick = 0; tick <= 100; tick += 25) {
        const double y = kTop + kPlotH - kPlotH * tick / 100.0;
        s << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << width - 16
          << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
          << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" << tick
          << "</text>\n";
    }

    for (size_t g = 0; g < entries.size(); ++g) {
        const int x0 = kLeft + static_cast<int>(g) * (group_w + kGroupGap) + kGroupGap / 2;
        const std::optional<double> vals[3] = {entries[g].m.sensitivity,
                                               entries[g].m.specificity,
                                               entries[g].m.accuracy};
        for (int b = 0; b < 3; ++b) {
            const int x = x0 + b * (kBarW + kGap);
            if (vals[b].has_value()) {
                const double h = kPlotH * (*vals[b]) / 100.0;
                s << "<rect x=\"" << x << "\" y=\"" << kTop + kPlotH - h << "\" width=\""
                  << kBarW << "\" height=\"" << h << "\" fill=\"" << colors[b] << "\"/>\n";
                char label[16];
                std::snprintf(label, sizeof label, "%.1f", *vals[b]);
                s << "<text x=\"" << x + kBarW / 2 << "\" y=\"" << kTop + kPlotH - h - 4
                  << "\" font-size=\"10\" text-anchor=\"middle\" font-family=\"sans-serif\">"
                  << label << "</text>\n";
            } else {
                s << "<text x=\"" << x + kBarW / 2 << "\" y=\"" << kTop + kPlotH - 6
                  << "\" font-size=\"10\" text-anchor=\"middle\" "
                     "font-family=\"sans-serif\" fill=\"#999\">n/a</text>\n";
            }
        }
        s << "<text x=\"" << x0 + group_w / 2 << "\" y=\"" << kTop + kPlotH + 18
          << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
          << entries[g].classifier << "</text>\n";
    }

    for (int b = 0; b < 3; ++b) {
        const int x = kLeft + b * 70;
        const int y = height - 26;
        s << "<rect x=\"" << x << "\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\""
          << colors[b] << "\"/>\n";
        s << "<text x=\"" << x + 18 << "\" y=\"" << y
          << "\" font-size=\"12\" font-family=\"sans-serif\">" << names[b] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

ClassifierReport make_classifier_report(const std::string& name, const LoocvResult& r) {
    ClassifierReport rep;
    rep.classifier = name;
    rep.cm = r.cm;
    rep.m = metrics(r.cm);
    rep.degenerate_folds = r.degenerate_folds;
    return rep;
}

std::string relative_to(const std::string& target, const fs::path& base_dir) {
    std::error_code ec;
    const fs::path rel = fs::relative(fs::absolute(target), fs::absolute(base_dir), ec);
    if (ec || rel.empty()) return target;
    return rel.string();
}

// --- subcommands ---------------------------------------------------------------

struct PreprocessOpts {
    std::string in, out;
    double top_fraction = 0.001;
    double sigma_s = 2.0;
    double sigma_r = 0.1;
    int levels = 16;
};

void run_preprocess(const PreprocessOpts& o) {
    if (o.levels == 1 || o.levels < 0)
        throw ValidationError("--levels must be >= 2, or 0 for continuous output");
    const GrayImage raw = read_image(o.in);
    const GrayImage normalized = normalize_intensity(raw, o.top_fraction);
    const GrayImage smooth =
        bilateral_filter(normalized, o.sigma_s, o.sigma_r, default_bilateral_radius(o.sigma_s));

    const json cfg{{"top_fraction", o.top_fraction},
                   {"sigma_s", o.sigma_s},
                   {"sigma_r", o.sigma_r},
                   {"levels", o.levels}};
    const RunManifest m = make_manifest("preprocess", cfg, {o.in});
    const std::string comment = "manifest: " + manifest_json(m).dump();

    if (o.levels == 0) {
        write_pgm(smooth, o.out, 65535, comment);
    } else {
        write_pgm(levels_to_gray(quantize(smooth, o.levels)), o.out, o.levels - 1, comment);
    }
    std::printf("wrote %s (%dx%d, %s)\n", o.out.c_str(), smooth.width, smooth.height,
                o.levels == 0 ? "continuous" : (std::to_string(o.levels) + " levels").c_str());
}

struct GlcmOpts {
    std::string in, out, direction = "h";
    int levels = 16;
    int distance = 1;
};

void run_glcm(const GlcmOpts& o) {
    const GrayImage img = read_image(o.in);
    const QuantizedImage q = quantize(img, o.levels);
    const Glcm g = compute_glcm(q, parse_direction(o.direction), o.distance);

    const json cfg{{"direction", o.direction}, {"levels", o.levels}, {"distance", o.distance}};
    const RunManifest m = make_manifest("glcm", cfg, {o.in});
    std::ostringstream out;
    out << "# manifest: " << manifest_json(m).dump() << '\n';
    for (int i = 0; i < g.levels; ++i) {
        for (int j = 0; j < g.levels; ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", g.prob(i, j));
            out << (j > 0 ? "," : "") << buf;
        }
        out << '\n';
    }
    atomic_write_text(o.out, out.str());
    std::printf("wrote %s (%dx%d matrix, %lld pairs)\n", o.out.c_str(), g.levels, g.levels,
                static_cast<long long>(g.total));
}

struct ExtractOpts {
    std::string in, out, features = "haralick", model;
    int levels = 16;
    int distance = 1;
};

void run_extract(const ExtractOpts& o) {
    const auto samples = load_samples(o.in);
    FeatureTable table;
    for (const auto& [entry, img] : samples) {
        table.ids.push_back(entry.id);
        table.labels.emplace_back(entry.label == 0 ? std::nullopt
                                                   : std::optional<int>(entry.label));
    }

    FeatureConfig fc;
    fc.levels = o.levels;
    fc.distance = o.distance;
    json cfg{{"in", o.in},
             {"features", o.features},
             {"levels", o.levels},
             {"distance", o.distance}};
    std::vector<std::string> inputs{};

    if (o.features == "haralick") {
        table.columns = haralick_column_names();
        for (const auto& [entry, img] : samples)
            table.rows.push_back(haralick_vector_for(img, fc));
    } else if (o.features == "nmf") {
        if (o.model.empty()) throw ValidationError("--features nmf requires --model");
        const NmfModel model = load_nmf(o.model);
        fc.nmf_size = infer_square_side(model.rows(), "basis rows");
        table.columns = nmf_column_names(model.rank());
        for (const auto& [entry, img] : samples) {
            const Eigen::VectorXd w = nmf_encode(model, nmf_input_vector(img, fc));
            table.rows.emplace_back(w.data(), w.data() + w.size());
        }
        cfg["model"] = o.model;
        inputs.push_back(o.model);
    } else {
        throw ValidationError("--features must be haralick or nmf, got " + o.features);
    }

    const RunManifest m = make_manifest("extract", cfg, inputs);
    write_feature_csv(table, o.out, &m);
    std::printf("wrote %s (%zu samples, %zu features)\n", o.out.c_str(), table.ids.size(),
                table.columns.size());
}

struct NmfTrainOpts {
    std::string in, out;
    int rank = 8;
    int size = 64;
    int max_iters = 500;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
};

/// A .csv input is either a dataset manifest (images) or a feature table;
/// the header tells them apart.
bool is_dataset_manifest(const std::string& path) {
    std::istringstream ss(read_text_file(path));
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        return line == "sample_id,path,label";
    }
    return false;
}

void run_nmf_train(const NmfTrainOpts& o) {
    Eigen::MatrixXd A;
    const bool feature_csv = !fs::is_directory(o.in) && fs::exists(o.in) &&
                             fs::path(o.in).extension() == ".csv" && !is_dataset_manifest(o.in);
    if (feature_csv) {
        const FeatureTable table = read_feature_csv(o.in);
        if (table.rows.empty()) throw ValidationError(o.in + ": no feature rows");
        A.resize(static_cast<Eigen::Index>(table.columns.size()),
                 static_cast<Eigen::Index>(table.rows.size()));
        for (size_t c = 0; c < table.rows.size(); ++c)
            for (size_t r = 0; r < table.columns.size(); ++r)
                A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    table.rows[c][r];
    } else {
        const auto samples = load_samples(o.in);
        FeatureConfig fc;
        fc.nmf_size = o.size;
        A.resize(static_cast<Eigen::Index>(o.size) * o.size,
                 static_cast<Eigen::Index>(samples.size()));
        for (size_t c = 0; c < samples.size(); ++c)
            A.col(static_cast<Eigen::Index>(c)) = nmf_input_vector(samples[c].second, fc);
    }

    NmfConfig cfg;
    cfg.rank = o.rank;
    cfg.max_iters = o.max_iters;
    cfg.rel_tol = o.rel_tol;
    cfg.seed = o.seed;
    const NmfResult result = nmf_factorize(A, cfg);

    const json jcfg{{"rank", o.rank},     {"size", o.size}, {"max_iters", o.max_iters},
                    {"rel_tol", o.rel_tol}, {"seed", o.seed}, {"in", o.in}};
    const RunManifest m = make_manifest("nmf-train", jcfg, {});
    save_nmf(result.model, o.out, &m);
    std::printf("wrote %s (rank %d, %lld samples, %zu iterations, residual %.6g)\n",
                o.out.c_str(), result.model.rank(), static_cast<long long>(A.cols()),
                result.objective_trace.size(), result.model.train_residual);
}

struct SvmTrainOpts {
    std::string features, out, kernel = "linear";
    double sigma = 40.0;
    double mlp_a = 1.0;
    double mlp_b = -9.0;
    double c = 1.0;
    double tol = 1e-3;
};

void run_svm_train(const SvmTrainOpts& o) {
    const FeatureTable table = read_feature_csv(o.features);
    TrainingSet data;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        if (!table.labels[i].has_value())
            throw ValidationError("sample " + table.ids[i] + " has no label");
        data.x.push_back(table.rows[i]);
        data.y.push_back(*table.labels[i]);
    }
    const KernelSpec kernel = make_kernel(o.kernel, o.sigma, o.mlp_a, o.mlp_b);
    const SvmModel model = train_svm_standardized(data, kernel, o.c, o.tol);

    const json cfg{{"kernel", kernel_config_json(kernel)}, {"c", o.c}, {"tol", o.tol}};
    const RunManifest m = make_manifest("svm-train", cfg, {o.features});
    save_svm(model, o.out, &m);
    std::printf("wrote %s (%zu SVs of %zu samples, |w| = %.6g%s)\n", o.out.c_str(),
                model.support_vectors.size(), data.size(), model.w_norm,
                model.kernel_warning ? ", kernel warning" : "");
}

struct FuseOpts {
    std::string haralick, nmf_svm, basis, out;
    int levels = 16;
    int distance = 1;
    int size = 0;  // 0 = infer from the basis
    int encode_iters = 2000;
    double encode_tol = 1e-10;
};

void run_fuse(const FuseOpts& o) {
    const fs::path bundle_dir = fs::path(o.out).parent_path();
    FusionBundleRefs refs;
    refs.haralick_model_path = relative_to(o.haralick, bundle_dir);
    refs.nmf_model_path = relative_to(o.nmf_svm, bundle_dir);
    refs.nmf_basis_path = relative_to(o.basis, bundle_dir);
    refs.features.levels = o.levels;
    refs.features.distance = o.distance;
    refs.features.nmf_size =
        o.size > 0 ? o.size : infer_square_side(load_nmf(o.basis).rows(), "basis rows");
    refs.encode.max_iters = o.encode_iters;
    refs.encode.rel_tol = o.encode_tol;

    const json cfg{{"levels", o.levels},
                   {"distance", o.distance},
                   {"nmf_size", refs.features.nmf_size},
                   {"encode_iters", o.encode_iters},
                   {"encode_tol", o.encode_tol}};
    const RunManifest m = make_manifest("fuse", cfg, {o.haralick, o.nmf_svm, o.basis});
    save_fusion_bundle(refs, o.out, &m);
    std::printf("wrote %s\n", o.out.c_str());
}

struct ClassifyOpts {
    std::string fusion, in;
};

void run_classify(const ClassifyOpts& o) {
    const FusionModel fm = load_fusion_bundle(o.fusion);
    const GrayImage img = read_image(o.in);
    const FusionDecision d = classify(fm, img);
    std::printf("label %+d (%s)\n", d.label, d.label == 1 ? "stroke" : "nonstroke");
    std::printf("winner %s\n", winner_name(d.winner));
    std::printf("score_haralick %+.6f\n", d.score_haralick);
    std::printf("score_nmf %+.6f\n", d.score_nmf);
}

struct LoocvOpts {
    std::string data, classifier = "multilevel", kernel = "linear", kernel_nmf;
    std::string report_path, records_path, plot_path;
    double sigma = 40.0;
    double mlp_a = 1.0;
    double mlp_b = -9.0;
    double c = 1.0;
    int rank = 8;
    int nmf_iters = 500;
    double nmf_tol = 1e-6;
    int levels = 16;
    int distance = 1;
    int size = 64;
    std::uint64_t seed = 0;
    int jobs = 1;
};

void run_loocv(const LoocvOpts& o) {
    const std::vector<LabeledImage> dataset = load_labeled_dataset(o.data);

    EvalConfig cfg;
    cfg.kernel_haralick = make_kernel(o.kernel, o.sigma, o.mlp_a, o.mlp_b);
    cfg.kernel_nmf = o.kernel_nmf.empty() ? cfg.kernel_haralick
                                          : make_kernel(o.kernel_nmf, o.sigma, o.mlp_a, o.mlp_b);
    cfg.c_box = o.c;
    cfg.nmf.rank = o.rank;
    cfg.nmf.max_iters = o.nmf_iters;
    cfg.nmf.rel_tol = o.nmf_tol;
    cfg.features.levels = o.levels;
    cfg.features.distance = o.distance;
    cfg.features.nmf_size = o.size;
    cfg.seed = o.seed;
    cfg.jobs = o.jobs;

    std::vector<ClassifierKind> kinds;
    if (o.classifier == "all")
        kinds = {ClassifierKind::HaralickOnly, ClassifierKind::NmfOnly,
                 ClassifierKind::Concatenated, ClassifierKind::MultiLevel};
    else
        kinds = {parse_classifier_kind(o.classifier)};

    std::vector<ClassifierReport> reports;
    LoocvResult primary_result;
    for (const ClassifierKind kind : kinds) {
        cfg.kind = kind;
        LoocvResult r = loocv(dataset, cfg);
        reports.push_back(make_classifier_report(classifier_kind_name(kind), r));
        if (kind == kinds.back()) primary_result = std::move(r);
    }
    const ClassifierReport& primary = reports.back();

    print_report_table(reports);

    const json config{{"classifier", o.classifier},
                      {"kernel", kernel_config_json(cfg.kernel_haralick)},
                      {"kernel_nmf", kernel_config_json(cfg.kernel_nmf)},
                      {"c", o.c},
                      {"nmf", {{"rank", o.rank}, {"max_iters", o.nmf_iters}, {"rel_tol", o.nmf_tol}}},
                      {"features",
                       {{"levels", o.levels}, {"distance", o.distance}, {"nmf_size", o.size}}},
                      {"seed", o.seed},
                      {"jobs", o.jobs},
                      {"n_samples", dataset.size()},
                      {"standardization", "per-fold z-score"},
                      {"nmf_refit", "per-fold, seed + fold_index"}};
    const RunManifest m = make_manifest("loocv", config, {});

    if (!o.report_path.empty()) {
        const std::vector<ClassifierReport> comparison =
            reports.size() > 1 ? reports : std::vector<ClassifierReport>{};
        save_report(report_payload(primary, comparison, config), o.report_path, &m);
        std::printf("wrote %s\n", o.report_path.c_str());
    }
    if (!o.records_path.empty()) {
        write_records_csv(primary_result.records, o.records_path, &m);
        std::printf("wrote %s\n", o.records_path.c_str());
    }
    if (!o.plot_path.empty()) {
        atomic_write_text(o.plot_path, bar_chart_svg(reports, &m));
        std::printf("wrote %s\n", o.plot_path.c_str());
    }
}

struct SynthOpts {
    std::string out;
    int n = 10;
    int size = 128;
    double difficulty = 0.0;
    std::uint64_t seed = 42;
};

void run_synth(const SynthOpts& o) {
    SynthConfig cfg;
    cfg.n_per_class = o.n;
    cfg.size = o.size;
    cfg.difficulty = o.difficulty;
    cfg.seed = o.seed;
    const std::vector<LabeledImage> images = generate(cfg);

    const json jcfg{{"n_per_class", o.n},
                    {"size", o.size},
                    {"difficulty", o.difficulty},
                    {"seed", o.seed}};
    const RunManifest m = make_manifest("synth", jcfg, {});
    const std::string comment = "manifest: " + manifest_json(m).dump();

    std::vector<ManifestEntry> entries;
    for (const auto& img : images) {
        const std::string name = img.id + ".pgm";
        write_pgm(img.image, (fs::path(o.out) / name).string(), 65535, comment);
        entries.push_back({img.id, name, img.label});
    }
    write_dataset_manifest(entries, (fs::path(o.out) / "manifest.csv").string());
    std::printf("wrote %zu images and manifest.csv to %s\n", images.size(), o.out.c_str());
}

struct MetricsOpts {
    long long tp = 0, tn = 0, fp = 0, fn = 0;
};

void run_metrics(const MetricsOpts& o) {
    if (o.tp < 0 || o.tn < 0 || o.fp < 0 || o.fn < 0)
        throw ValidationError("confusion counts must be non-negative");
    ConfusionMatrix cm;
    cm.tp = o.tp;
    cm.tn = o.tn;
    cm.fp = o.fp;
    cm.fn = o.fn;
    const Metrics m = metrics(cm);
    std::printf("sn %s\n", format_metric(m.sensitivity).c_str());
    std::printf("sp %s\n", format_metric(m.specificity).c_str());
    std::printf("ac %s\n", format_metric(m.accuracy).c_str());
}

struct ReportOpts {
    std::string records, report, plot, out;
};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

ClassifierReport report_from_records(const std::string& path) {
    std::istringstream ss(read_text_file(path));
    std::string line;
    std::vector<std::string> header;
    ConfusionMatrix cm;
    int degenerate = 0;
    int truth_col = -1, pred_col = -1, degen_col = -1;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const std::vector<std::string> parts = split_line(line);
        if (header.empty()) {
            header = parts;
            for (size_t i = 0; i < header.size(); ++i) {
                if (header[i] == "truth") truth_col = static_cast<int>(i);
                if (header[i] == "prediction") pred_col = static_cast<int>(i);
                if (header[i] == "degenerate_fold") degen_col = static_cast<int>(i);
            }
            if (truth_col < 0 || pred_col < 0)
                throw ValidationError(path + ": records header needs truth and prediction");
            continue;
        }
        if (parts.size() != header.size())
            throw ValidationError(path + ": ragged records row");
        if (degen_col >= 0 && parts[degen_col] == "1") {
            ++degenerate;
            continue;
        }
        try {
            cm.add(std::stoi(parts[truth_col]), std::stoi(parts[pred_col]));
        } catch (const std::invalid_argument&) {
            throw ValidationError(path + ": bad truth/prediction value");
        }
    }
    if (header.empty()) throw ValidationError(path + ": empty records CSV");
    ClassifierReport rep;
    rep.classifier = "records";
    rep.cm = cm;
    rep.m = metrics(cm);
    rep.degenerate_folds = degenerate;
    return rep;
}

std::vector<ClassifierReport> reports_from_report_json(const std::string& path) {
    const json p = load_report(path);
    auto parse_entry = [](const json& j) {
        ClassifierReport r;
        r.classifier = j.at("classifier").get<std::string>();
        const json& cm = j.at("confusion");
        r.cm.tp = cm.at("tp").get<long long>();
        r.cm.tn = cm.at("tn").get<long long>();
        r.cm.fp = cm.at("fp").get<long long>();
        r.cm.fn = cm.at("fn").get<long long>();
        r.m = metrics(r.cm);
        r.degenerate_folds = j.value("degenerate_folds", 0);
        return r;
    };
    std::vector<ClassifierReport> out;
    if (p.contains("comparison"))
        for (const auto& e : p["comparison"]) out.push_back(parse_entry(e));
    else
        out.push_back(parse_entry(p));
    return out;
}

void run_report(const ReportOpts& o) {
    if (o.records.empty() == o.report.empty())
        throw ValidationError("pass exactly one of --records or --report");
    const std::vector<ClassifierReport> entries =
        o.records.empty() ? reports_from_report_json(o.report)
                          : std::vector<ClassifierReport>{report_from_records(o.records)};
    print_report_table(entries);
    if (!o.plot.empty()) {
        atomic_write_text(o.plot, bar_chart_svg(entries, nullptr));
        std::printf("wrote %s\n", o.plot.c_str());
    }
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"GLCM texture features, NMF weights, and multi-level SVM fusion"};
    app.name("texturekit");
    app.require_subcommand(1);

    // Resolved before option registration because it provides seed defaults;
    // a malformed value must still exit like any other validation error.
    std::optional<std::uint64_t> seed_env;
    try {
        seed_env = env_seed();
    } catch (const ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << '\n';
        return kExitValidation;
    }

    // preprocess
    auto pre = std::make_shared<PreprocessOpts>();
    {
        CLI::App* sub = app.add_subcommand("preprocess", "Normalize, smooth, and quantize an image");
        sub->add_option("--in", pre->in, "input image (PGM or PNG)")->required();
        sub->add_option("--out", pre->out, "output PGM")->required();
        sub->add_option("--top-fraction", pre->top_fraction,
                        "fraction of brightest pixels defining the intensity reference");
        sub->add_option("--sigma-s", pre->sigma_s, "bilateral spatial sigma (pixels)");
        sub->add_option("--sigma-r", pre->sigma_r, "bilateral range sigma (intensity)");
        sub->add_option("--levels", pre->levels, "gray levels; 0 writes continuous 16-bit");
        add_config_option(sub);
        sub->callback([pre] { run_preprocess(*pre); });
    }

    // glcm
    auto glc = std::make_shared<GlcmOpts>();
    {
        CLI::App* sub = app.add_subcommand("glcm", "Write one directional co-occurrence matrix as CSV");
        sub->add_option("--in", glc->in, "input image")->required();
        sub->add_option("--direction", glc->direction, "h|v|ld|rd");
        sub->add_option("--levels", glc->levels, "gray levels");
        sub->add_option("--distance", glc->distance, "pair offset distance");
        sub->add_option("--out", glc->out, "output CSV")->required();
        add_config_option(sub);
        sub->callback([glc] { run_glcm(*glc); });
    }

    // extract
    auto ext = std::make_shared<ExtractOpts>();
    {
        CLI::App* sub = app.add_subcommand("extract", "Extract feature vectors to CSV");
        sub->add_option("--in", ext->in, "image file, directory, or manifest.csv")->required();
        sub->add_option("--features", ext->features, "haralick|nmf");
        sub->add_option("--model", ext->model, "NMF basis (.nmf.json) for --features nmf");
        sub->add_option("--levels", ext->levels, "gray levels");
        sub->add_option("--distance", ext->distance, "pair offset distance");
        sub->add_option("--out", ext->out, "output CSV")->required();
        add_config_option(sub);
        sub->callback([ext] { run_extract(*ext); });
    }

    // nmf-train
    auto nmf = std::make_shared<NmfTrainOpts>();
    nmf->seed = seed_env.value_or(0);
    {
        CLI::App* sub = app.add_subcommand("nmf-train", "Factorize training images into a basis");
        sub->add_option("--in", nmf->in, "image directory, manifest.csv, or feature CSV")
            ->required();
        sub->add_option("--rank", nmf->rank, "number of basis columns");
        sub->add_option("--size", nmf->size, "downsample side length for image input");
        sub->add_option("--max-iters", nmf->max_iters, "update iteration cap");
        sub->add_option("--tol", nmf->rel_tol, "relative objective-decrease stop");
        sub->add_option("--seed", nmf->seed, "initialization seed");
        sub->add_option("--out", nmf->out, "output .nmf.json")->required();
        add_config_option(sub);
        sub->callback([nmf] { run_nmf_train(*nmf); });
    }

    // svm-train
    auto svm = std::make_shared<SvmTrainOpts>();
    {
        CLI::App* sub = app.add_subcommand("svm-train", "Train a kernel SVM on a feature CSV");
        sub->add_option("--features", svm->features, "labeled feature CSV")->required();
        sub->add_option("--kernel", svm->kernel, "linear|rbf|mlp");
        sub->add_option("--sigma", svm->sigma, "RBF sigma");
        sub->add_option("--mlp-a", svm->mlp_a, "sigmoid scale");
        sub->add_option("--mlp-b", svm->mlp_b, "sigmoid offset");
        sub->add_option("--c", svm->c, "box constraint");
        sub->add_option("--tol", svm->tol, "KKT stopping tolerance");
        sub->add_option("--out", svm->out, "output .svm.json")->required();
        add_config_option(sub);
        sub->callback([svm] { run_svm_train(*svm); });
    }

    // fuse
    auto fuse = std::make_shared<FuseOpts>();
    {
        CLI::App* sub =
            app.add_subcommand("fuse", "Bundle two SVMs and an NMF basis for classification");
        sub->add_option("--haralick", fuse->haralick, "co-occurrence SVM (.svm.json)")
            ->required();
        sub->add_option("--nmf-svm", fuse->nmf_svm, "weight-vector SVM (.svm.json)")->required();
        sub->add_option("--basis", fuse->basis, "NMF basis (.nmf.json)")->required();
        sub->add_option("--levels", fuse->levels, "gray levels");
        sub->add_option("--distance", fuse->distance, "pair offset distance");
        sub->add_option("--size", fuse->size, "NMF input side length (0 = infer)");
        sub->add_option("--encode-iters", fuse->encode_iters, "encoder iteration cap");
        sub->add_option("--encode-tol", fuse->encode_tol, "encoder stopping tolerance");
        sub->add_option("--out", fuse->out, "output .fusion.json")->required();
        add_config_option(sub);
        sub->callback([fuse] { run_fuse(*fuse); });
    }

    // classify
    auto cls = std::make_shared<ClassifyOpts>();
    {
        CLI::App* sub = app.add_subcommand("classify", "Classify one image with a fusion bundle");
        sub->add_option("--fusion", cls->fusion, "fusion bundle (.fusion.json)")->required();
        sub->add_option("--in", cls->in, "input image")->required();
        add_config_option(sub);
        sub->callback([cls] { run_classify(*cls); });
    }

    // loocv
    auto loo = std::make_shared<LoocvOpts>();
    loo->seed = seed_env.value_or(0);
    {
        CLI::App* sub = app.add_subcommand("loocv", "Leave-one-out evaluation over a dataset");
        sub->add_option("--data", loo->data, "image directory or manifest.csv")->required();
        sub->add_option("--classifier", loo->classifier, "haralick|nmf|concat|multilevel|all");
        sub->add_option("--kernel", loo->kernel, "linear|rbf|mlp");
        sub->add_option("--kernel-nmf", loo->kernel_nmf,
                        "kernel for the weight-vector model (default: same as --kernel)");
        sub->add_option("--sigma", loo->sigma, "RBF sigma");
        sub->add_option("--mlp-a", loo->mlp_a, "sigmoid scale");
        sub->add_option("--mlp-b", loo->mlp_b, "sigmoid offset");
        sub->add_option("--c", loo->c, "box constraint");
        sub->add_option("--rank", loo->rank, "NMF rank");
        sub->add_option("--nmf-iters", loo->nmf_iters, "NMF iteration cap");
        sub->add_option("--nmf-tol", loo->nmf_tol, "NMF stopping tolerance");
        sub->add_option("--levels", loo->levels, "gray levels");
        sub->add_option("--distance", loo->distance, "pair offset distance");
        sub->add_option("--size", loo->size, "NMF input side length");
        sub->add_option("--seed", loo->seed, "base seed (fold f uses seed + f)");
        sub->add_option("--jobs", loo->jobs, "concurrent folds");
        sub->add_option("--report", loo->report_path, "write report JSON here");
        sub->add_option("--records", loo->records_path, "write per-sample records CSV here");
        sub->add_option("--plot", loo->plot_path, "write SN/SP/AC bar chart SVG here");
        add_config_option(sub);
        sub->callback([loo] { run_loocv(*loo); });
    }

    // synth
    auto syn = std::make_shared<SynthOpts>();
    syn->seed = seed_env.value_or(42);
    {
        CLI::App* sub = app.add_subcommand("synth", "Generate a synthetic two-class dataset");
        sub->add_option("--n", syn->n, "images per class");
        sub->add_option("--size", syn->size, "image side length");
        sub->add_option("--difficulty", syn->difficulty, "class overlap in [0, 1]");
        sub->add_option("--seed", syn->seed, "generator seed");
        sub->add_option("--out", syn->out, "output directory")->required();
        add_config_option(sub);
        sub->callback([syn] { run_synth(*syn); });
    }

    // metrics
    auto met = std::make_shared<MetricsOpts>();
    {
        CLI::App* sub = app.add_subcommand("metrics", "SN/SP/AC from confusion counts");
        sub->add_option("--tp", met->tp, "true positives")->required();
        sub->add_option("--tn", met->tn, "true negatives")->required();
        sub->add_option("--fp", met->fp, "false positives")->required();
        sub->add_option("--fn", met->fn, "false negatives")->required();
        add_config_option(sub);
        sub->callback([met] { run_metrics(*met); });
    }

    // report
    auto rep = std::make_shared<ReportOpts>();
    {
        CLI::App* sub =
            app.add_subcommand("report", "Render a records CSV or report JSON as table and chart");
        sub->add_option("--records", rep->records, "per-sample records CSV");
        sub->add_option("--report", rep->report, "report JSON");
        sub->add_option("--plot", rep->plot, "write SN/SP/AC bar chart SVG here");
        add_config_option(sub);
        sub->callback([rep] { run_report(*rep); });
    }

    try {
        std::vector<std::string> merged = args;
        apply_config_defaults(app, merged);
        std::vector<std::string> reversed(merged.rbegin(), merged.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error (I/O): " << e.what() << '\n';
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "error (numeric): " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}

}  // namespace texturekit
