#include "texturekit/modelio.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "texturekit/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace texturekit {

// --- generic plumbing ------------------------------------------------------

std::uint64_t fnv1a64(const void* data, size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

std::string hash_file(const std::string& path) { return fnv1a64_hex(read_text_file(path)); }

void atomic_write_text(const std::string& path, const std::string& content) {
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target.parent_path().string());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path);
}

namespace {

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &now);
#else
    gmtime_r(&now, &tm);
#endif
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const json& field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) throw ValidationError(std::string("missing field: ") + name);
    return *it;
}

double num_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number()) throw ValidationError(std::string("field must be a number: ") + name);
    return v.get<double>();
}

long long int_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ValidationError(std::string("field must be an integer: ") + name);
    return v.get<long long>();
}

std::vector<double> vec_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_array()) throw ValidationError(std::string("field must be an array: ") + name);
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw ValidationError(std::string("field must hold numbers: ") + name);
        const double x = e.get<double>();
        if (!std::isfinite(x))
            throw ValidationError(std::string("field holds a non-finite value: ") + name);
        out.push_back(x);
    }
    return out;
}

}  // namespace

RunManifest make_manifest(const std::string& command, const json& config,
                          const std::vector<std::string>& input_paths) {
    RunManifest m;
    m.command = command;
    m.config_text = config.dump();
    for (const auto& p : input_paths) m.input_hashes.emplace_back(p, hash_file(p));
    m.created = iso8601_utc_now();
    return m;
}

json manifest_json(const RunManifest& m) {
    json j;
    j["tool"] = kToolVersion;
    j["command"] = m.command;
    j["config"] = m.config_text.empty() ? json::object() : json::parse(m.config_text);
    json inputs = json::array();
    for (const auto& [path, hash] : m.input_hashes)
        inputs.push_back(json{{"path", path}, {"fnv1a64", hash}});
    j["inputs"] = std::move(inputs);
    j["created"] = m.created;
    return j;
}

// --- envelopes ---------------------------------------------------------------

namespace {

json read_envelope(const std::string& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError(path + ": artifact must be a JSON object");
    const long long version = int_field(j, "schema_version");
    if (version != kSchemaVersion)
        throw ValidationError(path + ": unsupported version " + std::to_string(version) +
                              " (expected " + std::to_string(kSchemaVersion) + ")");
    field(j, "kind");
    const json& payload = field(j, "payload");
    const std::string stored = field(j, "content_hash").get<std::string>();
    if (fnv1a64_hex(payload.dump()) != stored)
        throw ValidationError(path + ": content hash mismatch, artifact is corrupted");
    return j;
}

}  // namespace

void save_envelope(const std::string& path, const std::string& kind, const json& payload,
                   const RunManifest* manifest) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["payload"] = payload;
    j["content_hash"] = fnv1a64_hex(payload.dump());
    if (manifest != nullptr) j["manifest"] = manifest_json(*manifest);
    atomic_write_text(path, j.dump(2) + "\n");
}

json load_envelope(const std::string& path, const std::string& kind) {
    json j = read_envelope(path);
    const std::string actual = j["kind"].get<std::string>();
    if (actual != kind)
        throw ValidationError(path + ": artifact kind is '" + actual + "', expected '" + kind +
                              "'");
    return std::move(j["payload"]);
}

// --- NMF ---------------------------------------------------------------------

namespace {

constexpr const char* kNmfKind = "nmf_basis";
constexpr const char* kSvmKind = "svm_model";
constexpr const char* kFusionKind = "fusion_bundle";
constexpr const char* kReportKind = "loocv_report";

json nmf_payload(const NmfModel& model) {
    json basis = json::array();
    for (Eigen::Index r = 0; r < model.basis.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < model.basis.cols(); ++c) row.push_back(model.basis(r, c));
        basis.push_back(std::move(row));
    }
    json j;
    j["basis"] = std::move(basis);
    j["column_norms"] = model.column_norms;
    j["train_residual"] = model.train_residual;
    j["config"] = json{{"rank", model.config.rank},
                       {"max_iters", model.config.max_iters},
                       {"rel_tol", model.config.rel_tol},
                       {"seed", model.config.seed}};
    return j;
}

NmfModel nmf_from_payload(const json& p) {
    const json& basis = field(p, "basis");
    if (!basis.is_array() || basis.empty())
        throw ValidationError("field must be a non-empty array: basis");
    const size_t cols = basis.front().is_array() ? basis.front().size() : 0;
    if (cols == 0) throw ValidationError("field must hold non-empty rows: basis");

    NmfModel model;
    model.basis.resize(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < basis.size(); ++r) {
        const json& row = basis[r];
        if (!row.is_array() || row.size() != cols)
            throw ValidationError("field has ragged rows: basis");
        for (size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number()) throw ValidationError("field must hold numbers: basis");
            const double v = row[c].get<double>();
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("field must be non-negative and finite: basis");
            model.basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    model.column_norms = vec_field(p, "column_norms");
    if (model.column_norms.size() != cols)
        throw ValidationError("field length must equal the rank: column_norms");
    model.train_residual = num_field(p, "train_residual");

    const json& cfg = field(p, "config");
    model.config.rank = static_cast<int>(int_field(cfg, "rank"));
    if (model.config.rank != static_cast<int>(cols))
        throw ValidationError("field disagrees with basis shape: config.rank");
    model.config.max_iters = static_cast<int>(int_field(cfg, "max_iters"));
    model.config.rel_tol = num_field(cfg, "rel_tol");
    model.config.seed = field(cfg, "seed").get<std::uint64_t>();
    return model;
}

}  // namespace

void save_nmf(const NmfModel& model, const std::string& path, const RunManifest* manifest) {
    save_envelope(path, kNmfKind, nmf_payload(model), manifest);
}

NmfModel load_nmf(const std::string& path) {
    return nmf_from_payload(load_envelope(path, kNmfKind));
}

// --- SVM ---------------------------------------------------------------------

namespace {

json kernel_payload(const KernelSpec& k) {
    return json{{"kind", kernel_name(k)}, {"sigma", k.sigma}, {"a", k.a}, {"b", k.b}};
}

KernelSpec kernel_from_payload(const json& j) {
    const std::string kind = field(j, "kind").get<std::string>();
    KernelSpec k;
    if (kind == "linear")
        k.kind = KernelSpec::Kind::Linear;
    else if (kind == "rbf")
        k.kind = KernelSpec::Kind::Rbf;
    else if (kind == "sigmoid")
        k.kind = KernelSpec::Kind::Sigmoid;
    else
        throw ValidationError("unknown kernel kind: " + kind);
    k.sigma = num_field(j, "sigma");
    if (k.kind == KernelSpec::Kind::Rbf && !(k.sigma > 0.0))
        throw ValidationError("field must be > 0: kernel.sigma");
    k.a = num_field(j, "a");
    k.b = num_field(j, "b");
    return k;
}

json svm_payload(const SvmModel& m) {
    json svs = json::array();
    for (const auto& sv : m.support_vectors) svs.push_back(sv);
    json j;
    j["kernel"] = kernel_payload(m.kernel);
    j["c"] = m.c_box;
    j["bias"] = m.bias;
    j["w_norm"] = m.w_norm;
    j["standardization"] =
        json{{"means", m.standardizer.mean}, {"scales", m.standardizer.scale}};
    j["support_vectors"] = std::move(svs);
    j["alphas"] = m.alpha;
    j["sv_labels"] = m.sv_labels;
    j["kernel_warning"] = m.kernel_warning;
    return j;
}

SvmModel svm_from_payload(const json& p) {
    SvmModel m;
    m.kernel = kernel_from_payload(field(p, "kernel"));
    m.c_box = num_field(p, "c");
    if (!(m.c_box > 0.0)) throw ValidationError("field must be > 0: c");
    m.bias = num_field(p, "bias");
    m.w_norm = num_field(p, "w_norm");
    if (!(m.w_norm >= 0.0)) throw ValidationError("field must be >= 0: w_norm");

    const json& std_ = field(p, "standardization");
    m.standardizer.mean = vec_field(std_, "means");
    m.standardizer.scale = vec_field(std_, "scales");
    if (m.standardizer.mean.size() != m.standardizer.scale.size())
        throw ValidationError("fields must have equal length: standardization.means/scales");
    for (const double s : m.standardizer.scale)
        if (!(s > 0.0)) throw ValidationError("field must be > 0: standardization.scales");

    const json& svs = field(p, "support_vectors");
    if (!svs.is_array() || svs.empty())
        throw ValidationError("field must be a non-empty array: support_vectors");
    size_t dim = 0;
    for (const auto& sv : svs) {
        if (!sv.is_array()) throw ValidationError("field must hold vectors: support_vectors");
        std::vector<double> v;
        v.reserve(sv.size());
        for (const auto& e : sv) {
            if (!e.is_number())
                throw ValidationError("field must hold numbers: support_vectors");
            v.push_back(e.get<double>());
        }
        if (dim == 0)
            dim = v.size();
        else if (v.size() != dim)
            throw ValidationError("field has ragged vectors: support_vectors");
        m.support_vectors.push_back(std::move(v));
    }
    if (dim == 0) throw ValidationError("field must hold non-empty vectors: support_vectors");

    m.alpha = vec_field(p, "alphas");
    if (m.alpha.size() != m.support_vectors.size())
        throw ValidationError("field length must match support_vectors: alphas");
    for (const double a : m.alpha)
        if (!(a > 0.0)) throw ValidationError("field must be > 0: alphas");

    const json& labels = field(p, "sv_labels");
    if (!labels.is_array() || labels.size() != m.support_vectors.size())
        throw ValidationError("field length must match support_vectors: sv_labels");
    for (const auto& l : labels) {
        if (!l.is_number_integer()) throw ValidationError("field must hold integers: sv_labels");
        const int y = l.get<int>();
        if (y != 1 && y != -1) throw ValidationError("field must hold -1/+1: sv_labels");
        m.sv_labels.push_back(y);
    }
    m.kernel_warning = field(p, "kernel_warning").get<bool>();
    return m;
}

}  // namespace

void save_svm(const SvmModel& model, const std::string& path, const RunManifest* manifest) {
    save_envelope(path, kSvmKind, svm_payload(model), manifest);
}

SvmModel load_svm(const std::string& path) {
    return svm_from_payload(load_envelope(path, kSvmKind));
}

// --- fusion bundle ------------------------------------------------------------

namespace {

std::string resolve_ref(const std::string& bundle_path, const std::string& ref) {
    return (fs::path(bundle_path).parent_path() / ref).string();
}

json ref_payload(const std::string& bundle_path, const std::string& ref,
                 const char* expected_kind) {
    const std::string resolved = resolve_ref(bundle_path, ref);
    const json env = read_envelope(resolved);
    const std::string kind = env["kind"].get<std::string>();
    if (kind != expected_kind)
        throw ValidationError(resolved + ": artifact kind is '" + kind + "', expected '" +
                              expected_kind + "'");
    return json{{"path", ref}, {"content_hash", env["content_hash"]}};
}

json features_payload(const FeatureConfig& f) {
    return json{{"levels", f.levels}, {"distance", f.distance}, {"nmf_size", f.nmf_size}};
}

FeatureConfig features_from_payload(const json& j) {
    FeatureConfig f;
    f.levels = static_cast<int>(int_field(j, "levels"));
    f.distance = static_cast<int>(int_field(j, "distance"));
    f.nmf_size = static_cast<int>(int_field(j, "nmf_size"));
    if (f.levels < 2) throw ValidationError("field must be >= 2: features.levels");
    if (f.distance < 1) throw ValidationError("field must be >= 1: features.distance");
    if (f.nmf_size < 1) throw ValidationError("field must be >= 1: features.nmf_size");
    return f;
}

}  // namespace

void save_fusion_bundle(const FusionBundleRefs& refs, const std::string& path,
                        const RunManifest* manifest) {
    json j;
    j["haralick_model"] = ref_payload(path, refs.haralick_model_path, kSvmKind);
    j["nmf_model"] = ref_payload(path, refs.nmf_model_path, kSvmKind);
    j["nmf_basis"] = ref_payload(path, refs.nmf_basis_path, kNmfKind);
    j["features"] = features_payload(refs.features);
    j["encode"] = json{{"max_iters", refs.encode.max_iters}, {"rel_tol", refs.encode.rel_tol}};
    save_envelope(path, kFusionKind, j, manifest);
}

FusionModel load_fusion_bundle(const std::string& path) {
    const json p = load_envelope(path, kFusionKind);

    auto load_ref = [&](const char* name, const char* expected_kind) {
        const json& ref = field(p, name);
        const std::string rel = field(ref, "path").get<std::string>();
        const std::string pinned = field(ref, "content_hash").get<std::string>();
        const std::string resolved = resolve_ref(path, rel);
        json env = read_envelope(resolved);
        const std::string kind = env["kind"].get<std::string>();
        if (kind != expected_kind)
            throw ValidationError(resolved + ": artifact kind is '" + kind + "', expected '" +
                                  expected_kind + "'");
        if (env["content_hash"].get<std::string>() != pinned)
            throw ValidationError(resolved + ": content hash does not match the bundle pin");
        return std::move(env["payload"]);
    };

    FusionModel fm;
    fm.haralick_model = svm_from_payload(load_ref("haralick_model", kSvmKind));
    fm.nmf_model = svm_from_payload(load_ref("nmf_model", kSvmKind));
    fm.basis = nmf_from_payload(load_ref("nmf_basis", kNmfKind));
    fm.features = features_from_payload(field(p, "features"));
    const json& enc = field(p, "encode");
    fm.encode.max_iters = static_cast<int>(int_field(enc, "max_iters"));
    fm.encode.rel_tol = num_field(enc, "rel_tol");
    return fm;
}

// --- reports ------------------------------------------------------------------

namespace {

json metric_or_null(const std::optional<double>& v) {
    return v.has_value() ? json(*v) : json(nullptr);
}

json report_entry(const ClassifierReport& r) {
    json j;
    j["classifier"] = r.classifier;
    j["confusion"] = json{{"tp", r.cm.tp}, {"tn", r.cm.tn}, {"fp", r.cm.fp}, {"fn", r.cm.fn}};
    j["metrics"] = json{{"sn", metric_or_null(r.m.sensitivity)},
                        {"sp", metric_or_null(r.m.specificity)},
                        {"ac", metric_or_null(r.m.accuracy)}};
    j["degenerate_folds"] = r.degenerate_folds;
    return j;
}

}  // namespace

json report_payload(const ClassifierReport& primary,
                    const std::vector<ClassifierReport>& comparison, const json& config) {
    json j = report_entry(primary);
    j["config"] = config;
    if (!comparison.empty()) {
        json rows = json::array();
        for (const auto& r : comparison) rows.push_back(report_entry(r));
        j["comparison"] = std::move(rows);
    }
    return j;
}

void save_report(const json& payload, const std::string& path, const RunManifest* manifest) {
    save_envelope(path, kReportKind, payload, manifest);
}

json load_report(const std::string& path) { return load_envelope(path, kReportKind); }

// --- CSV -----------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_csv_token(const std::string& s, const char* what) {
    if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos ||
        s.find('\r') != std::string::npos)
        throw ValidationError(std::string(what) + " may not contain commas or newlines: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
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

/// Non-empty, non-comment lines of a text file, CR-stripped.
std::vector<std::string> csv_lines(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

std::string manifest_comment(const RunManifest* manifest) {
    if (manifest == nullptr) return "";
    return "# manifest: " + manifest_json(*manifest).dump() + "\n";
}

}  // namespace

std::vector<std::string> haralick_column_names() {
    std::vector<std::string> names;
    names.reserve(28);
    for (int i = 1; i <= 14; ++i) names.push_back("f" + std::to_string(i) + "_mean");
    for (int i = 1; i <= 14; ++i) names.push_back("f" + std::to_string(i) + "_range");
    return names;
}

std::vector<std::string> nmf_column_names(int rank) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(rank));
    for (int i = 1; i <= rank; ++i) names.push_back("w" + std::to_string(i));
    return names;
}

void write_feature_csv(const FeatureTable& table, const std::string& path,
                       const RunManifest* manifest) {
    if (table.ids.size() != table.rows.size() || table.ids.size() != table.labels.size())
        throw ValidationError("feature table columns have inconsistent lengths");
    std::ostringstream out;
    out << manifest_comment(manifest);
    out << "sample_id,label";
    for (const auto& c : table.columns) {
        check_csv_token(c, "column name");
        out << ',' << c;
    }
    out << '\n';
    for (size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.columns.size())
            throw ValidationError("feature row width does not match the header: " +
                                  table.ids[r]);
        check_csv_token(table.ids[r], "sample_id");
        out << table.ids[r] << ',';
        if (table.labels[r].has_value()) out << *table.labels[r];
        for (const double v : table.rows[r]) out << ',' << format_double(v);
        out << '\n';
    }
    atomic_write_text(path, out.str());
}

FeatureTable read_feature_csv(const std::string& path) {
    const std::vector<std::string> lines = csv_lines(path);
    if (lines.empty()) throw ValidationError(path + ": empty feature CSV");
    const std::vector<std::string> header = split_csv_line(lines.front());
    if (header.size() < 3 || header[0] != "sample_id" || header[1] != "label")
        throw ValidationError(path + ": header must start with sample_id,label");

    FeatureTable table;
    table.columns.assign(header.begin() + 2, header.end());
    for (size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> parts = split_csv_line(lines[i]);
        if (parts.size() != header.size())
            throw ValidationError(path + ": row " + std::to_string(i) + " has " +
                                  std::to_string(parts.size()) + " fields, expected " +
                                  std::to_string(header.size()));
        table.ids.push_back(parts[0]);
        if (parts[1].empty()) {
            table.labels.emplace_back(std::nullopt);
        } else {
            try {
                table.labels.emplace_back(std::stoi(parts[1]));
            } catch (const std::exception&) {
                throw ValidationError(path + ": bad label in row " + std::to_string(i) + ": " +
                                      parts[1]);
            }
        }
        std::vector<double> row;
        row.reserve(parts.size() - 2);
        for (size_t c = 2; c < parts.size(); ++c) {
            try {
                size_t used = 0;
                const double v = std::stod(parts[c], &used);
                if (used != parts[c].size()) throw std::invalid_argument(parts[c]);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError(path + ": bad number in row " + std::to_string(i) + ": " +
                                      parts[c]);
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_dataset_manifest(const std::vector<ManifestEntry>& entries,
                            const std::string& path) {
    std::ostringstream out;
    out << "sample_id,path,label\n";
    for (const auto& e : entries) {
        check_csv_token(e.id, "sample_id");
        check_csv_token(e.path, "path");
        if (e.label != 1 && e.label != -1)
            throw ValidationError("manifest label must be -1 or +1: " + e.id);
        out << e.id << ',' << e.path << ',' << (e.label == 1 ? "stroke" : "nonstroke") << '\n';
    }
    atomic_write_text(path, out.str());
}

std::vector<ManifestEntry> read_dataset_manifest(const std::string& path) {
    const std::vector<std::string> lines = csv_lines(path);
    if (lines.empty()) throw ValidationError(path + ": empty manifest");
    if (split_csv_line(lines.front()) != std::vector<std::string>{"sample_id", "path", "label"})
        throw ValidationError(path + ": manifest header must be sample_id,path,label");
    std::vector<ManifestEntry> entries;
    for (size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> parts = split_csv_line(lines[i]);
        if (parts.size() != 3)
            throw ValidationError(path + ": manifest row " + std::to_string(i) +
                                  " must have 3 fields");
        ManifestEntry e;
        e.id = parts[0];
        e.path = parts[1];
        if (parts[2] == "stroke")
            e.label = 1;
        else if (parts[2] == "nonstroke")
            e.label = -1;
        else
            throw ValidationError(path + ": label must be stroke or nonstroke, got " + parts[2]);
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_records_csv(const std::vector<SampleRecord>& records, const std::string& path,
                       const RunManifest* manifest) {
    std::ostringstream out;
    out << manifest_comment(manifest);
    out << "sample_id,fold,truth,prediction,score_haralick,score_nmf,winner,degenerate_fold\n";
    for (const auto& r : records) {
        check_csv_token(r.id, "sample_id");
        out << r.id << ',' << r.fold << ',' << r.truth << ',' << r.prediction << ','
            << format_double(r.score_haralick) << ',' << format_double(r.score_nmf) << ','
            << (r.winner.has_value() ? winner_name(*r.winner) : "") << ','
            << (r.degenerate_fold ? 1 : 0) << '\n';
    }
    atomic_write_text(path, out.str());
}

}  // namespace texturekit
