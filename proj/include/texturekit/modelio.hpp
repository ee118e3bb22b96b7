#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "texturekit/eval.hpp"
#include "texturekit/fusion.hpp"
#include "texturekit/nmf.hpp"
#include "texturekit/svm.hpp"

namespace texturekit {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "texturekit 0.1.0";

// --- generic plumbing ----------------------------------------------------

std::uint64_t fnv1a64(const void* data, size_t len);
std::string fnv1a64_hex(const std::string& bytes);
std::string hash_file(const std::string& path);

/// Write-temp-then-rename; directories are created as needed.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

/// Provenance block embedded in every artifact (JSON field, `#` comment in
/// CSV/PGM, XML comment in SVG). Timestamps live only here.
struct RunManifest {
    std::string command;
    std::string config_text;  // resolved config as compact JSON
    std::vector<std::pair<std::string, std::string>> input_hashes;
    std::string created;  // ISO-8601, filled by make_manifest
};

RunManifest make_manifest(const std::string& command, const nlohmann::json& config,
                          const std::vector<std::string>& input_paths);
nlohmann::json manifest_json(const RunManifest& m);

// --- versioned JSON envelopes ---------------------------------------------
// {schema_version, kind, payload, content_hash, manifest?}. The hash covers
// the payload's compact canonical serialization; loading rejects unknown
// versions and hash mismatches.

void save_envelope(const std::string& path, const std::string& kind,
                   const nlohmann::json& payload, const RunManifest* manifest = nullptr);
nlohmann::json load_envelope(const std::string& path, const std::string& kind);

void save_nmf(const NmfModel& model, const std::string& path,
              const RunManifest* manifest = nullptr);
NmfModel load_nmf(const std::string& path);

void save_svm(const SvmModel& model, const std::string& path,
              const RunManifest* manifest = nullptr);
SvmModel load_svm(const std::string& path);

/// The fusion bundle references its three component files (paths are
/// resolved relative to the bundle) and pins their content hashes.
struct FusionBundleRefs {
    std::string haralick_model_path;
    std::string nmf_model_path;
    std::string nmf_basis_path;
    FeatureConfig features;
    EncodeConfig encode;
};

void save_fusion_bundle(const FusionBundleRefs& refs, const std::string& path,
                        const RunManifest* manifest = nullptr);
FusionModel load_fusion_bundle(const std::string& path);

// --- reports ---------------------------------------------------------------

struct ClassifierReport {
    std::string classifier;
    ConfusionMatrix cm;
    Metrics m;
    int degenerate_folds = 0;
};

nlohmann::json report_payload(const ClassifierReport& primary,
                              const std::vector<ClassifierReport>& comparison,
                              const nlohmann::json& config);
void save_report(const nlohmann::json& payload, const std::string& path,
                 const RunManifest* manifest = nullptr);
nlohmann::json load_report(const std::string& path);

// --- CSV ---------------------------------------------------------------------

/// Feature table: sample_id, label (may be empty), then named columns.
struct FeatureTable {
    std::vector<std::string> columns;  // feature column names only
    std::vector<std::string> ids;
    std::vector<std::optional<int>> labels;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> haralick_column_names();
std::vector<std::string> nmf_column_names(int rank);

void write_feature_csv(const FeatureTable& table, const std::string& path,
                       const RunManifest* manifest = nullptr);
FeatureTable read_feature_csv(const std::string& path);

struct ManifestEntry {
    std::string id;
    std::string path;
    int label = 0;  // stroke -> +1, nonstroke -> -1
};

void write_dataset_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);
std::vector<ManifestEntry> read_dataset_manifest(const std::string& path);

void write_records_csv(const std::vector<SampleRecord>& records, const std::string& path,
                       const RunManifest* manifest = nullptr);

}  // namespace texturekit
