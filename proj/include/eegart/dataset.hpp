#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "eegart/annotations.hpp"
#include "eegart/corpus.hpp"
#include "eegart/features.hpp"
#include "eegart/montage.hpp"
#include "eegart/types.hpp"

namespace eegart {

struct FeatureRow {
  FeatureVector features;
  ArtifactClass label = ArtifactClass::null;
  std::string patient_id;
  std::string session_id;
  double start_s = 0.0;

  bool operator==(const FeatureRow&) const = default;
};

struct LabeledFeatureSet {
  std::vector<FeatureRow> rows;

  std::array<std::size_t, kNumClasses> class_counts() const;
  std::size_t dim() const { return rows.empty() ? 0 : rows.front().features.size(); }
  Matrix features() const;
  std::vector<ArtifactClass> labels() const;
};

/// Class with the largest covered time inside [start_s, start_s + length_s),
/// where each class's coverage is the union of its events. Classes covering
/// less than `coverage` of the interval are ignored; null if none remain.
/// Ties: earlier event start, then smaller class code.
ArtifactClass label_window(double start_s, double length_s, const AnnotationSet& ann, double coverage = 0.5);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct SplitAssignment {
  std::vector<std::string> train;  // each list sorted
  std::vector<std::string> validation;
  std::vector<std::string> test;
  SplitRatios ratios;
  std::uint64_t seed = 0;

  enum class Part { train, validation, test };
  std::optional<Part> part_of(const std::string& patient) const;
};

/// Seeded shuffle of the (sorted) patient ids, then validation and test get
/// floor(n * ratio) patients each (at least one) and train the rest.
/// Throws DataError for fewer than 3 patients.
SplitAssignment patient_split(const std::set<std::string>& patients, const SplitRatios& ratios, std::uint64_t seed);
SplitAssignment patient_split(const CorpusIndex& index, const SplitRatios& ratios, std::uint64_t seed);

nlohmann::json split_manifest(const SplitAssignment& split);

/// Reduces every present class to the smallest class count by seeded sampling
/// without replacement, then shuffles. Throws DataError for empty input.
LabeledFeatureSet undersample(const LabeledFeatureSet& set, std::uint64_t seed);

struct DatasetConfig {
  FeatureConfig features;
  double target_rate_hz = 256.0;
  double coverage = 0.5;
  MontageDefinition montage = MontageDefinition::tcp();
  std::string cache_dir;  // empty disables caching
  std::size_t workers = 1;

  std::uint64_t hash() const;
};

/// Everything the pipeline needs from one recording.
struct SessionFeatures {
  std::string patient_id;
  std::string session_id;
  double sample_rate_hz = 0.0;
  double duration_s = 0.0;
  std::vector<TimedFeature> windows;
  std::vector<ArtifactClass> window_labels;
  std::vector<ArtifactClass> epoch_labels;  // one per whole second
  bool from_cache = false;
};

// EAF1 feature cache: magic, version, config hash, content hash, record id,
// sample rate, duration, dimension, window count, then per window
// (start_s f64, label u8, values f64 x dim). Little-endian throughout.
std::vector<std::uint8_t> encode_feature_cache(const SessionFeatures& s, std::uint64_t config_hash,
                                               std::uint64_t content_hash);
// nullopt when the hashes do not match; DataError when the bytes are malformed.
std::optional<SessionFeatures> decode_feature_cache(std::span<const std::uint8_t> bytes, std::uint64_t config_hash,
                                                    std::uint64_t content_hash);

std::filesystem::path cache_path(const std::string& cache_dir, std::uint64_t config_hash, std::uint64_t content_hash);

SessionFeatures load_session(const CorpusEntry& entry, const DatasetConfig& cfg);

/// Sessions in index order; extraction runs on cfg.workers threads.
std::vector<SessionFeatures> load_sessions(const CorpusIndex& index, const DatasetConfig& cfg);

struct Splits {
  SplitAssignment assignment;
  LabeledFeatureSet train;  // undersampled
  LabeledFeatureSet validation;
  LabeledFeatureSet test;
};

/// Routes session rows by patient; only train is undersampled (with `seed`).
Splits assemble_splits(const std::vector<SessionFeatures>& sessions, const SplitAssignment& assignment,
                       std::uint64_t seed);

Splits build_splits(const CorpusIndex& index, const DatasetConfig& cfg, const SplitRatios& ratios,
                    std::uint64_t seed);

// One row per window: patient, session, start_s, label, feature columns.
std::string export_features_csv(const std::vector<SessionFeatures>& sessions);

}  // namespace eegart
