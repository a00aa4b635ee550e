#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "eegart/classifiers.hpp"
#include "eegart/corpus.hpp"
#include "eegart/dataset.hpp"
#include "eegart/features.hpp"
#include "eegart/metrics.hpp"
#include "eegart/tuning.hpp"
#include "json.hpp"

namespace eegart {

struct BenchConfig {
  std::filesystem::path corpus_root;
  std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
  int runs = 5;
  std::uint64_t seed = 0;
  std::size_t budget = 50;
  bool resplit_per_run = true;
  Strategy strategy = Strategy::tpe_lite;
  FeatureConfig features;
  double target_rate_hz = 256.0;
  double coverage = 0.5;
  SplitRatios ratios;
  std::filesystem::path montage_file;  // empty: built-in TCP pairs
  std::filesystem::path output_dir = "bench_out";
  std::filesystem::path cache_dir;     // empty: <output_dir>/cache
  EvalOptions eval;
  CorpusScanOptions scan;
  std::size_t workers = 1;
  // Per-family replacements for individual search dimensions.
  std::map<Family, std::vector<SearchDim>> space_overrides;

  /// Throws UsageError when runs or budget < 1, ratios do not sum to 1, etc.
  void validate() const;
  DatasetConfig dataset() const;
  SearchSpace space(Family f) const;
  std::filesystem::path effective_cache_dir() const;
};

/// `key = value` lines; '#' starts a comment. Keys:
///   corpus_root, families (comma list or "all"), runs, seed, budget,
///   resplit_per_run, strategy, window_s, overlap, band_lo_hz, band_hi_hz,
///   normalization (zscore|none), log_magnitude, append_correlations,
///   target_rate_hz, coverage, split (train,validation,test), montage_file,
///   output_dir, cache_dir, f1_exclude_null, patient_component,
///   patient_regex, annotation_extension, workers,
///   space.<family>.<dim> = lo,hi | choice|choice|...
/// Relative paths resolve against `base_dir`. Throws UsageError on unknown keys
/// or malformed values.
BenchConfig parse_bench_config(std::string_view text, const std::filesystem::path& base_dir = {});
BenchConfig load_bench_config(const std::filesystem::path& path);

nlohmann::json config_echo(const BenchConfig& cfg);

}  // namespace eegart
