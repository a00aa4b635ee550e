#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "eegart/annotations.hpp"
#include "eegart/config.hpp"
#include "eegart/corpus.hpp"
#include "eegart/metrics.hpp"
#include "json.hpp"

namespace eegart {

// ---------------------------------------------------------------- corpus stats

struct SessionAnnotations {
  std::string patient_id;
  std::string session_id;
  double duration_s = 0.0;
  AnnotationSet annotations;
};

struct ClassStats {
  std::set<std::string> patients;
  std::set<std::string> sessions;  // "patient/session"
  double seconds = 0.0;
};

struct CorpusStats {
  std::array<ClassStats, kNumClasses> classes;  // indexed by class code
  std::size_t sessions = 0;
  double total_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Seconds per class are the union of that class's events in each session,
/// with channel-scoped events collapsed onto the record. Null seconds are the
/// session time outside every artifact event.
CorpusStats corpus_stats(std::span<const SessionAnnotations> sessions);
/// Reads every indexed recording (for its duration) and annotation file.
CorpusStats corpus_stats(const CorpusIndex& index, double target_rate_hz = 256.0);

// Rows: Artifact type, # patients, # sessions, # seconds.
std::string render_stats(const CorpusStats& stats);
nlohmann::json stats_json(const CorpusStats& stats);

// ------------------------------------------------------------------ benchmark

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

MetricSummary summarize(std::span<const double> values);

/// Flattened EvalReport: weighted_f1, accuracy, and precision_/recall_/f1_/
/// sensitivity_/support_<class>. Absent sensitivities are omitted.
std::map<std::string, double> flatten(const EvalReport& r);
std::map<std::string, MetricSummary> summarize_reports(std::span<const EvalReport> reports);

struct FamilyRun {
  int run = 0;
  std::uint64_t seed = 0;
  Hyperparams best_params;
  double validation_score = 0.0;
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  bool converged = true;
  ConfusionMatrix epoch_confusion;
  EvalReport per_epoch;
  EvalReport per_window;
};

struct FamilyResult {
  Family family = Family::knn;
  std::vector<FamilyRun> runs;
  std::map<std::string, MetricSummary> per_epoch;
  std::map<std::string, MetricSummary> per_window;
};

struct RunInfo {
  int run = 0;
  std::uint64_t seed = 0;
  SplitAssignment split;
  std::size_t train_windows = 0;  // after undersampling
  std::size_t validation_windows = 0;
  std::size_t test_windows = 0;
  std::size_t test_epochs = 0;
  std::array<std::size_t, kNumClasses> train_class_counts{};
};

struct BenchmarkReport {
  nlohmann::json config;
  std::vector<RunInfo> runs;
  std::vector<FamilyResult> families;
  // Predicting null for every epoch/window of each run's test split.
  std::vector<EvalReport> baseline_epoch;
  std::vector<EvalReport> baseline_window;
};

/// For r = 1..runs with seed_r = seed XOR r: patient split (drawn with seed_r,
/// or with `seed` for every run when resplit_per_run is off), undersampled
/// training set, per-family search maximising validation per-epoch
/// weighted-F1, refit on train with the best point, test evaluation per epoch
/// and per window. Writes report.json, report.txt, report.csv and per-run
/// split manifests, trial logs and models under output_dir. A failing stage
/// aborts with an error naming the run, family and stage; files written before
/// the failure stay on disk.
BenchmarkReport run_benchmark(const BenchConfig& cfg);

/// Wall-clock free, so equal inputs give byte-identical output.
nlohmann::json report_json(const BenchmarkReport& report);

/// Renderers over the JSON form, so saved reports can be re-rendered.
/// `section` is "per_epoch" or "per_window".
std::vector<TableRow> report_rows(const nlohmann::json& report, const std::string& section);
std::string render_report_table(const nlohmann::json& report);
std::string render_report_csv(const nlohmann::json& report);

}  // namespace eegart
