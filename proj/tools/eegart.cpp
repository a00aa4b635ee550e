// eegart: corpus statistics, feature extraction, benchmarking and synthetic
// corpora for EEG artifact classification.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eegart/bench.hpp"
#include "eegart/binary_io.hpp"
#include "eegart/config.hpp"
#include "eegart/dataset.hpp"
#include "eegart/error.hpp"
#include "eegart/synth.hpp"

namespace {

using namespace eegart;

int cmd_stats(const std::string& root, const CorpusScanOptions& scan, double rate, const std::string& format) {
  const auto index = corpus_scan(root, scan);
  for (const auto& w : index.warnings) std::cerr << "warning: " << w << "\n";
  const auto stats = corpus_stats(index, rate);
  if (format == "json") std::cout << stats_json(stats).dump(2) << "\n";
  else std::cout << render_stats(stats);
  return 0;
}

int cmd_extract(const std::string& root, const CorpusScanOptions& scan, DatasetConfig cfg, const std::string& csv) {
  const auto index = corpus_scan(root, scan);
  for (const auto& w : index.warnings) std::cerr << "warning: " << w << "\n";
  const auto sessions = load_sessions(index, cfg);
  std::size_t windows = 0, hits = 0;
  for (const auto& s : sessions) {
    windows += s.windows.size();
    hits += s.from_cache ? 1 : 0;
  }
  std::printf("%zu sessions, %zu windows, %zu from cache (%s)\n", sessions.size(), windows, hits,
              cfg.cache_dir.c_str());
  if (!csv.empty()) write_file_text(csv, export_features_csv(sessions));
  return 0;
}

int cmd_report(const std::string& in, const std::string& format) {
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(read_file_text(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(in + ": " + e.what());
  }
  if (format == "json") std::cout << report.dump(2) << "\n";
  else if (format == "csv") std::cout << render_report_csv(report);
  else std::cout << render_report_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG artifact classification benchmark"};
  app.require_subcommand(1);

  CorpusScanOptions scan;
  auto add_scan = [&](CLI::App* cmd) {
    cmd->add_option("--patient-component", scan.patient_component,
                    "Directory component (relative to root) naming the patient; -1 uses the regex");
    cmd->add_option("--patient-regex", scan.patient_regex, "Regex over the file stem; group 1 is the patient id");
  };

  std::string root;
  std::string format = "table";
  double rate = 256.0;
  auto* stats = app.add_subcommand("stats", "Per-class patient, session and second counts");
  stats->add_option("root", root, "Corpus root")->required();
  stats->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  stats->add_option("--rate", rate, "Resampling rate used to read durations");
  add_scan(stats);

  DatasetConfig dcfg;
  std::string csv, montage_file;
  auto* extract = app.add_subcommand("extract", "Extract (and cache) eigen-features for every session");
  extract->add_option("root", root, "Corpus root")->required();
  extract->add_option("--cache", dcfg.cache_dir, "Feature cache directory")->required();
  extract->add_option("--csv", csv, "Also export one CSV row per window");
  extract->add_option("--workers", dcfg.workers, "Parallel sessions")->check(CLI::PositiveNumber);
  extract->add_option("--coverage", dcfg.coverage, "Minimum class overlap to label a window");
  extract->add_option("--montage", montage_file, "Derivation pair file");
  add_scan(extract);

  std::string config_path, output_dir, families;
  int runs = 0;
  std::size_t budget = 0, workers = 0;
  auto* bench = app.add_subcommand("bench", "Tune, train and evaluate every family over several runs");
  bench->add_option("--config", config_path, "key = value configuration file")->required();
  bench->add_option("--runs", runs, "Override runs");
  bench->add_option("--budget", budget, "Override trials per family");
  bench->add_option("--families", families, "Override families (comma list)");
  bench->add_option("--workers", workers, "Override worker count");
  bench->add_option("--output", output_dir, "Override output directory");

  std::string out_dir;
  std::uint64_t seed = 0;
  SynthParams sp;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with known artifact events");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--seed", seed, "Generator seed")->required();
  synth->add_option("--patients", sp.patients, "Number of patients")->required();
  synth->add_option("--duration", sp.duration_s, "Seconds per session")->required();
  synth->add_option("--sessions", sp.sessions_per_patient, "Sessions per patient");
  synth->add_option("--artifact-rate", sp.artifact_rate, "Expected artifact fraction of each session");

  std::string in;
  std::string report_format = "table";
  auto* report = app.add_subcommand("report", "Render a saved report.json");
  report->add_option("--in", in, "report.json path")->required();
  report->add_option("--format", report_format, "table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*stats) return cmd_stats(root, scan, rate, format);
    if (*extract) {
      if (!montage_file.empty()) dcfg.montage = MontageDefinition::load(montage_file);
      return cmd_extract(root, scan, dcfg, csv);
    }
    if (*bench) {
      auto cfg = load_bench_config(config_path);
      if (runs != 0) cfg.runs = runs;
      if (budget != 0) cfg.budget = budget;
      if (workers != 0) cfg.workers = workers;
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      if (!families.empty()) {
        auto parsed = parse_bench_config("families = " + families);
        cfg.families = parsed.families;
      }
      const auto result = run_benchmark(cfg);
      std::cout << render_report_table(report_json(result));
      std::cout << "report written to " << (cfg.output_dir / "report.json").string() << "\n";
      return 0;
    }
    if (*synth) {
      const auto index = synth_corpus(out_dir, seed, sp);
      std::printf("wrote %zu sessions for %zu patients to %s\n", index.entries.size(), index.patients().size(),
                  out_dir.c_str());
      return 0;
    }
    if (*report) return cmd_report(in, report_format);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
