#include "eegart/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "eegart/binary_io.hpp"
#include "eegart/edf.hpp"
#include "eegart/error.hpp"
#include "eegart/parallel.hpp"

namespace eegart {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumClasses> kStatsLabels = {
    "Eye movements", "Chewing", "Shivering", "Electrode pops", "Muscle movements", "Null"};

double union_length(std::vector<std::pair<double, double>> spans) {
  std::sort(spans.begin(), spans.end());
  double total = 0.0, lo = 0.0, hi = -1.0;
  bool open = false;
  for (const auto& [a, b] : spans) {
    if (open && a <= hi) {
      hi = std::max(hi, b);
      continue;
    }
    if (open) total += hi - lo;
    lo = a;
    hi = b;
    open = true;
  }
  if (open) total += hi - lo;
  return total;
}

// Re-throws `fn`'s failure with the run/family/stage prefixed, keeping the
// error category (and therefore the CLI exit code).
template <typename Fn>
auto staged(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  } catch (const UsageError& e) {
    throw UsageError(where + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
}

ConfusionMatrix epoch_confusion(const Model& m, std::span<const SessionFeatures* const> sessions,
                                const FeatureConfig& fc) {
  ConfusionMatrix cm;
  for (const auto* s : sessions) {
    if (s->windows.empty()) continue;
    const auto pred = predict_epochs(m, s->windows, fc.window_s, fc.stride_s());
    for (const auto& [t, label] : pred)
      if (t < s->epoch_labels.size()) ++cm.counts[code(s->epoch_labels[t])][code(label)];
  }
  return cm;
}

ConfusionMatrix window_confusion(const Model& m, std::span<const SessionFeatures* const> sessions) {
  ConfusionMatrix cm;
  for (const auto* s : sessions)
    for (std::size_t i = 0; i < s->windows.size(); ++i)
      ++cm.counts[code(s->window_labels[i])][code(m.predict(s->windows[i].values))];
  return cm;
}

ConfusionMatrix null_confusion(std::span<const SessionFeatures* const> sessions, bool epochs) {
  ConfusionMatrix cm;
  const int null = code(ArtifactClass::null);
  for (const auto* s : sessions)
    for (ArtifactClass truth : epochs ? s->epoch_labels : s->window_labels) ++cm.counts[code(truth)][null];
  return cm;
}

std::size_t epoch_count(std::span<const SessionFeatures* const> sessions) {
  std::size_t n = 0;
  for (const auto* s : sessions) n += s->epoch_labels.size();
  return n;
}

json params_json(const Hyperparams& hp) {
  json out = json::object();
  for (const auto& [k, v] : hp) {
    if (const auto* d = std::get_if<double>(&v)) out[k] = *d;
    else out[k] = std::get<std::string>(v);
  }
  return out;
}

json summary_json(const std::map<std::string, MetricSummary>& m) {
  json out = json::object();
  for (const auto& [k, s] : m)
    out[k] = {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
  return out;
}

json eval_json(const EvalReport& r) {
  json out = json::object();
  for (const auto& [k, v] : flatten(r)) out[k] = v;
  out["warnings"] = r.warnings;
  return out;
}

json confusion_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (const auto& row : cm.counts) rows.push_back(row);
  return rows;
}

std::string run_dir_name(int run) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%02d", run);
  return buf;
}

TableRow row_from_summary(std::string name, const json& section) {
  TableRow row;
  row.algorithm = std::move(name);
  row.weighted_f1 = section.at("weighted_f1").at("mean").get<double>();
  row.accuracy = section.at("accuracy").at("mean").get<double>();
  for (ArtifactClass c : kAllClasses) {
    const std::string key = "sensitivity_" + std::string(class_name(c));
    if (section.contains(key)) row.sensitivity[code(c)] = section.at(key).at("mean").get<double>();
  }
  return row;
}

}  // namespace

// ---------------------------------------------------------------- corpus stats

CorpusStats corpus_stats(std::span<const SessionAnnotations> sessions) {
  CorpusStats out;
  for (const auto& s : sessions) {
    const std::string key = s.patient_id + "/" + s.session_id;
    ++out.sessions;
    out.total_seconds += s.duration_s;
    std::vector<std::pair<double, double>> any;
    for (ArtifactClass c : kAllClasses) {
      if (c == ArtifactClass::null) continue;
      std::vector<std::pair<double, double>> spans;
      for (const auto& e : s.annotations.events)
        if (e.label == c) spans.emplace_back(e.start_s, e.stop_s);
      if (spans.empty()) continue;
      any.insert(any.end(), spans.begin(), spans.end());
      auto& cs = out.classes[code(c)];
      cs.patients.insert(s.patient_id);
      cs.sessions.insert(key);
      cs.seconds += union_length(std::move(spans));
    }
    const double null_seconds = s.duration_s - union_length(std::move(any));
    if (null_seconds > 0.0) {
      auto& ns = out.classes[code(ArtifactClass::null)];
      ns.patients.insert(s.patient_id);
      ns.sessions.insert(key);
      ns.seconds += null_seconds;
    }
  }
  return out;
}

CorpusStats corpus_stats(const CorpusIndex& index, double target_rate_hz) {
  std::vector<SessionAnnotations> sessions(index.entries.size());
  parallel_for(sessions.size(), 1, [&](std::size_t i) {
    const auto& e = index.entries[i];
    const Recording rec = load_edf(e.edf_path, EdfParseOptions{target_rate_hz});
    SessionAnnotations& s = sessions[i];
    s.patient_id = e.patient_id;
    s.session_id = e.session_id;
    s.duration_s = rec.duration_s;
    try {
      s.annotations = load_annotations(read_file_text(e.annotation_path), rec.duration_s);
    } catch (const DataError& err) {
      throw DataError(e.annotation_path + ": " + err.what());
    }
  });
  auto stats = corpus_stats(sessions);
  stats.warnings = index.warnings;
  return stats;
}

std::string render_stats(const CorpusStats& stats) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %12s %12s %14s\n", "Artifact type", "# patients", "# sessions",
                "# seconds");
  out << line;
  for (ArtifactClass c : kAllClasses) {
    const auto& cs = stats.classes[code(c)];
    std::snprintf(line, sizeof line, "%-18s %12zu %12zu %14.0f\n", std::string(kStatsLabels[code(c)]).c_str(),
                  cs.patients.size(), cs.sessions.size(), cs.seconds);
    out << line;
  }
  std::snprintf(line, sizeof line, "\n%zu sessions, %.0f seconds\n", stats.sessions, stats.total_seconds);
  out << line;
  return out.str();
}

json stats_json(const CorpusStats& stats) {
  json rows = json::array();
  for (ArtifactClass c : kAllClasses) {
    const auto& cs = stats.classes[code(c)];
    rows.push_back({{"class", class_name(c)},
                    {"label", kStatsLabels[code(c)]},
                    {"patients", cs.patients.size()},
                    {"sessions", cs.sessions.size()},
                    {"seconds", cs.seconds}});
  }
  return {{"classes", rows},
          {"sessions", stats.sessions},
          {"total_seconds", stats.total_seconds},
          {"warnings", stats.warnings}};
}

// ------------------------------------------------------------------ benchmark

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  // Rounding can put the mean of equal values a hair outside their range.
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::map<std::string, double> flatten(const EvalReport& r) {
  std::map<std::string, double> out;
  out["weighted_f1"] = r.weighted_f1;
  out["accuracy"] = r.accuracy;
  for (ArtifactClass c : kAllClasses) {
    const std::string name(class_name(c));
    const int k = code(c);
    out["precision_" + name] = r.precision[k];
    out["recall_" + name] = r.recall[k];
    out["f1_" + name] = r.f1[k];
    out["support_" + name] = static_cast<double>(r.support[k]);
    if (r.sensitivity[k]) out["sensitivity_" + name] = *r.sensitivity[k];
  }
  return out;
}

std::map<std::string, MetricSummary> summarize_reports(std::span<const EvalReport> reports) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : reports)
    for (const auto& [k, v] : flatten(r)) values[k].push_back(v);
  std::map<std::string, MetricSummary> out;
  for (const auto& [k, v] : values) out[k] = summarize(v);
  return out;
}

BenchmarkReport run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const auto dataset_cfg = staged("dataset config", [&] { return cfg.dataset(); });
  const auto index = staged("corpus scan", [&] { return corpus_scan(cfg.corpus_root, cfg.scan); });
  const auto sessions = staged("feature extraction", [&] { return load_sessions(index, dataset_cfg); });
  fs::create_directories(cfg.output_dir);

  BenchmarkReport report;
  report.config = config_echo(cfg);
  report.families.resize(cfg.families.size());
  for (std::size_t f = 0; f < cfg.families.size(); ++f) report.families[f].family = cfg.families[f];
  const auto& fc = cfg.features;

  for (int r = 1; r <= cfg.runs; ++r) {
    const std::string run_name = "run " + std::to_string(r);
    const std::uint64_t seed_r = cfg.seed ^ static_cast<std::uint64_t>(r);
    const fs::path run_dir = cfg.output_dir / run_dir_name(r);
    fs::create_directories(run_dir);

    const auto splits = staged(run_name + ", split", [&] {
      const auto assignment = patient_split(index, cfg.ratios, cfg.resplit_per_run ? seed_r : cfg.seed);
      return assemble_splits(sessions, assignment, seed_r);
    });
    write_file_text((run_dir / "split.json").string(), split_manifest(splits.assignment).dump(2) + "\n");

    std::vector<const SessionFeatures*> validation, test;
    for (const auto& s : sessions) {
      const auto part = splits.assignment.part_of(s.patient_id);
      if (part == SplitAssignment::Part::validation) validation.push_back(&s);
      if (part == SplitAssignment::Part::test) test.push_back(&s);
    }
    if (splits.train.rows.empty()) throw DataError(run_name + ", split: training split has no windows");
    if (splits.validation.rows.empty()) throw DataError(run_name + ", split: validation split has no windows");
    if (splits.test.rows.empty()) throw DataError(run_name + ", split: test split has no windows");

    RunInfo info;
    info.run = r;
    info.seed = seed_r;
    info.split = splits.assignment;
    info.train_windows = splits.train.rows.size();
    info.validation_windows = splits.validation.rows.size();
    info.test_windows = splits.test.rows.size();
    info.test_epochs = epoch_count(test);
    info.train_class_counts = splits.train.class_counts();
    report.runs.push_back(info);

    report.baseline_epoch.push_back(evaluate(null_confusion(test, true), cfg.eval));
    report.baseline_window.push_back(evaluate(null_confusion(test, false), cfg.eval));

    const Matrix train_x = splits.train.features();
    const auto train_y = splits.train.labels();

    std::vector<FamilyRun> results(cfg.families.size());
    parallel_for(cfg.families.size(), cfg.workers, [&](std::size_t f) {
      const Family family = cfg.families[f];
      const std::string where = run_name + ", " + std::string(family_name(family));
      FamilyRun& out = results[f];
      out.run = r;
      out.seed = seed_r;

      const auto log = staged(where + ", tuning", [&] {
        const Objective objective = [&](const Hyperparams& hp) {
          const Model m = fit(AlgorithmSpec{family, hp}, train_x, train_y, seed_r);
          return evaluate(epoch_confusion(m, validation, fc), cfg.eval).weighted_f1;
        };
        auto l = search(cfg.space(family), cfg.budget, objective, seed_r, cfg.strategy);
        write_file_text((run_dir / (std::string(family_name(family)) + ".trials.jsonl")).string(),
                        trial_log_jsonl(l, family));
        if (!l.best_index) throw DataError("every trial failed");
        return l;
      });
      const Trial& best = log.trials[*log.best_index];
      out.best_params = best.params;
      out.validation_score = best.score;
      out.trials = log.trials.size();
      out.failed_trials = static_cast<std::size_t>(
          std::count_if(log.trials.begin(), log.trials.end(), [](const Trial& t) { return t.failed; }));

      const Model model = staged(where + ", refit", [&] {
        Model m = fit(AlgorithmSpec{family, best.params}, train_x, train_y, seed_r);
        write_file_bytes((run_dir / (std::string(family_name(family)) + ".eam")).string(), save_model(m));
        return m;
      });
      out.converged = model.converged();

      staged(where + ", evaluation", [&] {
        out.epoch_confusion = epoch_confusion(model, test, fc);
        out.per_epoch = evaluate(out.epoch_confusion, cfg.eval);
        out.per_window = evaluate(window_confusion(model, test), cfg.eval);
      });
    });
    for (std::size_t f = 0; f < results.size(); ++f) report.families[f].runs.push_back(std::move(results[f]));
  }

  for (auto& fam : report.families) {
    std::vector<EvalReport> epoch, window;
    for (const auto& run : fam.runs) {
      epoch.push_back(run.per_epoch);
      window.push_back(run.per_window);
    }
    fam.per_epoch = summarize_reports(epoch);
    fam.per_window = summarize_reports(window);
  }

  const json j = report_json(report);
  write_file_text((cfg.output_dir / "report.json").string(), j.dump(2) + "\n");
  write_file_text((cfg.output_dir / "report.txt").string(), render_report_table(j));
  write_file_text((cfg.output_dir / "report.csv").string(), render_report_csv(j));
  return report;
}

json report_json(const BenchmarkReport& report) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"run", r.run},
                    {"seed", r.seed},
                    {"split", split_manifest(r.split)},
                    {"train_windows", r.train_windows},
                    {"validation_windows", r.validation_windows},
                    {"test_windows", r.test_windows},
                    {"test_epochs", r.test_epochs},
                    {"train_class_counts", r.train_class_counts}});
  }
  json families = json::array();
  for (const auto& fam : report.families) {
    json fruns = json::array();
    for (const auto& r : fam.runs) {
      fruns.push_back({{"run", r.run},
                       {"seed", r.seed},
                       {"best_params", params_json(r.best_params)},
                       {"validation_weighted_f1", r.validation_score},
                       {"trials", r.trials},
                       {"failed_trials", r.failed_trials},
                       {"converged", r.converged},
                       {"per_epoch", eval_json(r.per_epoch)},
                       {"per_window", eval_json(r.per_window)},
                       {"epoch_confusion", confusion_json(r.epoch_confusion)}});
    }
    families.push_back({{"family", family_name(fam.family)},
                        {"display", family_display(fam.family)},
                        {"per_epoch", summary_json(fam.per_epoch)},
                        {"per_window", summary_json(fam.per_window)},
                        {"runs", fruns}});
  }
  return {{"config", report.config},
          {"runs", runs},
          {"baseline",
           {{"name", "all-null"},
            {"per_epoch", summary_json(summarize_reports(report.baseline_epoch))},
            {"per_window", summary_json(summarize_reports(report.baseline_window))}}},
          {"families", families}};
}

std::vector<TableRow> report_rows(const json& report, const std::string& section) {
  if (section != "per_epoch" && section != "per_window") throw UsageError("unknown report section " + section);
  std::vector<TableRow> rows;
  try {
    for (const auto& fam : report.at("families"))
      rows.push_back(row_from_summary(fam.at("display").get<std::string>(), fam.at(section)));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return rows;
}

std::string render_report_table(const json& report) {
  std::string out;
  const auto runs = report.contains("runs") ? report.at("runs").size() : 0;
  try {
    for (const std::string section : {"per_epoch", "per_window"}) {
      out += section == "per_epoch" ? "Test results per 1 s epoch" : "Test results per window";
      out += " (mean over " + std::to_string(runs) + (runs == 1 ? " run)\n" : " runs)\n");
      auto rows = report_rows(report, section);
      rows.push_back(row_from_summary("All-null baseline", report.at("baseline").at(section)));
      out += render_table(rows);
      out += "\n";
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return out;
}

std::string render_report_csv(const json& report) {
  auto rows = report_rows(report, "per_epoch");
  try {
    rows.push_back(row_from_summary("All-null baseline", report.at("baseline").at("per_epoch")));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return render_csv(rows);
}

}  // namespace eegart
