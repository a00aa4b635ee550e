#include "eegart/metrics.hpp"

#include <cstdio>

#include "eegart/error.hpp"

namespace eegart {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::row_total(int c) const {
  std::uint64_t t = 0;
  for (auto v : counts[c]) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::col_total(int c) const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += row[c];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int i = 0; i < kNumClasses; ++i)
    for (int j = 0; j < kNumClasses; ++j) counts[i][j] += other.counts[i][j];
  return *this;
}

ConfusionMatrix confusion(std::span<const ArtifactClass> truth, std::span<const ArtifactClass> pred) {
  if (truth.size() != pred.size())
    throw UsageError("confusion: length mismatch (" + std::to_string(truth.size()) + " vs " +
                     std::to_string(pred.size()) + ")");
  if (truth.empty()) throw UsageError("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[code(truth[i])][code(pred[i])];
  return cm;
}

EvalReport evaluate(const ConfusionMatrix& cm, const EvalOptions& options) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw UsageError("evaluate: confusion matrix is all zero");
  EvalReport r;
  std::uint64_t diag = 0;
  std::uint64_t weight_total = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const std::uint64_t tp = cm.counts[c][c];
    const std::uint64_t support = cm.row_total(c);
    const std::uint64_t predicted = cm.col_total(c);
    diag += tp;
    r.support[c] = support;
    r.precision[c] = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    r.recall[c] = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    if (support) r.sensitivity[c] = r.recall[c];
    const double denom = r.precision[c] + r.recall[c];
    r.f1[c] = denom > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / denom : 0.0;
    if (support && denom == 0.0)
      r.warnings.push_back("F1 of class " + std::string(class_name(static_cast<ArtifactClass>(c))) +
                           " is ill-defined and set to 0");
    if (!(options.f1_exclude_null && c == code(ArtifactClass::null))) weight_total += support;
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (options.f1_exclude_null && c == code(ArtifactClass::null)) continue;
    if (weight_total) r.weighted_f1 += static_cast<double>(r.support[c]) / static_cast<double>(weight_total) * r.f1[c];
  }
  r.accuracy = static_cast<double>(diag) / static_cast<double>(total);
  return r;
}

TableRow table_row(std::string algorithm, const EvalReport& r) {
  return {std::move(algorithm), r.weighted_f1, r.accuracy, r.sensitivity};
}

namespace {

std::string pct(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * *v);
  return buf;
}

}  // namespace

std::string render_table(std::span<const TableRow> rows) {
  std::size_t name_width = 9;
  for (const auto& r : rows) name_width = std::max(name_width, r.algorithm.size());
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %11s  %9s  %8s  %8s  %8s  %8s  %8s  %8s\n", static_cast<int>(name_width),
                "Algorithm", "Weighted-F1", "Accuracy", "S_eyem", "S_chew", "S_shiv", "S_elpp", "S_musc", "S_null");
  out += buf;
  out += std::string(name_width + 2 + 11 + 2 + 9 + 6 * 10, '-') + "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %11.4f  %9s", static_cast<int>(name_width), r.algorithm.c_str(),
                  r.weighted_f1, pct(r.accuracy).c_str());
    out += buf;
    for (const auto& s : r.sensitivity) {
      std::snprintf(buf, sizeof buf, "  %8s", pct(s).c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string render_csv(std::span<const TableRow> rows) {
  std::string out = "algorithm,weighted_f1,accuracy,s_eyem,s_chew,s_shiv,s_elpp,s_musc,s_null\n";
  char buf[64];
  for (const auto& r : rows) {
    out += r.algorithm;
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f", r.weighted_f1, r.accuracy);
    out += buf;
    for (const auto& s : r.sensitivity) {
      if (s) {
        std::snprintf(buf, sizeof buf, ",%.6f", *s);
        out += buf;
      } else {
        out += ",";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace eegart
