#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eegart/types.hpp"

namespace eegart {

/// counts[true][predicted]
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t row_total(int c) const;
  std::uint64_t col_total(int c) const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws UsageError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const ArtifactClass> truth, std::span<const ArtifactClass> pred);

struct EvalOptions {
  // Weighted-F1 over the five artifact classes only.
  bool f1_exclude_null = false;
};

struct EvalReport {
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  // Absent (nullopt) for classes with no true samples.
  std::array<std::optional<double>, kNumClasses> sensitivity{};
  std::array<std::uint64_t, kNumClasses> support{};
  std::vector<std::string> warnings;
};

/// Per-class F1 = 2PR/(P+R), with 0 when a denominator vanishes (a warning is
/// recorded). Weighted-F1 weights classes by true support. Throws UsageError
/// for an all-zero matrix.
EvalReport evaluate(const ConfusionMatrix& cm, const EvalOptions& options = {});

struct TableRow {
  std::string algorithm;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::array<std::optional<double>, kNumClasses> sensitivity{};
};

TableRow table_row(std::string algorithm, const EvalReport& r);

// Columns: Algorithm, Weighted-F1, Accuracy, S_eyem, S_chew, S_shiv, S_elpp,
// S_musc, S_null. Rates are printed as percentages.
std::string render_table(std::span<const TableRow> rows);
std::string render_csv(std::span<const TableRow> rows);

}  // namespace eegart
