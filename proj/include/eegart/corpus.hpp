#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace eegart {

struct CorpusEntry {
  std::string patient_id;
  std::string session_id;  // file stem of the recording
  std::string edf_path;
  std::string annotation_path;

  bool operator==(const CorpusEntry&) const = default;
};

struct CorpusIndex {
  std::vector<CorpusEntry> entries;  // sorted by edf_path
  std::vector<std::string> warnings;

  std::set<std::string> patients() const;
};

struct CorpusScanOptions {
  // Index of the directory component (relative to the root) that names the
  // patient. Negative, or a file shallower than that, falls back to the regex.
  int patient_component = 0;
  // Applied to the file stem; capture group 1 is the patient id.
  std::string patient_regex = "^([^_]+)_";
  std::string annotation_extension = ".csv";
};

/// Recursively indexes every .edf file under `root` that has a same-stem
/// annotation file. Files without one are skipped with a warning. Throws
/// DataError for unreadable or empty trees and duplicate (patient, session).
CorpusIndex corpus_scan(const std::filesystem::path& root, const CorpusScanOptions& options = {});

}  // namespace eegart
