#include "eegart/corpus.hpp"

#include <algorithm>
#include <regex>
#include <system_error>

#include "eegart/error.hpp"

namespace eegart {

namespace fs = std::filesystem;

std::set<std::string> CorpusIndex::patients() const {
  std::set<std::string> out;
  for (const auto& e : entries) out.insert(e.patient_id);
  return out;
}

namespace {

std::string patient_of(const fs::path& rel, const CorpusScanOptions& options, const std::regex& re) {
  std::vector<std::string> dirs;
  for (const auto& part : rel.parent_path()) dirs.push_back(part.string());
  if (options.patient_component >= 0 && static_cast<std::size_t>(options.patient_component) < dirs.size())
    return dirs[static_cast<std::size_t>(options.patient_component)];
  std::smatch m;
  const std::string stem = rel.stem().string();
  if (std::regex_search(stem, m, re) && m.size() > 1 && m[1].length() > 0) return m[1].str();
  throw DataError("cannot determine patient id for " + rel.string());
}

}  // namespace

CorpusIndex corpus_scan(const fs::path& root, const CorpusScanOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("unreadable directory: " + root.string());
  std::vector<fs::path> edfs;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw DataError("unreadable directory: " + root.string() + " (" + ec.message() + ")");
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".edf") edfs.push_back(entry.path());
  }
  std::sort(edfs.begin(), edfs.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });

  const std::regex re(options.patient_regex);
  CorpusIndex index;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& edf : edfs) {
    auto ann = edf;
    ann.replace_extension(options.annotation_extension);
    if (!fs::is_regular_file(ann, ec)) {
      index.warnings.push_back("missing annotation file for " + edf.string());
      continue;
    }
    CorpusEntry e;
    e.patient_id = patient_of(fs::relative(edf, root), options, re);
    e.session_id = edf.stem().string();
    e.edf_path = edf.string();
    e.annotation_path = ann.string();
    if (!seen.emplace(e.patient_id, e.session_id).second)
      throw DataError("duplicate session " + e.patient_id + "/" + e.session_id);
    index.entries.push_back(std::move(e));
  }
  if (index.entries.empty()) throw DataError("empty corpus: " + root.string());
  return index;
}

}  // namespace eegart
