#include "eegart/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "eegart/binary_io.hpp"
#include "eegart/edf.hpp"
#include "eegart/error.hpp"
#include "eegart/parallel.hpp"
#include "eegart/random.hpp"

namespace eegart {

namespace {

constexpr std::uint32_t kCacheVersion = 1;
constexpr double kTieEps = 1e-9;

}  // namespace

std::array<std::size_t, kNumClasses> LabeledFeatureSet::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : rows) ++counts[code(r.label)];
  return counts;
}

Matrix LabeledFeatureSet::features() const {
  Matrix x(rows.size(), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].features.size() != x.cols()) throw DataError("feature rows have inconsistent dimension");
    std::copy(rows[i].features.begin(), rows[i].features.end(), x.row(i).begin());
  }
  return x;
}

std::vector<ArtifactClass> LabeledFeatureSet::labels() const {
  std::vector<ArtifactClass> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.label);
  return y;
}

ArtifactClass label_window(double start_s, double length_s, const AnnotationSet& ann, double coverage) {
  const double end_s = start_s + length_s;
  struct Candidate {
    double covered = 0.0;
    double first_start = 0.0;
  };
  std::array<std::optional<Candidate>, kNumClasses> best;
  for (int c = 0; c < kNumClasses; ++c) {
    // Events are sorted by start, so clipped intervals are merged in order.
    double covered = 0.0;
    double cur_lo = 0.0, cur_hi = -1.0;
    std::optional<double> first;
    for (const auto& ev : ann.events) {
      if (code(ev.label) != c) continue;
      const double lo = std::max(ev.start_s, start_s);
      const double hi = std::min(ev.stop_s, end_s);
      if (hi <= lo) continue;
      if (!first) first = ev.start_s;
      if (lo > cur_hi) {
        if (cur_hi > cur_lo) covered += cur_hi - cur_lo;
        cur_lo = lo;
        cur_hi = hi;
      } else {
        cur_hi = std::max(cur_hi, hi);
      }
    }
    if (cur_hi > cur_lo) covered += cur_hi - cur_lo;
    if (first) best[c] = Candidate{covered, *first};
  }
  int winner = code(ArtifactClass::null);
  for (int c = 0; c < kNumClasses; ++c) {
    if (!best[c] || best[c]->covered + kTieEps < coverage * length_s) continue;
    if (winner == code(ArtifactClass::null)) {
      winner = c;
      continue;
    }
    const auto& w = *best[winner];
    const auto& b = *best[c];
    if (b.covered > w.covered + kTieEps ||
        (std::abs(b.covered - w.covered) <= kTieEps && b.first_start < w.first_start))
      winner = c;
  }
  return static_cast<ArtifactClass>(winner);
}

std::optional<SplitAssignment::Part> SplitAssignment::part_of(const std::string& patient) const {
  if (std::binary_search(train.begin(), train.end(), patient)) return Part::train;
  if (std::binary_search(validation.begin(), validation.end(), patient)) return Part::validation;
  if (std::binary_search(test.begin(), test.end(), patient)) return Part::test;
  return std::nullopt;
}

SplitAssignment patient_split(const std::set<std::string>& patients, const SplitRatios& ratios, std::uint64_t seed) {
  const std::size_t n = patients.size();
  if (n < 3) throw DataError("patient split needs at least 3 patients, got " + std::to_string(n));
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw UsageError("split ratios must be non-negative and sum to 1");
  std::vector<std::string> order(patients.begin(), patients.end());
  Rng rng(seed);
  rng.shuffle(order);
  auto part_size = [n](double r) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9)));
  };
  const std::size_t n_val = part_size(ratios.validation);
  const std::size_t n_test = part_size(ratios.test);
  const std::size_t n_train = n - n_val - n_test;

  SplitAssignment s;
  s.ratios = ratios;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

SplitAssignment patient_split(const CorpusIndex& index, const SplitRatios& ratios, std::uint64_t seed) {
  return patient_split(index.patients(), ratios, seed);
}

nlohmann::json split_manifest(const SplitAssignment& s) {
  return {{"seed", s.seed},
          {"ratios", {s.ratios.train, s.ratios.validation, s.ratios.test}},
          {"train", s.train},
          {"validation", s.validation},
          {"test", s.test}};
}

LabeledFeatureSet undersample(const LabeledFeatureSet& set, std::uint64_t seed) {
  if (set.rows.empty()) throw DataError("undersample: empty input");
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < set.rows.size(); ++i) by_class[code(set.rows[i].label)].push_back(i);
  std::size_t target = set.rows.size();
  for (const auto& idx : by_class)
    if (!idx.empty()) target = std::min(target, idx.size());

  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (const auto& idx : by_class) {
    if (idx.size() == target) {
      keep.insert(keep.end(), idx.begin(), idx.end());
      continue;
    }
    for (std::size_t j : rng.sample_without_replacement(idx.size(), target)) keep.push_back(idx[j]);
  }
  rng.shuffle(keep);
  LabeledFeatureSet out;
  out.rows.reserve(keep.size());
  for (std::size_t i : keep) out.rows.push_back(set.rows[i]);
  return out;
}

std::uint64_t DatasetConfig::hash() const {
  std::string key = features.canonical();
  char buf[96];
  std::snprintf(buf, sizeof buf, ";rate=%.17g;coverage=%.17g;montage=", target_rate_hz, coverage);
  key += buf;
  for (const auto& p : montage.pairs) key += p.name() + ",";
  return fnv1a(key);
}

std::vector<std::uint8_t> encode_feature_cache(const SessionFeatures& s, std::uint64_t config_hash,
                                               std::uint64_t content_hash) {
  BinaryWriter w;
  w.magic("EAF1");
  w.u32(kCacheVersion);
  w.u64(config_hash);
  w.u64(content_hash);
  w.str(s.patient_id + "/" + s.session_id);
  w.f64(s.sample_rate_hz);
  w.f64(s.duration_s);
  const std::size_t dim = s.windows.empty() ? 0 : s.windows.front().values.size();
  w.u32(static_cast<std::uint32_t>(dim));
  w.u64(s.windows.size());
  for (std::size_t i = 0; i < s.windows.size(); ++i) {
    w.f64(s.windows[i].start_s);
    w.u8(static_cast<std::uint8_t>(code(s.window_labels.at(i))));
    for (double v : s.windows[i].values) w.f64(v);
  }
  return w.take();
}

std::optional<SessionFeatures> decode_feature_cache(std::span<const std::uint8_t> bytes, std::uint64_t config_hash,
                                                    std::uint64_t content_hash) {
  BinaryReader r(bytes);
  r.expect_magic("EAF1");
  if (r.u32() != kCacheVersion) return std::nullopt;
  if (r.u64() != config_hash) return std::nullopt;
  if (r.u64() != content_hash) return std::nullopt;
  SessionFeatures s;
  const std::string id = r.str();
  const auto slash = id.find('/');
  if (slash == std::string::npos) throw DataError("feature cache: malformed record id");
  s.patient_id = id.substr(0, slash);
  s.session_id = id.substr(slash + 1);
  s.sample_rate_hz = r.f64();
  s.duration_s = r.f64();
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  if (count > r.remaining()) throw DataError("feature cache: truncated");
  s.windows.resize(count);
  s.window_labels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    s.windows[i].start_s = r.f64();
    s.window_labels[i] = class_from_code(r.u8());
    s.windows[i].values.resize(dim);
    for (auto& v : s.windows[i].values) v = r.f64();
  }
  if (!r.at_end()) throw DataError("feature cache: trailing bytes");
  s.from_cache = true;
  return s;
}

std::filesystem::path cache_path(const std::string& cache_dir, std::uint64_t config_hash, std::uint64_t content_hash) {
  char name[64];
  std::snprintf(name, sizeof name, "%016llx-%016llx.eaf", static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(content_hash));
  return std::filesystem::path(cache_dir) / name;
}

namespace {

std::vector<ArtifactClass> epoch_labels(double duration_s, const AnnotationSet& ann, double coverage) {
  const auto n = static_cast<std::size_t>(std::floor(duration_s + 1e-9));
  std::vector<ArtifactClass> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = label_window(static_cast<double>(t), 1.0, ann, coverage);
  return out;
}

}  // namespace

SessionFeatures load_session(const CorpusEntry& entry, const DatasetConfig& cfg) {
  const auto edf_bytes = read_file_bytes(entry.edf_path);
  const std::string ann_text = read_file_text(entry.annotation_path);
  const std::uint64_t config_hash = cfg.hash();
  const std::uint64_t content_hash = fnv1a(ann_text, fnv1a(edf_bytes));

  std::filesystem::path cached;
  if (!cfg.cache_dir.empty()) {
    cached = cache_path(cfg.cache_dir, config_hash, content_hash);
    if (std::filesystem::exists(cached)) {
      const auto bytes = read_file_bytes(cached.string());
      if (auto hit = decode_feature_cache(bytes, config_hash, content_hash)) {
        if (hit->patient_id == entry.patient_id && hit->session_id == entry.session_id) {
          const auto ann = load_annotations(ann_text, hit->duration_s);
          hit->epoch_labels = epoch_labels(hit->duration_s, ann, cfg.coverage);
          return std::move(*hit);
        }
      }
    }
  }

  SessionFeatures s;
  s.patient_id = entry.patient_id;
  s.session_id = entry.session_id;
  try {
    Recording rec = parse_edf(edf_bytes, EdfParseOptions{cfg.target_rate_hz});
    rec.patient_id = entry.patient_id;
    rec.session_id = entry.session_id;
    const auto ann = load_annotations(ann_text, rec.duration_s);
    const auto montaged = to_montage(rec, cfg.montage);
    s.sample_rate_hz = rec.sample_rate_hz;
    s.duration_s = rec.duration_s;
    s.windows = extract_features(montaged, cfg.features);
    s.window_labels.reserve(s.windows.size());
    for (const auto& w : s.windows) s.window_labels.push_back(label_window(w.start_s, cfg.features.window_s, ann, cfg.coverage));
    s.epoch_labels = epoch_labels(s.duration_s, ann, cfg.coverage);
  } catch (const DataError& e) {
    throw DataError(entry.edf_path + ": " + e.what());
  }
  if (!cached.empty()) {
    std::filesystem::create_directories(cfg.cache_dir);
    // Write-then-rename so concurrent readers never observe a partial file.
    const auto tmp = cached.string() + ".tmp";
    write_file_bytes(tmp, encode_feature_cache(s, config_hash, content_hash));
    std::filesystem::rename(tmp, cached);
  }
  return s;
}

std::vector<SessionFeatures> load_sessions(const CorpusIndex& index, const DatasetConfig& cfg) {
  std::vector<SessionFeatures> out(index.entries.size());
  parallel_for(index.entries.size(), cfg.workers, [&](std::size_t i) { out[i] = load_session(index.entries[i], cfg); });
  return out;
}

Splits assemble_splits(const std::vector<SessionFeatures>& sessions, const SplitAssignment& assignment,
                       std::uint64_t seed) {
  Splits out;
  out.assignment = assignment;
  LabeledFeatureSet train;
  for (const auto& s : sessions) {
    const auto part = assignment.part_of(s.patient_id);
    if (!part) throw DataError("patient " + s.patient_id + " is not in the split assignment");
    auto& dst = *part == SplitAssignment::Part::train        ? train
                : *part == SplitAssignment::Part::validation ? out.validation
                                                             : out.test;
    for (std::size_t i = 0; i < s.windows.size(); ++i)
      dst.rows.push_back({s.windows[i].values, s.window_labels[i], s.patient_id, s.session_id, s.windows[i].start_s});
  }
  out.train = train.rows.empty() ? train : undersample(train, seed);
  return out;
}

Splits build_splits(const CorpusIndex& index, const DatasetConfig& cfg, const SplitRatios& ratios,
                    std::uint64_t seed) {
  const auto sessions = load_sessions(index, cfg);
  return assemble_splits(sessions, patient_split(index, ratios, seed), seed);
}

std::string export_features_csv(const std::vector<SessionFeatures>& sessions) {
  std::string out = "patient,session,start_s,label";
  const std::size_t dim = sessions.empty() || sessions.front().windows.empty() ? 0 : sessions.front().windows.front().values.size();
  for (std::size_t k = 0; k < dim; ++k) out += ",f" + std::to_string(k);
  out += "\n";
  char buf[64];
  for (const auto& s : sessions) {
    for (std::size_t i = 0; i < s.windows.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.6g,", s.windows[i].start_s);
      out += s.patient_id + "," + s.session_id + buf + std::string(class_name(s.window_labels[i]));
      for (double v : s.windows[i].values) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out += buf;
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace eegart
