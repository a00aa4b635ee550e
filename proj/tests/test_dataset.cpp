#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "eegart/binary_io.hpp"
#include "eegart/dataset.hpp"
#include "eegart/error.hpp"
#include "eegart/synth.hpp"
#include "support.hpp"

using namespace eegart;

namespace {

AnnotationSet events(std::vector<AnnotationEvent> e) { return AnnotationSet{std::move(e)}; }

std::set<std::string> patients(std::size_t n) {
  std::set<std::string> out;
  char buf[16];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "p%04zu", i);
    out.insert(buf);
  }
  return out;
}

LabeledFeatureSet rows_with_counts(const std::map<ArtifactClass, std::size_t>& counts) {
  LabeledFeatureSet s;
  double id = 0.0;
  for (const auto& [c, n] : counts)
    for (std::size_t i = 0; i < n; ++i) s.rows.push_back({{id++, 0.0}, c, "p", "s", id});
  return s;
}

const std::filesystem::path& small_corpus() {
  static const std::filesystem::path root = [] {
    const auto dir = testing::scratch_dir("dataset_corpus");
    SynthParams p;
    p.patients = 5;
    p.duration_s = 30.0;
    synth_corpus(dir, 99, p);
    return dir;
  }();
  return root;
}

}  // namespace

TEST_CASE("window labels by coverage") {
  CHECK(label_window(10.0, 1.0, events({{"TERM", 9.0, 12.0, ArtifactClass::eyem}})) == ArtifactClass::eyem);
  CHECK(label_window(10.0, 1.0, events({{"TERM", 10.8, 11.5, ArtifactClass::chew}})) == ArtifactClass::null);
  CHECK(label_window(10.0, 1.0, events({{"TERM", 9.5, 10.6, ArtifactClass::musc},
                                        {"TERM", 10.4, 11.5, ArtifactClass::elpp}})) == ArtifactClass::musc);
  // Exactly half the window is enough.
  CHECK(label_window(10.0, 1.0, events({{"TERM", 10.5, 12.0, ArtifactClass::shiv}})) == ArtifactClass::shiv);
  CHECK(label_window(10.0, 1.0, AnnotationSet{}) == ArtifactClass::null);
  // Larger overlap wins regardless of order.
  CHECK(label_window(10.0, 1.0, events({{"TERM", 9.0, 10.55, ArtifactClass::eyem},
                                        {"TERM", 10.3, 12.0, ArtifactClass::chew}})) == ArtifactClass::chew);
  // Same start: smaller class code.
  CHECK(label_window(10.0, 1.0, events({{"TERM", 10.0, 11.0, ArtifactClass::musc},
                                        {"TERM", 10.0, 11.0, ArtifactClass::chew}})) == ArtifactClass::chew);
  // Coverage is configurable.
  CHECK(label_window(10.0, 1.0, events({{"TERM", 10.8, 11.5, ArtifactClass::chew}}), 0.2) == ArtifactClass::chew);
}

TEST_CASE("channel-scoped events count like record-level ones; same-class events merge") {
  const auto ann = events({{"T3-C3", 10.0, 10.3, ArtifactClass::elpp}, {"C3-CZ", 10.2, 10.6, ArtifactClass::elpp}});
  CHECK(label_window(10.0, 1.0, ann) == ArtifactClass::elpp);
}

TEST_CASE("label_window is total") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    AnnotationSet ann;
    for (int k = 0; k < 4; ++k) {
      const double a = rng.uniform(0.0, 20.0);
      ann.events.push_back({"TERM", a, a + rng.uniform(0.01, 3.0), kAllClasses[rng.below(5)]});
    }
    const auto c = label_window(rng.uniform(0.0, 20.0), 1.0, ann);
    CHECK(code(c) >= 0);
    CHECK(code(c) < kNumClasses);
  }
}

TEST_CASE("split sizes") {
  const auto s10 = patient_split(patients(10), {}, 1);
  CHECK(s10.train.size() == 6);
  CHECK(s10.validation.size() == 2);
  CHECK(s10.test.size() == 2);
  const auto s213 = patient_split(patients(213), {}, 1);
  CHECK(s213.train.size() == 129);
  CHECK(s213.validation.size() == 42);
  CHECK(s213.test.size() == 42);
  // Small cohorts still get one patient in each held-out set.
  const auto s3 = patient_split(patients(3), {}, 1);
  CHECK(s3.train.size() == 1);
  CHECK(s3.validation.size() == 1);
  CHECK(s3.test.size() == 1);
  const auto s4 = patient_split(patients(4), {}, 1);
  CHECK(s4.train.size() == 2);
  CHECK(s4.validation.size() == 1);
  CHECK(s4.test.size() == 1);
  CHECK_THROWS_AS(patient_split(patients(2), {}, 1), DataError);
}

TEST_CASE("splits are disjoint, exhaustive and seeded") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto all = patients(17);
    const auto s = patient_split(all, {}, seed);
    std::set<std::string> seen;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      CHECK(std::is_sorted(part->begin(), part->end()));
      for (const auto& p : *part) CHECK(seen.insert(p).second);
    }
    CHECK(seen == all);
    const auto again = patient_split(all, {}, seed);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
  }
  CHECK(patient_split(patients(17), {}, 1).test != patient_split(patients(17), {}, 2).test);
}

TEST_CASE("split manifest JSON") {
  const auto s = patient_split(patients(5), {}, 7);
  const auto j = split_manifest(s);
  CHECK(j["seed"] == 7);
  CHECK(j["ratios"].size() == 3);
  CHECK(j["train"].get<std::vector<std::string>>() == s.train);
  CHECK(j["validation"].get<std::vector<std::string>>() == s.validation);
  CHECK(j["test"].get<std::vector<std::string>>() == s.test);
}

TEST_CASE("undersampling equalises to the minority count without replacement") {
  const auto in = rows_with_counts({{ArtifactClass::null, 1000}, {ArtifactClass::eyem, 100}, {ArtifactClass::chew, 50}});
  const auto out = undersample(in, 3);
  const auto counts = out.class_counts();
  CHECK(counts[code(ArtifactClass::null)] == 50);
  CHECK(counts[code(ArtifactClass::eyem)] == 50);
  CHECK(counts[code(ArtifactClass::chew)] == 50);
  CHECK(counts[code(ArtifactClass::musc)] == 0);
  std::set<double> ids;
  for (const auto& r : out.rows) {
    CHECK(ids.insert(r.features[0]).second);
    CHECK(r.features[0] < 1150.0);
    CHECK(in.rows[static_cast<std::size_t>(r.features[0])] == r);
  }
  CHECK(undersample(in, 3).rows == out.rows);
}

TEST_CASE("balanced input keeps its multiset of rows") {
  const auto in = rows_with_counts({{ArtifactClass::shiv, 20}, {ArtifactClass::elpp, 20}});
  auto out = undersample(in, 5);
  auto key = [](const FeatureRow& r) { return r.features[0]; };
  std::vector<double> a, b;
  for (const auto& r : in.rows) a.push_back(key(r));
  for (const auto& r : out.rows) b.push_back(key(r));
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK_THROWS_AS(undersample(LabeledFeatureSet{}, 1), DataError);
}

TEST_CASE("feature cache round trip and key checks") {
  SessionFeatures s;
  s.patient_id = "p1";
  s.session_id = "p1_s01";
  s.sample_rate_hz = 256.0;
  s.duration_s = 3.0;
  s.windows = {{0.0, {1.0, 2.0}}, {0.25, {3.0, 4.0}}};
  s.window_labels = {ArtifactClass::chew, ArtifactClass::null};
  const auto bytes = encode_feature_cache(s, 11, 22);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EAF1");
  const auto back = decode_feature_cache(bytes, 11, 22);
  REQUIRE(back.has_value());
  CHECK(back->patient_id == "p1");
  CHECK(back->session_id == "p1_s01");
  CHECK(back->windows.size() == 2);
  CHECK(back->windows[1].values == std::vector<double>{3.0, 4.0});
  CHECK(back->window_labels == s.window_labels);
  CHECK(back->from_cache);
  CHECK_FALSE(decode_feature_cache(bytes, 12, 22).has_value());
  CHECK_FALSE(decode_feature_cache(bytes, 11, 23).has_value());
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  CHECK_THROWS_AS(decode_feature_cache(cut, 11, 22), DataError);
}

TEST_CASE("sessions load with labels and reuse the cache") {
  const auto index = corpus_scan(small_corpus());
  DatasetConfig cfg;
  cfg.cache_dir = (testing::scratch_dir("dataset_cache") / "c").string();
  const auto first = load_sessions(index, cfg);
  REQUIRE(first.size() == 5);
  for (const auto& s : first) {
    CHECK_FALSE(s.from_cache);
    CHECK(s.windows.size() == 117);
    CHECK(s.window_labels.size() == s.windows.size());
    CHECK(s.epoch_labels.size() == 30);
  }
  const auto second = load_sessions(index, cfg);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].from_cache);
    REQUIRE(second[i].windows.size() == first[i].windows.size());
    for (std::size_t w = 0; w < first[i].windows.size(); ++w) CHECK(second[i].windows[w].values == first[i].windows[w].values);
    CHECK(second[i].window_labels == first[i].window_labels);
    CHECK(second[i].epoch_labels == first[i].epoch_labels);
  }
  // A different feature configuration must not hit the old entries.
  DatasetConfig other = cfg;
  other.coverage = 0.75;
  CHECK_FALSE(load_sessions(index, other).front().from_cache);
  // Worker count never changes the result.
  DatasetConfig parallel = cfg;
  parallel.cache_dir.clear();
  parallel.workers = 3;
  const auto par = load_sessions(index, parallel);
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(par[i].windows.back().values == first[i].windows.back().values);
}

TEST_CASE("build_splits routes rows by patient and rebalances train only") {
  const auto index = corpus_scan(small_corpus());
  DatasetConfig cfg;
  const auto splits = build_splits(index, cfg, {}, 4);
  std::set<std::string> tr, va, te;
  for (const auto& r : splits.train.rows) tr.insert(r.patient_id);
  for (const auto& r : splits.validation.rows) va.insert(r.patient_id);
  for (const auto& r : splits.test.rows) te.insert(r.patient_id);
  for (const auto& p : tr) {
    CHECK(va.count(p) == 0);
    CHECK(te.count(p) == 0);
  }
  for (const auto& p : va) CHECK(te.count(p) == 0);

  std::size_t present = 0, first = 0;
  for (auto n : splits.train.class_counts()) {
    if (n == 0) continue;
    if (present++ == 0) first = n;
    CHECK(n == first);
  }
  CHECK(present >= 2);
  // Held-out sets keep every window of their patients (natural imbalance).
  CHECK(splits.test.rows.size() == 117 * te.size());
  const auto tc = splits.test.class_counts();
  CHECK(tc[code(ArtifactClass::null)] > tc[code(ArtifactClass::elpp)]);
}

TEST_CASE("CSV export has one row per window") {
  const auto index = corpus_scan(small_corpus());
  const auto sessions = load_sessions(index, DatasetConfig{});
  const auto csv = export_features_csv(sessions);
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == 1 + 5 * 117);
  CHECK(csv.rfind("patient,session,start_s,label,f0,", 0) == 0);
}
