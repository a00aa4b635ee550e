#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "eegart/error.hpp"
#include "eegart/features.hpp"
#include "eegart/random.hpp"
#include "oracles.hpp"

using namespace eegart;

namespace {

MontagedRecording noise_record(double duration_s, std::uint64_t seed, double fs = 256.0) {
  MontagedRecording rec;
  rec.sample_rate_hz = fs;
  rec.duration_s = duration_s;
  for (const auto& p : MontageDefinition::tcp().pairs) rec.channels.push_back(p.name());
  rec.signals = Matrix(kTcpChannels, static_cast<std::size_t>(std::llround(duration_s * fs)));
  Rng rng(seed);
  for (auto& v : rec.signals.data()) v = 20.0 * rng.normal();
  return rec;
}

Window noise_window(std::uint64_t seed, double amp = 20.0) {
  Window w;
  w.samples = Matrix(kTcpChannels, 256);
  Rng rng(seed);
  for (auto& v : w.samples.data()) v = amp * rng.normal();
  return w;
}

}  // namespace

TEST_CASE("window counts and starts") {
  FeatureConfig cfg;
  SUBCASE("10 s at 75% overlap") {
    const auto w = window_slice(noise_record(10.0, 1), cfg);
    REQUIRE(w.size() == 37);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i].start_s == 0.25 * static_cast<double>(i));
    CHECK(w.back().start_s == 9.0);
    CHECK(w[0].samples.cols() == 256);
  }
  SUBCASE("exactly one window") { CHECK(window_slice(noise_record(1.0, 1), cfg).size() == 1); }
  SUBCASE("disjoint windows") {
    cfg.overlap_fraction = 0.0;
    const auto w = window_slice(noise_record(5.0, 1), cfg);
    REQUIRE(w.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(w[i].start_s == static_cast<double>(i));
  }
  SUBCASE("too short") {
    CHECK_THROWS_WITH_AS(window_slice(noise_record(0.5, 1), cfg), doctest::Contains("shorter than one window"),
                         DataError);
  }
  SUBCASE("trailing partial windows are dropped") {
    const auto rec = noise_record(3.1, 1);
    const auto w = window_slice(rec, cfg);
    CHECK(w.size() == 9);
  }
}

TEST_CASE("window count formula over a grid") {
  for (double overlap : {0.0, 0.5, 0.75, 0.875}) {
    FeatureConfig cfg;
    cfg.overlap_fraction = overlap;
    const auto stride = static_cast<std::size_t>(std::llround(256 * (1.0 - overlap)));
    for (std::size_t n = 0; n < 256 * 6; n += 37) {
      const std::size_t want = n < 256 ? 0 : (n - 256) / stride + 1;
      CHECK(window_count(n, 256.0, cfg) == want);
    }
  }
}

TEST_CASE("config validation") {
  FeatureConfig cfg;
  CHECK_NOTHROW(cfg.validate(256.0));
  CHECK(cfg.num_bins() == 24);
  CHECK(cfg.feature_dim() == 22);
  cfg.append_correlations = true;
  CHECK(cfg.feature_dim() == 22 + 231);
  FeatureConfig bad;
  bad.overlap_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(256.0), UsageError);
  bad = {};
  bad.band_hi_hz = 200.0;
  CHECK_THROWS_AS(bad.validate(256.0), UsageError);
  bad = {};
  bad.band_lo_hz = 30.0;
  CHECK_THROWS_AS(bad.validate(256.0), UsageError);
  bad = {};
  bad.window_s = 1.0 / 3.0;
  CHECK_THROWS_AS(bad.validate(256.0), UsageError);
}

TEST_CASE("a 10 Hz sine peaks at bin 10") {
  Window w;
  w.samples = Matrix(1, 256);
  for (std::size_t i = 0; i < 256; ++i) w.samples(0, i) = std::sin(2.0 * std::numbers::pi * 10.0 * i / 256.0);
  FeatureConfig raw;
  raw.log_magnitude = false;
  raw.normalization = Normalization::none;
  const auto spec = spectral_features(w, 256.0, raw);
  const std::vector<double> x(w.samples.data().begin(), w.samples.data().end());
  const auto oracle = testing::naive_dft_magnitude(x, 256);
  for (std::size_t b = 0; b < 24; ++b) CHECK(std::abs(spec.values(0, b) - oracle[b + 1]) < 1e-9);
  const auto row = spec.values.row(0);
  CHECK(std::max_element(row.begin(), row.end()) - row.begin() == 9);

  const auto z = spectral_features(w, 256.0, FeatureConfig{});
  const auto zr = z.values.row(0);
  CHECK(std::max_element(zr.begin(), zr.end()) - zr.begin() == 9);
}

TEST_CASE("non power-of-two windows use the nearest zero-padded bin") {
  // 200 Hz: a 1 s window is 200 samples, padded to 256.
  Window w;
  w.samples = Matrix(1, 200);
  Rng rng(8);
  for (auto& v : w.samples.data()) v = rng.normal();
  FeatureConfig raw;
  raw.log_magnitude = false;
  raw.normalization = Normalization::none;
  const auto spec = spectral_features(w, 200.0, raw);
  const std::vector<double> x(w.samples.data().begin(), w.samples.data().end());
  const auto oracle = testing::naive_dft_magnitude(x, 256);
  for (std::size_t b = 0; b < 24; ++b) {
    const auto k = static_cast<std::size_t>(std::llround((b + 1) * 256.0 / 200.0));
    CHECK(std::abs(spec.values(0, b) - oracle[k]) < 1e-9);
  }
}

TEST_CASE("z-scored rows have zero mean and unit variance; constant rows are zero") {
  auto w = noise_window(3);
  for (std::size_t i = 0; i < 256; ++i) w.samples(5, i) = 42.0;
  for (std::size_t i = 0; i < 256; ++i) w.samples(6, i) = 0.0;
  const auto s = spectral_features(w, 256.0, FeatureConfig{});
  for (std::size_t c = 0; c < kTcpChannels; ++c) {
    const auto row = s.values.row(c);
    if (c == 5 || c == 6) {
      CHECK(s.flat[c] == 1);
      for (double v : row) CHECK(v == 0.0);
      continue;
    }
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / 24.0;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(var / 24.0 - 1.0) < 1e-9);
  }
}

TEST_CASE("correlation matrix properties") {
  NormalizedSpectrum s;
  s.values = Matrix(4, 24);
  s.flat.assign(4, 0);
  Rng rng(6);
  for (std::size_t b = 0; b < 24; ++b) {
    s.values(0, b) = rng.normal();
    s.values(1, b) = s.values(0, b);
    s.values(2, b) = -s.values(0, b);
    s.values(3, b) = rng.normal();
  }
  const auto c = correlation_matrix(s);
  CHECK(c(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(c(i, i) == 1.0);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(c(i, j) == c(j, i));
      CHECK(c(i, j) >= -1.0);
      CHECK(c(i, j) <= 1.0);
    }
  }
  s.flat[3] = 1;
  const auto f = correlation_matrix(s);
  for (std::size_t j = 0; j < 3; ++j) CHECK(f(3, j) == 0.0);
  CHECK(f(3, 3) == 1.0);
}

TEST_CASE("analytic eigen spectra") {
  SUBCASE("all ones") {
    const auto v = eigen_features(Matrix(22, 22, 1.0));
    CHECK(v[0] == doctest::Approx(22.0).epsilon(1e-12));
    for (std::size_t k = 1; k < 22; ++k) CHECK(v[k] < 1e-10);
  }
  SUBCASE("identity") {
    for (double v : eigen_features(Matrix::identity(22))) CHECK(v == 1.0);
  }
  SUBCASE("2x2 block plus identity") {
    auto c = Matrix::identity(22);
    c(0, 1) = c(1, 0) = 0.5;
    const auto v = eigen_features(c);
    // Roots of (1 - l)^2 - 0.25: 1.5 and 0.5.
    CHECK(v[0] == doctest::Approx(1.5).epsilon(1e-12));
    for (std::size_t k = 1; k < 21; ++k) CHECK(v[k] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[21] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("eigen features of real windows: sorted, non-negative, trace 22") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = noise_window(seed);
    const auto c = correlation_matrix(spectral_features(w, 256.0, FeatureConfig{}));
    const auto v = eigen_features(c);
    REQUIRE(v.size() == 22);
    CHECK(std::is_sorted(v.begin(), v.end(), std::greater<>()));
    for (double x : v) CHECK(x >= 0.0);
    CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 22.0) < 1e-6);
  }
}

TEST_CASE("positive rescaling leaves features unchanged") {
  Rng rng(12);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = noise_window(seed);
    auto scaled = w;
    const double k = std::exp(rng.uniform(std::log(0.01), std::log(100.0)));
    for (auto& v : scaled.samples.data()) v *= k;
    const auto a = eigen_features(correlation_matrix(spectral_features(w, 256.0, FeatureConfig{})));
    const auto b = eigen_features(correlation_matrix(spectral_features(scaled, 256.0, FeatureConfig{})));
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("extract_features composes the stages") {
  const auto rec = noise_record(10.0, 4);
  const auto feats = extract_features(rec, FeatureConfig{});
  REQUIRE(feats.size() == 37);
  const auto windows = window_slice(rec, FeatureConfig{});
  for (std::size_t i = 0; i < feats.size(); ++i) {
    CHECK(feats[i].values.size() == 22);
    CHECK(feats[i].start_s == windows[i].start_s);
    const auto direct =
        eigen_features(correlation_matrix(spectral_features(windows[i], 256.0, FeatureConfig{})));
    CHECK(feats[i].values == direct);
  }
  const auto again = extract_features(rec, FeatureConfig{});
  for (std::size_t i = 0; i < feats.size(); ++i) CHECK(feats[i].values == again[i].values);
}

TEST_CASE("a zero recording maps to all-ones features") {
  auto rec = noise_record(3.0, 1);
  std::fill(rec.signals.data().begin(), rec.signals.data().end(), 0.0);
  for (const auto& f : extract_features(rec, FeatureConfig{}))
    for (double v : f.values) CHECK(v == 1.0);
}

TEST_CASE("appended correlations follow the eigenvalues") {
  FeatureConfig cfg;
  cfg.append_correlations = true;
  const auto rec = noise_record(2.0, 9);
  const auto feats = extract_features(rec, cfg);
  const auto windows = window_slice(rec, cfg);
  REQUIRE(feats[0].values.size() == 253);
  const auto c = correlation_matrix(spectral_features(windows[0], 256.0, cfg));
  std::size_t k = 22;
  for (std::size_t i = 0; i < 22; ++i)
    for (std::size_t j = i + 1; j < 22; ++j) CHECK(feats[0].values[k++] == c(i, j));
}
