#include "eegart/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "eegart/error.hpp"
#include "eegart/fft.hpp"
#include "eegart/jacobi.hpp"

namespace eegart {

namespace {

std::size_t samples_exact(double seconds, double fs, const char* what) {
  const double n = seconds * fs;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 || r < 1.0)
    throw UsageError(std::string(what) + " is not a whole number of samples at this rate");
  return static_cast<std::size_t>(r);
}

Window make_window(const MontagedRecording& rec, std::size_t first, std::size_t len) {
  Window w;
  w.start_s = static_cast<double>(first) / rec.sample_rate_hz;
  w.samples = Matrix(rec.signals.rows(), len);
  for (std::size_t c = 0; c < rec.signals.rows(); ++c) {
    auto src = rec.signals.row(c).subspan(first, len);
    std::copy(src.begin(), src.end(), w.samples.row(c).begin());
  }
  return w;
}

template <typename Fn>
void for_each_window(const MontagedRecording& rec, const FeatureConfig& cfg, Fn&& fn) {
  cfg.validate(rec.sample_rate_hz);
  const std::size_t len = samples_exact(cfg.window_s, rec.sample_rate_hz, "window");
  const std::size_t stride = samples_exact(cfg.stride_s(), rec.sample_rate_hz, "stride");
  const std::size_t count = window_count(rec.num_samples(), rec.sample_rate_hz, cfg);
  if (count == 0) throw DataError("recording shorter than one window");
  for (std::size_t i = 0; i < count; ++i) fn(make_window(rec, i * stride, len));
}

}  // namespace

std::size_t FeatureConfig::num_bins() const {
  return static_cast<std::size_t>(std::llround(band_hi_hz - band_lo_hz)) + 1;
}

std::size_t FeatureConfig::feature_dim(std::size_t channels) const {
  return channels + (append_correlations ? channels * (channels - 1) / 2 : 0);
}

void FeatureConfig::validate(double fs) const {
  if (!(window_s > 0.0)) throw UsageError("window_s must be positive");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) throw UsageError("overlap_fraction must be in [0, 1)");
  if (!(band_lo_hz >= 0.0 && band_lo_hz < band_hi_hz)) throw UsageError("band_lo_hz must be below band_hi_hz");
  if (band_lo_hz != std::floor(band_lo_hz) || band_hi_hz != std::floor(band_hi_hz))
    throw UsageError("band limits must be whole Hz");
  if (!(band_hi_hz < fs / 2.0)) throw UsageError("band_hi_hz must be below the Nyquist frequency");
  samples_exact(window_s, fs, "window");
  samples_exact(stride_s(), fs, "stride");
}

std::string FeatureConfig::canonical() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "window=%.17g;overlap=%.17g;lo=%.17g;hi=%.17g;norm=%s;log=%d;corr=%d", window_s,
                overlap_fraction, band_lo_hz, band_hi_hz,
                normalization == Normalization::zscore_per_channel ? "zscore" : "none", log_magnitude ? 1 : 0,
                append_correlations ? 1 : 0);
  return buf;
}

std::size_t window_count(std::size_t num_samples, double fs, const FeatureConfig& cfg) {
  const std::size_t len = samples_exact(cfg.window_s, fs, "window");
  const std::size_t stride = samples_exact(cfg.stride_s(), fs, "stride");
  if (num_samples < len) return 0;
  return (num_samples - len) / stride + 1;
}

std::vector<Window> window_slice(const MontagedRecording& rec, const FeatureConfig& cfg) {
  std::vector<Window> out;
  for_each_window(rec, cfg, [&](Window w) { out.push_back(std::move(w)); });
  return out;
}

NormalizedSpectrum spectral_features(const Window& w, double fs, const FeatureConfig& cfg) {
  const std::size_t n = w.samples.cols();
  const std::size_t nfft = next_pow2(n);
  const std::size_t bins = cfg.num_bins();
  std::vector<std::size_t> bin_index(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double f = cfg.band_lo_hz + static_cast<double>(b);
    bin_index[b] = static_cast<std::size_t>(std::llround(f * static_cast<double>(nfft) / fs));
  }

  NormalizedSpectrum out;
  out.values = Matrix(w.samples.rows(), bins);
  out.flat.assign(w.samples.rows(), 0);
  for (std::size_t c = 0; c < w.samples.rows(); ++c) {
    const auto x = w.samples.row(c);
    const auto mag = magnitude_spectrum(x, nfft);
    auto row = out.values.row(c);
    for (std::size_t b = 0; b < bins; ++b) row[b] = mag[bin_index[b]];

    // A channel whose in-band magnitudes vary only at roundoff level relative
    // to its energy (constant or zero input) is flat.
    double energy = 0.0;
    for (double v : x) energy += v * v;
    const auto [mn, mx] = std::minmax_element(row.begin(), row.end());
    if (*mx - *mn <= 1e-10 * std::sqrt(static_cast<double>(nfft) * energy)) {
      out.flat[c] = 1;
      if (cfg.normalization == Normalization::zscore_per_channel) std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    if (cfg.log_magnitude)
      for (auto& v : row) v = std::log10(v + kLogFloor);
    if (cfg.normalization == Normalization::zscore_per_channel) {
      double mean = 0.0;
      for (double v : row) mean += v;
      mean /= static_cast<double>(bins);
      double var = 0.0;
      for (double v : row) var += (v - mean) * (v - mean);
      var /= static_cast<double>(bins);
      if (var <= 0.0) {
        out.flat[c] = 1;
        std::fill(row.begin(), row.end(), 0.0);
        continue;
      }
      const double sd = std::sqrt(var);
      for (auto& v : row) v = (v - mean) / sd;
    }
  }
  return out;
}

CorrMatrix correlation_matrix(const NormalizedSpectrum& s) {
  const std::size_t n = s.values.rows();
  const std::size_t m = s.values.cols();
  Matrix centered(n, m);
  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = s.values.row(i);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(m);
    auto dst = centered.row(i);
    for (std::size_t k = 0; k < m; ++k) {
      dst[k] = row[k] - mean;
      norm[i] += dst[k] * dst[k];
    }
    norm[i] = std::sqrt(norm[i]);
    if (!s.flat.empty() && s.flat[i]) norm[i] = 0.0;
  }
  Matrix c = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (norm[i] > 0.0 && norm[j] > 0.0) {
        const auto a = centered.row(i);
        const auto b = centered.row(j);
        for (std::size_t k = 0; k < m; ++k) r += a[k] * b[k];
        r = std::clamp(r / (norm[i] * norm[j]), -1.0, 1.0);
      }
      c(i, j) = c(j, i) = r;
    }
  }
  return c;
}

FeatureVector eigen_features(const CorrMatrix& c) {
  auto eig = jacobi_eigen(c);
  FeatureVector out = std::move(eig.values);
  for (auto& v : out) v = std::abs(v);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<TimedFeature> extract_features(const MontagedRecording& rec, const FeatureConfig& cfg) {
  std::vector<TimedFeature> out;
  for_each_window(rec, cfg, [&](const Window& w) {
    const auto spectrum = spectral_features(w, rec.sample_rate_hz, cfg);
    const auto corr = correlation_matrix(spectrum);
    TimedFeature f{w.start_s, eigen_features(corr)};
    if (cfg.append_correlations) {
      for (std::size_t i = 0; i < corr.rows(); ++i)
        for (std::size_t j = i + 1; j < corr.cols(); ++j) f.values.push_back(corr(i, j));
    }
    out.push_back(std::move(f));
  });
  return out;
}

}  // namespace eegart
