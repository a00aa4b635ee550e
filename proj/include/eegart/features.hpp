#pragma once

#include <string>
#include <vector>

#include "eegart/montage.hpp"
#include "eegart/types.hpp"

namespace eegart {

enum class Normalization { zscore_per_channel, none };

struct FeatureConfig {
  double window_s = 1.0;
  double overlap_fraction = 0.75;
  double band_lo_hz = 1.0;
  double band_hi_hz = 24.0;
  Normalization normalization = Normalization::zscore_per_channel;
  bool log_magnitude = true;
  // Append the upper-triangle correlations after the eigenvalues.
  bool append_correlations = false;

  double stride_s() const { return window_s * (1.0 - overlap_fraction); }
  std::size_t num_bins() const;
  std::size_t feature_dim(std::size_t channels = kTcpChannels) const;

  /// Throws UsageError unless the config is consistent with `sample_rate_hz`.
  void validate(double sample_rate_hz) const;

  /// Stable textual form used for cache keys.
  std::string canonical() const;
};

inline constexpr double kLogFloor = 1e-12;

struct Window {
  double start_s = 0.0;
  Matrix samples;  // channels x window samples
};

struct NormalizedSpectrum {
  Matrix values;             // channels x bins
  std::vector<char> flat;    // 1 where the channel carried no spectral variation
};

using CorrMatrix = Matrix;
using FeatureVector = std::vector<double>;

struct TimedFeature {
  double start_s = 0.0;
  FeatureVector values;
};

/// Number of full windows for `num_samples` samples; 0 when none fits.
std::size_t window_count(std::size_t num_samples, double sample_rate_hz, const FeatureConfig& cfg);

/// Full-length windows starting every stride; trailing partial windows are
/// dropped. Throws DataError when the recording is shorter than one window.
std::vector<Window> window_slice(const MontagedRecording& rec, const FeatureConfig& cfg);

/// Per channel: magnitude spectrum, 1 Hz bins band_lo..band_hi (nearest bin of
/// the zero-padded transform), optional log10(x + 1e-12), optional z-score.
NormalizedSpectrum spectral_features(const Window& w, double sample_rate_hz, const FeatureConfig& cfg);

/// Pearson correlation between channel rows. Flat or zero-variance rows get a
/// unit diagonal and zero off-diagonals.
CorrMatrix correlation_matrix(const NormalizedSpectrum& s);

/// Absolute eigenvalues of the symmetric correlation matrix, sorted descending.
FeatureVector eigen_features(const CorrMatrix& c);

std::vector<TimedFeature> extract_features(const MontagedRecording& rec, const FeatureConfig& cfg);

}  // namespace eegart
