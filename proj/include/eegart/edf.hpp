#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eegart/types.hpp"

namespace eegart {

/// Referential multichannel recording in physical units (microvolts).
struct Recording {
  std::string patient_id;
  std::string session_id;
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_labels;
  Matrix signals;  // channels x samples
  double duration_s = 0.0;

  std::size_t num_channels() const { return signals.rows(); }
  std::size_t num_samples() const { return signals.cols(); }
};

struct EdfParseOptions {
  // Every signal is linearly resampled to this rate. When unset, signals keep
  // their native rate, which must then be shared by all of them.
  std::optional<double> target_rate_hz = 256.0;
};

/// Decodes a complete EDF byte stream. "EDF Annotations" channels are skipped.
/// Throws DataError on truncation, malformed header fields, degenerate
/// digital ranges, or when no ordinary signals are present.
Recording parse_edf(std::span<const std::uint8_t> bytes, const EdfParseOptions& options = {});

Recording load_edf(const std::string& path, const EdfParseOptions& options = {});

struct EdfChannelScaling {
  double physical_min = -1.0;
  double physical_max = 1.0;
  int digital_min = -32768;
  int digital_max = 32767;
};

/// Physical value of a digital sample under the header's linear map.
double edf_physical(int digital, const EdfChannelScaling& s);

/// Encodes a recording as EDF with 1 s data records. sample_rate_hz must be a
/// positive integer. When `scaling` is empty each channel gets a physical range
/// covering its own min/max; otherwise one entry per channel is required.
/// A trailing partial second is padded by repeating the last sample.
std::vector<std::uint8_t> write_edf(const Recording& rec,
                                    std::span<const EdfChannelScaling> scaling = {});

/// The scaling write_edf chooses for a channel when none is given.
EdfChannelScaling auto_scaling(std::span<const double> samples);

Matrix resample_linear(const Matrix& signals, double from_hz, double to_hz, std::size_t out_samples);

}  // namespace eegart
