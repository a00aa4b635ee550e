#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eegart/edf.hpp"
#include "eegart/types.hpp"

namespace eegart {

inline constexpr std::size_t kTcpChannels = 22;

struct DerivationPair {
  std::string anode;
  std::string cathode;

  std::string name() const { return anode + "-" + cathode; }
  bool operator==(const DerivationPair&) const = default;
};

/// Ordered list of bipolar derivations.
struct MontageDefinition {
  std::vector<DerivationPair> pairs;

  /// The 22-pair ACNS TCP chain (identical to config/tcp_montage.txt).
  static MontageDefinition tcp();

  /// Parses one `ANODE-CATHODE` pair per line; '#' comments and blank lines skipped.
  static MontageDefinition parse(std::string_view text);
  static MontageDefinition load(const std::string& path);
};

struct MontagedRecording {
  std::string patient_id;
  std::string session_id;
  double sample_rate_hz = 0.0;
  std::vector<std::string> channels;
  Matrix signals;  // channels x samples
  double duration_s = 0.0;

  std::size_t num_samples() const { return signals.cols(); }
};

/// Maps a referential channel label to its electrode name, e.g.
/// "EEG FP1-REF" -> "FP1", "eeg t3-le" -> "T3". Throws DataError when the
/// label does not name a 10-20 scalp electrode.
std::string resolve_channel(std::string_view label);

/// Bipolar montage: output channel k = rec[anode_k] - rec[cathode_k].
/// Labels that do not resolve are ignored. Throws DataError naming the first
/// missing electrode, or when two labels resolve to a needed electrode.
MontagedRecording to_montage(const Recording& rec, const MontageDefinition& montage);

inline MontagedRecording to_tcp(const Recording& rec) { return to_montage(rec, MontageDefinition::tcp()); }

}  // namespace eegart
