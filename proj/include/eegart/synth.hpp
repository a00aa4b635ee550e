#pragma once

#include <cstdint>
#include <filesystem>

#include "eegart/annotations.hpp"
#include "eegart/corpus.hpp"
#include "eegart/edf.hpp"

namespace eegart {

struct SynthParams {
  std::size_t patients = 4;
  std::size_t sessions_per_patient = 1;
  double duration_s = 120.0;
  // Expected fraction of each recording covered by artifact events.
  double artifact_rate = 0.4;
  double sample_rate_hz = 256.0;

  void validate() const;
};

struct SynthSession {
  Recording recording;
  AnnotationSet annotations;
};

/// One referential recording (21 scalp/ear electrodes as "EEG X-REF" plus an
/// EKG channel) over white background noise, with artifact events cycling
/// through all five classes:
///   eyem  slow 0.5-2.5 Hz frontal deflections, opposite polarity per side
///   chew  bilateral temporal EMG bursts gated at 2-4 Hz
///   shiv  weak 6-9 Hz tremor on every electrode
///   elpp  decaying steps on one electrode (annotated on one bipolar channel)
///   musc  continuous high-frequency EMG over one frontotemporal side
SynthSession synth_session(std::uint64_t seed, std::size_t patient, std::size_t session, const SynthParams& params);

/// Writes `<out>/<patient>/<patient>_sNN.edf` and the matching `.csv` for every
/// session, then returns the scanned index. Output bytes depend only on
/// (seed, params). Throws DataError when a file cannot be written.
CorpusIndex synth_corpus(const std::filesystem::path& out_dir, std::uint64_t seed, const SynthParams& params);

std::string synth_patient_id(std::size_t patient);

}  // namespace eegart
