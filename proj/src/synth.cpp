#include "eegart/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "eegart/binary_io.hpp"
#include "eegart/error.hpp"
#include "eegart/random.hpp"

namespace eegart {

namespace {

constexpr std::array<std::string_view, 21> kElectrodes = {"FP1", "FP2", "F7", "F8", "F3", "F4", "FZ",
                                                         "C3",  "C4",  "CZ", "T3", "T4", "T5", "T6",
                                                         "P3",  "P4",  "PZ", "O1", "O2", "A1", "A2"};
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBackgroundUv = 10.0;

std::size_t electrode(std::string_view name) {
  return static_cast<std::size_t>(std::find(kElectrodes.begin(), kElectrodes.end(), name) - kElectrodes.begin());
}

struct Gain {
  std::string_view electrode;
  double gain;
};

// Raised-cosine ramps so events do not start with a discontinuity.
double taper(double t, double a, double b) {
  constexpr double ramp = 0.2;
  if (t < a || t >= b) return 0.0;
  const double edge = std::min(t - a, b - t);
  return edge >= ramp ? 1.0 : 0.5 - 0.5 * std::cos(std::numbers::pi * edge / ramp);
}

class SignalBuilder {
 public:
  SignalBuilder(Matrix& eeg, double fs) : eeg_(eeg), fs_(fs) {}

  std::size_t first(double t) const { return static_cast<std::size_t>(std::ceil(t * fs_)); }
  std::size_t last(double t) const { return std::min(eeg_.cols(), static_cast<std::size_t>(std::ceil(t * fs_))); }
  double time(std::size_t i) const { return static_cast<double>(i) / fs_; }

  void eyem(double a, double b, Rng& rng) {
    std::array<double, 3> f{}, phase{};
    for (std::size_t k = 0; k < 3; ++k) {
      f[k] = rng.uniform(0.5, 2.5);
      phase[k] = rng.uniform(0.0, kTwoPi);
    }
    static constexpr std::array<Gain, 6> gains{
        {{"FP1", 1.0}, {"FP2", -1.0}, {"F7", 0.6}, {"F8", -0.6}, {"F3", 0.4}, {"F4", -0.4}}};
    for (std::size_t i = first(a); i < last(b); ++i) {
      const double t = time(i);
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += 60.0 * std::sin(kTwoPi * f[k] * t + phase[k]);
      s *= taper(t, a, b);
      for (const auto& g : gains) eeg_(electrode(g.electrode), i) += g.gain * s;
    }
  }

  void chew(double a, double b, Rng& rng) {
    const double rate = rng.uniform(2.0, 4.0);
    const double phase = rng.uniform(0.0, kTwoPi);
    static constexpr std::array<Gain, 8> gains{{{"F7", 1.0},
                                                {"F8", 1.0},
                                                {"T3", 1.0},
                                                {"T4", 1.0},
                                                {"A1", 0.8},
                                                {"A2", 0.8},
                                                {"T5", 0.7},
                                                {"T6", 0.7}}};
    std::array<double, gains.size()> prev{};
    for (std::size_t i = first(a); i < last(b); ++i) {
      const double t = time(i);
      const double envelope = std::pow(std::max(0.0, std::sin(kTwoPi * rate * t + phase)), 4.0) * taper(t, a, b);
      for (std::size_t e = 0; e < gains.size(); ++e) {
        // Differenced noise: EMG power rises with frequency.
        const double w = 40.0 * rng.normal();
        const double emg = w - prev[e];
        prev[e] = w;
        eeg_(electrode(gains[e].electrode), i) += gains[e].gain * envelope * (emg + 25.0);
      }
    }
  }

  void shiv(double a, double b, Rng& rng) {
    const double f = rng.uniform(6.0, 9.0);
    std::array<double, kElectrodes.size()> phase{};
    for (auto& p : phase) p = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = first(a); i < last(b); ++i) {
      const double t = time(i);
      const double w = taper(t, a, b);
      for (std::size_t e = 0; e < kElectrodes.size(); ++e)
        eeg_(e, i) += w * (6.0 * std::sin(kTwoPi * f * t + phase[e]) + 2.0 * std::sin(2.0 * kTwoPi * f * t + phase[e]));
    }
  }

  void elpp(double a, double b, std::size_t e, Rng& rng) {
    double pop = a + rng.uniform(0.0, 0.3);
    while (pop < b) {
      const double height = rng.uniform(100.0, 160.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      for (std::size_t i = first(pop); i < last(b); ++i) {
        const double dt = time(i) - pop;
        if (dt > 2.0) break;
        eeg_(e, i) += height * std::exp(-dt / 0.25);
      }
      pop += rng.uniform(0.5, 0.9);
    }
  }

  void musc(double a, double b, bool left, Rng& rng) {
    static constexpr std::array<Gain, 6> left_gains{
        {{"FP1", 1.0}, {"F7", 1.0}, {"T3", 1.0}, {"T5", 0.8}, {"A1", 0.8}, {"F3", 0.5}}};
    static constexpr std::array<Gain, 6> right_gains{
        {{"FP2", 1.0}, {"F8", 1.0}, {"T4", 1.0}, {"T6", 0.8}, {"A2", 0.8}, {"F4", 0.5}}};
    const auto& gains = left ? left_gains : right_gains;
    std::array<double, 6> prev{};
    for (std::size_t i = first(a); i < last(b); ++i) {
      const double w = taper(time(i), a, b);
      for (std::size_t e = 0; e < gains.size(); ++e) {
        const double x = 40.0 * rng.normal();
        eeg_(electrode(gains[e].electrode), i) += w * gains[e].gain * (x - prev[e]);
        prev[e] = x;
      }
    }
  }

 private:
  Matrix& eeg_;
  double fs_;
};

// Bipolar channel used as the scope of a pop on `name`.
std::string pop_scope(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 10> scopes{{{"C3", "C3-CZ"},
                                                                                         {"C4", "CZ-C4"},
                                                                                         {"T3", "T3-C3"},
                                                                                         {"T4", "C4-T4"},
                                                                                         {"O1", "P3-O1"},
                                                                                         {"O2", "P4-O2"},
                                                                                         {"P3", "C3-P3"},
                                                                                         {"P4", "C4-P4"},
                                                                                         {"F3", "FP1-F3"},
                                                                                         {"F4", "FP2-F4"}}};
  for (const auto& [e, s] : scopes)
    if (e == name) return std::string(s);
  return "TERM";
}

}  // namespace

void SynthParams::validate() const {
  if (patients == 0 || sessions_per_patient == 0) throw UsageError("synth: patients and sessions must be >= 1");
  if (!(duration_s >= 2.0)) throw UsageError("synth: duration must be at least 2 s");
  if (!(artifact_rate > 0.0 && artifact_rate < 1.0)) throw UsageError("synth: artifact rate must lie in (0, 1)");
  if (!(sample_rate_hz >= 64.0) || sample_rate_hz != std::floor(sample_rate_hz))
    throw UsageError("synth: sample rate must be an integer >= 64");
}

std::string synth_patient_id(std::size_t patient) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn%03zu", patient);
  return buf;
}

SynthSession synth_session(std::uint64_t seed, std::size_t patient, std::size_t session, const SynthParams& p) {
  p.validate();
  Rng rng(mix_seed(seed) ^ mix_seed((static_cast<std::uint64_t>(patient) << 32) | session));
  const double fs = p.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(p.duration_s * fs));
  const double duration = static_cast<double>(n) / fs;

  SynthSession out;
  auto& rec = out.recording;
  rec.patient_id = synth_patient_id(patient);
  char sid[64];
  std::snprintf(sid, sizeof sid, "%s_s%02zu", rec.patient_id.c_str(), session + 1);
  rec.session_id = sid;
  rec.sample_rate_hz = fs;
  rec.duration_s = duration;
  for (auto e : kElectrodes) rec.channel_labels.push_back("EEG " + std::string(e) + "-REF");
  rec.channel_labels.push_back("EKG1");

  Matrix eeg(kElectrodes.size(), n);
  const double scale = rng.uniform(0.8, 1.25);
  for (std::size_t e = 0; e < eeg.rows(); ++e)
    for (std::size_t i = 0; i < n; ++i) eeg(e, i) = kBackgroundUv * rng.normal();

  // Events: classes in shuffled cycles so a long enough session holds all five.
  SignalBuilder builder(eeg, fs);
  std::vector<ArtifactClass> cycle(kAllClasses.begin(), kAllClasses.begin() + 5);
  std::size_t next_class = cycle.size();
  const double mean_event = 4.5;
  const double mean_gap = mean_event * (1.0 - p.artifact_rate) / p.artifact_rate;
  double t = rng.uniform(0.5, 1.0) * std::min(mean_gap, 4.0);
  while (true) {
    if (next_class == cycle.size()) {
      rng.shuffle(cycle);
      next_class = 0;
    }
    const ArtifactClass c = cycle[next_class];
    const double length = c == ArtifactClass::elpp ? rng.uniform(1.5, 3.0) : rng.uniform(3.0, 6.0);
    if (t + length > duration - 0.5) break;
    ++next_class;
    std::string scope = "TERM";
    switch (c) {
      case ArtifactClass::eyem: builder.eyem(t, t + length, rng); break;
      case ArtifactClass::chew: builder.chew(t, t + length, rng); break;
      case ArtifactClass::shiv: builder.shiv(t, t + length, rng); break;
      case ArtifactClass::elpp: {
        static constexpr std::array<std::string_view, 10> sites{"C3", "C4", "T3", "T4", "O1",
                                                                "O2", "P3", "P4", "F3", "F4"};
        const auto site = sites[rng.below(sites.size())];
        builder.elpp(t, t + length, electrode(site), rng);
        scope = pop_scope(site);
        break;
      }
      case ArtifactClass::musc: builder.musc(t, t + length, rng.uniform() < 0.5, rng); break;
      case ArtifactClass::null: break;
    }
    // Round to milliseconds so the CSV is short and exact.
    const double start = std::round(t * 1000.0) / 1000.0;
    const double stop = std::round((t + length) * 1000.0) / 1000.0;
    out.annotations.events.push_back({scope, start, stop, c});
    t += length + rng.uniform(0.5, 1.5) * mean_gap;
  }

  rec.signals = Matrix(rec.channel_labels.size(), n);
  for (std::size_t e = 0; e < eeg.rows(); ++e)
    for (std::size_t i = 0; i < n; ++i) rec.signals(e, i) = scale * eeg(e, i);
  const double hr = rng.uniform(1.0, 1.5);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = std::fmod(static_cast<double>(i) / fs * hr, 1.0);
    rec.signals(kElectrodes.size(), i) = 400.0 * std::exp(-std::pow((phase - 0.5) / 0.02, 2.0)) + 5.0 * rng.normal();
  }
  std::sort(out.annotations.events.begin(), out.annotations.events.end(),
            [](const AnnotationEvent& x, const AnnotationEvent& y) { return x.start_s < y.start_s; });
  return out;
}

CorpusIndex synth_corpus(const std::filesystem::path& out_dir, std::uint64_t seed, const SynthParams& params) {
  params.validate();
  std::error_code ec;
  for (std::size_t p = 0; p < params.patients; ++p) {
    const auto dir = out_dir / synth_patient_id(p);
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t s = 0; s < params.sessions_per_patient; ++s) {
      const auto session = synth_session(seed, p, s, params);
      const auto stem = dir / session.recording.session_id;
      write_file_bytes(stem.string() + ".edf", write_edf(session.recording));
      write_file_text(stem.string() + ".csv", serialize_annotations(session.annotations));
    }
  }
  return corpus_scan(out_dir);
}

}  // namespace eegart
