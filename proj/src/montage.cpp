#include "eegart/montage.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>

#include "eegart/binary_io.hpp"
#include "eegart/error.hpp"

namespace eegart {

namespace {

constexpr std::array<std::string_view, 23> kElectrodes = {
    "FP1", "FP2", "F7", "F3", "FZ", "F4", "F8", "T3", "C3", "CZ", "C4", "T4",
    "T5",  "P3",  "PZ", "P4", "T6", "O1", "O2", "A1", "A2", "T1", "T2"};

std::string upper_trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

}  // namespace

MontageDefinition MontageDefinition::tcp() {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, kTcpChannels> kPairs = {{
      {"FP1", "F7"}, {"F7", "T3"}, {"T3", "T5"}, {"T5", "O1"}, {"FP2", "F8"}, {"F8", "T4"},
      {"T4", "T6"},  {"T6", "O2"}, {"A1", "T3"}, {"T3", "C3"}, {"C3", "CZ"}, {"CZ", "C4"},
      {"C4", "T4"},  {"T4", "A2"}, {"FP1", "F3"}, {"F3", "C3"}, {"C3", "P3"}, {"P3", "O1"},
      {"FP2", "F4"}, {"F4", "C4"}, {"C4", "P4"}, {"P4", "O2"},
  }};
  MontageDefinition m;
  for (const auto& [a, c] : kPairs) m.pairs.push_back({std::string(a), std::string(c)});
  return m;
}

MontageDefinition MontageDefinition::parse(std::string_view text) {
  MontageDefinition m;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto p = text.find('\n');
    std::string line = upper_trimmed(text.substr(0, p));
    text.remove_prefix(p == std::string_view::npos ? text.size() : p + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto dash = line.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == line.size() ||
        line.find('-', dash + 1) != std::string::npos)
      throw DataError("montage line " + std::to_string(line_no) + ": expected ANODE-CATHODE");
    m.pairs.push_back({line.substr(0, dash), line.substr(dash + 1)});
  }
  if (m.pairs.empty()) throw DataError("montage definition has no pairs");
  return m;
}

MontageDefinition MontageDefinition::load(const std::string& path) { return parse(read_file_text(path)); }

std::string resolve_channel(std::string_view label) {
  std::string s = upper_trimmed(label);
  for (std::string_view prefix : {"EEG ", "EEG-", "EEG"}) {
    if (s.starts_with(prefix)) {
      s.erase(0, prefix.size());
      break;
    }
  }
  for (std::string_view suffix : {"-REF", "-LE"}) {
    if (s.ends_with(suffix)) {
      s.erase(s.size() - suffix.size());
      break;
    }
  }
  while (!s.empty() && s.front() == ' ') s.erase(0, 1);
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (std::find(kElectrodes.begin(), kElectrodes.end(), s) == kElectrodes.end())
    throw DataError("channel '" + std::string(label) + "' is unresolvable for TCP");
  return s;
}

MontagedRecording to_montage(const Recording& rec, const MontageDefinition& montage) {
  std::map<std::string, std::vector<std::size_t>> by_electrode;
  for (std::size_t i = 0; i < rec.channel_labels.size(); ++i) {
    try {
      by_electrode[resolve_channel(rec.channel_labels[i])].push_back(i);
    } catch (const DataError&) {
      // Non-scalp channels (EKG, photic, ...) are not part of any derivation.
    }
  }
  auto lookup = [&](const std::string& electrode) {
    auto it = by_electrode.find(electrode);
    if (it == by_electrode.end()) throw DataError("missing electrode " + electrode);
    if (it->second.size() > 1) throw DataError("ambiguous label match for electrode " + electrode);
    return it->second.front();
  };

  MontagedRecording out;
  out.patient_id = rec.patient_id;
  out.session_id = rec.session_id;
  out.sample_rate_hz = rec.sample_rate_hz;
  out.duration_s = rec.duration_s;
  out.signals = Matrix(montage.pairs.size(), rec.num_samples());
  for (std::size_t k = 0; k < montage.pairs.size(); ++k) {
    const auto& pair = montage.pairs[k];
    const auto a = rec.signals.row(lookup(pair.anode));
    const auto c = rec.signals.row(lookup(pair.cathode));
    auto dst = out.signals.row(k);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = a[j] - c[j];
    out.channels.push_back(pair.name());
  }
  return out;
}

}  // namespace eegart
