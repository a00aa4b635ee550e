#pragma once

// Minimal EDF encoder written directly from the format description, kept
// separate from the library writer so reader tests do not depend on it.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace testing {

struct RawSignal {
  std::string label;
  std::string physical_min = "-100";
  std::string physical_max = "100";
  std::string digital_min = "-32768";
  std::string digital_max = "32767";
  int samples_per_record = 256;
  std::vector<std::int16_t> digital;  // records * samples_per_record values
};

inline void field(std::string& out, const std::string& v, std::size_t width) {
  std::string f = v.substr(0, width);
  f.resize(width, ' ');
  out += f;
}

inline std::vector<std::uint8_t> build_edf(const std::vector<RawSignal>& sigs, int records,
                                           const std::string& record_duration = "1") {
  std::string h;
  field(h, "0", 8);
  field(h, "patient", 80);
  field(h, "recording", 80);
  field(h, "01.01.01", 8);
  field(h, "00.00.00", 8);
  field(h, std::to_string(256 + 256 * sigs.size()), 8);
  field(h, "", 44);
  field(h, std::to_string(records), 8);
  field(h, record_duration, 8);
  field(h, std::to_string(sigs.size()), 4);
  for (const auto& s : sigs) field(h, s.label, 16);
  for (std::size_t i = 0; i < sigs.size(); ++i) field(h, "", 80);
  for (std::size_t i = 0; i < sigs.size(); ++i) field(h, "uV", 8);
  for (const auto& s : sigs) field(h, s.physical_min, 8);
  for (const auto& s : sigs) field(h, s.physical_max, 8);
  for (const auto& s : sigs) field(h, s.digital_min, 8);
  for (const auto& s : sigs) field(h, s.digital_max, 8);
  for (std::size_t i = 0; i < sigs.size(); ++i) field(h, "", 80);
  for (const auto& s : sigs) field(h, std::to_string(s.samples_per_record), 8);
  for (std::size_t i = 0; i < sigs.size(); ++i) field(h, "", 32);
  std::vector<std::uint8_t> out(h.begin(), h.end());
  for (int r = 0; r < records; ++r) {
    for (const auto& s : sigs) {
      for (int k = 0; k < s.samples_per_record; ++k) {
        const auto idx = static_cast<std::size_t>(r * s.samples_per_record + k);
        const std::int16_t v = idx < s.digital.size() ? s.digital[idx] : 0;
        const auto u = static_cast<std::uint16_t>(v);
        out.push_back(static_cast<std::uint8_t>(u & 0xff));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
      }
    }
  }
  return out;
}

}  // namespace testing
