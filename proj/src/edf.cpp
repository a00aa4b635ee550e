#include "eegart/edf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "eegart/binary_io.hpp"
#include "eegart/error.hpp"

namespace eegart {

namespace {

constexpr std::size_t kFixedHeader = 256;
constexpr std::size_t kPerSignalHeader = 256;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\0')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.remove_suffix(1);
  return s;
}

class HeaderCursor {
 public:
  HeaderCursor(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::string_view field(std::size_t width) {
    if (pos_ + width > bytes_.size()) throw DataError("truncated EDF header");
    std::string_view v(reinterpret_cast<const char*>(bytes_.data() + pos_), width);
    pos_ += width;
    return trim(v);
  }

  double number(std::size_t width, const char* name) {
    auto text = field(width);
    double v = 0.0;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
      throw DataError(std::string("non-numeric EDF header field ") + name + ": '" +
                      std::string(text) + "'");
    return v;
  }

  long integer(std::size_t width, const char* name) {
    const double v = number(width, name);
    if (v != std::floor(v)) throw DataError(std::string("non-integer EDF header field ") + name);
    return static_cast<long>(v);
  }

  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

struct SignalHeader {
  std::string label;
  EdfChannelScaling scaling;
  long samples_per_record = 0;
  bool annotation = false;
};

void put_field(std::string& out, std::string_view value, std::size_t width) {
  std::string v(value.substr(0, width));
  v.resize(width, ' ');
  out += v;
}

}  // namespace

double edf_physical(int digital, const EdfChannelScaling& s) {
  return s.physical_min + (static_cast<double>(digital) - s.digital_min) *
                              (s.physical_max - s.physical_min) /
                              (static_cast<double>(s.digital_max) - s.digital_min);
}

Matrix resample_linear(const Matrix& signals, double from_hz, double to_hz, std::size_t out_samples) {
  Matrix out(signals.rows(), out_samples);
  const std::size_t n_in = signals.cols();
  if (n_in == 0) return out;
  for (std::size_t c = 0; c < signals.rows(); ++c) {
    auto src = signals.row(c);
    auto dst = out.row(c);
    for (std::size_t j = 0; j < out_samples; ++j) {
      const double pos = static_cast<double>(j) * from_hz / to_hz;
      const auto i0 = static_cast<std::size_t>(std::floor(pos));
      if (i0 + 1 >= n_in) {
        dst[j] = src[n_in - 1];
        continue;
      }
      const double frac = pos - static_cast<double>(i0);
      dst[j] = frac == 0.0 ? src[i0] : src[i0] + frac * (src[i0 + 1] - src[i0]);
    }
  }
  return out;
}

Recording parse_edf(std::span<const std::uint8_t> bytes, const EdfParseOptions& options) {
  if (bytes.size() < kFixedHeader) throw DataError("truncated EDF: missing fixed header");
  HeaderCursor h(bytes, 0);
  h.field(8);    // version
  h.field(80);   // patient
  h.field(80);   // recording
  h.field(8);    // start date
  h.field(8);    // start time
  const long header_bytes = h.integer(8, "header bytes");
  h.field(44);   // reserved
  long num_records = h.integer(8, "number of data records");
  const double record_duration = h.number(8, "data record duration");
  const long ns = h.integer(4, "number of signals");
  if (ns <= 0) throw DataError("EDF has zero signals");
  if (record_duration <= 0.0) throw DataError("EDF data record duration must be positive");

  const std::size_t expected_header = kFixedHeader + kPerSignalHeader * static_cast<std::size_t>(ns);
  if (bytes.size() < expected_header) throw DataError("truncated EDF: signal headers incomplete");
  if (header_bytes != static_cast<long>(expected_header))
    throw DataError("EDF header byte count " + std::to_string(header_bytes) + " does not match " +
                    std::to_string(expected_header));

  std::vector<SignalHeader> sig(static_cast<std::size_t>(ns));
  // Per-signal fields are stored field-major: all labels, then all transducers, ...
  for (auto& s : sig) s.label = std::string(h.field(16));
  for (std::size_t i = 0; i < sig.size(); ++i) h.field(80);
  for (std::size_t i = 0; i < sig.size(); ++i) h.field(8);
  for (auto& s : sig) s.scaling.physical_min = h.number(8, "physical minimum");
  for (auto& s : sig) s.scaling.physical_max = h.number(8, "physical maximum");
  for (auto& s : sig) s.scaling.digital_min = static_cast<int>(h.integer(8, "digital minimum"));
  for (auto& s : sig) s.scaling.digital_max = static_cast<int>(h.integer(8, "digital maximum"));
  for (std::size_t i = 0; i < sig.size(); ++i) h.field(80);
  for (auto& s : sig) s.samples_per_record = h.integer(8, "samples per record");
  for (std::size_t i = 0; i < sig.size(); ++i) h.field(32);

  std::size_t record_samples = 0;
  for (auto& s : sig) {
    s.annotation = s.label == "EDF Annotations";
    if (s.samples_per_record <= 0) throw DataError("EDF signal '" + s.label + "' has no samples per record");
    record_samples += static_cast<std::size_t>(s.samples_per_record);
    if (!s.annotation && s.scaling.digital_min == s.scaling.digital_max)
      throw DataError("EDF signal '" + s.label + "' has degenerate scaling (digital_min = digital_max)");
  }
  const std::size_t record_bytes = record_samples * 2;
  const std::size_t data_bytes = bytes.size() - expected_header;
  if (num_records < 0) num_records = static_cast<long>(data_bytes / record_bytes);
  if (data_bytes < static_cast<std::size_t>(num_records) * record_bytes)
    throw DataError("truncated EDF: data records incomplete");

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < sig.size(); ++i)
    if (!sig[i].annotation) keep.push_back(i);
  if (keep.empty()) throw DataError("EDF has zero signals (annotations only)");

  // Decode each kept signal at its native rate.
  std::vector<std::vector<double>> native(sig.size());
  for (std::size_t i : keep) native[i].reserve(static_cast<std::size_t>(num_records * sig[i].samples_per_record));
  std::size_t pos = expected_header;
  for (long r = 0; r < num_records; ++r) {
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const auto n = static_cast<std::size_t>(sig[i].samples_per_record);
      if (!sig[i].annotation) {
        for (std::size_t k = 0; k < n; ++k) {
          const auto lo = bytes[pos + 2 * k];
          const auto hi = bytes[pos + 2 * k + 1];
          const auto digital = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
          native[i].push_back(edf_physical(digital, sig[i].scaling));
        }
      }
      pos += 2 * n;
    }
  }

  const double duration = static_cast<double>(num_records) * record_duration;
  double target = 0.0;
  if (options.target_rate_hz) {
    target = *options.target_rate_hz;
    if (!(target > 0.0)) throw UsageError("target sample rate must be positive");
  } else {
    for (std::size_t i : keep) {
      const double fs = static_cast<double>(sig[i].samples_per_record) / record_duration;
      if (target != 0.0 && fs != target)
        throw DataError("EDF signals have mixed sample rates and no target rate was given");
      target = fs;
    }
  }
  const auto out_samples = static_cast<std::size_t>(std::floor(duration * target + 1e-9));

  Recording rec;
  rec.sample_rate_hz = target;
  rec.signals = Matrix(keep.size(), out_samples);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto& s = sig[keep[k]];
    for (std::size_t j = 0; j < rec.channel_labels.size(); ++j)
      if (rec.channel_labels[j] == s.label) throw DataError("duplicate EDF channel label '" + s.label + "'");
    rec.channel_labels.push_back(s.label);
    const double fs = static_cast<double>(s.samples_per_record) / record_duration;
    auto dst = rec.signals.row(k);
    if (fs == target) {
      std::copy_n(native[keep[k]].begin(), std::min(out_samples, native[keep[k]].size()), dst.begin());
    } else {
      Matrix one(1, native[keep[k]].size());
      std::copy(native[keep[k]].begin(), native[keep[k]].end(), one.row(0).begin());
      Matrix res = resample_linear(one, fs, target, out_samples);
      std::copy(res.row(0).begin(), res.row(0).end(), dst.begin());
    }
  }
  rec.duration_s = static_cast<double>(out_samples) / target;
  return rec;
}

Recording load_edf(const std::string& path, const EdfParseOptions& options) {
  const auto bytes = read_file_bytes(path);
  try {
    return parse_edf(bytes, options);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

EdfChannelScaling auto_scaling(std::span<const double> samples) {
  double lo = 0.0, hi = 0.0;
  if (!samples.empty()) {
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = *mn;
    hi = *mx;
  }
  if (hi - lo < 1e-6) {
    lo -= 1.0;
    hi += 1.0;
  }
  // Widest decimal precision whose rendering still fits the 8-char field.
  for (int decimals = 4; decimals >= 0; --decimals) {
    const double scale = std::pow(10.0, decimals);
    const double lo_r = std::floor(lo * scale) / scale;
    const double hi_r = std::ceil(hi * scale) / scale;
    char a[64], b[64];
    std::snprintf(a, sizeof a, "%.*f", decimals, lo_r);
    std::snprintf(b, sizeof b, "%.*f", decimals, hi_r);
    if (std::string_view(a).size() <= 8 && std::string_view(b).size() <= 8) {
      EdfChannelScaling s;
      s.physical_min = std::strtod(a, nullptr);
      s.physical_max = std::strtod(b, nullptr);
      return s;
    }
  }
  throw DataError("signal range too large for EDF physical fields");
}

std::vector<std::uint8_t> write_edf(const Recording& rec, std::span<const EdfChannelScaling> scaling) {
  const double fs = rec.sample_rate_hz;
  if (!(fs > 0.0) || fs != std::floor(fs)) throw UsageError("write_edf requires an integer sample rate");
  const std::size_t nc = rec.num_channels();
  if (nc == 0) throw UsageError("write_edf: recording has no channels");
  if (rec.channel_labels.size() != nc) throw UsageError("write_edf: label count mismatch");
  if (!scaling.empty() && scaling.size() != nc) throw UsageError("write_edf: scaling count mismatch");

  std::vector<EdfChannelScaling> sc(nc);
  for (std::size_t c = 0; c < nc; ++c) sc[c] = scaling.empty() ? auto_scaling(rec.signals.row(c)) : scaling[c];

  const auto spr = static_cast<std::size_t>(fs);
  const std::size_t n = rec.num_samples();
  const std::size_t records = (n + spr - 1) / spr;

  std::string header;
  put_field(header, "0", 8);
  put_field(header, rec.patient_id.empty() ? "X" : rec.patient_id, 80);
  put_field(header, rec.session_id.empty() ? "X" : rec.session_id, 80);
  put_field(header, "01.01.00", 8);
  put_field(header, "00.00.00", 8);
  put_field(header, std::to_string(kFixedHeader + kPerSignalHeader * nc), 8);
  put_field(header, "", 44);
  put_field(header, std::to_string(records), 8);
  put_field(header, "1", 8);
  put_field(header, std::to_string(nc), 4);
  char buf[64];
  auto num8 = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    while (s.find('.') != std::string::npos && (s.back() == '0' || s.back() == '.')) {
      const bool dot = s.back() == '.';
      s.pop_back();
      if (dot) break;
    }
    if (s.size() > 8) throw UsageError("EDF physical limit does not fit 8 characters: " + s);
    return s;
  };
  for (const auto& l : rec.channel_labels) put_field(header, l, 16);
  for (std::size_t c = 0; c < nc; ++c) put_field(header, "", 80);
  for (std::size_t c = 0; c < nc; ++c) put_field(header, "uV", 8);
  for (const auto& s : sc) put_field(header, num8(s.physical_min), 8);
  for (const auto& s : sc) put_field(header, num8(s.physical_max), 8);
  for (const auto& s : sc) put_field(header, std::to_string(s.digital_min), 8);
  for (const auto& s : sc) put_field(header, std::to_string(s.digital_max), 8);
  for (std::size_t c = 0; c < nc; ++c) put_field(header, "", 80);
  for (std::size_t c = 0; c < nc; ++c) put_field(header, std::to_string(spr), 8);
  for (std::size_t c = 0; c < nc; ++c) put_field(header, "", 32);

  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + records * spr * nc * 2);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& s = sc[c];
      // Quantize with the limits exactly as they will be read back.
      const double pmin = std::strtod(num8(s.physical_min).c_str(), nullptr);
      const double pmax = std::strtod(num8(s.physical_max).c_str(), nullptr);
      const double gain = (static_cast<double>(s.digital_max) - s.digital_min) / (pmax - pmin);
      auto row = rec.signals.row(c);
      for (std::size_t k = 0; k < spr; ++k) {
        const std::size_t idx = std::min(r * spr + k, n - 1);
        double d = std::round((row[idx] - pmin) * gain + s.digital_min);
        d = std::clamp(d, static_cast<double>(s.digital_min), static_cast<double>(s.digital_max));
        const auto v = static_cast<std::uint16_t>(static_cast<std::int16_t>(d));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
      }
    }
  }
  return out;
}

}  // namespace eegart
