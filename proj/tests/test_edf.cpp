#include <cmath>
#include <cstring>

#include "doctest.h"
#include "edf_builder.hpp"
#include "eegart/edf.hpp"
#include "eegart/error.hpp"
#include "eegart/random.hpp"
#include "eegart/synth.hpp"

using namespace eegart;
using testing::build_edf;
using testing::RawSignal;

namespace {

std::string error_of(const std::vector<std::uint8_t>& bytes, const EdfParseOptions& opt = {}) {
  try {
    parse_edf(bytes, opt);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("digital zeros map through the header's linear scaling") {
  RawSignal s{.label = "EEG FP1-REF", .digital = std::vector<std::int16_t>(512, 0)};
  const auto rec = parse_edf(build_edf({s}, 2));
  REQUIRE(rec.num_channels() == 1);
  REQUIRE(rec.num_samples() == 512);
  CHECK(rec.sample_rate_hz == 256.0);
  CHECK(rec.duration_s == 2.0);
  // -100 + (0 - (-32768)) * 200 / 65535, worked by hand: 200/65535 = 0.0030518...,
  // times 32768 = 100.0015259..., minus 100.
  const double expected = 0.00152590218967;
  for (std::size_t i = 0; i < 512; ++i) CHECK(rec.signals(0, i) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("extreme digital values reach the physical limits") {
  RawSignal s{.label = "A", .samples_per_record = 4, .digital = {-32768, 32767, -32768, 32767}};
  const auto rec = parse_edf(build_edf({s}, 1), EdfParseOptions{std::nullopt});
  CHECK(rec.signals(0, 0) == doctest::Approx(-100.0));
  CHECK(rec.signals(0, 1) == doctest::Approx(100.0));
}

TEST_CASE("negative samples are decoded as two's complement little endian") {
  RawSignal s{.label = "A",
              .physical_min = "-32768",
              .physical_max = "32767",
              .samples_per_record = 4,
              .digital = {-1, 1, -300, 300}};
  const auto rec = parse_edf(build_edf({s}, 1), EdfParseOptions{std::nullopt});
  CHECK(rec.signals(0, 0) == doctest::Approx(-1.0));
  CHECK(rec.signals(0, 1) == doctest::Approx(1.0));
  CHECK(rec.signals(0, 2) == doctest::Approx(-300.0));
  CHECK(rec.signals(0, 3) == doctest::Approx(300.0));
}

TEST_CASE("annotation pseudo-channels are excluded") {
  RawSignal eeg{.label = "EEG C3-REF", .samples_per_record = 8};
  RawSignal ann{.label = "EDF Annotations", .digital_min = "-32768", .digital_max = "-32768", .samples_per_record = 6};
  const auto rec = parse_edf(build_edf({eeg, ann}, 2), EdfParseOptions{std::nullopt});
  REQUIRE(rec.channel_labels.size() == 1);
  CHECK(rec.channel_labels[0] == "EEG C3-REF");
  CHECK(rec.num_samples() == 16);
}

TEST_CASE("malformed inputs are rejected") {
  RawSignal s{.label = "A", .samples_per_record = 256};
  auto good = build_edf({s}, 2);

  SUBCASE("truncated mid data record") {
    auto bytes = good;
    bytes.resize(bytes.size() - 100);
    CHECK(error_of(bytes).find("truncated") != std::string::npos);
  }
  SUBCASE("truncated header") {
    auto bytes = good;
    bytes.resize(300);
    CHECK(error_of(bytes).find("truncated") != std::string::npos);
  }
  SUBCASE("non-numeric header field") {
    RawSignal bad = s;
    bad.physical_min = "abc";
    CHECK(error_of(build_edf({bad}, 2)).find("non-numeric") != std::string::npos);
  }
  SUBCASE("degenerate digital range") {
    RawSignal bad = s;
    bad.digital_max = bad.digital_min;
    CHECK(error_of(build_edf({bad}, 2)).find("degenerate") != std::string::npos);
  }
  SUBCASE("zero signals") {
    CHECK(error_of(build_edf({}, 2)).find("zero signals") != std::string::npos);
  }
  SUBCASE("mixed rates without a target") {
    RawSignal slow{.label = "B", .samples_per_record = 128};
    CHECK(error_of(build_edf({s, slow}, 2), EdfParseOptions{std::nullopt}).find("mixed") != std::string::npos);
  }
}

TEST_CASE("signals are resampled to the target rate by linear interpolation") {
  // A ramp stays a ramp under linear interpolation.
  RawSignal s{.label = "A", .physical_min = "-32768", .physical_max = "32767", .samples_per_record = 200};
  for (int i = 0; i < 400; ++i) s.digital.push_back(static_cast<std::int16_t>(i * 10));
  const auto rec = parse_edf(build_edf({s}, 2));
  REQUIRE(rec.num_samples() == 512);
  CHECK(rec.duration_s * rec.sample_rate_hz == static_cast<double>(rec.num_samples()));
  for (std::size_t j = 0; j < 500; ++j) {
    const double t = static_cast<double>(j) / 256.0;
    CHECK(rec.signals(0, j) == doctest::Approx(t * 200.0 * 10.0).epsilon(1e-9));
  }
}

TEST_CASE("duration times rate equals the sample count") {
  for (int spr : {100, 128, 250, 256, 400, 512}) {
    RawSignal s{.label = "A", .samples_per_record = spr};
    for (int records : {1, 3, 7}) {
      const auto rec = parse_edf(build_edf({s}, records));
      CHECK(rec.duration_s * rec.sample_rate_hz == static_cast<double>(rec.num_samples()));
    }
  }
}

TEST_CASE("write then parse reproduces samples within one quantization step") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Recording rec;
    rec.sample_rate_hz = 256.0;
    const std::size_t n = 256 * (1 + rng.below(4)) + rng.below(256);
    rec.signals = Matrix(3, n);
    for (std::size_t c = 0; c < 3; ++c) {
      rec.channel_labels.push_back("EEG C" + std::to_string(c) + "-REF");
      const double amp = rng.uniform(1.0, 500.0);
      for (std::size_t i = 0; i < n; ++i) rec.signals(c, i) = amp * rng.normal();
    }
    rec.duration_s = static_cast<double>(n) / 256.0;
    const auto back = parse_edf(write_edf(rec));
    REQUIRE(back.num_channels() == 3);
    REQUIRE(back.num_samples() >= n);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto sc = auto_scaling(rec.signals.row(c));
      const double step = (sc.physical_max - sc.physical_min) / (sc.digital_max - sc.digital_min);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(back.signals(c, i) - rec.signals(c, i)) <= step);
    }
  }
}

TEST_CASE("synthetic sessions survive an EDF round trip") {
  SynthParams p;
  p.duration_s = 20.0;
  const auto s = synth_session(3, 0, 0, p);
  const auto back = parse_edf(write_edf(s.recording));
  REQUIRE(back.channel_labels == s.recording.channel_labels);
  REQUIRE(back.num_samples() == s.recording.num_samples());
  for (std::size_t c = 0; c < back.num_channels(); ++c) {
    const auto sc = auto_scaling(s.recording.signals.row(c));
    const double step = (sc.physical_max - sc.physical_min) / (sc.digital_max - sc.digital_min);
    for (std::size_t i = 0; i < back.num_samples(); ++i)
      REQUIRE(std::abs(back.signals(c, i) - s.recording.signals(c, i)) <= step);
  }
}

TEST_CASE("edf_physical follows the linear map") {
  EdfChannelScaling s{-200.0, 200.0, -2048, 2047};
  CHECK(edf_physical(-2048, s) == doctest::Approx(-200.0));
  CHECK(edf_physical(2047, s) == doctest::Approx(200.0));
  CHECK(edf_physical(0, s) == doctest::Approx(-200.0 + 2048.0 * 400.0 / 4095.0));
}
