#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eegart/types.hpp"

namespace eegart {

inline constexpr std::string_view kAllChannelsScope = "TERM";

struct AnnotationEvent {
  std::string scope;  // "TERM" or a channel label
  double start_s = 0.0;
  double stop_s = 0.0;
  ArtifactClass label = ArtifactClass::null;

  bool all_channels() const { return scope == kAllChannelsScope; }
  bool operator==(const AnnotationEvent&) const = default;
};

/// Timed artifact events of one session. Absence of an event means null class.
struct AnnotationSet {
  std::vector<AnnotationEvent> events;  // sorted by start_s

  bool operator==(const AnnotationSet&) const = default;
};

/// Parses the canonical `scope,start_s,stop_s,label` format. Lines starting
/// with '#' and blank lines are ignored; an optional `scope,...` header row is
/// accepted. Throws DataError for unknown labels, stop <= start, start < 0 or
/// stop > duration_s.
AnnotationSet parse_annotations(std::string_view text, double duration_s);

std::string serialize_annotations(const AnnotationSet& set);

/// Adapter for the corpus's native per-channel label files
/// (`channel,start_time,stop_time,label,confidence` with '#' metadata lines).
/// Combined labels such as "eyem_musc" keep their first component, "elec" maps
/// to elpp, and background labels are dropped. Stops past the recording end are
/// clamped.
AnnotationSet parse_native_annotations(std::string_view text, double duration_s);

// Chooses between the native and canonical formats by the header row.
AnnotationSet load_annotations(std::string_view text, double duration_s);

}  // namespace eegart
