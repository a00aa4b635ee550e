#include "eegart/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include "eegart/error.hpp"

namespace eegart {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(sep, start);
    out.push_back(trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto p = text.find('\n');
    auto line = trim(text.substr(0, p));
    ++line_no;
    text.remove_prefix(p == std::string_view::npos ? text.size() : p + 1);
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

double parse_seconds(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw DataError("annotation line " + std::to_string(line_no) + ": non-numeric time '" +
                    std::string(field) + "'");
  return v;
}

void sort_events(std::vector<AnnotationEvent>& events) {
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.start_s, a.stop_s, a.label, a.scope) < std::tie(b.start_s, b.stop_s, b.label, b.scope);
  });
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

AnnotationSet parse_annotations(std::string_view text, double duration_s) {
  AnnotationSet set;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto f = split(line, ',');
    const std::string where = "annotation line " + std::to_string(line_no) + ": ";
    if (f.size() != 4) throw DataError(where + "expected 4 fields");
    if (f[0] == "scope") return;  // header row
    AnnotationEvent ev;
    ev.scope = std::string(f[0]);
    if (ev.scope.empty()) throw DataError(where + "empty scope");
    ev.start_s = parse_seconds(f[1], line_no);
    ev.stop_s = parse_seconds(f[2], line_no);
    const auto label = parse_class(f[3]);
    if (!label || *label == ArtifactClass::null)
      throw DataError(where + "unknown label '" + std::string(f[3]) + "'");
    ev.label = *label;
    if (ev.start_s < 0.0) throw DataError(where + "start < 0");
    if (ev.stop_s <= ev.start_s) throw DataError(where + "stop <= start");
    if (ev.stop_s > duration_s) throw DataError(where + "stop > duration");
    set.events.push_back(std::move(ev));
  });
  sort_events(set.events);
  return set;
}

std::string serialize_annotations(const AnnotationSet& set) {
  std::string out = "# scope,start_s,stop_s,label\n";
  for (const auto& ev : set.events) {
    out += ev.scope + ',' + shortest(ev.start_s) + ',' + shortest(ev.stop_s) + ',' +
           std::string(class_name(ev.label)) + '\n';
  }
  return out;
}

AnnotationSet parse_native_annotations(std::string_view text, double duration_s) {
  AnnotationSet set;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto f = split(line, ',');
    const std::string where = "native annotation line " + std::to_string(line_no) + ": ";
    if (f.size() < 4) throw DataError(where + "expected at least 4 fields");
    if (f[0] == "channel") return;
    std::string_view raw = f[3];
    if (const auto us = raw.find('_'); us != std::string_view::npos) raw = raw.substr(0, us);
    std::optional<ArtifactClass> label;
    if (raw == "elec") {
      label = ArtifactClass::elpp;
    } else if (raw == "bckg" || raw == "null" || raw == "artf") {
      return;
    } else {
      label = parse_class(raw);
    }
    if (!label || *label == ArtifactClass::null)
      throw DataError(where + "unknown label '" + std::string(f[3]) + "'");
    AnnotationEvent ev;
    ev.scope = std::string(f[0]);
    ev.start_s = std::max(0.0, parse_seconds(f[1], line_no));
    ev.stop_s = std::min(duration_s, parse_seconds(f[2], line_no));
    ev.label = *label;
    if (ev.stop_s <= ev.start_s) return;
    set.events.push_back(std::move(ev));
  });
  sort_events(set.events);
  return set;
}

AnnotationSet load_annotations(std::string_view text, double duration_s) {
  bool native = false;
  for_each_line(text, [&](std::string_view line, std::size_t) {
    if (line.starts_with("channel,start_time")) native = true;
  });
  return native ? parse_native_annotations(text, duration_s) : parse_annotations(text, duration_s);
}

}  // namespace eegart
