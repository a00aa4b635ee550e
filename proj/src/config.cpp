#include "eegart/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "eegart/binary_io.hpp"
#include "eegart/error.hpp"

namespace eegart {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.emplace_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw UsageError("config " + std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

template <typename T>
T to_integer(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw UsageError("config " + std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

bool to_flag(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config " + std::string(key) + ": expected on/off, got '" + std::string(v) + "'");
}

Family to_family(std::string_view v) {
  const auto f = parse_family(v);
  if (!f) throw UsageError("unknown family '" + std::string(v) + "'");
  return *f;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view v) {
  std::filesystem::path p{std::string(v)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

// `space.<family>.<dim>`: the override keeps the declared kind of the dim.
void apply_space_override(BenchConfig& cfg, std::string_view key, std::string_view value) {
  const auto parts = split(key, '.');
  if (parts.size() != 3) throw UsageError("config " + std::string(key) + ": expected space.<family>.<dim>");
  const Family f = to_family(parts[1]);
  const auto declared = default_space(f);
  const SearchDim* base = nullptr;
  for (const auto& d : declared.dims)
    if (d.name == parts[2]) base = &d;
  if (!base) throw UsageError("config " + std::string(key) + ": no such search dimension");
  SearchDim dim = *base;
  if (dim.kind == DimKind::categorical) {
    dim.choices = split(value, '|');
  } else {
    const auto bounds = split(value, ',');
    if (bounds.size() != 2) throw UsageError("config " + std::string(key) + ": expected lo,hi");
    dim.lo = to_double(key, bounds[0]);
    dim.hi = to_double(key, bounds[1]);
  }
  SearchSpace{{dim}}.validate();
  auto& list = cfg.space_overrides[f];
  std::erase_if(list, [&](const SearchDim& d) { return d.name == dim.name; });
  list.push_back(std::move(dim));
}

}  // namespace

void BenchConfig::validate() const {
  if (corpus_root.empty()) throw UsageError("config: corpus_root is required");
  if (families.empty()) throw UsageError("config: families must not be empty");
  if (runs < 1) throw UsageError("config: runs must be >= 1");
  if (budget < 1) throw UsageError("config: budget must be >= 1");
  if (workers < 1) throw UsageError("config: workers must be >= 1");
  if (!(coverage > 0.0 && coverage <= 1.0)) throw UsageError("config: coverage must lie in (0, 1]");
  if (!(target_rate_hz > 0.0)) throw UsageError("config: target_rate_hz must be positive");
  if (ratios.train < 0 || ratios.validation <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw UsageError("config: split ratios must be positive and sum to 1");
  features.validate(target_rate_hz);
}

DatasetConfig BenchConfig::dataset() const {
  DatasetConfig d;
  d.features = features;
  d.target_rate_hz = target_rate_hz;
  d.coverage = coverage;
  if (!montage_file.empty()) d.montage = MontageDefinition::load(montage_file.string());
  d.cache_dir = effective_cache_dir().string();
  d.workers = workers;
  return d;
}

SearchSpace BenchConfig::space(Family f) const {
  auto s = default_space(f);
  if (const auto it = space_overrides.find(f); it != space_overrides.end()) {
    for (const auto& o : it->second)
      for (auto& d : s.dims)
        if (d.name == o.name) d = o;
  }
  return s;
}

std::filesystem::path BenchConfig::effective_cache_dir() const {
  return cache_dir.empty() ? output_dir / "cache" : cache_dir;
}

BenchConfig parse_bench_config(std::string_view text, const std::filesystem::path& base_dir) {
  BenchConfig cfg;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "corpus_root") cfg.corpus_root = resolve(base_dir, value);
    else if (key == "families") {
      cfg.families.clear();
      if (value == "all") cfg.families.assign(kAllFamilies.begin(), kAllFamilies.end());
      else
        for (const auto& name : split(value, ',')) cfg.families.push_back(to_family(name));
    } else if (key == "runs") cfg.runs = to_integer<int>(key, value);
    else if (key == "seed") cfg.seed = to_integer<std::uint64_t>(key, value);
    else if (key == "budget") cfg.budget = to_integer<std::size_t>(key, value);
    else if (key == "resplit_per_run") cfg.resplit_per_run = to_flag(key, value);
    else if (key == "strategy") {
      const auto s = parse_strategy(value);
      if (!s) throw UsageError("config strategy: expected random or tpe_lite");
      cfg.strategy = *s;
    } else if (key == "window_s") cfg.features.window_s = to_double(key, value);
    else if (key == "overlap") cfg.features.overlap_fraction = to_double(key, value);
    else if (key == "band_lo_hz") cfg.features.band_lo_hz = to_double(key, value);
    else if (key == "band_hi_hz") cfg.features.band_hi_hz = to_double(key, value);
    else if (key == "normalization") {
      if (value == "zscore") cfg.features.normalization = Normalization::zscore_per_channel;
      else if (value == "none") cfg.features.normalization = Normalization::none;
      else throw UsageError("config normalization: expected zscore or none");
    } else if (key == "log_magnitude") cfg.features.log_magnitude = to_flag(key, value);
    else if (key == "append_correlations") cfg.features.append_correlations = to_flag(key, value);
    else if (key == "target_rate_hz") cfg.target_rate_hz = to_double(key, value);
    else if (key == "coverage") cfg.coverage = to_double(key, value);
    else if (key == "split") {
      const auto r = split(value, ',');
      if (r.size() != 3) throw UsageError("config split: expected train,validation,test");
      cfg.ratios = {to_double(key, r[0]), to_double(key, r[1]), to_double(key, r[2])};
    } else if (key == "montage_file") cfg.montage_file = resolve(base_dir, value);
    else if (key == "output_dir") cfg.output_dir = resolve(base_dir, value);
    else if (key == "cache_dir") cfg.cache_dir = resolve(base_dir, value);
    else if (key == "f1_exclude_null") cfg.eval.f1_exclude_null = to_flag(key, value);
    else if (key == "patient_component") cfg.scan.patient_component = to_integer<int>(key, value);
    else if (key == "patient_regex") cfg.scan.patient_regex = std::string(value);
    else if (key == "annotation_extension") cfg.scan.annotation_extension = std::string(value);
    else if (key == "workers") cfg.workers = to_integer<std::size_t>(key, value);
    else if (key.starts_with("space.")) apply_space_override(cfg, key, value);
    else throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file_text(path.string());
  } catch (const DataError& e) {
    throw UsageError(std::string("cannot read config: ") + e.what());
  }
  auto cfg = parse_bench_config(text, path.parent_path());
  return cfg;
}

nlohmann::json config_echo(const BenchConfig& cfg) {
  using nlohmann::json;
  json families = json::array();
  for (auto f : cfg.families) families.push_back(family_name(f));
  json spaces = json::object();
  for (auto f : cfg.families) {
    json dims = json::array();
    for (const auto& d : cfg.space(f).dims) {
      json jd = {{"name", d.name}};
      switch (d.kind) {
        case DimKind::uniform: jd["kind"] = "uniform"; break;
        case DimKind::log_uniform: jd["kind"] = "log_uniform"; break;
        case DimKind::integer_range: jd["kind"] = "integer_range"; break;
        case DimKind::categorical: jd["kind"] = "categorical"; break;
      }
      if (d.kind == DimKind::categorical) jd["choices"] = d.choices;
      else jd["bounds"] = {d.lo, d.hi};
      dims.push_back(std::move(jd));
    }
    spaces[std::string(family_name(f))] = std::move(dims);
  }
  return {
      {"corpus_root", cfg.corpus_root.generic_string()},
      {"families", families},
      {"runs", cfg.runs},
      {"seed", cfg.seed},
      {"budget", cfg.budget},
      {"resplit_per_run", cfg.resplit_per_run},
      {"strategy", strategy_name(cfg.strategy)},
      {"features", cfg.features.canonical()},
      {"target_rate_hz", cfg.target_rate_hz},
      {"coverage", cfg.coverage},
      {"split", {cfg.ratios.train, cfg.ratios.validation, cfg.ratios.test}},
      {"montage_file", cfg.montage_file.generic_string()},
      {"f1_exclude_null", cfg.eval.f1_exclude_null},
      {"patient_component", cfg.scan.patient_component},
      {"patient_regex", cfg.scan.patient_regex},
      {"search_spaces", spaces},
  };
}

}  // namespace eegart
