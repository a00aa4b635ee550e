#include "eegart/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "eegart/error.hpp"
#include "eegart/random.hpp"
#include "json.hpp"

namespace eegart {

namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

SearchDim uniform(std::string name, double lo, double hi) { return {std::move(name), DimKind::uniform, lo, hi, {}}; }
SearchDim log_uniform(std::string name, double lo, double hi) {
  return {std::move(name), DimKind::log_uniform, lo, hi, {}};
}
SearchDim integer(std::string name, double lo, double hi) {
  return {std::move(name), DimKind::integer_range, lo, hi, {}};
}
SearchDim categorical(std::string name, std::vector<std::string> choices) {
  return {std::move(name), DimKind::categorical, 0.0, 0.0, std::move(choices)};
}

// Continuous dimensions are modelled in this coordinate.
double to_internal(const SearchDim& d, double v) { return d.kind == DimKind::log_uniform ? std::log(v) : v; }
double from_internal(const SearchDim& d, double v) { return d.kind == DimKind::log_uniform ? std::exp(v) : v; }
double internal_lo(const SearchDim& d) { return to_internal(d, d.lo); }
double internal_hi(const SearchDim& d) { return to_internal(d, d.hi); }

ParamValue finish(const SearchDim& d, double internal) {
  double v = std::clamp(from_internal(d, std::clamp(internal, internal_lo(d), internal_hi(d))), d.lo, d.hi);
  if (d.kind == DimKind::integer_range) v = std::clamp(std::round(v), d.lo, d.hi);
  return v;
}

Hyperparams sample_prior(const SearchSpace& space, Rng& rng) {
  Hyperparams hp;
  for (const auto& d : space.dims) {
    switch (d.kind) {
      case DimKind::uniform:
      case DimKind::log_uniform:
        hp[d.name] = finish(d, rng.uniform(internal_lo(d), internal_hi(d)));
        break;
      case DimKind::integer_range:
        hp[d.name] = d.lo + static_cast<double>(rng.below(static_cast<std::uint64_t>(d.hi - d.lo) + 1));
        break;
      case DimKind::categorical:
        hp[d.name] = d.choices[rng.below(d.choices.size())];
        break;
    }
  }
  return hp;
}

// One-dimensional Parzen estimator: uniform prior plus Gaussian kernels, each
// with weight 1/(m+1); categorical dims use add-one smoothed frequencies.
class Parzen {
 public:
  Parzen(const SearchDim& dim, const std::vector<const Hyperparams*>& obs) : dim_(dim) {
    if (dim.kind == DimKind::categorical) {
      probs_.assign(dim.choices.size(), 1.0);
      for (const auto* hp : obs) {
        const auto& v = std::get<std::string>(hp->at(dim.name));
        const auto it = std::find(dim.choices.begin(), dim.choices.end(), v);
        probs_[static_cast<std::size_t>(it - dim.choices.begin())] += 1.0;
      }
      const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
      for (auto& p : probs_) p /= total;
      return;
    }
    for (const auto* hp : obs) centers_.push_back(to_internal(dim, std::get<double>(hp->at(dim.name))));
    const double width = internal_hi(dim) - internal_lo(dim);
    const double m = static_cast<double>(std::max<std::size_t>(1, centers_.size()));
    sigma_ = std::max(0.25 * width * std::pow(m, -0.2), 0.01 * width);
    if (!(sigma_ > 0.0)) sigma_ = 1.0;
  }

  ParamValue sample(Rng& rng) const {
    if (dim_.kind == DimKind::categorical) {
      double u = rng.uniform(), acc = 0.0;
      for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        if (u < acc) return dim_.choices[i];
      }
      return dim_.choices.back();
    }
    const std::size_t pick = static_cast<std::size_t>(rng.below(centers_.size() + 1));
    const double lo = internal_lo(dim_), hi = internal_hi(dim_);
    if (pick == centers_.size()) return finish(dim_, rng.uniform(lo, hi));
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double v = centers_[pick] + sigma_ * rng.normal();
      if (v >= lo && v <= hi) return finish(dim_, v);
    }
    return finish(dim_, centers_[pick]);
  }

  double log_density(const ParamValue& value) const {
    if (dim_.kind == DimKind::categorical) {
      const auto& v = std::get<std::string>(value);
      const auto it = std::find(dim_.choices.begin(), dim_.choices.end(), v);
      return std::log(probs_[static_cast<std::size_t>(it - dim_.choices.begin())]);
    }
    const double x = to_internal(dim_, std::get<double>(value));
    const double lo = internal_lo(dim_), hi = internal_hi(dim_);
    const double w = 1.0 / static_cast<double>(centers_.size() + 1);
    double density = hi > lo ? w / (hi - lo) : w;
    for (double c : centers_) {
      // Kernel truncated to the bounds.
      const double mass = 0.5 * (std::erf((hi - c) / (sigma_ * std::numbers::sqrt2)) -
                                 std::erf((lo - c) / (sigma_ * std::numbers::sqrt2)));
      const double z = (x - c) / sigma_;
      density += w * std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi) * std::max(mass, 1e-12));
    }
    return std::log(std::max(density, 1e-300));
  }

 private:
  const SearchDim& dim_;
  std::vector<double> centers_;
  std::vector<double> probs_;
  double sigma_ = 1.0;
};

Hyperparams propose_tpe(const SearchSpace& space, const std::vector<Trial>& trials, Rng& rng) {
  std::vector<std::size_t> order(trials.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trials[a].score > trials[b].score; });
  const auto n_good =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kTpeGamma * static_cast<double>(trials.size()))));
  std::vector<const Hyperparams*> good, bad;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& t = trials[order[i]];
    (i < n_good && !t.failed ? good : bad).push_back(&t.params);
  }
  std::vector<Parzen> l, g;
  for (const auto& d : space.dims) {
    l.emplace_back(d, good);
    g.emplace_back(d, bad);
  }
  Hyperparams best;
  double best_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kTpeCandidates; ++c) {
    Hyperparams cand;
    double ratio = 0.0;
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
      const auto v = l[i].sample(rng);
      ratio += l[i].log_density(v) - g[i].log_density(v);
      cand[space.dims[i].name] = v;
    }
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace

bool SearchDim::contains(const ParamValue& v) const {
  if (kind == DimKind::categorical) {
    const auto* s = std::get_if<std::string>(&v);
    return s && std::find(choices.begin(), choices.end(), *s) != choices.end();
  }
  const auto* d = std::get_if<double>(&v);
  if (!d || !(*d >= lo && *d <= hi)) return false;
  return kind != DimKind::integer_range || *d == std::floor(*d);
}

void SearchSpace::validate() const {
  for (const auto& d : dims) {
    if (d.kind == DimKind::categorical) {
      if (d.choices.empty()) throw UsageError("search dim " + d.name + ": no choices");
    } else if (!(d.lo <= d.hi)) {
      throw UsageError("search dim " + d.name + ": bounds out of order");
    } else if (d.kind == DimKind::log_uniform && !(d.lo > 0.0)) {
      throw UsageError("search dim " + d.name + ": log-uniform bounds must be positive");
    } else if (d.kind == DimKind::integer_range && (d.lo != std::floor(d.lo) || d.hi != std::floor(d.hi))) {
      throw UsageError("search dim " + d.name + ": integer bounds must be whole");
    }
  }
}

bool SearchSpace::contains(const Hyperparams& hp) const {
  for (const auto& d : dims) {
    const auto it = hp.find(d.name);
    if (it == hp.end() || !d.contains(it->second)) return false;
  }
  return true;
}

SearchSpace default_space(Family family) {
  switch (family) {
    case Family::gaussian_nb:
      return {{log_uniform("var_smoothing", 1e-11, 1e-7)}};
    case Family::knn:
      return {{integer("k", 1, 50)}};
    case Family::lda:
      return {{uniform("shrinkage", 0.0, 1.0)}};
    case Family::sgd_linear:
      return {{log_uniform("alpha", 1e-6, 1e-1), log_uniform("eta0", 1e-4, 1e-1)}};
    case Family::mlp:
      return {{categorical("hidden_layers", {"1", "2"}), categorical("width", {"16", "32", "64", "128"}),
               log_uniform("learning_rate", 1e-4, 1e-1), log_uniform("alpha", 1e-6, 1e-2)}};
    case Family::random_forest: {
      std::vector<std::string> depths;
      for (int d = 4; d <= 32; ++d) depths.push_back(std::to_string(d));
      depths.push_back("none");
      return {{integer("n_trees", 50, 500), categorical("max_depth", depths),
               categorical("max_features", {"sqrt", "half", "all"})}};
    }
    case Family::adaboost:
      return {{integer("n_stages", 50, 500), log_uniform("learning_rate", 0.01, 1.0), integer("max_depth", 1, 3)}};
    case Family::gradient_boost:
      return {{integer("n_rounds", 50, 500), log_uniform("learning_rate", 0.01, 0.3), integer("max_depth", 2, 8),
               uniform("subsample", 0.5, 1.0)}};
  }
  throw UsageError("unknown family");
}

SearchSpace default_space(std::string_view family) {
  const auto f = parse_family(family);
  if (!f) throw UsageError("unknown family '" + std::string(family) + "'");
  return default_space(*f);
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "random") return Strategy::random;
  if (name == "tpe_lite") return Strategy::tpe_lite;
  return std::nullopt;
}

std::string_view strategy_name(Strategy s) { return s == Strategy::random ? "random" : "tpe_lite"; }

TrialLog search(const SearchSpace& space, std::size_t budget, const Objective& objective, std::uint64_t seed,
                Strategy strategy) {
  if (budget == 0) throw UsageError("search budget must be >= 1");
  space.validate();
  Rng rng(seed);
  const std::size_t startup = std::max<std::size_t>(10, budget / 5);
  TrialLog log;
  for (std::size_t i = 0; i < budget; ++i) {
    Trial t;
    t.params = (strategy == Strategy::random || i < startup) ? sample_prior(space, rng)
                                                             : propose_tpe(space, log.trials, rng);
    const auto start = std::chrono::steady_clock::now();
    try {
      t.score = objective(t.params);
    } catch (const DataError&) {
      t.score = kFailed;
    } catch (const NumericalError&) {
      t.score = kFailed;
    }
    t.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(t.score)) {
      t.failed = true;
      t.score = kFailed;
    }
    if (!t.failed && (!log.best_index || t.score > log.trials[*log.best_index].score)) log.best_index = i;
    log.trials.push_back(std::move(t));
  }
  return log;
}

std::string trial_log_jsonl(const TrialLog& log, Family family) {
  std::string out;
  for (const auto& t : log.trials) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : t.params) {
      if (const auto* d = std::get_if<double>(&v)) params[k] = *d;
      else params[k] = std::get<std::string>(v);
    }
    nlohmann::json j = {{"family", family_name(family)}, {"params", params}, {"duration_s", t.duration_s}};
    j["score"] = t.failed ? nlohmann::json(nullptr) : nlohmann::json(t.score);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace eegart
