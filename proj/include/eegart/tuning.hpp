#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eegart/classifiers.hpp"

namespace eegart {

enum class DimKind { uniform, log_uniform, integer_range, categorical };

struct SearchDim {
  std::string name;
  DimKind kind = DimKind::uniform;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> choices;  // categorical only

  bool contains(const ParamValue& v) const;
};

struct SearchSpace {
  std::vector<SearchDim> dims;

  /// Throws UsageError for inverted bounds, non-positive log bounds or empty choices.
  void validate() const;
  bool contains(const Hyperparams& hp) const;
};

/// Each family's declared space. The string overload throws UsageError for
/// unknown family names.
SearchSpace default_space(Family family);
SearchSpace default_space(std::string_view family);

enum class Strategy { random, tpe_lite };
std::optional<Strategy> parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s);

struct Trial {
  Hyperparams params;
  double score = 0.0;  // -inf when failed
  double duration_s = 0.0;
  bool failed = false;
};

struct TrialLog {
  std::vector<Trial> trials;
  std::optional<std::size_t> best_index;  // unset when every trial failed
};

using Objective = std::function<double(const Hyperparams&)>;

inline constexpr double kTpeGamma = 0.25;
inline constexpr std::size_t kTpeCandidates = 24;

/// Maximises `objective` with exactly `budget` evaluations. The sequence of
/// sampled points depends only on (space, seed, strategy) and the observed
/// scores. Non-finite scores, DataError and NumericalError mark a trial as
/// failed; failed trials never become best. Ties go to the earliest trial.
/// tpe_lite samples max(10, budget/5) random points, then proposes 24
/// candidates per step from a Parzen mixture over the top 25% of trials and
/// keeps the one with the best good/bad density ratio.
TrialLog search(const SearchSpace& space, std::size_t budget, const Objective& objective, std::uint64_t seed,
                Strategy strategy);

// One JSON object per trial: {family, params, score, duration_s}; failed
// trials carry a null score.
std::string trial_log_jsonl(const TrialLog& log, Family family);

}  // namespace eegart
