#ifndef BALTOR_ABSTAIN_H_
#define BALTOR_ABSTAIN_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "baltor/probmodel.h"

namespace baltor {

// 1 - max_y p(y): conditional 0-1 risk of the argmax ranker.
double ConditionalRisk(const PairwiseProbs& p);

// Shannon entropy in nats, with 0 ln 0 = 0.
double Entropy(const PairwiseProbs& p);

// Statistic a selector thresholds on.
enum class ScoreKind { kRisk, kEntropy };
enum class SelectionMode { kDeterministic, kRandomized };

std::string_view ToString(ScoreKind kind);
std::string_view ToString(SelectionMode mode);
ScoreKind ParseScoreKind(std::string_view text);
// Accepts "deterministic"/"det" and "randomized"/"rand".
SelectionMode ParseSelectionMode(std::string_view text);

double SelectionValue(ScoreKind kind, const PairwiseProbs& p);

struct Calibration {
  double threshold = 0.0;
  // Acceptance probability for values equal to the threshold.
  double boundary_prob = 1.0;
};

// Order-statistic quantile: with k = ceil(c n), the threshold is the k-th
// smallest value and boundary_prob = (c n - #{v < t}) / #{v = t} clamped to
// [0, 1], so #{v < t} + boundary_prob #{v = t} = c n. Throws ArgumentError
// on an empty list or c outside (0, 1].
Calibration CalibrateThreshold(std::span<const double> values, double c);

struct SelectivePolicy {
  ScoreKind kind = ScoreKind::kRisk;
  double threshold = 0.0;
  double target_coverage = 1.0;
  SelectionMode mode = SelectionMode::kDeterministic;
  double boundary_prob = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const SelectivePolicy&) const = default;
};

// Calibrates `kind` values at coverage c. Throws like CalibrateThreshold.
SelectivePolicy CalibratePolicy(ScoreKind kind, std::span<const double> values, double c,
                                SelectionMode mode, std::uint64_t seed);

// Identifies an unordered within-query pair. (q, i, j) and (q, j, i) are the
// same key.
struct PairKey {
  std::string_view query_id;
  std::size_t i = 0;
  std::size_t j = 0;
};

// Stable 64-bit hash of (seed, canonical pair key); independent of platform
// and of iteration order.
std::uint64_t HashPairKey(std::uint64_t seed, const PairKey& key);

enum class Decision { kAccept, kAbstain };

// Deterministic mode accepts iff value <= threshold. Randomized mode accepts
// below the threshold, abstains above it, and at the threshold accepts with
// probability boundary_prob using HashPairKey as the coin.
Decision Select(const SelectivePolicy& policy, double value, const PairKey& key);

// Accepts exactly round(c n) of n items, chosen by a seeded shuffle.
std::vector<bool> RandomSelector(double c, std::size_t n, std::uint64_t seed);

// Flat key=value record:
//   kind=risk
//   threshold=0.123
//   c=0.9
//   mode=deterministic
//   p_r=1
//   seed=42
// Doubles are printed in shortest round-trip form.
std::string SerializePolicy(const SelectivePolicy& policy);
// Parses one record; unknown keys are ignored. Throws ParseError.
SelectivePolicy DeserializePolicy(std::string_view record);

}  // namespace baltor

#endif  // BALTOR_ABSTAIN_H_
