#ifndef BALTOR_PROBMODEL_H_
#define BALTOR_PROBMODEL_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "baltor/data.h"

namespace baltor {

// Standard normal CDF, computed without relying on the platform erf.
double StdNormalCdf(double z);

// Tie parameter shared by both preference models: theta = exp(epsilon).
class TieParams {
 public:
  // Throws ArgumentError when theta < 1 or not finite.
  static TieParams FromTheta(double theta);
  // Throws ArgumentError when epsilon < 0 or not finite.
  static TieParams FromEpsilon(double epsilon);

  double theta() const { return theta_; }
  double epsilon() const { return epsilon_; }

 private:
  TieParams(double theta, double epsilon) : theta_(theta), epsilon_(epsilon) {}
  double theta_;
  double epsilon_;
};

// theta = 2 n_pairs / n_no_ties - 1. Throws EstimationError when
// n_no_ties == 0 and ArgumentError when n_no_ties > n_pairs.
TieParams EstimateTheta(std::size_t n_pairs, std::size_t n_no_ties);
TieParams EstimateTheta(std::span<const GroupedPair> pairs);

// Conditional distribution over Y = {-1, 0, +1} for an ordered pair.
struct PairwiseProbs {
  double p_minus = 0.0;
  double p_zero = 0.0;
  double p_plus = 0.0;

  PairwiseProbs Swapped() const { return {p_plus, p_zero, p_minus}; }
  // Probability of label y in {-1, 0, +1}.
  double Of(int y) const;
};

// Bradley-Terry with ties (Rao-Kupper). The tie mass uses the factor
// (theta^2 - 1), which makes the three probabilities sum to one.
PairwiseProbs BradleyTerryProbs(double s, double s_other, double theta);

// Thurstone-Mosteller with ties: d = s - s', P(+1) = Phi(d - eps),
// P(-1) = Phi(-d - eps), P(0) = Phi(d + eps) - Phi(d - eps).
PairwiseProbs ThurstoneMostellerProbs(double s, double s_other, double epsilon);

enum class ProbModelKind { kBradleyTerry, kThurstoneMosteller };

std::string_view ToString(ProbModelKind kind);
// Accepts "bt" and "tm". Throws ArgumentError otherwise.
ProbModelKind ParseProbModelKind(std::string_view text);

PairwiseProbs PairProbs(ProbModelKind kind, double s, double s_other, const TieParams& tie);

// Argmax label. Exact ties resolve to 0 whenever p_zero is maximal or
// p_plus == p_minus are both maximal, so predictions flip sign under a swap.
int PredictLabel(const PairwiseProbs& p);

// Affine map s -> (s - mean) / sd fitted on training item scores.
struct ScoreStandardizer {
  double mean = 0.0;
  double sd = 1.0;

  static ScoreStandardizer Identity() { return {}; }
  // Throws ArgumentError on an empty list. A zero spread keeps sd = 1.
  static ScoreStandardizer Fit(std::span<const double> scores);
  double Apply(double s) const { return (s - mean) / sd; }
};

}  // namespace baltor

#endif  // BALTOR_PROBMODEL_H_
