#include "baltor/probmodel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "baltor/errors.h"

namespace baltor {
namespace {

// Divides by (p_minus + p_plus) + p_zero. The grouping is symmetric in the
// two directions so swapping a pair cannot change the result by an ulp.
PairwiseProbs Normalize(PairwiseProbs p) {
  const double total = (p.p_minus + p.p_plus) + p.p_zero;
  return {p.p_minus / total, p.p_zero / total, p.p_plus / total};
}

}  // namespace

TieParams TieParams::FromTheta(double theta) {
  if (!std::isfinite(theta) || theta < 1.0) {
    throw ArgumentError(fmt::format("tie parameter theta must be >= 1, got {}", theta));
  }
  return TieParams(theta, std::log(theta));
}

TieParams TieParams::FromEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ArgumentError(fmt::format("tie parameter epsilon must be >= 0, got {}", epsilon));
  }
  return TieParams(std::exp(epsilon), epsilon);
}

TieParams EstimateTheta(std::size_t n_pairs, std::size_t n_no_ties) {
  if (n_no_ties == 0) throw EstimationError("theta is undefined when every pair is tied");
  if (n_no_ties > n_pairs) throw ArgumentError("more untied pairs than pairs");
  const double theta =
      2.0 * static_cast<double>(n_pairs) / static_cast<double>(n_no_ties) - 1.0;
  return TieParams::FromTheta(theta);
}

TieParams EstimateTheta(std::span<const GroupedPair> pairs) {
  const auto untied = static_cast<std::size_t>(std::count_if(
      pairs.begin(), pairs.end(), [](const GroupedPair& p) { return p.pair.label != 0; }));
  return EstimateTheta(pairs.size(), untied);
}

double PairwiseProbs::Of(int y) const {
  switch (y) {
    case -1: return p_minus;
    case 0: return p_zero;
    case 1: return p_plus;
  }
  throw ArgumentError(fmt::format("label must be -1, 0 or 1, got {}", y));
}

PairwiseProbs BradleyTerryProbs(double s, double s_other, double theta) {
  if (!std::isfinite(theta) || theta < 1.0) {
    throw ArgumentError(fmt::format("theta must be >= 1, got {}", theta));
  }
  if (!std::isfinite(s) || !std::isfinite(s_other)) throw ArgumentError("scores must be finite");
  // Evaluate with the larger score first so both orientations share every
  // floating-point operation.
  if (s < s_other) return BradleyTerryProbs(s_other, s, theta).Swapped();

  const double a = 1.0;                      // exp(s - max)
  const double b = std::exp(s_other - s);    // exp(s' - max), in (0, 1]
  PairwiseProbs p;
  p.p_plus = a / (a + theta * b);
  p.p_minus = b / (b + theta * a);
  p.p_zero = (theta * theta - 1.0) * a * b / ((theta * a + b) * (a + theta * b));
  return Normalize(p);
}

PairwiseProbs ThurstoneMostellerProbs(double s, double s_other, double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ArgumentError(fmt::format("epsilon must be >= 0, got {}", epsilon));
  }
  if (!std::isfinite(s) || !std::isfinite(s_other)) throw ArgumentError("scores must be finite");
  if (s < s_other) return ThurstoneMostellerProbs(s_other, s, epsilon).Swapped();

  const double d = s - s_other;
  PairwiseProbs p;
  p.p_plus = StdNormalCdf(d - epsilon);
  p.p_minus = StdNormalCdf(-d - epsilon);
  p.p_zero = std::max(0.0, StdNormalCdf(d + epsilon) - p.p_plus);
  return Normalize(p);
}

std::string_view ToString(ProbModelKind kind) {
  return kind == ProbModelKind::kBradleyTerry ? "bt" : "tm";
}

ProbModelKind ParseProbModelKind(std::string_view text) {
  if (text == "bt") return ProbModelKind::kBradleyTerry;
  if (text == "tm") return ProbModelKind::kThurstoneMosteller;
  throw ArgumentError(fmt::format("unknown probability model '{}' (expected bt or tm)", text));
}

PairwiseProbs PairProbs(ProbModelKind kind, double s, double s_other, const TieParams& tie) {
  return kind == ProbModelKind::kBradleyTerry ? BradleyTerryProbs(s, s_other, tie.theta())
                                              : ThurstoneMostellerProbs(s, s_other, tie.epsilon());
}

int PredictLabel(const PairwiseProbs& p) {
  const double best = std::max({p.p_minus, p.p_zero, p.p_plus});
  if (p.p_zero == best) return 0;
  if (p.p_plus == best && p.p_minus == best) return 0;
  return p.p_plus == best ? 1 : -1;
}

ScoreStandardizer ScoreStandardizer::Fit(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("cannot standardize an empty score list");
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(scores.size()));
  return {mean, sd > 0.0 ? sd : 1.0};
}

}  // namespace baltor
