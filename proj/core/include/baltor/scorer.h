#ifndef BALTOR_SCORER_H_
#define BALTOR_SCORER_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <vector>

#include "baltor/data.h"

namespace baltor {

// Linear item scorer s(x) = w.x + b.
struct ScoreModel {
  std::vector<double> weights;
  double bias = 0.0;

  static ScoreModel Zero(std::size_t dim) { return {std::vector<double>(dim, 0.0), 0.0}; }
  bool operator==(const ScoreModel&) const = default;
};

double Score(const ScoreModel& model, std::span<const double> x);

// Scores every row of a dataset.
std::vector<double> ScoreRows(const ScoreModel& model, const Dataset& dataset);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> weight_gradient;
  // Always zero: the bias cancels in s(x) - s(x').
  double bias_gradient = 0.0;
};

// RankNet-style surrogate log(1 + exp(-y (s(x) - s(x')))) and its exact
// gradient. Throws ArgumentError for y == 0 or mismatched dimensions.
LossAndGradient PairwiseLogisticLoss(const ScoreModel& model, std::span<const double> first,
                                     std::span<const double> second, int label);

// A non-tied training pair; the spans must outlive the training call.
struct FeaturePair {
  std::span<const double> first;
  std::span<const double> second;
  int label = 0;
};

// Non-tied pairs of `pairs` as feature views into `groups`.
std::vector<FeaturePair> MakeTrainingPairs(const std::vector<QueryGroup>& groups,
                                           const std::vector<GroupedPair>& pairs);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 20;
  int batch_size = 256;
  double l2 = 0.0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  ScoreModel model;
  // Mean regularized objective over all pairs after each epoch.
  std::vector<double> loss_trace;
};

// Mini-batch gradient descent on the mean pairwise logistic loss plus
// l2 * |w|^2, starting from the zero model. Pairs are visited in a seeded
// shuffle each epoch. Throws ArgumentError on an empty list or a tied pair.
TrainResult TrainLinearRanker(std::span<const FeaturePair> pairs, std::size_t feature_dim,
                              const TrainConfig& config);

// One finite decimal per non-empty line, aligned to dataset rows. Blank lines
// are skipped. Throws FormatError (with line number) on a non-numeric line or
// a count mismatch.
std::vector<double> LoadExternalScores(std::istream& in, std::size_t n_rows);

}  // namespace baltor

#endif  // BALTOR_SCORER_H_
