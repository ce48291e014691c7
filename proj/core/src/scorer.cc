#include "baltor/scorer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <fmt/format.h>

#include "baltor/errors.h"

namespace baltor {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckDims(const ScoreModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size()) {
    throw ArgumentError(fmt::format("feature dimension {} does not match model dimension {}",
                                    x.size(), model.weights.size()));
  }
}

}  // namespace

double Score(const ScoreModel& model, std::span<const double> x) {
  CheckDims(model, x);
  return Dot(model.weights, x) + model.bias;
}

std::vector<double> ScoreRows(const ScoreModel& model, const Dataset& dataset) {
  std::vector<double> scores;
  scores.reserve(dataset.rows.size());
  for (const auto& row : dataset.rows) scores.push_back(Score(model, row.features));
  return scores;
}

LossAndGradient PairwiseLogisticLoss(const ScoreModel& model, std::span<const double> first,
                                     std::span<const double> second, int label) {
  if (label != 1 && label != -1) throw ArgumentError("surrogate loss needs a non-tied label");
  CheckDims(model, first);
  CheckDims(model, second);
  const double y = label;
  const double margin = y * (Dot(model.weights, first) - Dot(model.weights, second));

  LossAndGradient out;
  out.loss = Softplus(-margin);
  // d/dw softplus(-y w.(x - x')) = -y sigmoid(-margin) (x - x')
  const double scale = -y * Sigmoid(-margin);
  out.weight_gradient.resize(first.size());
  for (std::size_t f = 0; f < first.size(); ++f) {
    out.weight_gradient[f] = scale * (first[f] - second[f]);
  }
  return out;
}

std::vector<FeaturePair> MakeTrainingPairs(const std::vector<QueryGroup>& groups,
                                           const std::vector<GroupedPair>& pairs) {
  std::vector<FeaturePair> out;
  for (const auto& gp : pairs) {
    if (gp.pair.label == 0) continue;
    const auto& items = groups[gp.group].items;
    out.push_back({items[gp.pair.i].features, items[gp.pair.j].features, gp.pair.label});
  }
  return out;
}

TrainResult TrainLinearRanker(std::span<const FeaturePair> pairs, std::size_t feature_dim,
                              const TrainConfig& config) {
  if (pairs.empty()) throw ArgumentError("training needs at least one non-tied pair");
  if (!(config.learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  if (config.epochs < 0) throw ArgumentError("epochs must be non-negative");
  if (config.batch_size <= 0) throw ArgumentError("batch_size must be positive");
  if (!(config.l2 >= 0.0)) throw ArgumentError("l2 must be non-negative");
  for (const auto& p : pairs) {
    if (p.label == 0) throw ArgumentError("tied pairs cannot be used for surrogate training");
    if (p.first.size() != feature_dim || p.second.size() != feature_dim) {
      throw ArgumentError("training pair dimension mismatch");
    }
  }

  TrainResult result{ScoreModel::Zero(feature_dim), {}};
  auto& w = result.model.weights;

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::vector<double> grad(feature_dim);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& p = pairs[order[k]];
        const double y = p.label;
        const double margin = y * (Dot(w, p.first) - Dot(w, p.second));
        const double scale = -y * Sigmoid(-margin);
        for (std::size_t f = 0; f < feature_dim; ++f) grad[f] += scale * (p.first[f] - p.second[f]);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t f = 0; f < feature_dim; ++f) {
        w[f] -= config.learning_rate * (grad[f] * inv + 2.0 * config.l2 * w[f]);
      }
    }

    double total = 0.0;
    for (const auto& p : pairs) {
      total += Softplus(-p.label * (Dot(w, p.first) - Dot(w, p.second)));
    }
    result.loss_trace.push_back(total / static_cast<double>(pairs.size()) +
                                config.l2 * Dot(w, w));
  }
  return result;
}

std::vector<double> LoadExternalScores(std::istream& in, std::size_t n_rows) {
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string_view tok(line.data() + b, e - b + 1);
    if (tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw FormatError(line_no, fmt::format("not a finite decimal: '{}'", tok));
    }
    if (scores.size() == n_rows) {
      throw FormatError(line_no, fmt::format("more scores than the {} dataset rows", n_rows));
    }
    scores.push_back(v);
  }
  if (scores.size() != n_rows) {
    throw FormatError(line_no, fmt::format("got {} scores for {} dataset rows", scores.size(),
                                           n_rows));
  }
  return scores;
}

}  // namespace baltor
