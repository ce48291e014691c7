#ifndef BALTOR_EVAL_H_
#define BALTOR_EVAL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "baltor/abstain.h"
#include "baltor/data.h"
#include "baltor/probmodel.h"

namespace baltor {

// Coverage grid used throughout the experiments on LETOR data.
inline constexpr std::array<double, 7> kDefaultCoverageGrid = {0.99, 0.95, 0.90, 0.85,
                                                               0.80, 0.75, 0.70};

// Pairs of one split with their model probabilities, in EnumerateAllPairs
// order.
struct ScoredPairs {
  std::vector<PairInstance> pairs;
  std::vector<PairwiseProbs> probs;
  bool labeled = true;

  std::size_t size() const { return pairs.size(); }
  PairKey Key(std::size_t k) const { return {pairs[k].query_id, pairs[k].i, pairs[k].j}; }
  std::vector<double> Values(ScoreKind kind) const;
  std::vector<int> Predictions() const;
  std::vector<int> Labels() const;
};

// Converts row-aligned item scores into pair probabilities. Scores pass
// through `standardizer` first.
ScoredPairs ScorePairs(const std::vector<QueryGroup>& groups,
                       const std::vector<GroupedPair>& pairs, std::span<const double> row_scores,
                       ProbModelKind kind, const TieParams& tie,
                       const ScoreStandardizer& standardizer, bool labeled = true);

enum class Method { kBaltor, kEntropy, kRandom };

std::string_view ToString(Method method);
// Accepts "baltor" (or "balto"), "entropy", "random".
Method ParseMethod(std::string_view text);
Method MethodFor(ScoreKind kind);

struct EvalReport {
  std::string method;
  std::string fold;
  double target_coverage = 0.0;

  std::size_t n_pairs = 0;
  std::size_t n_selected = 0;
  std::size_t n_correct = 0;
  // Selected pairs per true label, indexed y + 1.
  std::array<std::size_t, 3> selected_per_class{};

  double coverage = 0.0;
  // Undefined (nullopt) when nothing is selected.
  std::optional<double> accuracy;
  std::optional<double> selective_risk;
  std::optional<std::array<double, 3>> sel_rate;
};

// Acc, Cov and SelRate over aligned lists. Throws ArgumentError when the
// lengths differ.
EvalReport Evaluate(std::span<const int> labels, std::span<const int> predictions,
                    const std::vector<bool>& accepted, double target_coverage = 1.0);

// Accept decisions of `policy` on every pair of `scored`.
std::vector<bool> ApplyPolicy(const SelectivePolicy& policy, const ScoredPairs& scored);

struct SweepOptions {
  std::vector<double> grid{kDefaultCoverageGrid.begin(), kDefaultCoverageGrid.end()};
  bool include_random = true;
  std::uint64_t random_seed = 0;
  std::string fold;
};

// One report per calibrated policy plus, when enabled, one random-abstainer
// report per grid value. Reports are ordered baltor, entropy, random; within
// each method they follow the policies (or grid) order.
std::vector<EvalReport> Sweep(const ScoredPairs& test, std::span<const SelectivePolicy> policies,
                              const SweepOptions& options);

struct MetricSummary {
  double mean = 0.0;
  // Sample (n - 1) standard deviation; 0 when n == 1.
  double std = 0.0;
  std::size_t n = 0;
  bool single_fold() const { return n == 1; }
};

// Mean and sample std of `values`. Throws ArgumentError when empty.
MetricSummary Summarize(std::span<const double> values);

struct AggregateRow {
  std::string method;
  double target_coverage = 0.0;
  std::size_t n_folds = 0;
  MetricSummary coverage;
  // Over folds with a defined accuracy; nullopt when none has one.
  std::optional<MetricSummary> accuracy;
  std::optional<MetricSummary> selective_risk;
  std::optional<std::array<MetricSummary, 3>> sel_rate;
};

// Groups by (method, c) in first-appearance order.
std::vector<AggregateRow> AggregateFolds(std::span<const EvalReport> reports);

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline constexpr std::string_view kReportCsvHeader =
    "method,fold,c,cov,acc,sel_risk,selrate_minus,selrate_zero,selrate_plus,n_pairs,n_selected";

// Metadata goes first as `# key=value` lines. Columns are kReportCsvHeader
// followed by `cov_gap` = |cov - c|. Aggregates add one `mean` and one `std`
// row per group. Undefined values are written as `NA`.
void WriteReportCsv(std::ostream& out, std::span<const EvalReport> reports,
                    std::span<const AggregateRow> aggregates, const Metadata& metadata);

// Same content as the CSV, as {"metadata": {...}, "reports": [...],
// "aggregates": [...]}; undefined values are null.
void WriteReportJson(std::ostream& out, std::span<const EvalReport> reports,
                     std::span<const AggregateRow> aggregates, const Metadata& metadata);

}  // namespace baltor

#endif  // BALTOR_EVAL_H_
