#include "baltor/eval.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "baltor/errors.h"

namespace baltor {
namespace {

std::string Num(double v) { return fmt::format("{}", v); }

std::string Num(const std::optional<double>& v) { return v ? Num(*v) : "NA"; }

nlohmann::ordered_json Json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json Json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}, {"single_fold", s.single_fold()}};
}

nlohmann::ordered_json Json(const std::optional<MetricSummary>& s) {
  return s ? Json(*s) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::vector<double> ScoredPairs::Values(ScoreKind kind) const {
  std::vector<double> values(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) values[k] = SelectionValue(kind, probs[k]);
  return values;
}

std::vector<int> ScoredPairs::Predictions() const {
  std::vector<int> out(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) out[k] = PredictLabel(probs[k]);
  return out;
}

std::vector<int> ScoredPairs::Labels() const {
  std::vector<int> out(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) out[k] = pairs[k].label;
  return out;
}

ScoredPairs ScorePairs(const std::vector<QueryGroup>& groups,
                       const std::vector<GroupedPair>& pairs, std::span<const double> row_scores,
                       ProbModelKind kind, const TieParams& tie,
                       const ScoreStandardizer& standardizer, bool labeled) {
  ScoredPairs out;
  out.labeled = labeled;
  out.pairs.reserve(pairs.size());
  out.probs.reserve(pairs.size());
  for (const auto& gp : pairs) {
    const auto& items = groups.at(gp.group).items;
    const std::size_t ri = items.at(gp.pair.i).row;
    const std::size_t rj = items.at(gp.pair.j).row;
    if (ri >= row_scores.size() || rj >= row_scores.size()) {
      throw ArgumentError("row scores do not cover every dataset row");
    }
    out.probs.push_back(PairProbs(kind, standardizer.Apply(row_scores[ri]),
                                  standardizer.Apply(row_scores[rj]), tie));
    out.pairs.push_back(gp.pair);
  }
  return out;
}

std::string_view ToString(Method method) {
  switch (method) {
    case Method::kBaltor: return "baltor";
    case Method::kEntropy: return "entropy";
    case Method::kRandom: return "random";
  }
  return "unknown";
}

Method ParseMethod(std::string_view text) {
  if (text == "baltor" || text == "balto") return Method::kBaltor;
  if (text == "entropy") return Method::kEntropy;
  if (text == "random") return Method::kRandom;
  throw ArgumentError(fmt::format("unknown method '{}'", text));
}

Method MethodFor(ScoreKind kind) {
  return kind == ScoreKind::kRisk ? Method::kBaltor : Method::kEntropy;
}

EvalReport Evaluate(std::span<const int> labels, std::span<const int> predictions,
                    const std::vector<bool>& accepted, double target_coverage) {
  if (labels.size() != predictions.size() || labels.size() != accepted.size()) {
    throw ArgumentError(fmt::format("misaligned evaluation inputs: {} labels, {} predictions, "
                                    "{} decisions",
                                    labels.size(), predictions.size(), accepted.size()));
  }
  EvalReport r;
  r.target_coverage = target_coverage;
  r.n_pairs = labels.size();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!accepted[k]) continue;
    if (labels[k] < -1 || labels[k] > 1) throw ArgumentError("labels must lie in {-1, 0, 1}");
    ++r.n_selected;
    if (predictions[k] == labels[k]) ++r.n_correct;
    ++r.selected_per_class[static_cast<std::size_t>(labels[k] + 1)];
  }
  r.coverage = r.n_pairs == 0 ? 0.0
                              : static_cast<double>(r.n_selected) / static_cast<double>(r.n_pairs);
  if (r.n_selected > 0) {
    const auto sel = static_cast<double>(r.n_selected);
    r.accuracy = static_cast<double>(r.n_correct) / sel;
    r.selective_risk = 1.0 - *r.accuracy;
    std::array<double, 3> rates{};
    for (std::size_t y = 0; y < 3; ++y) {
      rates[y] = static_cast<double>(r.selected_per_class[y]) / sel;
    }
    r.sel_rate = rates;
  }
  return r;
}

std::vector<bool> ApplyPolicy(const SelectivePolicy& policy, const ScoredPairs& scored) {
  std::vector<bool> accepted(scored.size());
  for (std::size_t k = 0; k < scored.size(); ++k) {
    const double value = SelectionValue(policy.kind, scored.probs[k]);
    accepted[k] = Select(policy, value, scored.Key(k)) == Decision::kAccept;
  }
  return accepted;
}

std::vector<EvalReport> Sweep(const ScoredPairs& test, std::span<const SelectivePolicy> policies,
                              const SweepOptions& options) {
  if (!test.labeled) throw ArgumentError("evaluation requires labeled pairs");
  const auto labels = test.Labels();
  const auto predictions = test.Predictions();

  std::vector<EvalReport> reports;
  for (Method method : {Method::kBaltor, Method::kEntropy}) {
    for (const auto& policy : policies) {
      if (MethodFor(policy.kind) != method) continue;
      EvalReport r =
          Evaluate(labels, predictions, ApplyPolicy(policy, test), policy.target_coverage);
      r.method = ToString(method);
      r.fold = options.fold;
      reports.push_back(std::move(r));
    }
  }
  if (options.include_random) {
    for (double c : options.grid) {
      EvalReport r =
          Evaluate(labels, predictions, RandomSelector(c, test.size(), options.random_seed), c);
      r.method = ToString(Method::kRandom);
      r.fold = options.fold;
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

MetricSummary Summarize(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("cannot summarize an empty group");
  MetricSummary s;
  s.n = values.size();
  // Shifted by the first value so identical inputs give an exact mean and a
  // zero spread.
  const double shift = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - shift;
  s.mean = shift + offset / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::vector<AggregateRow> AggregateFolds(std::span<const EvalReport> reports) {
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::string, double>, std::vector<const EvalReport*>> groups;
  for (const auto& r : reports) {
    auto key = std::make_pair(r.method, r.target_coverage);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<AggregateRow> rows;
  for (const auto& key : keys) {
    const auto& members = groups[key];
    AggregateRow row;
    row.method = key.first;
    row.target_coverage = key.second;
    row.n_folds = members.size();

    std::vector<double> cov, acc, risk;
    std::array<std::vector<double>, 3> rates;
    for (const auto* r : members) {
      cov.push_back(r->coverage);
      if (r->accuracy) {
        acc.push_back(*r->accuracy);
        risk.push_back(*r->selective_risk);
        for (std::size_t y = 0; y < 3; ++y) rates[y].push_back((*r->sel_rate)[y]);
      }
    }
    row.coverage = Summarize(cov);
    if (!acc.empty()) {
      row.accuracy = Summarize(acc);
      row.selective_risk = Summarize(risk);
      row.sel_rate = std::array<MetricSummary, 3>{Summarize(rates[0]), Summarize(rates[1]),
                                                  Summarize(rates[2])};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteReportCsv(std::ostream& out, std::span<const EvalReport> reports,
                    std::span<const AggregateRow> aggregates, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << kReportCsvHeader << ",cov_gap\n";
  for (const auto& r : reports) {
    std::optional<double> minus, zero, plus;
    if (r.sel_rate) {
      minus = (*r.sel_rate)[0];
      zero = (*r.sel_rate)[1];
      plus = (*r.sel_rate)[2];
    }
    out << r.method << ',' << r.fold << ',' << Num(r.target_coverage) << ',' << Num(r.coverage)
        << ',' << Num(r.accuracy) << ',' << Num(r.selective_risk) << ',' << Num(minus) << ','
        << Num(zero) << ',' << Num(plus) << ',' << r.n_pairs << ',' << r.n_selected << ','
        << Num(std::abs(r.coverage - r.target_coverage)) << '\n';
  }
  for (const auto& a : aggregates) {
    for (bool is_mean : {true, false}) {
      auto pick = [&](const std::optional<MetricSummary>& s) -> std::optional<double> {
        if (!s) return std::nullopt;
        return is_mean ? s->mean : s->std;
      };
      std::array<std::optional<double>, 3> rates;
      if (a.sel_rate) {
        for (std::size_t y = 0; y < 3; ++y) rates[y] = pick((*a.sel_rate)[y]);
      }
      out << a.method << ',' << (is_mean ? "mean" : "std") << ',' << Num(a.target_coverage) << ','
          << Num(pick(a.coverage)) << ',' << Num(pick(a.accuracy)) << ','
          << Num(pick(a.selective_risk)) << ',' << Num(rates[0]) << ',' << Num(rates[1]) << ','
          << Num(rates[2]) << ",,,";
      if (is_mean) out << Num(std::abs(a.coverage.mean - a.target_coverage));
      out << '\n';
    }
  }
}

void WriteReportJson(std::ostream& out, std::span<const EvalReport> reports,
                     std::span<const AggregateRow> aggregates, const Metadata& metadata) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : metadata) meta[key] = value;
  doc["metadata"] = meta;

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    row["fold"] = r.fold;
    row["c"] = r.target_coverage;
    row["cov"] = r.coverage;
    row["acc"] = Json(r.accuracy);
    row["sel_risk"] = Json(r.selective_risk);
    if (r.sel_rate) {
      row["selrate_minus"] = (*r.sel_rate)[0];
      row["selrate_zero"] = (*r.sel_rate)[1];
      row["selrate_plus"] = (*r.sel_rate)[2];
    } else {
      row["selrate_minus"] = row["selrate_zero"] = row["selrate_plus"] = nullptr;
    }
    row["n_pairs"] = r.n_pairs;
    row["n_selected"] = r.n_selected;
    row["n_correct"] = r.n_correct;
    row["selected_per_class"] = r.selected_per_class;
    row["cov_gap"] = std::abs(r.coverage - r.target_coverage);
    rows.push_back(std::move(row));
  }
  doc["reports"] = std::move(rows);

  nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
  for (const auto& a : aggregates) {
    nlohmann::ordered_json row;
    row["method"] = a.method;
    row["c"] = a.target_coverage;
    row["n_folds"] = a.n_folds;
    row["cov"] = Json(a.coverage);
    row["acc"] = Json(a.accuracy);
    row["sel_risk"] = Json(a.selective_risk);
    if (a.sel_rate) {
      row["selrate_minus"] = Json((*a.sel_rate)[0]);
      row["selrate_zero"] = Json((*a.sel_rate)[1]);
      row["selrate_plus"] = Json((*a.sel_rate)[2]);
    } else {
      row["selrate_minus"] = row["selrate_zero"] = row["selrate_plus"] = nullptr;
    }
    aggs.push_back(std::move(row));
  }
  doc["aggregates"] = std::move(aggs);
  out << doc.dump(2) << '\n';
}

}  // namespace baltor
