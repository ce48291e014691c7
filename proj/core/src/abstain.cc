#include "baltor/abstain.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "baltor/errors.h"

namespace baltor {
namespace {

double XLogX(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void CheckCoverage(double c) {
  if (!(c > 0.0 && c <= 1.0)) {
    throw ArgumentError(fmt::format("target coverage must lie in (0, 1], got {}", c));
  }
}

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T ParseField(std::string_view value, std::size_t line, std::string_view key) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError(line, fmt::format("invalid value '{}' for {}", value, key));
  }
  return out;
}

}  // namespace

double ConditionalRisk(const PairwiseProbs& p) {
  return 1.0 - std::max({p.p_minus, p.p_zero, p.p_plus});
}

double Entropy(const PairwiseProbs& p) {
  return -((XLogX(p.p_minus) + XLogX(p.p_plus)) + XLogX(p.p_zero));
}

std::string_view ToString(ScoreKind kind) { return kind == ScoreKind::kRisk ? "risk" : "entropy"; }

std::string_view ToString(SelectionMode mode) {
  return mode == SelectionMode::kDeterministic ? "deterministic" : "randomized";
}

ScoreKind ParseScoreKind(std::string_view text) {
  if (text == "risk") return ScoreKind::kRisk;
  if (text == "entropy") return ScoreKind::kEntropy;
  throw ArgumentError(fmt::format("unknown score kind '{}'", text));
}

SelectionMode ParseSelectionMode(std::string_view text) {
  if (text == "deterministic" || text == "det") return SelectionMode::kDeterministic;
  if (text == "randomized" || text == "rand") return SelectionMode::kRandomized;
  throw ArgumentError(fmt::format("unknown selection mode '{}'", text));
}

double SelectionValue(ScoreKind kind, const PairwiseProbs& p) {
  return kind == ScoreKind::kRisk ? ConditionalRisk(p) : Entropy(p);
}

Calibration CalibrateThreshold(std::span<const double> values, double c) {
  if (values.empty()) throw ArgumentError("cannot calibrate on an empty value list");
  CheckCoverage(c);
  std::vector<double> sorted(values.begin(), values.end());
  if (std::any_of(sorted.begin(), sorted.end(), [](double v) { return std::isnan(v); })) {
    throw ArgumentError("calibration values must not be NaN");
  }
  std::sort(sorted.begin(), sorted.end());

  const auto n = static_cast<double>(sorted.size());
  const double target = c * n;
  // c n is computed in floating point; 0.7 * 10 must give k = 7, not 8.
  auto k = static_cast<std::size_t>(std::ceil(target - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());

  Calibration out;
  out.threshold = sorted[k - 1];
  auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), out.threshold);
  const auto below = static_cast<double>(lo - sorted.begin());
  const auto at = static_cast<double>(hi - lo);
  out.boundary_prob = std::clamp((target - below) / at, 0.0, 1.0);
  return out;
}

SelectivePolicy CalibratePolicy(ScoreKind kind, std::span<const double> values, double c,
                                SelectionMode mode, std::uint64_t seed) {
  const Calibration cal = CalibrateThreshold(values, c);
  return {kind, cal.threshold, c, mode, cal.boundary_prob, seed};
}

std::uint64_t HashPairKey(std::uint64_t seed, const PairKey& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : key.query_id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  const auto lo = static_cast<std::uint64_t>(std::min(key.i, key.j));
  const auto hi = static_cast<std::uint64_t>(std::max(key.i, key.j));
  h = SplitMix64(h ^ seed);
  h = SplitMix64(h ^ lo);
  h = SplitMix64(h ^ hi);
  return h;
}

Decision Select(const SelectivePolicy& policy, double value, const PairKey& key) {
  if (value < policy.threshold) return Decision::kAccept;
  if (value > policy.threshold) return Decision::kAbstain;
  if (policy.mode == SelectionMode::kDeterministic) return Decision::kAccept;
  const double u = static_cast<double>(HashPairKey(policy.seed, key) >> 11) * 0x1.0p-53;
  return u < policy.boundary_prob ? Decision::kAccept : Decision::kAbstain;
}

std::vector<bool> RandomSelector(double c, std::size_t n, std::uint64_t seed) {
  CheckCoverage(c);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto k = std::min(n, static_cast<std::size_t>(std::llround(c * static_cast<double>(n))));
  std::vector<bool> accepted(n, false);
  for (std::size_t t = 0; t < k; ++t) accepted[order[t]] = true;
  return accepted;
}

std::string SerializePolicy(const SelectivePolicy& policy) {
  return fmt::format("kind={}\nthreshold={}\nc={}\nmode={}\np_r={}\nseed={}\n",
                     ToString(policy.kind), policy.threshold, policy.target_coverage,
                     ToString(policy.mode), policy.boundary_prob, policy.seed);
}

SelectivePolicy DeserializePolicy(std::string_view record) {
  SelectivePolicy policy;
  bool seen_kind = false, seen_threshold = false, seen_c = false;
  std::size_t line_no = 0;
  while (!record.empty()) {
    ++line_no;
    std::size_t nl = record.find('\n');
    std::string_view line = TrimView(record.substr(0, nl));
    record = nl == std::string_view::npos ? std::string_view{} : record.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    std::string_view key = TrimView(line.substr(0, eq));
    std::string_view value = TrimView(line.substr(eq + 1));
    try {
      if (key == "kind") {
        policy.kind = ParseScoreKind(value);
        seen_kind = true;
      } else if (key == "threshold") {
        policy.threshold = ParseField<double>(value, line_no, key);
        seen_threshold = true;
      } else if (key == "c") {
        policy.target_coverage = ParseField<double>(value, line_no, key);
        seen_c = true;
      } else if (key == "mode") {
        policy.mode = ParseSelectionMode(value);
      } else if (key == "p_r") {
        policy.boundary_prob = ParseField<double>(value, line_no, key);
      } else if (key == "seed") {
        policy.seed = ParseField<std::uint64_t>(value, line_no, key);
      }
    } catch (const ArgumentError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!seen_kind || !seen_threshold || !seen_c) {
    throw ParseError(0, "policy record needs kind, threshold and c");
  }
  if (!std::isfinite(policy.threshold)) throw ParseError(0, "policy threshold must be finite");
  if (!(policy.target_coverage > 0.0 && policy.target_coverage <= 1.0)) {
    throw ParseError(0, "policy coverage must lie in (0, 1]");
  }
  if (!(policy.boundary_prob >= 0.0 && policy.boundary_prob <= 1.0)) {
    throw ParseError(0, "policy p_r must lie in [0, 1]");
  }
  return policy;
}

}  // namespace baltor
