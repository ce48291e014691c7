#include "baltor/oracle.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "baltor/errors.h"

namespace baltor {
namespace {

constexpr double kMassTolerance = 1e-12;

std::size_t Index(int y) { return static_cast<std::size_t>(y + 1); }

struct Strata {
  double beta = 0.0;
  double below = 0.0;  // mass{r < beta}
  double at = 0.0;     // mass{r = beta}
};

Strata ComputeStrata(const FiniteWorld& world, const std::vector<double>& risks, double c) {
  std::vector<double> levels = risks;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  Strata s;
  s.beta = levels.back();
  for (double level : levels) {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < risks.size(); ++i) {
      if (risks[i] <= level) cumulative += world.states[i].mass;
    }
    if (cumulative >= c - kMassTolerance) {
      s.beta = level;
      break;
    }
  }
  for (std::size_t i = 0; i < risks.size(); ++i) {
    if (risks[i] < s.beta) s.below += world.states[i].mass;
    if (risks[i] == s.beta) s.at += world.states[i].mass;
  }
  return s;
}

double ParseDouble(std::string_view tok, std::size_t line) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, fmt::format("invalid number '{}'", tok));
  }
  return v;
}

std::vector<std::string_view> Fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t' && s[pos] != '\r') ++pos;
    if (pos > start) out.push_back(s.substr(start, pos - start));
  }
  return out;
}

}  // namespace

LossMatrix ZeroOneLoss() {
  LossMatrix loss{};
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) loss[a][b] = a == b ? 0.0 : 1.0;
  }
  return loss;
}

bool IsSymmetricLoss(const LossMatrix& loss) {
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (loss[a][b] != loss[2 - a][2 - b]) return false;
    }
  }
  return true;
}

void ValidateWorld(const FiniteWorld& world) {
  if (world.states.empty()) throw ArgumentError("world has no states");
  double total = 0.0;
  for (const auto& s : world.states) {
    if (!(s.mass > 0.0)) throw ArgumentError("state masses must be positive");
    total += s.mass;
    double q = 0.0;
    for (double p : s.pmf) {
      if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("pmf entries must lie in [0, 1]");
      q += p;
    }
    if (std::abs(q - 1.0) > 1e-12) throw ArgumentError("state pmf must sum to 1");
    if (s.prediction < -1 || s.prediction > 1) throw ArgumentError("prediction must be in Y");
  }
  if (std::abs(total - 1.0) > kMassTolerance) throw ArgumentError("masses must sum to 1");
  for (const auto& row : world.loss) {
    for (double l : row) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw ArgumentError("loss must be non-negative");
    }
  }
  if (!IsSymmetricLoss(world.loss)) throw ArgumentError("loss matrix is not symmetric");
}

double StateRisk(const FiniteWorld& world, std::size_t state) {
  const auto& s = world.states.at(state);
  const auto& row = world.loss[Index(s.prediction)];
  return (s.pmf[0] * row[0] + s.pmf[2] * row[2]) + s.pmf[1] * row[1];
}

std::vector<double> StateRisks(const FiniteWorld& world) {
  std::vector<double> risks(world.states.size());
  for (std::size_t i = 0; i < risks.size(); ++i) risks[i] = StateRisk(world, i);
  return risks;
}

double Coverage(const FiniteWorld& world, const SelectionVector& g) {
  if (g.size() != world.states.size()) throw ArgumentError("selection vector size mismatch");
  double phi = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) phi += world.states[i].mass * g[i];
  return phi;
}

double SelectiveRisk(const FiniteWorld& world, const SelectionVector& g) {
  const double phi = Coverage(world, g);
  if (!(phi > 0.0)) throw UndefinedRiskError("selective risk is undefined at zero coverage");
  double num = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num += world.states[i].mass * g[i] * StateRisk(world, i);
  }
  return num / phi;
}

double RiskQuantile(const FiniteWorld& world, double c) {
  return ComputeStrata(world, StateRisks(world), c).beta;
}

SelectionVector TheoremSelector(const FiniteWorld& world, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ArgumentError("target coverage must lie in (0, 1]");
  const auto risks = StateRisks(world);
  const Strata s = ComputeStrata(world, risks, c);
  const double p_r = s.at > 0.0 ? std::clamp((c - s.below) / s.at, 0.0, 1.0) : 0.0;
  SelectionVector g(risks.size());
  for (std::size_t i = 0; i < risks.size(); ++i) {
    g[i] = risks[i] < s.beta ? 1.0 : (risks[i] > s.beta ? 0.0 : p_r);
  }
  return g;
}

double ConditionResiduals::Max() const { return std::max({p1, p2, p3}); }

ConditionResiduals VerifyConditions(const FiniteWorld& world, const SelectionVector& g, double c) {
  if (g.size() != world.states.size()) throw ArgumentError("selection vector size mismatch");
  const auto risks = StateRisks(world);
  const Strata s = ComputeStrata(world, risks, c);
  double accepted_below = 0.0, accepted_at = 0.0, accepted_above = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double wg = world.states[i].mass * g[i];
    if (risks[i] < s.beta) {
      accepted_below += wg;
    } else if (risks[i] == s.beta) {
      accepted_at += wg;
    } else {
      accepted_above += wg;
    }
  }
  ConditionResiduals out;
  out.beta = s.beta;
  out.p1 = std::abs(accepted_below - s.below);
  out.p2 = std::abs(accepted_at - (c - s.below));
  out.p3 = std::abs(accepted_above);
  return out;
}

BruteForceResult BruteForceOptimum(const FiniteWorld& world, double c, int grid) {
  const std::size_t m = world.states.size();
  if (m > kMaxOracleStates) {
    throw SizeError(fmt::format("exhaustive search supports at most {} states, got {}",
                                kMaxOracleStates, m));
  }
  if (grid < 20) throw ArgumentError("grid resolution K must be at least 20");
  if (m == 0) throw ArgumentError("world has no states");

  const auto risks = StateRisks(world);
  std::vector<double> w(m), wr(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = world.states[i].mass;
    wr[i] = w[i] * risks[i];
  }
  auto evaluate = [&](const SelectionVector& g, double& risk) {
    double phi = 0.0, num = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      phi += w[i] * g[i];
      num += wr[i] * g[i];
    }
    if (phi < c - kMassTolerance || !(phi > 0.0)) return false;
    risk = num / phi;
    return true;
  };

  const double step = 1.0 / static_cast<double>(grid);
  const double target = c - kMassTolerance;
  // Mass still attainable by coordinates >= i when they are all set to 1.
  std::vector<double> tail_mass(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) tail_mass[i] = tail_mass[i + 1] + w[i];

  std::vector<int> idx(m, 0), best_idx(m, grid);
  double best_risk = std::numeric_limits<double>::infinity();
  bool found = false;
  // Nested loops with coordinate 0 outermost: lexicographic order, so strict
  // improvement keeps the lexicographically smallest minimizer.
  auto recurse = [&](auto&& self, std::size_t i, double phi, double num) -> void {
    if (phi + tail_mass[i] < target) return;  // cannot reach the coverage
    if (i + 1 == m) {
      const double wi = w[i] * step, wri = wr[i] * step;
      for (int k = 0; k <= grid; ++k) {
        const double p = phi + wi * k;
        if (p < target || !(p > 0.0)) continue;
        const double risk = (num + wri * k) / p;
        if (risk < best_risk) {
          best_risk = risk;
          idx[i] = k;
          best_idx = idx;
          found = true;
        }
      }
      return;
    }
    for (int k = 0; k <= grid; ++k) {
      idx[i] = k;
      self(self, i + 1, phi + w[i] * step * k, num + wr[i] * step * k);
    }
  };
  recurse(recurse, 0, 0.0, 0.0);

  BruteForceResult best;
  best.g.resize(m);
  for (std::size_t i = 0; i < m; ++i) best.g[i] = static_cast<double>(best_idx[i]) * step;
  if (found) {
    best.risk = SelectiveRisk(world, best.g);
  } else {
    // Only reachable through rounding at c = 1; all-ones is the sole candidate.
    best.g.assign(m, 1.0);
    best.risk = SelectiveRisk(world, best.g);
  }

  const double fine = step * step;
  for (std::size_t i = 0; i < m; ++i) {
    SelectionVector candidate = best.g;
    SelectionVector coordinate_best = best.g;
    double coordinate_risk = best.risk;
    for (int delta = -grid; delta <= grid; ++delta) {
      if (delta == 0) continue;
      const double v = best.g[i] + delta * fine;
      if (v < 0.0 || v > 1.0) continue;
      candidate[i] = v;
      double risk = 0.0;
      if (evaluate(candidate, risk) && risk < coordinate_risk) {
        coordinate_risk = risk;
        coordinate_best = candidate;
      }
    }
    best = {coordinate_best, coordinate_risk};
  }
  return best;
}

std::string_view ToString(WorldLoss loss) {
  return loss == WorldLoss::kZeroOne ? "zero-one" : "random-symmetric";
}

WorldLoss ParseWorldLoss(std::string_view text) {
  if (text == "zero-one") return WorldLoss::kZeroOne;
  if (text == "random-symmetric") return WorldLoss::kRandomSymmetric;
  throw ArgumentError(fmt::format("unknown loss '{}'", text));
}

FiniteWorld RandomWorld(std::size_t m, std::uint64_t seed, WorldLoss loss) {
  if (m == 0) throw ArgumentError("world needs at least one state");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto positive = [&] { return 1.0 - unit(rng); };  // (0, 1]

  FiniteWorld world;
  world.states.resize(m);
  double total = 0.0;
  for (auto& s : world.states) {
    s.mass = positive();
    total += s.mass;
  }
  for (auto& s : world.states) {
    s.mass /= total;
    double q = 0.0;
    for (double& p : s.pmf) {
      p = positive();
      q += p;
    }
    for (double& p : s.pmf) p /= q;
  }

  if (loss == WorldLoss::kZeroOne) {
    world.loss = ZeroOneLoss();
  } else {
    LossMatrix raw{};
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) raw[a][b] = a == b ? 0.0 : unit(rng);
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        world.loss[a][b] = 0.5 * (raw[a][b] + raw[2 - a][2 - b]);
      }
    }
  }

  // Bayes ranker: minimize expected loss, preferring 0, then -1, then +1.
  for (auto& s : world.states) {
    double best = std::numeric_limits<double>::infinity();
    for (int yhat : {0, -1, 1}) {
      const auto& row = world.loss[Index(yhat)];
      const double r = (s.pmf[0] * row[0] + s.pmf[2] * row[2]) + s.pmf[1] * row[1];
      if (r < best) {
        best = r;
        s.prediction = yhat;
      }
    }
  }
  return world;
}

std::string SerializeWorld(const FiniteWorld& world) {
  std::string out = fmt::format("m={}\nloss=", world.states.size());
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      out += fmt::format("{}{}", (a + b == 0) ? "" : " ", world.loss[a][b]);
    }
  }
  out += '\n';
  for (const auto& s : world.states) {
    out += fmt::format("state={} {} {} {} {}\n", s.mass, s.pmf[0], s.pmf[1], s.pmf[2],
                       s.prediction);
  }
  return out;
}

FiniteWorld DeserializeWorld(std::string_view text) {
  FiniteWorld world;
  std::optional<std::size_t> m;
  bool seen_loss = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    const std::string_view key = line.substr(0, eq);
    const auto fields = Fields(line.substr(eq + 1));
    if (key == "m") {
      if (fields.size() != 1) throw ParseError(line_no, "m takes one value");
      m = static_cast<std::size_t>(ParseDouble(fields[0], line_no));
    } else if (key == "loss") {
      if (fields.size() != 9) throw ParseError(line_no, "loss takes 9 values");
      for (std::size_t k = 0; k < 9; ++k) world.loss[k / 3][k % 3] = ParseDouble(fields[k], line_no);
      seen_loss = true;
    } else if (key == "state") {
      if (fields.size() != 5) throw ParseError(line_no, "state takes 5 values");
      WorldState s;
      s.mass = ParseDouble(fields[0], line_no);
      for (std::size_t k = 0; k < 3; ++k) s.pmf[k] = ParseDouble(fields[k + 1], line_no);
      s.prediction = static_cast<int>(ParseDouble(fields[4], line_no));
      world.states.push_back(s);
    } else {
      throw ParseError(line_no, fmt::format("unknown key '{}'", key));
    }
  }
  if (!m || !seen_loss) throw ParseError(line_no, "world record needs m and loss");
  if (*m != world.states.size()) {
    throw ParseError(line_no, fmt::format("m={} but {} states given", *m, world.states.size()));
  }
  try {
    ValidateWorld(world);
  } catch (const ArgumentError& e) {
    throw ParseError(line_no, e.what());
  }
  return world;
}

}  // namespace baltor
