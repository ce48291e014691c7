#ifndef BALTOR_ORACLE_H_
#define BALTOR_ORACLE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace baltor {

// Labels are indexed y + 1, so index 0 is y = -1 and index 2 is y = +1.
using LabelPmf = std::array<double, 3>;

// loss[yhat + 1][y + 1]. Symmetric when loss(yhat, y) == loss(-yhat, -y).
using LossMatrix = std::array<std::array<double, 3>, 3>;

LossMatrix ZeroOneLoss();
bool IsSymmetricLoss(const LossMatrix& loss);

// A finite distribution over pair-states x label, with a fixed ranker.
struct WorldState {
  double mass = 0.0;
  LabelPmf pmf{};
  int prediction = 0;

  bool operator==(const WorldState&) const = default;
};

struct FiniteWorld {
  std::vector<WorldState> states;
  LossMatrix loss{};

  bool operator==(const FiniteWorld&) const = default;
};

// Throws ArgumentError unless masses are positive and sum to 1 within 1e-12,
// each pmf is a simplex, predictions are in {-1, 0, 1}, and the loss is
// non-negative and symmetric.
void ValidateWorld(const FiniteWorld& world);

// Per-state acceptance probabilities g_i in [0, 1].
using SelectionVector = std::vector<double>;

// r_i = sum_y q_i(y) loss(f_i, y).
double StateRisk(const FiniteWorld& world, std::size_t state);
std::vector<double> StateRisks(const FiniteWorld& world);

// phi(g) = sum_i w_i g_i.
double Coverage(const FiniteWorld& world, const SelectionVector& g);

// sum_i w_i g_i r_i / phi(g). Throws UndefinedRiskError when phi(g) == 0.
double SelectiveRisk(const FiniteWorld& world, const SelectionVector& g);

// The c-th conditional-risk quantile on the discrete measure: the smallest
// state risk b with mass{r <= b} >= c (1e-12 slack absorbs rounding in the
// mass sum).
double RiskQuantile(const FiniteWorld& world, double c);

// Accept below the quantile, reject above it, and accept boundary states
// fractionally with p_r = (c - mass{r < b}) / mass{r = b}.
SelectionVector TheoremSelector(const FiniteWorld& world, double c);

struct ConditionResiduals {
  double beta = 0.0;
  double p1 = 0.0;  // |sum_{r<b} w g - mass{r<b}|
  double p2 = 0.0;  // |sum_{r=b} w g - (c - mass{r<b})|
  double p3 = 0.0;  // |sum_{r>b} w g|

  double Max() const;
};

ConditionResiduals VerifyConditions(const FiniteWorld& world, const SelectionVector& g, double c);

inline constexpr std::size_t kMaxOracleStates = 4;

struct BruteForceResult {
  SelectionVector g;
  double risk = 0.0;
};

// Exhaustive search over g in {0, 1/K, ..., 1}^m subject to
// phi(g) >= c - 1e-12, followed by a single coordinate-wise refinement pass
// in steps of 1/K^2 within one coarse cell of the grid optimum. Ties keep the
// lexicographically smallest g. Throws SizeError when m > 4 and
// ArgumentError when K < 20.
BruteForceResult BruteForceOptimum(const FiniteWorld& world, double c, int grid);

enum class WorldLoss { kZeroOne, kRandomSymmetric };

std::string_view ToString(WorldLoss loss);
WorldLoss ParseWorldLoss(std::string_view text);

// Seeded world with normalized-uniform masses and pmfs. The ranker is the
// Bayes rule under the loss. Random symmetric losses have a zero diagonal.
FiniteWorld RandomWorld(std::size_t m, std::uint64_t seed, WorldLoss loss);

// Text record:
//   m=2
//   loss=<9 values, row-major by yhat>
//   state=<mass> <q-1> <q0> <q+1> <prediction>
//   ...
std::string SerializeWorld(const FiniteWorld& world);
FiniteWorld DeserializeWorld(std::string_view text);

}  // namespace baltor

#endif  // BALTOR_ORACLE_H_
