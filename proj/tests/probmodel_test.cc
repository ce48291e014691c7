#include "baltor/probmodel.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "baltor/errors.h"

namespace baltor {
namespace {

TEST(StdNormalCdf, ReferenceValues) {
  // 30-digit references.
  EXPECT_EQ(StdNormalCdf(0.0), 0.5);
  EXPECT_NEAR(StdNormalCdf(0.5), 0.691462461274013103637704610608, 1e-15);
  EXPECT_NEAR(StdNormalCdf(-1.0), 0.158655253931457051414767454368, 1e-15);
  EXPECT_NEAR(StdNormalCdf(1.959964), 0.975, 1e-6);
  EXPECT_NEAR(StdNormalCdf(1.959964), 0.975000000903557598005615490791, 1e-15);
  EXPECT_NEAR(StdNormalCdf(-3.0), 0.0013498980316300945266518147676, 1e-16);
}

TEST(StdNormalCdf, AgreesWithLibraryErfc) {
  for (double z = -12.0; z <= 12.0; z += 0.01) {
    const double reference = 0.5 * std::erfc(-z / std::sqrt(2.0));
    ASSERT_NEAR(StdNormalCdf(z), reference, 1e-14) << z;
    if (z < -3.0) ASSERT_NEAR(StdNormalCdf(z) / reference, 1.0, 1e-12) << z;
  }
  EXPECT_EQ(StdNormalCdf(-40.0), 0.0);
  EXPECT_EQ(StdNormalCdf(40.0), 1.0);
}

TEST(StdNormalCdf, SymmetricAndMonotone) {
  double previous = 0.0;
  for (double z = -9.0; z <= 9.0; z += 0.003) {
    EXPECT_NEAR(StdNormalCdf(z) + StdNormalCdf(-z), 1.0, 1e-12);
    EXPECT_GE(StdNormalCdf(z), previous);
    previous = StdNormalCdf(z);
  }
}

TEST(TieParams, Validation) {
  EXPECT_THROW(TieParams::FromTheta(0.99), ArgumentError);
  EXPECT_THROW(TieParams::FromEpsilon(-0.1), ArgumentError);
  EXPECT_THROW(TieParams::FromTheta(INFINITY), ArgumentError);
  EXPECT_NEAR(TieParams::FromEpsilon(0.5).theta(), std::exp(0.5), 1e-15);
}

TEST(EstimateTheta, CountsFormula) {
  const TieParams t = EstimateTheta(100, 80);
  EXPECT_DOUBLE_EQ(t.theta(), 1.5);
  EXPECT_NEAR(t.epsilon(), 0.405465108108164, 1e-12);

  const TieParams none = EstimateTheta(37, 37);
  EXPECT_EQ(none.theta(), 1.0);
  EXPECT_EQ(none.epsilon(), 0.0);

  EXPECT_THROW(EstimateTheta(10, 0), EstimationError);
  EXPECT_THROW(EstimateTheta(10, 11), ArgumentError);
}

TEST(EstimateTheta, FromPairs) {
  std::vector<GroupedPair> pairs;
  for (int k = 0; k < 10; ++k) pairs.push_back({0, {"q", 0, 1, k < 2 ? 0 : 1}});
  EXPECT_DOUBLE_EQ(EstimateTheta(pairs).theta(), 2.0 * 10 / 8 - 1.0);
  std::vector<GroupedPair> tied{{0, {"q", 0, 1, 0}}};
  EXPECT_THROW(EstimateTheta(tied), EstimationError);
}

TEST(BradleyTerry, SymmetricTieless) {
  const auto p = BradleyTerryProbs(0.7, 0.7, 1.0);
  EXPECT_EQ(p.p_plus, 0.5);
  EXPECT_EQ(p.p_minus, 0.5);
  EXPECT_EQ(p.p_zero, 0.0);
}

TEST(BradleyTerry, ClosedFormValues) {
  // High-precision evaluation of the Rao-Kupper closed form at s=1, s'=0, theta=2.
  const auto p = BradleyTerryProbs(1.0, 0.0, 2.0);
  EXPECT_NEAR(p.p_plus, 0.576116884765829109858318923639, 1e-14);
  EXPECT_NEAR(p.p_minus, 0.155362403496963606793418588024, 1e-14);
  EXPECT_NEAR(p.p_zero, 0.268520711737207283348262488338, 1e-14);
  EXPECT_NEAR(p.p_plus + p.p_zero + p.p_minus, 1.0, 1e-15);
}

TEST(BradleyTerry, RenormalizationIsANoOp) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> score(-5.0, 5.0), theta(1.0, 6.0);
  for (int k = 0; k < 2000; ++k) {
    const double s = score(rng), sp = score(rng), t = theta(rng);
    const double a = std::exp(s), b = std::exp(sp);
    const double plus = a / (a + t * b);
    const double minus = b / (b + t * a);
    const double zero = (t * t - 1) * a * b / ((t * a + b) * (a + t * b));
    const auto p = BradleyTerryProbs(s, sp, t);
    EXPECT_NEAR(p.p_plus, plus, 1e-12);
    EXPECT_NEAR(p.p_minus, minus, 1e-12);
    EXPECT_NEAR(p.p_zero, zero, 1e-12);
  }
}

TEST(BradleyTerry, LargeScoreGapsSaturate) {
  for (double theta : {1.0, 1.5, 10.0}) {
    const auto p = BradleyTerryProbs(500.0, 0.0, theta);
    EXPECT_GT(p.p_plus, 1.0 - 1e-12);
    EXPECT_TRUE(std::isfinite(p.p_zero));
    const auto q = BradleyTerryProbs(-350.0, 350.0, theta);
    EXPECT_GT(q.p_minus, 1.0 - 1e-12);
  }
  EXPECT_THROW(BradleyTerryProbs(0, 0, 0.5), ArgumentError);
}

TEST(ThurstoneMosteller, ReferenceValues) {
  const auto zero = ThurstoneMostellerProbs(0.3, 0.3, 0.0);
  EXPECT_EQ(zero.p_plus, 0.5);
  EXPECT_EQ(zero.p_minus, 0.5);
  EXPECT_EQ(zero.p_zero, 0.0);

  const auto p = ThurstoneMostellerProbs(1.0, 0.0, 0.5);
  EXPECT_NEAR(p.p_plus, 0.691462461274013103637704610608, 1e-14);
  EXPECT_NEAR(p.p_minus, 0.0668072012688580660044940409799, 1e-14);
  EXPECT_NEAR(p.p_zero, 0.241730337457128830357801348412, 1e-14);
  EXPECT_THROW(ThurstoneMostellerProbs(0, 0, -0.1), ArgumentError);
}

TEST(ProbabilityModels, SwapSymmetryIsExact) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> score(-8.0, 8.0), eps(0.0, 2.0);
  for (int k = 0; k < 5000; ++k) {
    const double s = score(rng), sp = score(rng), e = eps(rng);
    for (auto kind : {ProbModelKind::kBradleyTerry, ProbModelKind::kThurstoneMosteller}) {
      const auto tie = TieParams::FromEpsilon(e);
      const auto p = PairProbs(kind, s, sp, tie);
      const auto q = PairProbs(kind, sp, s, tie);
      EXPECT_EQ(p.p_plus, q.p_minus);
      EXPECT_EQ(p.p_minus, q.p_plus);
      EXPECT_EQ(p.p_zero, q.p_zero);
      EXPECT_EQ(PredictLabel(p), -PredictLabel(q));
    }
  }
}

TEST(ProbabilityModels, PlusIncreasesWithScoreGap) {
  for (auto kind : {ProbModelKind::kBradleyTerry, ProbModelKind::kThurstoneMosteller}) {
    const auto tie = TieParams::FromTheta(1.7);
    double previous = -1.0;
    for (double d = -6.0; d <= 6.0; d += 0.05) {
      const double plus = PairProbs(kind, d, 0.0, tie).p_plus;
      EXPECT_GT(plus, previous) << ToString(kind) << " d=" << d;
      previous = plus;
    }
  }
}

TEST(ProbabilityModels, SignAgreementBetweenModels) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> score(-4.0, 4.0), eps(0.0, 1.5);
  for (int k = 0; k < 2000; ++k) {
    const double s = score(rng), sp = score(rng);
    if (s == sp) continue;
    const auto tie = TieParams::FromEpsilon(eps(rng));
    const auto bt = PairProbs(ProbModelKind::kBradleyTerry, s, sp, tie);
    const auto tm = PairProbs(ProbModelKind::kThurstoneMosteller, s, sp, tie);
    EXPECT_EQ(bt.p_plus > bt.p_minus, tm.p_plus > tm.p_minus);
    EXPECT_EQ(bt.p_plus > bt.p_minus, s > sp);
  }
}

TEST(PredictLabel, ArgmaxWithSymmetricTieBreak) {
  EXPECT_EQ(PredictLabel({0.2, 0.3, 0.5}), 1);
  EXPECT_EQ(PredictLabel({0.5, 0.3, 0.2}), -1);
  EXPECT_EQ(PredictLabel({0.2, 0.5, 0.3}), 0);
  EXPECT_EQ(PredictLabel({0.4, 0.2, 0.4}), 0);
  EXPECT_EQ(PredictLabel({1.0 / 3, 1.0 / 3, 1.0 / 3}), 0);
  EXPECT_EQ(PredictLabel({0.1, 0.45, 0.45}), 0);
  EXPECT_EQ(PredictLabel({0.45, 0.45, 0.1}), 0);
}

TEST(PairwiseProbs, LabelAccess) {
  const PairwiseProbs p{0.1, 0.2, 0.7};
  EXPECT_EQ(p.Of(-1), 0.1);
  EXPECT_EQ(p.Of(0), 0.2);
  EXPECT_EQ(p.Of(1), 0.7);
  EXPECT_THROW(p.Of(2), ArgumentError);
}

TEST(ProbModelKind, Parsing) {
  EXPECT_EQ(ParseProbModelKind("bt"), ProbModelKind::kBradleyTerry);
  EXPECT_EQ(ParseProbModelKind("tm"), ProbModelKind::kThurstoneMosteller);
  EXPECT_THROW(ParseProbModelKind("davidson"), ArgumentError);
}

TEST(ScoreStandardizer, FitsMeanAndSpread) {
  const std::vector<double> scores{1.0, 2.0, 3.0, 4.0};
  const auto st = ScoreStandardizer::Fit(scores);
  EXPECT_DOUBLE_EQ(st.mean, 2.5);
  EXPECT_DOUBLE_EQ(st.sd, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(st.Apply(2.5), 0.0);
  const std::vector<double> constant{3.0, 3.0};
  EXPECT_EQ(ScoreStandardizer::Fit(constant).sd, 1.0);
  EXPECT_THROW(ScoreStandardizer::Fit(std::vector<double>{}), ArgumentError);
}

}  // namespace
}  // namespace baltor
