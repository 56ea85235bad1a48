#include <gtest/gtest.h>

#include <cmath>

#include "aoi/penalty.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using aoi::PenaltyFunction;

TEST(Penalty, KindsEvaluate) {
  EXPECT_EQ(aoi::eval_g(PenaltyFunction::linear(), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(aoi::eval_g(PenaltyFunction::linear(), 3.5), 3.5);
  EXPECT_DOUBLE_EQ(aoi::eval_g(PenaltyFunction::power(2.0), 3.0), 9.0);
  EXPECT_EQ(aoi::eval_g(PenaltyFunction::stair_step(1.0), 2.7), 2.0);
  EXPECT_EQ(aoi::eval_g(PenaltyFunction::stair_step(2.0), 1.3), 2.0);
  EXPECT_EQ(aoi::eval_g(PenaltyFunction::exponential(0.2), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(aoi::eval_g(PenaltyFunction::exponential(1.0), 1.0), std::exp(1.0) - 1.0);
  EXPECT_EQ(aoi::eval_g(PenaltyFunction::constant(3.0), 0.0), 3.0);
}

TEST(Penalty, ExponentialWithZeroRateIsZero) {
  const auto pf = PenaltyFunction::exponential(0.0);
  EXPECT_EQ(pf(5.0), 0.0);
  EXPECT_EQ(aoi::antiderivative_G(pf, 5.0), 0.0);
  EXPECT_TRUE(pf.is_constant());
}

TEST(Penalty, CustomInterpolatesAndHolds) {
  const auto pf = PenaltyFunction::custom({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(pf(0.5), 1.0);
  EXPECT_DOUBLE_EQ(pf(2.0), 2.0);
  EXPECT_DOUBLE_EQ(pf(10.0), 2.0);
  EXPECT_DOUBLE_EQ(aoi::antiderivative_G(pf, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(aoi::antiderivative_G(pf, 4.0), 1.0 + 2.0 * 3.0);
}

TEST(Penalty, RejectsBadParameters) {
  EXPECT_THROW(PenaltyFunction::power(-1.0), aoi::DomainError);
  EXPECT_THROW(PenaltyFunction::stair_step(-0.5), aoi::DomainError);
  EXPECT_THROW(PenaltyFunction::constant(-1.0), aoi::DomainError);
  EXPECT_THROW(PenaltyFunction::custom({0.0, 1.0}, {2.0, 1.0}), aoi::DomainError);
  EXPECT_THROW(PenaltyFunction::custom({0.5, 1.0}, {0.0, 1.0}), aoi::DomainError);
  EXPECT_THROW(PenaltyFunction::custom({0.0, 0.0}, {0.0, 1.0}), aoi::DomainError);
  EXPECT_THROW(aoi::eval_g(PenaltyFunction::linear(), -0.1), aoi::DomainError);
  EXPECT_THROW(aoi::antiderivative_G(PenaltyFunction::linear(), -0.1), aoi::DomainError);
}

TEST(Penalty, AntiderivativeAgainstQuadrature) {
  EXPECT_DOUBLE_EQ(aoi::antiderivative_G(PenaltyFunction::linear(), 4.0), 8.0);
  const auto stair = PenaltyFunction::stair_step(1.0);
  EXPECT_NEAR(aoi::antiderivative_G(stair, 2.5), 2.0, 1e-15);
  EXPECT_NEAR(aoi::antiderivative_G(stair, 2.5), oracle::integrate_g(stair, 0.0, 2.5), 1e-10);
  const auto expo = PenaltyFunction::exponential(1.0);
  EXPECT_NEAR(aoi::antiderivative_G(expo, 1.0), std::exp(1.0) - 2.0, 1e-15);
  EXPECT_NEAR(aoi::antiderivative_G(expo, 1.0), oracle::integrate_g(expo, 0.0, 1.0), 1e-10);
}

TEST(Penalty, StagePenalty) {
  const auto lin = PenaltyFunction::linear();
  EXPECT_DOUBLE_EQ(aoi::stage_penalty_q(lin, 0.0, 0.5, 0.0), 0.125);
  EXPECT_DOUBLE_EQ(aoi::stage_penalty_q(lin, 2.0, 0.0, 2.0), 6.0);
  for (const auto& pf : {lin, PenaltyFunction::stair_step(1.0), PenaltyFunction::constant(2.0)})
    EXPECT_EQ(aoi::stage_penalty_q(pf, 1.7, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(aoi::stage_penalty_q(PenaltyFunction::constant(2.0), 1.0, 0.5, 1.0), 3.0);
}

TEST(PenaltyProperties, QuadratureEquivalence) {
  const auto r = props::q_matches_quadrature(1000, 11);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(PenaltyProperties, MonotoneAndConvex) {
  const auto r = props::q_monotone_convex(1000, 12);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}
