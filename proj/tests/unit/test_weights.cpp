#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nterm/errors.hpp"
#include "nterm/weights.hpp"

using namespace nterm;

TEST(Weights, Evaluation) {
  EXPECT_DOUBLE_EQ(eval_weight(Weight::power_log(0.5, 0), 4), 2.0);
  EXPECT_NEAR(eval_weight(Weight::power_log(0, 1), 1), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(eval_weight(Weight::power_log(1, 0), 7), 7.0);
}

TEST(Weights, TableOutOfRange) {
  Weight w = Weight::table({1, 2, 3});
  EXPECT_DOUBLE_EQ(eval_weight(w, 3), 3.0);
  EXPECT_THROW(eval_weight(w, 4), NumericError);
}

TEST(Weights, ParseForms) {
  EXPECT_DOUBLE_EQ(Weight::parse("pow:0.5,0")(9), 3.0);
  EXPECT_THROW(Weight::parse("pow:x"), ParseError);
}

TEST(Weights, MEtaPowerWeights) {
  EXPECT_DOUBLE_EQ(m_eta(Weight::power_log(0.5, 0), 4, 1000), 0.5);
  EXPECT_NEAR(m_eta(Weight::power_log(1, 0), 3, 1000), 1.0 / 3.0, 1e-15);
  double v = m_eta(Weight::power_log(0, 1), 2, 1000000);
  EXPECT_LT(v, 1.0);
  EXPECT_GT(v, 0.9);
}

TEST(Weights, MEtaPowerProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.05, 3.0);
  for (int i = 0; i < 40; ++i) {
    double a = ua(rng);
    std::uint64_t m = 2 + rng() % 15;
    double got = m_eta(Weight::power_log(a, 0), m, 5000);
    EXPECT_LE(got, 1.0);
    EXPECT_NEAR(got, std::pow(double(m), -a), 1e-13);
  }
}

TEST(Weights, MEtaMonotoneInRange) {
  Weight w = Weight::power_log(0.2, 1.5);
  double prev = 0;
  for (std::uint64_t K : {10u, 100u, 1000u, 10000u}) {
    double v = m_eta(w, 2, K);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Weights, DilationIndex) {
  EXPECT_NEAR(lower_dilation_index(Weight::power_log(0.5, 0)), 0.5, 1e-12);
  EXPECT_NEAR(lower_dilation_index(Weight::power_log(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(lower_dilation_index(Weight::power_log(0, 1)), 0.0, 0.02);
}

TEST(Weights, Classification) {
  auto sq = classify(Weight::power_log(0.5, 0));
  EXPECT_TRUE(sq.in_W_plus);
  ASSERT_TRUE(sq.kappa.has_value());
  EXPECT_EQ(*sq.kappa, 2u);

  auto lg = classify(Weight::power_log(0, 1));
  EXPECT_TRUE(lg.in_W);
  EXPECT_FALSE(lg.in_W_plus);

  EXPECT_TRUE(classify(Weight::power_log(0.1, 1)).in_W_plus);
}

TEST(Weights, ClassifyRejectsDecreasing) {
  EXPECT_THROW(classify(Weight::table({1, 2, 1.5, 3})), ParamError);
}

static double geometric_oracle(double a, double b, std::uint64_t kappa, unsigned n_max) {
  double best = 0;
  for (unsigned n = 0; n <= n_max; ++n) {
    double sum = 0;
    for (unsigned j = 0; j <= n; ++j) {
      double k = std::pow(double(kappa), j);
      sum += std::pow(k, a) * std::pow(std::log(k + 1), b);
    }
    double k = std::pow(double(kappa), n);
    best = std::max(best, sum / (std::pow(k, a) * std::pow(std::log(k + 1), b)));
  }
  return best;
}

TEST(Weights, GeometricSum) {
  EXPECT_NEAR(geometric_sum_check(Weight::power_log(1, 0), 2, 20).constant, 2.0, 1e-5);
  EXPECT_NEAR(geometric_sum_check(Weight::power_log(0.5, 0), 4, 15).constant, 2.0, 1e-4);
  EXPECT_NEAR(geometric_sum_check(Weight::power_log(0.5, 0), 4, 15).constant,
              geometric_oracle(0.5, 0, 4, 15), 1e-12);
  auto lg = geometric_sum_check(Weight::power_log(0, 1), 2, 20);
  EXPECT_NEAR(lg.constant, geometric_oracle(0, 1, 2, 20), 1e-9);
  EXPECT_GT(lg.per_n[20], lg.per_n[10] + 3);
  EXPECT_THROW(geometric_sum_check(Weight::power_log(1, 0), 2, 70), NumericError);
}

// The running max is 2 - 2^{-n} for both examples, so 15 -> 20 moves by
// 2^-15 - 2^-20.
TEST(Weights, GeometricSumConverges) {
  double tail = std::ldexp(1.0, -15) - std::ldexp(1.0, -20);
  double a15 = geometric_sum_check(Weight::power_log(1, 0), 2, 15).constant;
  double a20 = geometric_sum_check(Weight::power_log(1, 0), 2, 20).constant;
  EXPECT_NEAR(a20 - a15, tail, 1e-12);
  double b15 = geometric_sum_check(Weight::power_log(0.5, 0), 4, 15).constant;
  double b20 = geometric_sum_check(Weight::power_log(0.5, 0), 4, 20).constant;
  EXPECT_NEAR(b20 - b15, tail, 1e-12);
}
