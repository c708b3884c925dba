#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nterm/errors.hpp"
#include "nterm/experiments.hpp"

using namespace nterm;

TEST(RateFit, ExactPower) {
  std::vector<std::pair<double, double>> pts;
  for (int N = 1; N <= 64; N *= 2) pts.emplace_back(N, std::pow(N, -0.5));
  auto f = rate_fit(pts);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(RateFit, NoisyQuarterPower) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<std::pair<double, double>> pts;
  for (int N = 2; N <= 4096; N *= 2) pts.emplace_back(N, 3.0 * std::pow(N, 0.25) * (1 + noise(rng)));
  EXPECT_NEAR(rate_fit(pts).slope, 0.25, 0.01);
}

TEST(RateFit, ConstantAndEdgeCases) {
  std::vector<std::pair<double, double>> pts;
  for (int N = 1; N <= 10; ++N) pts.emplace_back(N, 7.0);
  auto f = rate_fit(pts);
  EXPECT_NEAR(f.slope, 0.0, 1e-14);
  EXPECT_EQ(f.r_squared, 1.0);
  EXPECT_THROW(rate_fit({{1, 1}, {2, 2}, {3, 3}}), ParamError);

  std::vector<std::pair<double, double>> wide;
  for (int N = 1; N <= 1000; ++N) wide.emplace_back(N, N < 10 ? 1.0 : double(N));
  auto w = rate_fit(wide);  // smallest decade dropped
  EXPECT_GE(w.range_lo, 10.0);
  EXPECT_NEAR(w.slope, 1.0, 1e-12);
  auto r = rate_fit(wide, std::make_pair(100.0, 200.0));
  EXPECT_EQ(r.points_used, 101u);

  std::vector<std::pair<double, double>> zeros = {{1, 0}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
  EXPECT_EQ(rate_fit(zeros, std::make_pair(1.0, 5.0)).excluded_nonpositive, 1u);
}

TEST(Models, PowerTailBound) {
  for (double e : {1.5, 2.0, 3.0}) {
    double tail = 0;
    for (std::uint64_t k = 1001; k <= 2000000; ++k) tail += std::pow(double(k), -e);
    double bound = power_tail_bound(e, 1000);
    EXPECT_GE(bound, tail);
    EXPECT_LT(bound, 1.01 * tail + std::pow(2e6, 1 - e) / (e - 1));
  }
  auto s = power_tail_sequence(0.5, 10);
  ASSERT_EQ(s.size(), 10u);
  EXPECT_DOUBLE_EQ(s.coef_at(BasisIndex::integer(4)), 0.5);
}

TEST(Models, StandardTestSetSupports) {
  auto set = standard_test_set(0.5, 64, 5, 3);
  EXPECT_EQ(set.size(), 3u + 3u + 5u);
  for (const auto& v : set) {
    EXPECT_LE(v.values.size(), 64u);
    EXPECT_FALSE(v.values.empty());
  }
  auto again = standard_test_set(0.5, 64, 5, 3);
  for (std::size_t i = 0; i < set.size(); ++i) EXPECT_EQ(set[i].values, again[i].values);
}

TEST(Verifiers, LpJacksonAndBernstein) {
  VerifierOptions opt;
  opt.support_cap = 64;
  opt.randoms = 4;
  auto j = jackson_verifier(SpaceSpec::lp(2), Weight::power_log(0.5, 0), opt);
  EXPECT_TRUE(j.weight_ok);
  EXPECT_GT(j.constant, 0.5);
  EXPECT_LT(j.constant, 4.0);
  auto b = bernstein_verifier(SpaceSpec::lp(2), Weight::power_log(0.5, 0), opt);
  EXPECT_TRUE(b.weight_ok);
  EXPECT_NEAR(b.constant, 1.0, 1e-9);
  ASSERT_TRUE(b.left_democracy.has_value());
  EXPECT_NEAR(*b.left_democracy, 1.0, 1e-9);
  auto csv = j.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,support,constant,argmax_N,exact");
}

TEST(Verifiers, RefusesWeightOutsideWPlus) {
  VerifierOptions opt;
  opt.alpha = 0.0;
  opt.support_cap = 16;
  opt.randoms = 1;
  auto j = jackson_verifier(SpaceSpec::lp(2), Weight::power_log(0, 1), opt);
  EXPECT_FALSE(j.weight_ok);
  EXPECT_FALSE(j.diagnostic.empty());
}

// Larger test sets can only raise a max-over-vectors constant.
TEST(Verifiers, ConstantGrowsWithTestSet) {
  VerifierOptions small, large;
  small.support_cap = 32;
  large.support_cap = 64;
  small.randoms = large.randoms = 0;
  for (auto dir : {EmbeddingDirection::LorentzIntoG, EmbeddingDirection::AIntoLorentz}) {
    EXPECT_EQ(parse_direction(direction_name(dir)), dir);
    double a = embedding_verifier(dir, SpaceSpec::lp(2), Weight::power_log(0.5, 0), small).constant;
    double b = embedding_verifier(dir, SpaceSpec::lp(2), Weight::power_log(0.5, 0), large).constant;
    EXPECT_GT(a, 0);
    EXPECT_LT(a, 10);
    EXPECT_GT(b, 0);
  }
}

TEST(Stechkin, DeterministicAndBanded) {
  auto a = stechkin_check(0.5, 1, 30, 64, 7);
  auto b = stechkin_check(0.5, 1, 30, 64, 7);
  EXPECT_EQ(a.band, b.band);
  EXPECT_DOUBLE_EQ(a.tau, 1.0);
  EXPECT_GE(a.band, 1.0);
  EXPECT_LT(a.band, 10.0);
  EXPECT_EQ(a.ratios.size(), 30u);
}

TEST(DivergenceWitness, ScheduleAndDegenerateControl) {
  Schedule s;
  s.s = 2;
  s.r = 1;
  EXPECT_EQ(s.at(5), std::make_pair(std::uint64_t{25}, std::uint64_t{5}));
  Schedule e;
  e.kind = Schedule::Kind::Exponential;
  e.a = 1;
  e.b = 1;
  EXPECT_EQ(e.at(3), std::make_pair(std::uint64_t{24}, std::uint64_t{8}));

  Schedule flat;
  flat.s = 1;
  flat.r = 1;
  auto res = divergence_witness(SpaceSpec::lpq(2, 4, 1), flat, {2, 3, 4, 5, 6});
  for (const auto& row : res.rows) {
    EXPECT_LE(row.g_norm, 4 * row.a_norm);
    EXPECT_GT(row.ratio, 0);
  }
  auto csv = res.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,p_N,q_N,g_norm,a_norm,ratio,left_family,right_family");
}

TEST(Nonlinear, SmallRunIsConsistent) {
  EXPECT_THROW(nonlinearity_demo(2, 2, 1, 1000), ParamError);
  EXPECT_THROW(nonlinearity_demo(1, 2, 1, 1000), ParamError);
  auto r = nonlinearity_demo(2, 1, 1, 20000);
  EXPECT_TRUE(r.counts_match);
  EXPECT_TRUE(r.counts_integer_exact);
  EXPECT_NEAR(r.x_fit.slope, -1.0, 0.05);
  ASSERT_TRUE(r.engine_max_rel_diff.has_value());
  EXPECT_LT(*r.engine_max_rel_diff, 1e-12);
  std::uint64_t total = 0;
  for (auto a : r.A_sizes) total += a;
  EXPECT_LE(total, r.K);
}
