#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nterm/errors.hpp"
#include "nterm/lorentz_seq.hpp"
#include "nterm/sequence.hpp"

using namespace nterm;

namespace {

BasisIndex random_index(std::mt19937_64& rng, Universe u, std::size_t d) {
  switch (u) {
    case Universe::Integer:
      return BasisIndex::integer(1 + static_cast<std::int64_t>(rng() % 1000));
    case Universe::Pair:
      return BasisIndex::pair(static_cast<std::int64_t>(rng() % 2), 1 + static_cast<std::int64_t>(rng() % 50));
    case Universe::Cube: {
      std::int64_t j = static_cast<std::int64_t>(rng() % 6);
      std::vector<std::int64_t> off(d);
      for (auto& o : off) o = static_cast<std::int64_t>(rng() % (1u << j));
      return BasisIndex::cube(j, off);
    }
    case Universe::Rectangle: {
      std::vector<std::pair<std::int64_t, std::int64_t>> iv(d);
      for (auto& [j, k] : iv) {
        j = static_cast<std::int64_t>(rng() % 5);
        k = static_cast<std::int64_t>(rng() % (1u << j));
      }
      return BasisIndex::rect(iv);
    }
  }
  return {};
}

}  // namespace

TEST(Sequence, IndexTextRoundTrip) {
  std::mt19937_64 rng(21);
  for (auto [u, d] : std::vector<std::pair<Universe, std::size_t>>{
           {Universe::Integer, 1}, {Universe::Pair, 1}, {Universe::Cube, 1}, {Universe::Cube, 3},
           {Universe::Rectangle, 2}, {Universe::Rectangle, 4}}) {
    for (int i = 0; i < 200; ++i) {
      BasisIndex b = random_index(rng, u, d);
      EXPECT_EQ(BasisIndex::parse(b.to_string(u), u), b);
    }
  }
  EXPECT_EQ(BasisIndex::cube(2, {1, 3}).to_string(Universe::Cube), "2:1,3");
  EXPECT_EQ(BasisIndex::rect({{1, 0}, {2, 3}}).to_string(Universe::Rectangle), "1:0|2:3");
}

TEST(Sequence, BadIndexRejected) {
  EXPECT_THROW(BasisIndex::parse("x", Universe::Integer), ParseError);
  std::vector<Entry> wrong_dim{{BasisIndex::cube(1, {0, 1}), 1.0}};
  EXPECT_THROW(CoefficientSequence(Universe::Cube, 1, wrong_dim), ParamError);
}

TEST(Sequence, DuplicateIndexRejected) {
  std::vector<Entry> e{{BasisIndex::integer(1), 1.0}, {BasisIndex::integer(1), 2.0}};
  EXPECT_THROW(CoefficientSequence(Universe::Integer, 1, e), ParamError);
}

TEST(Sequence, CsvRoundTrip) {
  auto s = CoefficientSequence::parse_csv("index,value\n3,-1.5\n1,2\n# note\n2,0.25\n", Universe::Integer, 1);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.entries()[0].index, BasisIndex::integer(1));
  EXPECT_DOUBLE_EQ(s.coef_at(BasisIndex::integer(3)), -1.5);
  auto again = CoefficientSequence::parse_csv(s.to_csv(), Universe::Integer, 1);
  ASSERT_EQ(again.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.entries()[i].coef, s.entries()[i].coef);
  EXPECT_THROW(CoefficientSequence::parse_csv("1,abc\n", Universe::Integer, 1), ParseError);
}

TEST(Sequence, AddUnionsSupport) {
  auto x = CoefficientSequence::from_values({1, 2});
  auto y = CoefficientSequence(Universe::Integer, 1, {{BasisIndex::integer(2), 3.0}, {BasisIndex::integer(5), 1.0}});
  auto z = add(x, y);
  ASSERT_EQ(z.size(), 3u);
  EXPECT_DOUBLE_EQ(z.coef_at(BasisIndex::integer(2)), 5.0);
  EXPECT_DOUBLE_EQ(z.coef_at(BasisIndex::integer(5)), 1.0);
  EXPECT_DOUBLE_EQ(z.coef_at(BasisIndex::integer(4)), 0.0);
}

TEST(Rearrangement, Examples) {
  auto r = decreasing_rearrangement(CoefficientSequence::from_values({3, -1, 2}));
  EXPECT_EQ(r.values, (std::vector<double>{3, 2, 1}));
  auto t = decreasing_rearrangement(CoefficientSequence::from_values({2, -2, 2}));
  EXPECT_EQ(t.values, (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(t.permutation, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(decreasing_rearrangement(CoefficientSequence::from_values({5})).values, std::vector<double>{5});
}

TEST(Lorentz, Examples) {
  auto ind4 = CoefficientSequence::from_values({1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(lorentz_norm(ind4, Weight::power_log(0.5, 0), kInf), 2.0);
  EXPECT_DOUBLE_EQ(lorentz_norm(CoefficientSequence::from_values({1, 1, 1}), Weight::power_log(1, 0), 1), 3.0);
  auto s321 = CoefficientSequence::from_values({3, 2, 1});
  EXPECT_DOUBLE_EQ(lorentz_norm(s321, Weight::power_log(1, 0), kInf), 4.0);
  EXPECT_THROW(lorentz_norm(s321, Weight::power_log(1, 0), 0), ParamError);
}

TEST(Lorentz, DyadicExamples) {
  auto ind8 = CoefficientSequence::from_values(std::vector<double>(8, 1.0));
  EXPECT_DOUBLE_EQ(lorentz_norm_dyadic(ind8, Weight::power_log(1, 0), 1, 2), 15.0);
  EXPECT_DOUBLE_EQ(lorentz_norm_dyadic(CoefficientSequence::from_values({5}), Weight::power_log(0.3, 0), kInf, 2), 5.0);
  EXPECT_DOUBLE_EQ(lorentz_norm_dyadic(CoefficientSequence::from_values({3, 2, 1}), Weight::power_log(1, 0), kInf, 2), 4.0);
}

// eta = k^{1/p}, q = p turns the Lorentz sum into the l^p sum.
TEST(Lorentz, ReducesToLpAndIsRearrangementInvariant) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng() % 40;
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    double p = 0.5 + (trial % 4);
    double lp = 0;
    for (double x : v) lp += std::pow(std::abs(x), p);
    lp = std::pow(lp, 1 / p);
    Weight w = Weight::power_log(1 / p, 0);
    double a = lorentz_norm(CoefficientSequence::from_values(v), w, p);
    EXPECT_NEAR(a, lp, 1e-12 * lp);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(lorentz_norm(CoefficientSequence::from_values(v), w, p), a);
  }
}

TEST(Lorentz, FundamentalFunction) {
  auto a = fundamental_function_check(Weight::power_log(0.5, 0), kInf, {9});
  EXPECT_EQ(a[0].ratio, 1.0);
  auto b = fundamental_function_check(Weight::power_log(1, 0), 1, {4});
  EXPECT_DOUBLE_EQ(b[0].ratio, 1.0);
  std::vector<std::uint64_t> Ns;
  for (int j = 1; j <= 12; ++j) Ns.push_back(1ull << j);
  for (const auto& row : fundamental_function_check(Weight::power_log(0.5, 0), 2, Ns)) {
    EXPECT_GE(row.ratio, 1.0);
    EXPECT_LE(row.ratio, 2.0);
    EXPECT_FALSE(row.warning);
  }
  auto warn = fundamental_function_check(Weight::power_log(0, 1), 2, {4});
  EXPECT_TRUE(warn[0].warning);
}
