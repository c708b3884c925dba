#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "nterm/numeric.hpp"

using namespace nterm;

TEST(Numeric, BinomialMatchesPascal) {
  std::vector<std::vector<double>> row(41, std::vector<double>(41, 0.0));
  for (int n = 0; n <= 40; ++n) {
    row[n][0] = 1;
    for (int k = 1; k <= n; ++k) row[n][k] = row[n - 1][k - 1] + (k <= n - 1 ? row[n - 1][k] : 0.0);
  }
  for (int n = 0; n <= 40; ++n)
    for (int k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), row[n][k]) << n << " " << k;
  EXPECT_EQ(binomial(5, 7), 0.0);
}

TEST(Numeric, CombinationsAreLexicographicAndComplete) {
  std::vector<std::vector<std::size_t>> seen;
  for_each_combination(6, 3, [&](std::span<const std::size_t> c) {
    seen.emplace_back(c.begin(), c.end());
    return true;
  });
  EXPECT_EQ(seen.size(), 20u);
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  EXPECT_EQ(std::set<std::vector<std::size_t>>(seen.begin(), seen.end()).size(), 20u);

  std::size_t split = 0;
  for (std::size_t f = 0; f < 6; ++f)
    for_each_combination_from(6, 3, f, [&](std::span<const std::size_t> c) {
      EXPECT_EQ(c[0], f);
      ++split;
      return true;
    });
  EXPECT_EQ(split, 20u);
}

TEST(Numeric, CombinationEarlyStop) {
  int calls = 0;
  for_each_combination(10, 2, [&](std::span<const std::size_t>) { return ++calls < 5; });
  EXPECT_EQ(calls, 5);
}

TEST(Numeric, CompensatedSumRecoversCancellation) {
  CompensatedSum<double> s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

TEST(Numeric, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
}

TEST(Numeric, FmtDoubleRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 2000; ++i) {
    double v = std::exp(u(rng)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(std::stod(fmt_double(v)), v);
  }
}

TEST(Numeric, ParallelForVisitsEachIndexOnce) {
  for (unsigned t : {1u, 3u}) {
    set_thread_count(t);
    std::vector<int> hits(257, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  set_thread_count(1);
}
