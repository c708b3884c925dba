#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "nterm/democracy.hpp"
#include "nterm/errors.hpp"
#include "nterm/lorentz_seq.hpp"

using namespace nterm;

namespace {

// min/max of ||sum_{G} e_k / ||e_k|| || over all N-subsets, enumerated by bitmask.
std::pair<double, double> brute_h(const SpaceSpec& spec, const IndexUniverse& u, std::size_t N) {
  double lo = 1e300, hi = 0;
  std::size_t n = u.indices.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != N) continue;
    std::vector<BasisIndex> g;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) g.push_back(u.indices[i]);
    double v = space_norm(spec, normalized_indicator(spec, g));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(Universes, Sizes) {
  EXPECT_EQ(integer_universe(64).indices.size(), 64u);
  EXPECT_EQ(pair_universe(32).indices.size(), 64u);
  EXPECT_EQ(cube_universe(1, 4).indices.size(), 31u);
  EXPECT_EQ(cube_universe(2, 2).indices.size(), 1u + 4u + 16u);
  // rectangles with level sum n in d dims: C(n+d-1, d-1) level vectors, 2^n each
  for (std::size_t d : {1u, 2u, 3u})
    for (std::int64_t n = 0; n <= 6; ++n)
      EXPECT_EQ(hyperbolic_layer(d, n).size(), choose(n + d - 1, d - 1) << n) << d << " " << n;
  std::size_t total = 0;
  for (std::int64_t n = 0; n <= 4; ++n) total += hyperbolic_layer(2, n).size();
  EXPECT_EQ(rect_universe(2, 4).indices.size(), total);
  auto layer = hyperbolic_layer(2, 3);
  EXPECT_TRUE(std::is_sorted(layer.begin(), layer.end()));
  EXPECT_EQ(std::set<BasisIndex>(layer.begin(), layer.end()).size(), layer.size());
}

TEST(Democracy, LpIsExactPower) {
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    auto prof = democracy_profile(SpaceSpec::lp(p), {1, 2, 3, 5, 8});
    for (const auto& row : prof.rows) {
      EXPECT_NEAR(row.h_ell, std::pow(double(row.N), 1 / p), 1e-12);
      EXPECT_NEAR(row.h_r, std::pow(double(row.N), 1 / p), 1e-12);
    }
    EXPECT_TRUE(prof.bounds_ok);
    EXPECT_TRUE(prof.monotone_ok);
  }
  auto l2 = democracy_profile(SpaceSpec::lp(2), {1, 2, 3, 4, 5, 6, 7, 8});
  ASSERT_TRUE(l2.r_doubling.has_value());
  EXPECT_NEAR(*l2.r_doubling, std::sqrt(2.0), 1e-12);
}

TEST(Democracy, BmoPairExample) {
  auto u = cube_universe(1, 4);
  auto h = h_exhaustive(SpaceSpec::bmo(2), u, 2);
  EXPECT_NEAR(h.h_ell, 1.0, 1e-14);
  // nested pair J in I with |J| = |I|/2: (1 + 1/2)^{1/2}; sqrt 2 needs the full depth-1 tree
  EXPECT_NEAR(h.h_r, std::sqrt(1.5), 1e-14);
  EXPECT_NEAR(h_exhaustive(SpaceSpec::bmo(2), u, 3).h_r, std::sqrt(2.0), 1e-14);
  auto one = h_exhaustive(SpaceSpec::bmo(2), u, 1);
  EXPECT_DOUBLE_EQ(one.h_ell, 1.0);
  EXPECT_DOUBLE_EQ(one.h_r, 1.0);
}

TEST(Democracy, ExhaustiveMatchesBruteForce) {
  std::vector<std::pair<std::string, IndexUniverse>> cases = {
      {"bmo:2", cube_universe(1, 2)},       {"fpr:0.5,2,2,1", cube_universe(1, 2)}, {"lpq:2,4,1", cube_universe(1, 2)},
      {"orlicz:ulog@1", cube_universe(1, 2)}, {"hyp:3,2", rect_universe(2, 1)},     {"lplq:2,1", pair_universe(4)}};
  for (const auto& [text, u] : cases) {
    SpaceSpec spec = SpaceSpec::parse(text);
    for (std::size_t N = 1; N <= std::min<std::size_t>(4, u.indices.size()); ++N) {
      auto h = h_exhaustive(spec, u, N);
      auto [lo, hi] = brute_h(spec, u, N);
      EXPECT_NEAR(h.h_ell, lo, 1e-12 * hi) << text << " N=" << N;
      EXPECT_NEAR(h.h_r, hi, 1e-12 * hi) << text << " N=" << N;
    }
  }
}

TEST(Democracy, UniverseMismatchAndCap) {
  EXPECT_THROW(h_exhaustive(SpaceSpec::lp(2), cube_universe(1, 3), 2), TypeError);
  EXPECT_THROW(h_exhaustive(SpaceSpec::lp(2), integer_universe(64), 20, 1e6), CapExceeded);
}

TEST(Democracy, StructuredExamples) {
  for (int m = 0; m <= 5; ++m) {
    std::size_t N = (std::size_t{2} << m) - 1;
    EXPECT_NEAR(h_structured(SpaceSpec::bmo(2), N, Family::FullTree), std::sqrt(m + 1.0), 1e-12);
  }
  for (std::size_t N : {2u, 5u, 16u}) {
    EXPECT_NEAR(h_structured(SpaceSpec::fpr(0, 2, 2, 1), N, Family::SameSizeDisjoint), std::sqrt(double(N)), 1e-12);
    EXPECT_EQ(family_indices(SpaceSpec::bmo(2), N, Family::NestedTower).size(), N);
  }
  EXPECT_THROW(family_indices(SpaceSpec::lp(2), 4, Family::FullTree), ParamError);
  for (auto f : families_for(SpaceSpec::orlicz("ulog", 1))) EXPECT_EQ(parse_family(family_name(f)), f);
}

// Structured values sit inside the exhaustive range, and the best family
// attains it for l^p and bmo.
TEST(Democracy, StructuredInsideExhaustive) {
  for (const char* text : {"bmo:2", "lpq:2,4,1", "lpq:4,2,1"}) {
    SpaceSpec spec = SpaceSpec::parse(text);
    auto u = cube_universe(1, 3);
    for (std::size_t N : {2u, 3u, 4u}) {
      auto h = h_exhaustive(spec, u, N);
      for (auto f : families_for(spec)) {
        auto idx = family_indices(spec, N, f);
        bool inside = std::all_of(idx.begin(), idx.end(), [&](const BasisIndex& b) {
          return std::find(u.indices.begin(), u.indices.end(), b) != u.indices.end();
        });
        if (!inside) continue;
        double v = h_structured(spec, N, f);
        EXPECT_GE(v, h.h_ell - 1e-12) << text << " " << family_name(f);
        EXPECT_LE(v, h.h_r + 1e-12) << text << " " << family_name(f);
      }
    }
  }
  auto bmo = h_exhaustive(SpaceSpec::bmo(2), cube_universe(1, 3), 3);
  EXPECT_NEAR(h_structured(SpaceSpec::bmo(2), 3, Family::FullTree), bmo.h_r, 1e-12);
  EXPECT_NEAR(h_structured(SpaceSpec::bmo(2), 3, Family::SameSizeDisjoint), bmo.h_ell, 1e-12);
}

TEST(DemocracyProperty, BoundsAndMonotone) {
  for (const char* text : {"bmo:2", "bmo:1", "fpr:0.3,1.5,2,1", "lpq:3,1.5,1", "orlicz:plog2@1", "lplq:2,0.5"}) {
    SpaceSpec spec = SpaceSpec::parse(text);
    IndexUniverse u = spec.tag == SpaceTag::LpLq ? pair_universe(5) : cube_universe(1, 3);
    auto prof = democracy_profile(spec, {1, 2, 3, 4, 5}, Strategy::Exhaustive, u);
    EXPECT_TRUE(prof.bounds_ok) << text;
    EXPECT_TRUE(prof.monotone_ok) << text;
    for (const auto& v : prof.violations) ADD_FAILURE() << text << ": " << v;
    for (const auto& row : prof.rows) {
      EXPECT_GE(row.h_ell, 1 - 1e-9);
      EXPECT_LE(row.h_r, std::pow(double(row.N), 1 / spec.rho) + 1e-9);
    }
  }
  auto csv = democracy_profile(SpaceSpec::bmo(2), {1, 2}).to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,h_ell,h_r,method,bound_direction");
}

TEST(PropertyH, SetsAndBands) {
  EXPECT_EQ(property_h_set(SpaceSpec::hyp(4, 2), 3).size(), hyperbolic_layer(2, 3).size());
  EXPECT_EQ(property_h_set(SpaceSpec::lpq(2, 4, 1), 4).size(), 16u);
  EXPECT_THROW(property_h_set(SpaceSpec::bmo(2), 3), ParamError);
  auto r = property_h_check(SpaceSpec::lp(2), property_h_set(SpaceSpec::lp(2), 3), 1000, 1);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.tested, 70u);
  EXPECT_NEAR(r.band, 1.0, 1e-12);
  auto a = property_h_check(SpaceSpec::orlicz("ulog", 1), property_h_set(SpaceSpec::orlicz("ulog", 1), 6), 50, 9);
  auto b = property_h_check(SpaceSpec::orlicz("ulog", 1), property_h_set(SpaceSpec::orlicz("ulog", 1), 6), 50, 9);
  EXPECT_EQ(a.band, b.band);
  EXPECT_TRUE(a.pass);
}

TEST(InducedH, LpScalesLikeNAlpha) {
  for (auto mode : {InducedMode::Aspace, InducedMode::Gclass}) {
    for (std::size_t N = 1; N <= 4; ++N) {
      auto r = induced_h(SpaceSpec::lp(2), 1, kInf, mode, integer_universe(8), N);
      EXPECT_NEAR(r.ambient_h_ell, std::sqrt(double(N)), 1e-12);
      EXPECT_LE(r.h_ell, r.h_r + 1e-12);
      double ratio = r.h_r / (double(N) * r.ambient_h_r);
      EXPECT_GT(ratio, 0.25);
      EXPECT_LT(ratio, 4.0);
    }
  }
}
