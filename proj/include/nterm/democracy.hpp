#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nterm/greedy.hpp"
#include "nterm/sequence.hpp"
#include "nterm/spaces.hpp"

namespace nterm {

struct IndexUniverse {
  Universe kind = Universe::Integer;
  std::size_t dim = 1;
  std::vector<BasisIndex> indices;  // canonical order, duplicate-free
  std::string description;
};

IndexUniverse integer_universe(std::size_t n);
IndexUniverse pair_universe(std::size_t per_component);
// Dyadic cubes of levels 0..max_level inside [0,1)^d.
IndexUniverse cube_universe(std::size_t d, std::int64_t max_level);
// Dyadic rectangles inside [0,1)^d with level sum <= max_level_sum.
IndexUniverse rect_universe(std::size_t d, std::int64_t max_level_sum);
// Defaults: integers 1..64, pairs 2x32, cubes with at most 4096 elements,
// intervals to depth 12, rectangles with level sum <= 10.
IndexUniverse default_universe(const SpaceSpec& spec);

// All rectangles in [0,1)^d whose levels sum to n (|R| = 2^-n), canonical order.
std::vector<BasisIndex> hyperbolic_layer(std::size_t d, std::int64_t n);

struct HResult {
  double h_ell = 0.0;
  double h_r = 0.0;
  std::vector<BasisIndex> argmin;
  std::vector<BasisIndex> argmax;
};

// Exact min/max of the normalized indicator norm over all N-subsets.
// Throws CapExceeded when C(|universe|, N) > cap.
HResult h_exhaustive(const SpaceSpec& spec, const IndexUniverse& universe, std::size_t N, double cap = kSubsetCap);

enum class Family {
  SameSizeDisjoint,
  NestedTower,
  FullTree,
  MixedSizes,
  LevelOptimized,
  HyperbolicLayer,
  FirstComponent,
  SecondComponent,
};

std::string family_name(Family f);
Family parse_family(const std::string& name);
// Families that can be built for the space's geometry.
std::vector<Family> families_for(const SpaceSpec& spec);
// Canonical representative of size N. Throws ParamError on a family/space mismatch.
std::vector<BasisIndex> family_indices(const SpaceSpec& spec, std::size_t N, Family f);
double h_structured(const SpaceSpec& spec, std::size_t N, Family f);

// Level j maximizing phi(N 2^{-jd}) / phi(2^{-jd}) over |j| <= 40.
std::int64_t orlicz_optimal_level(const SpaceSpec& spec, std::size_t N);

enum class Strategy { Auto, Exhaustive, Structured };

struct DemocracyRow {
  std::size_t N = 0;
  double h_ell = 0.0;
  double h_r = 0.0;
  std::string method;       // exhaustive | structured
  std::string ell_family;   // attaining family (structured rows)
  std::string r_family;
  std::string bound_direction = "ell_upper;r_lower";
  std::vector<BasisIndex> argmin;
  std::vector<BasisIndex> argmax;
};

struct DemocracyProfile {
  std::string space;
  std::vector<DemocracyRow> rows;
  bool bounds_ok = true;     // 1 <= h_ell <= h_r <= N^{1/rho}
  bool monotone_ok = true;   // both nondecreasing along the N list
  std::optional<double> r_doubling;    // max h_r(2N)/h_r(N) over listed pairs
  std::optional<double> ell_step;      // max h_ell(N+1)/h_ell(N)
  std::optional<double> ell_doubling;  // max h_ell(2N)/h_ell(N)
  std::vector<std::string> violations;
  std::string to_csv() const;
};

DemocracyProfile democracy_profile(const SpaceSpec& spec, const std::vector<std::size_t>& N_list,
                                   Strategy strategy = Strategy::Auto,
                                   const std::optional<IndexUniverse>& universe = std::nullopt,
                                   double cap = kSubsetCap);

struct PropertyHResult {
  std::size_t set_size = 0;
  std::size_t half_size = 0;
  std::size_t tested = 0;
  bool exhaustive = false;
  double min_value = 0.0;
  double max_value = 0.0;
  double reference = 0.0;  // h_r estimate at the half size
  double band = 0.0;       // max/min over tested values and the reference
  bool pass = false;
};

constexpr double kPropertyHBand = 4.0;

// Evaluates every (or `samples` random) half-subsets of gamma.
PropertyHResult property_h_check(const SpaceSpec& spec, const std::vector<BasisIndex>& gamma, std::size_t samples,
                                 std::uint64_t seed, std::optional<double> reference = std::nullopt);

// The witness set used for the space: Orlicz level-optimized same-size
// cubes, Lorentz same-size (p <= q) or mixed sizes (q < p), hyperbolic layer.
std::vector<BasisIndex> property_h_set(const SpaceSpec& spec, unsigned n);

enum class InducedMode { Aspace, Gclass };

struct InducedHResult {
  double h_ell = 0.0;
  double h_r = 0.0;
  double ambient_h_ell = 0.0;
  double ambient_h_r = 0.0;
  double unit = 1.0;  // approximation-space norm of one normalized basis element
};

InducedHResult induced_h(const SpaceSpec& spec, double alpha, double q, InducedMode mode,
                         const IndexUniverse& universe, std::size_t N, const GreedyOptions& opt = {},
                         double cap = kSubsetCap);

}  // namespace nterm
