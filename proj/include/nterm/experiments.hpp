#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nterm/democracy.hpp"
#include "nterm/greedy.hpp"
#include "nterm/lorentz_seq.hpp"
#include "nterm/sequence.hpp"
#include "nterm/spaces.hpp"
#include "nterm/weights.hpp"

namespace nterm {

// ---------------------------------------------------------------- rate fits

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
  std::size_t points_used = 0;
  std::size_t excluded_nonpositive = 0;
};

// Least squares on (log N, log value) over N in [lo, hi]. Without a range the
// smallest decade is dropped when the data spans at least two decades.
// Throws ParamError with fewer than 4 usable points.
RateFit rate_fit(const std::vector<std::pair<double, double>>& points,
                 std::optional<std::pair<double, double>> range = std::nullopt);

// ---------------------------------------------------------------- model sequences

enum class ModelKind { PowerTail, IndicatorPair, PairedStream };

struct ModelSequence {
  ModelKind kind = ModelKind::PowerTail;
  double beta = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double p = 2.0;
  double q = 1.0;
  std::uint64_t K = 0;
  double tail_bound = 0.0;  // bound on sum_{k>K} k^{-beta p}
};

// sum_{k>K} k^{-e} <= K^{1-e}/(e-1); requires e > 1.
double power_tail_bound(double e, std::uint64_t K);
ModelSequence power_tail_model(double beta, double p, std::uint64_t K);
// c_k = k^{-beta}, k = 1..K (integer universe).
CoefficientSequence power_tail_sequence(double beta, std::uint64_t K);

// Maps values[i] onto the i-th index of the universe.
CoefficientSequence embed_values(const std::vector<double>& values, const IndexUniverse& universe);

// ---------------------------------------------------------------- test sets

struct TestVector {
  std::string label;
  std::vector<double> values;  // placed on the first indices of the universe
};

// Power tails k^{-c * critical} (c in {0.6, 1.1, 2.1}), indicators of sizes
// cap/4, cap/2, cap, and `randoms` seeded sparse vectors, all with support <= cap.
std::vector<TestVector> standard_test_set(double critical, std::size_t cap, std::size_t randoms, std::uint64_t seed);

// ---------------------------------------------------------------- verifiers

struct ConstantRow {
  std::string label;
  std::size_t support = 0;
  double constant = 0.0;  // max ratio for this vector
  std::size_t argmax_N = 0;
  bool exact = true;
};

struct ConstantTable {
  std::string name;
  std::vector<ConstantRow> rows;
  double constant = 0.0;  // max over rows
  bool weight_ok = true;
  std::string diagnostic;
  std::optional<double> left_democracy;  // Bernstein cross-check: min_N h_ell(N)/eta(N)
  std::string to_csv() const;
};

struct VerifierOptions {
  double alpha = 0.5;
  double q = kInf;
  std::size_t support_cap = 256;
  std::size_t randoms = 8;
  std::uint64_t seed = 0x5eed;
  std::uint64_t classify_range = 100000;
  std::size_t tie_cap = 32;  // admissible greedy sets per N
  std::optional<IndexUniverse> universe;
};

// max over x and N <= |supp x| of (N+1)^alpha gamma_N(x) / ||x||_{l^q_{k^alpha eta}}.
// Refuses (weight_ok = false) when k^alpha eta(k) is not certified W+.
ConstantTable jackson_verifier(const SpaceSpec& spec, const Weight& eta, const VerifierOptions& opt);

// max over x in Sigma_N of ||x||_{l^q_{k^alpha eta}} / (N^alpha ||x||).
ConstantTable bernstein_verifier(const SpaceSpec& spec, const Weight& eta, const VerifierOptions& opt);

enum class EmbeddingDirection { LorentzIntoG, LorentzIntoA, AIntoLorentz };
std::string direction_name(EmbeddingDirection d);
EmbeddingDirection parse_direction(const std::string& name);

ConstantTable embedding_verifier(EmbeddingDirection dir, const SpaceSpec& spec, const Weight& eta,
                                 const VerifierOptions& opt);

// ---------------------------------------------------------------- Stechkin

struct StechkinResult {
  double alpha = 0.5;
  double q = 1.0;
  double tau = 1.0;
  std::size_t trials = 0;
  std::size_t support_cap = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double band = 0.0;  // max/min
  std::vector<std::pair<std::size_t, double>> ratios;  // (support, ratio) per trial
};

// Ratio of the l^2 approximation-space norm to the Lorentz l^{tau,q} norm,
// 1/tau = alpha + 1/2. Trial i draws its support size and values from a
// generator seeded by (seed, i), so caps differing only in size stay comparable.
StechkinResult stechkin_check(double alpha, double q, std::size_t trials, std::size_t support_cap,
                              std::uint64_t seed = 0x5eed);

// ---------------------------------------------------------------- greedy-class divergence witness

struct Schedule {
  enum class Kind { Power, Exponential } kind = Kind::Power;
  // Power: p_N = N^s, q_N = N^r. Exponential: p_N = N^a 2^{N^b}, q_N = 2^{N^b}.
  double s = 2, r = 1, a = 1, b = 1;
  std::pair<std::uint64_t, std::uint64_t> at(std::uint64_t N) const;
  std::string describe() const;
};

struct WitnessRow {
  std::uint64_t N = 0;
  std::uint64_t p_N = 0;
  std::uint64_t q_N = 0;
  double g_norm = 0.0;  // greedy-class norm, lower bound
  double a_norm = 0.0;  // approximation-space norm, upper bound
  double ratio = 0.0;
  std::string left_family;
  std::string right_family;
};

struct WitnessResult {
  std::vector<WitnessRow> rows;
  std::uint64_t largest_feasible_N = 0;
  bool monotone = true;
  std::optional<RateFit> growth;  // ratio against N
  std::string to_csv() const;
};

struct WitnessOptions {
  double alpha = 1.0;
  double tau = kInf;
  std::uint64_t max_support = 4096;
  std::size_t tie_samples = 8;
  std::uint64_t seed = 0x5eed;
};

// x_N = 1_{right} + 2 * 1_{left \ right}. The greedy-class norm uses sampled
// greedy orderings (a lower bound); the approximation norm uses an explicit
// family of candidate N-term approximants (an upper bound), so the reported
// ratio never overstates growth.
WitnessResult divergence_witness(const SpaceSpec& spec, const Schedule& schedule, const std::vector<std::uint64_t>& N_list,
                            const WitnessOptions& opt = {});

// ---------------------------------------------------------------- non-linearity

struct NonlinearPoint {
  std::uint64_t N = 0;
  double value = 0.0;
};

struct NonlinearResult {
  double p = 2, q = 1, alpha = 1, beta = 0, gamma = 0;
  std::uint64_t K = 0;
  std::vector<NonlinearPoint> x_points;
  std::vector<NonlinearPoint> y_points;
  std::vector<std::pair<std::uint64_t, NonlinearPoint>> sum_points;  // (J, (N_J, gamma_{N_J}(x+y)))
  RateFit x_fit, y_fit, sum_fit;
  RateFit NJ_fit;                 // N_J against J
  bool counts_match = true;       // direct |A_j| counts equal the defining-inequality counts
  bool counts_integer_exact = true;  // false when the exact integer comparison was not available
  std::uint64_t J_max = 0;
  std::vector<std::uint64_t> A_sizes;  // |A_j|, j = 1..J_max
  double x_tail_bound = 0.0;
  double y_tail_bound = 0.0;
  bool insufficient_range = false;
  std::optional<double> engine_max_rel_diff;  // generic greedy engine vs closed form at small K
  std::string to_csv() const;
};

// Throws ParamError unless 0 < q < p.
NonlinearResult nonlinearity_demo(double p, double q, double alpha, std::uint64_t K, bool engine_check = true);

}  // namespace nterm
