#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nterm/sequence.hpp"
#include "nterm/spaces.hpp"

namespace nterm {

constexpr std::size_t kTieCap = 10000;
constexpr double kSubsetCap = 2e6;

struct GreedyOptions {
  std::size_t tie_cap = kTieCap;   // admissible sets enumerated before sampling
  double subset_cap = kSubsetCap;  // C(|supp|, N) limit for brute force
  std::uint64_t seed = 0x5eed;
};

struct GreedySets {
  // Kept sets as positions into s.entries().
  std::vector<std::vector<std::size_t>> sets;
  bool exact = true;  // false when the tie block was sampled
};

GreedySets greedy_sets(const CoefficientSequence& s, std::size_t N, const GreedyOptions& opt = {});

enum class ErrorKind { Sigma, Gamma };
enum class ExactFlag { Exact, GreedyBound, SampledTies };
std::string flag_name(ExactFlag f);

struct ErrorValue {
  double value = 0.0;
  ExactFlag flag = ExactFlag::Exact;
};

// Norm of s with the entries at `kept` removed.
double residual_norm(const SpaceSpec& spec, const CoefficientSequence& s, const std::vector<std::size_t>& kept);

ErrorValue gamma_n(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt = {});
// Throws CapExceeded when C(|supp|, N) > opt.subset_cap.
double sigma_n_exact(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt = {});
ErrorValue sigma_n_upper(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt = {});
// Exact when affordable, otherwise the greedy bound (exact for l^p).
ErrorValue sigma_n(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt = {});

struct ProfileRow {
  std::size_t N = 0;
  double value = 0.0;
  ExactFlag flag = ExactFlag::Exact;
};

struct ApproximationProfile {
  ErrorKind kind = ErrorKind::Sigma;
  std::string space;
  std::vector<ProfileRow> rows;
  std::string to_csv() const;
};

// Rows N = 0..N_max. In sigma mode a brute-force cap overflow throws unless
// the greedy bound is known to be exact for the space.
ApproximationProfile approximation_profile(const CoefficientSequence& s, const SpaceSpec& spec, ErrorKind kind,
                                           std::size_t N_max, const GreedyOptions& opt = {});

enum class AspaceForm { Full, Dyadic };

struct AspaceResult {
  double value = 0.0;
  bool exact = true;
  double base_norm = 0.0;
  double tail = 0.0;
};

// ||s|| + [sum_N (N^alpha e_N)^q / N]^{1/q}; q = inf uses the sup. The dyadic
// form sums (2^{k alpha} e_{2^k})^q over k >= 0.
AspaceResult aspace_norm(const CoefficientSequence& s, double alpha, double q, const SpaceSpec& spec, ErrorKind kind,
                         AspaceForm form = AspaceForm::Full, const GreedyOptions& opt = {});

// Same combination from a precomputed error list errors[N] for N = 0..n.
double aspace_from_errors(double base_norm, const std::vector<double>& errors, double alpha, double q,
                          AspaceForm form = AspaceForm::Full);

}  // namespace nterm
