#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "nterm/sequence.hpp"
#include "nterm/weights.hpp"

namespace nterm {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RearrangedSequence {
  std::vector<double> values;          // |c| sorted nonincreasing, zeros removed
  std::vector<std::size_t> permutation; // positions into the source entries()
};

// Ties keep canonical index order (stable sort over the sorted entries).
RearrangedSequence decreasing_rearrangement(const CoefficientSequence& s);

// [sum_k (eta(k) s*_k)^q / k]^(1/q); q = inf gives max_k eta(k) s*_k.
double lorentz_norm(const CoefficientSequence& s, const Weight& w, double q);
double lorentz_norm_sorted(const std::vector<double>& sorted_desc, const Weight& w, double q);

// [sum_{j>=0} (eta(kappa^j) s*_{kappa^j})^q]^(1/q), j while kappa^j <= support.
double lorentz_norm_dyadic(const CoefficientSequence& s, const Weight& w, double q, std::uint64_t kappa);

struct FundamentalRow {
  std::uint64_t N = 0;
  double norm = 0.0;
  double ratio = 0.0;  // ||1_Gamma|| / eta(N)
  bool warning = false;  // finite q with a weight not certified in W+
};

std::vector<FundamentalRow> fundamental_function_check(const Weight& w, double q,
                                                       const std::vector<std::uint64_t>& N_list,
                                                       std::uint64_t classify_range = kDefaultWeightRange);

}  // namespace nterm
