#include "nterm/lorentz_seq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nterm/errors.hpp"
#include "nterm/numeric.hpp"

namespace nterm {

RearrangedSequence decreasing_rearrangement(const CoefficientSequence& s) {
  const auto& e = s.entries();
  RearrangedSequence r;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i].coef != 0.0) r.permutation.push_back(i);
  std::stable_sort(r.permutation.begin(), r.permutation.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(e[a].coef) > std::fabs(e[b].coef);
  });
  r.values.reserve(r.permutation.size());
  for (auto p : r.permutation) r.values.push_back(std::fabs(e[p].coef));
  return r;
}

namespace {

void check_q(double q) {
  if (!(q > 0.0) || std::isnan(q)) throw ParamError("Lorentz exponent q must be positive");
}

}  // namespace

double lorentz_norm_sorted(const std::vector<double>& v, const Weight& w, double q) {
  check_q(q);
  if (v.empty()) return 0.0;
  if (std::isinf(q)) {
    double best = 0.0;
    for (std::size_t k = 1; k <= v.size(); ++k) best = std::max(best, w(k) * v[k - 1]);
    return best;
  }
  std::vector<double> terms(v.size());
  for (std::size_t k = 1; k <= v.size(); ++k) {
    terms[k - 1] = std::pow(w(k) * v[k - 1], q) / static_cast<double>(k);
  }
  std::sort(terms.begin(), terms.end(), std::greater<>());
  CompensatedSum<double> acc;
  for (double t : terms) acc.add(t);
  return std::pow(acc.value(), 1.0 / q);
}

double lorentz_norm(const CoefficientSequence& s, const Weight& w, double q) {
  check_q(q);
  return lorentz_norm_sorted(decreasing_rearrangement(s).values, w, q);
}

double lorentz_norm_dyadic(const CoefficientSequence& s, const Weight& w, double q, std::uint64_t kappa) {
  check_q(q);
  if (kappa < 2) throw ParamError("dyadic Lorentz norm needs kappa >= 2");
  auto v = decreasing_rearrangement(s).values;
  if (v.empty()) return 0.0;
  std::vector<double> terms;
  for (std::uint64_t k = 1; k <= v.size(); k *= kappa) {
    double t = w(k) * v[k - 1];
    terms.push_back(std::isinf(q) ? t : std::pow(t, q));
    if (k > v.size() / kappa) break;
  }
  if (std::isinf(q)) return *std::max_element(terms.begin(), terms.end());
  std::sort(terms.begin(), terms.end(), std::greater<>());
  CompensatedSum<double> acc;
  for (double t : terms) acc.add(t);
  return std::pow(acc.value(), 1.0 / q);
}

std::vector<FundamentalRow> fundamental_function_check(const Weight& w, double q,
                                                       const std::vector<std::uint64_t>& N_list,
                                                       std::uint64_t classify_range) {
  check_q(q);
  bool warn = false;
  if (!std::isinf(q)) warn = !classify(w, classify_range).in_W_plus;
  std::vector<FundamentalRow> rows;
  for (auto N : N_list) {
    if (N == 0) throw ParamError("fundamental function needs N >= 1");
    std::vector<double> ones(N, 1.0);
    FundamentalRow r;
    r.N = N;
    r.norm = lorentz_norm_sorted(ones, w, q);
    r.ratio = r.norm / w(N);
    r.warning = warn;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace nterm
