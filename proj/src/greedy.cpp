#include "nterm/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nterm/errors.hpp"
#include "nterm/lorentz_seq.hpp"
#include "nterm/numeric.hpp"

namespace nterm {

std::string flag_name(ExactFlag f) {
  switch (f) {
    case ExactFlag::Exact: return "exact";
    case ExactFlag::GreedyBound: return "greedy_bound";
    case ExactFlag::SampledTies: return "sampled_ties";
  }
  return "?";
}

GreedySets greedy_sets(const CoefficientSequence& s, std::size_t N, const GreedyOptions& opt) {
  GreedySets out;
  auto r = decreasing_rearrangement(s);
  const std::size_t n = r.values.size();
  if (N == 0) {
    out.sets.emplace_back();
    return out;
  }
  if (N >= n) {
    out.sets.push_back(r.permutation);
    return out;
  }
  const double t = r.values[N - 1];
  std::vector<std::size_t> larger, tied;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.values[i] > t) larger.push_back(r.permutation[i]);
    else if (r.values[i] == t) tied.push_back(r.permutation[i]);
  }
  const std::size_t m = N - larger.size();
  const double count = binomial(tied.size(), m);
  if (count <= static_cast<double>(opt.tie_cap)) {
    for_each_combination(tied.size(), m, [&](std::span<const std::size_t> c) {
      std::vector<std::size_t> set = larger;
      for (auto i : c) set.push_back(tied[i]);
      out.sets.push_back(std::move(set));
      return true;
    });
    return out;
  }
  out.exact = false;
  std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (N + 1)));
  std::vector<std::size_t> pool = tied;
  for (std::size_t k = 0; k < opt.tie_cap; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<std::size_t> set = larger;
    set.insert(set.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    out.sets.push_back(std::move(set));
  }
  return out;
}

double residual_norm(const SpaceSpec& spec, const CoefficientSequence& s, const std::vector<std::size_t>& kept) {
  std::vector<char> mask(s.size(), 0);
  for (auto k : kept) mask[k] = 1;
  return space_norm(spec, s.complement(mask));
}

ErrorValue gamma_n(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt) {
  auto gs = greedy_sets(s, N, opt);
  ErrorValue ev;
  ev.flag = gs.exact ? ExactFlag::Exact : ExactFlag::SampledTies;
  std::vector<double> vals(gs.sets.size());
  parallel_for(gs.sets.size(), [&](std::size_t i) { vals[i] = residual_norm(spec, s, gs.sets[i]); });
  for (double v : vals) ev.value = std::max(ev.value, v);
  return ev;
}

ErrorValue sigma_n_upper(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt) {
  auto gs = greedy_sets(s, N, opt);
  std::vector<double> vals(gs.sets.size());
  parallel_for(gs.sets.size(), [&](std::size_t i) { vals[i] = residual_norm(spec, s, gs.sets[i]); });
  ErrorValue ev;
  ev.value = *std::min_element(vals.begin(), vals.end());
  ev.flag = spec.greedy_optimal() ? ExactFlag::Exact : ExactFlag::GreedyBound;
  return ev;
}

double sigma_n_exact(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt) {
  CoefficientSequence sup = s.stripped();
  const std::size_t n = sup.size();
  if (N >= n) return 0.0;
  if (N == 0) return space_norm(spec, sup);
  double count = binomial(n, N);
  if (count > opt.subset_cap) {
    throw CapExceeded("sigma_N brute force needs C(" + std::to_string(n) + "," + std::to_string(N) + ") = " +
                      fmt_double(count) + " subsets (cap " + fmt_double(opt.subset_cap) +
                      "); use the greedy upper bound instead");
  }
  const std::size_t chunks = n - N + 1;
  std::vector<double> best(chunks, std::numeric_limits<double>::infinity());
  parallel_for(chunks, [&](std::size_t first) {
    std::vector<char> mask(n, 0);
    for_each_combination_from(n, N, first, [&](std::span<const std::size_t> c) {
      for (auto i : c) mask[i] = 1;
      best[first] = std::min(best[first], space_norm(spec, sup.complement(mask)));
      for (auto i : c) mask[i] = 0;
      return true;
    });
  });
  return *std::min_element(best.begin(), best.end());
}

ErrorValue sigma_n(const CoefficientSequence& s, std::size_t N, const SpaceSpec& spec, const GreedyOptions& opt) {
  if (spec.greedy_optimal()) return sigma_n_upper(s, N, spec, opt);
  std::size_t n = decreasing_rearrangement(s).values.size();
  if (N >= n || binomial(n, N) <= opt.subset_cap) return {sigma_n_exact(s, N, spec, opt), ExactFlag::Exact};
  return sigma_n_upper(s, N, spec, opt);
}

std::string ApproximationProfile::to_csv() const {
  std::ostringstream os;
  os << "N,value,exact_flag\n";
  for (const auto& r : rows) os << r.N << ',' << fmt_double(r.value) << ',' << flag_name(r.flag) << '\n';
  return os.str();
}

ApproximationProfile approximation_profile(const CoefficientSequence& s, const SpaceSpec& spec, ErrorKind kind,
                                           std::size_t N_max, const GreedyOptions& opt) {
  ApproximationProfile prof;
  prof.kind = kind;
  prof.space = spec.to_string();
  for (std::size_t N = 0; N <= N_max; ++N) {
    ProfileRow row;
    row.N = N;
    if (kind == ErrorKind::Gamma) {
      auto ev = gamma_n(s, N, spec, opt);
      row.value = ev.value;
      row.flag = ev.flag;
    } else if (spec.greedy_optimal()) {
      auto ev = sigma_n_upper(s, N, spec, opt);
      row.value = ev.value;
      row.flag = ev.flag;
    } else {
      row.value = sigma_n_exact(s, N, spec, opt);
    }
    prof.rows.push_back(row);
  }
  return prof;
}

double aspace_from_errors(double base_norm, const std::vector<double>& errors, double alpha, double q,
                          AspaceForm form) {
  if (!(alpha > 0.0)) throw ParamError("alpha must be positive");
  if (!(q > 0.0)) throw ParamError("q must be positive");
  std::vector<std::size_t> Ns;
  for (std::size_t N = 1; N < errors.size(); N = (form == AspaceForm::Full ? N + 1 : 2 * N)) Ns.push_back(N);
  double tail = 0.0;
  if (std::isinf(q)) {
    for (auto N : Ns) tail = std::max(tail, std::pow(static_cast<double>(N), alpha) * errors[N]);
  } else {
    CompensatedSum<double> acc;
    for (auto N : Ns) {
      double t = std::pow(std::pow(static_cast<double>(N), alpha) * errors[N], q);
      acc.add(form == AspaceForm::Full ? t / static_cast<double>(N) : t);
    }
    tail = std::pow(acc.value(), 1.0 / q);
  }
  return base_norm + tail;
}

AspaceResult aspace_norm(const CoefficientSequence& s, double alpha, double q, const SpaceSpec& spec, ErrorKind kind,
                         AspaceForm form, const GreedyOptions& opt) {
  if (!(alpha > 0.0)) throw ParamError("alpha must be positive");
  if (!(q > 0.0)) throw ParamError("q must be positive");
  CoefficientSequence sup = s.stripped();
  const std::size_t n = sup.size();
  AspaceResult res;
  res.base_norm = space_norm(spec, sup);
  std::vector<double> errors(n + 1, 0.0);
  errors[0] = res.base_norm;
  for (std::size_t N = 1; N < n; N = (form == AspaceForm::Full ? N + 1 : 2 * N)) {
    ErrorValue ev = kind == ErrorKind::Gamma ? gamma_n(sup, N, spec, opt) : sigma_n(sup, N, spec, opt);
    errors[N] = ev.value;
    if (ev.flag != ExactFlag::Exact) res.exact = false;
  }
  res.value = aspace_from_errors(res.base_norm, errors, alpha, q, form);
  res.tail = res.value - res.base_norm;
  return res;
}

}  // namespace nterm
