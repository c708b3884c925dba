#include "nterm/experiments.hpp"

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

// ---------------------------------------------------------------- rate fits

RateFit rate_fit(const std::vector<std::pair<double, double>>& points, std::optional<std::pair<double, double>> range) {
  RateFit fit;
  double lo = 0, hi = 0;
  if (range) {
    lo = range->first;
    hi = range->second;
  } else {
    lo = std::numeric_limits<double>::infinity();
    hi = 0;
    for (const auto& [N, v] : points) {
      if (N > 0) {
        lo = std::min(lo, N);
        hi = std::max(hi, N);
      }
    }
    if (hi >= 100 * lo) lo *= 10;
  }
  fit.range_lo = lo;
  fit.range_hi = hi;
  std::vector<double> xs, ys;
  for (const auto& [N, v] : points) {
    if (N < lo || N > hi || N <= 0) continue;
    if (!(v > 0) || !std::isfinite(v)) {
      ++fit.excluded_nonpositive;
      continue;
    }
    xs.push_back(std::log(N));
    ys.push_back(std::log(v));
  }
  fit.points_used = xs.size();
  if (xs.size() < 4) throw ParamError("rate fit needs at least 4 positive points in range, got " + std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw ParamError("rate fit needs at least two distinct N values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += e * e;
  }
  // rounding in the mean leaves a tiny syy for constant data
  double flat = 1e-24 * n * (1.0 + my * my);
  fit.r_squared = syy > flat ? 1.0 - sse / syy : 1.0;
  return fit;
}

// ---------------------------------------------------------------- model sequences

double power_tail_bound(double e, std::uint64_t K) {
  if (!(e > 1)) throw ParamError("tail exponent must exceed 1");
  return std::pow(static_cast<double>(K), 1.0 - e) / (e - 1.0);
}

ModelSequence power_tail_model(double beta, double p, std::uint64_t K) {
  ModelSequence m;
  m.kind = ModelKind::PowerTail;
  m.beta = beta;
  m.p = p;
  m.K = K;
  m.tail_bound = power_tail_bound(beta * p, K);
  return m;
}

CoefficientSequence power_tail_sequence(double beta, std::uint64_t K) {
  std::vector<double> v(K);
  for (std::uint64_t k = 1; k <= K; ++k) v[k - 1] = std::pow(static_cast<double>(k), -beta);
  return CoefficientSequence::from_values(v);
}

CoefficientSequence embed_values(const std::vector<double>& values, const IndexUniverse& universe) {
  if (values.size() > universe.indices.size())
    throw ParamError("vector of length " + std::to_string(values.size()) + " does not fit universe of size " +
                     std::to_string(universe.indices.size()));
  std::vector<Entry> e;
  e.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) e.push_back({universe.indices[i], values[i]});
  return CoefficientSequence::from_sorted(universe.kind, universe.dim, std::move(e));
}

// ---------------------------------------------------------------- test sets

std::vector<TestVector> standard_test_set(double critical, std::size_t cap, std::size_t randoms, std::uint64_t seed) {
  std::vector<TestVector> out;
  for (double c : {0.6, 1.1, 2.1}) {
    TestVector t;
    t.label = "power-" + fmt_double(c);
    for (std::size_t k = 1; k <= cap; ++k) t.values.push_back(std::pow(static_cast<double>(k), -c * critical));
    out.push_back(std::move(t));
  }
  for (std::size_t n : {std::max<std::size_t>(1, cap / 4), std::max<std::size_t>(1, cap / 2), cap}) {
    out.push_back({"indicator-" + std::to_string(n), std::vector<double>(n, 1.0)});
  }
  for (std::size_t i = 0; i < randoms; ++i) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    std::uniform_int_distribution<std::size_t> size(1, cap);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TestVector t;
    t.label = "random-" + std::to_string(i);
    t.values.resize(size(rng));
    for (auto& v : t.values) v = (u(rng) < 0.5 ? -1.0 : 1.0) * std::exp(-4.0 * u(rng));
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------- verifiers

std::string ConstantTable::to_csv() const {
  std::ostringstream os;
  os << "label,support,constant,argmax_N,exact\n";
  for (const auto& r : rows)
    os << r.label << ',' << r.support << ',' << fmt_double(r.constant) << ',' << r.argmax_N << ','
       << (r.exact ? "true" : "false") << '\n';
  return os.str();
}

namespace {

// Universe with at least n indices in canonical order, shallow elements first.
IndexUniverse universe_for(const SpaceSpec& spec, std::size_t n) {
  switch (spec.universe()) {
    case Universe::Integer: return integer_universe(n);
    case Universe::Pair: return pair_universe(n);
    case Universe::Cube: {
      const std::size_t d = spec.tag == SpaceTag::Bmo ? 1 : spec.geometry_dim();
      std::int64_t J = 0;
      std::size_t total = 1;
      while (total < n) {
        ++J;
        total += std::size_t{1} << (J * static_cast<std::int64_t>(d));
      }
      return cube_universe(d, J);
    }
    case Universe::Rectangle: {
      std::int64_t S = 0;
      while (rect_universe(spec.geometry_dim(), S).indices.size() < n) ++S;
      return rect_universe(spec.geometry_dim(), S);
    }
  }
  throw ParamError("unknown universe");
}

struct Prepared {
  CoefficientSequence raw;     // coefficients against the normalized basis
  CoefficientSequence normed;  // same vector in stored form
};

Prepared prepare(const SpaceSpec& spec, const std::vector<double>& values, const IndexUniverse& U) {
  Prepared p;
  p.raw = embed_values(values, U);
  p.normed = normalize_coefficients(spec, p.raw);
  return p;
}

// gamma_N with the greedy order taken from the normalized-basis coefficients.
ErrorValue gamma_prepared(const SpaceSpec& spec, const Prepared& x, std::size_t N, const GreedyOptions& opt) {
  auto gs = greedy_sets(x.raw, N, opt);
  ErrorValue ev;
  ev.flag = gs.exact ? ExactFlag::Exact : ExactFlag::SampledTies;
  for (const auto& set : gs.sets) ev.value = std::max(ev.value, residual_norm(spec, x.normed, set));
  return ev;
}

ErrorValue sigma_prepared(const SpaceSpec& spec, const Prepared& x, std::size_t N, const GreedyOptions& opt) {
  if (spec.greedy_optimal()) {
    auto g = gamma_prepared(spec, x, N, opt);
    g.flag = ExactFlag::Exact;
    return g;
  }
  return sigma_n(x.normed, N, spec, opt);
}

double critical_exponent(const Weight& w, double alpha, std::size_t cap) {
  if (cap < 2) return alpha;
  return alpha + std::log(w(cap) / w(1)) / std::log(static_cast<double>(cap));
}

IndexUniverse pick_universe(const SpaceSpec& spec, const VerifierOptions& opt) {
  if (opt.universe) {
    if (opt.universe->indices.size() < opt.support_cap) throw ParamError("universe smaller than the support cap");
    return *opt.universe;
  }
  return universe_for(spec, opt.support_cap);
}

bool certify(ConstantTable& t, const Weight& w, std::uint64_t range) {
  try {
    auto c = classify(w, range);
    if (!c.in_W_plus) {
      t.weight_ok = false;
      t.diagnostic = "weight " + w.describe() + " is not certified in W+ (i_eta = " + fmt_double(c.i_eta) + ")";
    }
  } catch (const ParamError& e) {
    t.weight_ok = false;
    t.diagnostic = e.what();
  }
  return t.weight_ok;
}

void finish(ConstantTable& t) {
  for (const auto& r : t.rows) t.constant = std::max(t.constant, r.constant);
}

}  // namespace

ConstantTable jackson_verifier(const SpaceSpec& spec, const Weight& eta, const VerifierOptions& opt) {
  ConstantTable t;
  t.name = "jackson";
  Weight w = Weight::product(Weight::power_log(opt.alpha, 0.0), eta);
  if (!certify(t, w, opt.classify_range)) return t;
  IndexUniverse U = pick_universe(spec, opt);
  auto tests = standard_test_set(critical_exponent(eta, opt.alpha, opt.support_cap), opt.support_cap, opt.randoms, opt.seed);
  GreedyOptions g;
  g.tie_cap = opt.tie_cap;
  g.seed = opt.seed;
  t.rows.resize(tests.size());
  parallel_for(tests.size(), [&](std::size_t i) {
    auto x = prepare(spec, tests[i].values, U);
    ConstantRow row;
    row.label = tests[i].label;
    row.support = x.raw.size();
    double denom = lorentz_norm(x.raw, w, opt.q);
    for (std::size_t N = 0; N <= row.support; ++N) {
      auto ev = gamma_prepared(spec, x, N, g);
      if (ev.flag != ExactFlag::Exact) row.exact = false;
      double r = std::pow(static_cast<double>(N + 1), opt.alpha) * ev.value / denom;
      if (r > row.constant) {
        row.constant = r;
        row.argmax_N = N;
      }
    }
    t.rows[i] = row;
  });
  finish(t);
  return t;
}

ConstantTable bernstein_verifier(const SpaceSpec& spec, const Weight& eta, const VerifierOptions& opt) {
  ConstantTable t;
  t.name = "bernstein";
  Weight w = Weight::product(Weight::power_log(opt.alpha, 0.0), eta);
  IndexUniverse U = pick_universe(spec, opt);
  auto tests = standard_test_set(critical_exponent(eta, opt.alpha, opt.support_cap), opt.support_cap, opt.randoms, opt.seed);
  t.rows.resize(tests.size());
  parallel_for(tests.size(), [&](std::size_t i) {
    ConstantRow row;
    row.label = tests[i].label;
    row.support = tests[i].values.size();
    // Every head of the vector is an element of Sigma_N.
    for (std::size_t N = 1; N <= tests[i].values.size(); ++N) {
      std::vector<double> head(tests[i].values.begin(), tests[i].values.begin() + static_cast<std::ptrdiff_t>(N));
      auto x = prepare(spec, head, U);
      double r = lorentz_norm(x.raw, w, opt.q) / (std::pow(static_cast<double>(N), opt.alpha) * space_norm(spec, x.normed));
      if (r > row.constant) {
        row.constant = r;
        row.argmax_N = N;
      }
    }
    t.rows[i] = row;
  });
  finish(t);
  std::vector<std::size_t> Ns;
  for (std::size_t N = 1; N <= opt.support_cap; N *= 2) Ns.push_back(N);
  auto prof = democracy_profile(spec, Ns, Strategy::Auto, std::nullopt, 1e5);
  double left = std::numeric_limits<double>::infinity();
  for (const auto& r : prof.rows) left = std::min(left, r.h_ell / eta(r.N));
  t.left_democracy = left;
  return t;
}

std::string direction_name(EmbeddingDirection d) {
  switch (d) {
    case EmbeddingDirection::LorentzIntoG: return "lorentz-into-G";
    case EmbeddingDirection::LorentzIntoA: return "lorentz-into-A";
    case EmbeddingDirection::AIntoLorentz: return "A-into-lorentz";
  }
  return "?";
}

EmbeddingDirection parse_direction(const std::string& name) {
  for (auto d : {EmbeddingDirection::LorentzIntoG, EmbeddingDirection::LorentzIntoA, EmbeddingDirection::AIntoLorentz})
    if (direction_name(d) == name) return d;
  throw ParseError("unknown embedding direction '" + name + "'");
}

ConstantTable embedding_verifier(EmbeddingDirection dir, const SpaceSpec& spec, const Weight& eta,
                                 const VerifierOptions& opt) {
  ConstantTable t;
  t.name = "embedding:" + direction_name(dir);
  Weight w = Weight::product(Weight::power_log(opt.alpha, 0.0), eta);
  if (dir == EmbeddingDirection::LorentzIntoG && !certify(t, w, opt.classify_range)) return t;
  IndexUniverse U = pick_universe(spec, opt);
  auto tests = standard_test_set(critical_exponent(eta, opt.alpha, opt.support_cap), opt.support_cap, opt.randoms, opt.seed);
  GreedyOptions g;
  g.tie_cap = opt.tie_cap;
  g.seed = opt.seed;
  t.rows.resize(tests.size());
  parallel_for(tests.size(), [&](std::size_t i) {
    auto x = prepare(spec, tests[i].values, U);
    ConstantRow row;
    row.label = tests[i].label;
    row.support = x.raw.size();
    const std::size_t n = row.support;
    std::vector<double> errors(n + 1, 0.0);
    double base = space_norm(spec, x.normed);
    errors[0] = base;
    for (std::size_t N = 1; N < n; ++N) {
      auto ev = dir == EmbeddingDirection::LorentzIntoG ? gamma_prepared(spec, x, N, g) : sigma_prepared(spec, x, N, g);
      if (ev.flag != ExactFlag::Exact) row.exact = false;
      errors[N] = ev.value;
    }
    double approx = aspace_from_errors(base, errors, opt.alpha, opt.q);
    double lor = lorentz_norm(x.raw, w, opt.q);
    row.constant = dir == EmbeddingDirection::AIntoLorentz ? lor / approx : approx / lor;
    row.argmax_N = n;
    t.rows[i] = row;
  });
  finish(t);
  return t;
}

// ---------------------------------------------------------------- Stechkin

StechkinResult stechkin_check(double alpha, double q, std::size_t trials, std::size_t support_cap, std::uint64_t seed) {
  if (!(alpha > 0)) throw ParamError("alpha must be positive");
  if (support_cap == 0 || trials == 0) throw ParamError("trials and support cap must be positive");
  StechkinResult res;
  res.alpha = alpha;
  res.q = q;
  res.tau = 1.0 / (alpha + 0.5);
  res.trials = trials;
  res.support_cap = support_cap;
  const SpaceSpec l2 = SpaceSpec::lp(2.0);
  const Weight w = Weight::power_log(1.0 / res.tau, 0.0);
  res.ratios.resize(trials);
  parallel_for(trials, [&](std::size_t i) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t n = std::min(support_cap, 1 + static_cast<std::size_t>(u(rng) * static_cast<double>(support_cap)));
    std::vector<double> v(n);
    for (auto& c : v) c = (u(rng) < 0.5 ? -1.0 : 1.0) * std::exp(-4.0 * u(rng));
    auto x = CoefficientSequence::from_values(v);
    double a = aspace_norm(x, alpha, q, l2, ErrorKind::Sigma).value;
    res.ratios[i] = {n, a / lorentz_norm(x, w, q)};
  });
  res.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& [n, r] : res.ratios) {
    res.min_ratio = std::min(res.min_ratio, r);
    res.max_ratio = std::max(res.max_ratio, r);
  }
  res.band = res.max_ratio / res.min_ratio;
  return res;
}

// ---------------------------------------------------------------- greedy-class divergence witness

std::pair<std::uint64_t, std::uint64_t> Schedule::at(std::uint64_t N) const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const double n = static_cast<double>(N);
  if (kind == Kind::Power) {
    double p = std::pow(n, s), q = std::pow(n, r);
    if (p > 1e18 || q > 1e18) return {kMax, kMax};
    return {static_cast<std::uint64_t>(std::llround(p)), static_cast<std::uint64_t>(std::llround(q))};
  }
  double e = std::pow(n, b);
  if (e > 60) return {kMax, kMax};
  double q = std::ldexp(1.0, static_cast<int>(std::llround(e)));
  double p = std::pow(n, a) * q;
  if (p > 1e18) return {kMax, kMax};
  return {static_cast<std::uint64_t>(std::llround(p)), static_cast<std::uint64_t>(std::llround(q))};
}

std::string Schedule::describe() const {
  if (kind == Kind::Power) return "p_N=N^" + fmt_double(s) + ",q_N=N^" + fmt_double(r);
  return "p_N=N^" + fmt_double(a) + "*2^(N^" + fmt_double(b) + "),q_N=2^(N^" + fmt_double(b) + ")";
}

std::string WitnessResult::to_csv() const {
  std::ostringstream os;
  os << "N,p_N,q_N,g_norm,a_norm,ratio,left_family,right_family\n";
  for (const auto& r : rows)
    os << r.N << ',' << r.p_N << ',' << r.q_N << ',' << fmt_double(r.g_norm) << ',' << fmt_double(r.a_norm) << ','
       << fmt_double(r.ratio) << ',' << r.left_family << ',' << r.right_family << '\n';
  return os.str();
}

namespace {

WitnessRow witness_row(const SpaceSpec& spec, std::uint64_t N, std::uint64_t pN, std::uint64_t qN, const WitnessOptions& opt) {
  WitnessRow row;
  row.N = N;
  row.p_N = pN;
  row.q_N = qN;
  const auto fams = families_for(spec);
  double best_l = std::numeric_limits<double>::infinity(), best_r = -1;
  std::vector<BasisIndex> left, right;
  for (Family f : fams) {
    double hl = h_structured(spec, pN, f);
    if (hl < best_l) {
      best_l = hl;
      row.left_family = family_name(f);
      left = family_indices(spec, pN, f);
    }
    double hr = h_structured(spec, qN, f);
    if (hr > best_r) {
      best_r = hr;
      row.right_family = family_name(f);
      right = family_indices(spec, qN, f);
    }
  }
  std::vector<Entry> entries;
  std::sort(right.begin(), right.end());
  for (const auto& i : right) entries.push_back({i, 1.0});
  for (const auto& i : left)
    if (!std::binary_search(right.begin(), right.end(), i)) entries.push_back({i, 2.0});
  std::size_t dim = spec.universe() == Universe::Cube ? entries.front().index.cube_dim()
                    : spec.universe() == Universe::Rectangle ? entries.front().index.rect_dim()
                                                             : 1;
  Prepared x;
  x.raw = CoefficientSequence(spec.universe(), dim, std::move(entries));
  x.normed = normalize_coefficients(spec, x.raw);
  const std::size_t n = x.raw.size();
  std::vector<std::size_t> ones, twos;
  for (std::size_t i = 0; i < n; ++i) (x.raw.entries()[i].coef == 1.0 ? ones : twos).push_back(i);

  GreedyOptions g;
  g.tie_cap = opt.tie_samples;
  g.seed = opt.seed;
  std::vector<double> eg(n + 1, 0.0), ea(n + 1, 0.0);
  const double base = space_norm(spec, x.normed);
  eg[0] = ea[0] = base;
  parallel_for(n > 1 ? n - 1 : 0, [&](std::size_t t) {
    const std::size_t k = t + 1;
    auto gs = greedy_sets(x.raw, k, g);
    double gmax = 0, amin = std::numeric_limits<double>::infinity();
    for (const auto& set : gs.sets) {
      double v = residual_norm(spec, x.normed, set);
      gmax = std::max(gmax, v);
      amin = std::min(amin, v);
    }
    // Explicit k-term candidates: a ones and k-a twos, taken from either end.
    std::size_t a_lo = k > twos.size() ? k - twos.size() : 0;
    std::size_t a_hi = std::min(k, ones.size());
    for (std::size_t a : {a_lo, a_hi}) {
      for (bool forward : {true, false}) {
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < a; ++i) kept.push_back(forward ? ones[i] : ones[ones.size() - 1 - i]);
        for (std::size_t i = 0; i < k - a; ++i) kept.push_back(forward ? twos[i] : twos[twos.size() - 1 - i]);
        amin = std::min(amin, residual_norm(spec, x.normed, kept));
      }
    }
    eg[k] = gmax;
    ea[k] = amin;
  });
  row.g_norm = aspace_from_errors(base, eg, opt.alpha, opt.tau);
  row.a_norm = aspace_from_errors(base, ea, opt.alpha, opt.tau);
  row.ratio = row.g_norm / row.a_norm;
  return row;
}

}  // namespace

WitnessResult divergence_witness(const SpaceSpec& spec, const Schedule& schedule, const std::vector<std::uint64_t>& N_list,
                            const WitnessOptions& opt) {
  WitnessResult res;
  std::vector<std::uint64_t> Ns = N_list;
  std::sort(Ns.begin(), Ns.end());
  for (auto N : Ns) {
    auto [pN, qN] = schedule.at(N);
    if (pN < qN || qN == 0 || pN > opt.max_support || pN + qN > opt.max_support) break;
    res.rows.push_back(witness_row(spec, N, pN, qN, opt));
    res.largest_feasible_N = N;
  }
  if (res.rows.empty()) throw CapExceeded("schedule " + schedule.describe() + " is infeasible for every requested N");
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    if (res.rows[i].ratio < res.rows[i - 1].ratio) res.monotone = false;
  if (res.rows.size() >= 4) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : res.rows) pts.emplace_back(static_cast<double>(r.N), r.ratio);
    res.growth = rate_fit(pts, std::make_pair(pts.front().first, pts.back().first));
  }
  return res;
}

// ---------------------------------------------------------------- non-linearity

std::string NonlinearResult::to_csv() const {
  std::ostringstream os;
  os << "series,J,N,value\n";
  for (const auto& p : x_points) os << "x,," << p.N << ',' << fmt_double(p.value) << '\n';
  for (const auto& p : y_points) os << "y,," << p.N << ',' << fmt_double(p.value) << '\n';
  for (const auto& [J, p] : sum_points) os << "x+y," << J << ',' << p.N << ',' << fmt_double(p.value) << '\n';
  return os.str();
}

namespace {

// Decides k^beta <= j^gamma. Exact in 128-bit integers when beta and gamma are
// rationals with a common denominator <= 12 and the powers fit.
class PowerCompare {
 public:
  PowerCompare(double beta, double gamma) : beta_(beta), gamma_(gamma) {
    for (int L = 1; L <= 12; ++L) {
      double eb = beta * L, eg = gamma * L;
      if (std::abs(eb - std::round(eb)) < 1e-9 && std::abs(eg - std::round(eg)) < 1e-9) {
        eb_ = static_cast<int>(std::lround(eb));
        eg_ = static_cast<int>(std::lround(eg));
        rational_ = true;
        break;
      }
    }
  }

  bool leq(std::uint64_t k, std::uint64_t j) {
    if (rational_ && fits(k, eb_) && fits(j, eg_)) return ipow(k, eb_) <= ipow(j, eg_);
    exact_ = false;
    return beta_ * std::log(static_cast<long double>(k)) <= gamma_ * std::log(static_cast<long double>(j));
  }

  // Largest k >= 0 with k^beta <= j^gamma.
  std::uint64_t largest_k(std::uint64_t j) {
    if (j == 0) return 0;
    auto k = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<long double>(j), gamma_ / beta_)));
    while (k > 0 && !leq(k, j)) --k;
    while (leq(k + 1, j)) ++k;
    return k;
  }

  // Smallest j >= 1 with k^beta <= j^gamma.
  std::uint64_t smallest_j(std::uint64_t k) {
    auto j = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<long double>(k), beta_ / gamma_)));
    j = std::max<std::uint64_t>(j, 1);
    while (j > 1 && leq(k, j - 1)) --j;
    while (!leq(k, j)) ++j;
    return j;
  }

  bool exact() const { return exact_; }

 private:
  static bool fits(std::uint64_t v, int e) { return v <= 1 || e * std::log2(static_cast<double>(v)) < 125.0; }
  static unsigned __int128 ipow(std::uint64_t v, int e) {
    unsigned __int128 r = 1;
    for (int i = 0; i < e; ++i) r *= v;
    return r;
  }
  double beta_, gamma_;
  int eb_ = 0, eg_ = 0;
  bool rational_ = false;
  bool exact_ = true;
};

// suffix[N] = sum_{k>N} k^{-e}: explicit terms to K, then the integral from K+1/2.
std::vector<long double> suffix_sums(double e, std::uint64_t K) {
  std::vector<long double> s(K + 1);
  long double tail = std::pow(static_cast<long double>(K) + 0.5L, 1.0L - e) / (e - 1.0L);
  CompensatedSum<long double> acc;
  acc.add(tail);
  s[K] = acc.value();
  for (std::uint64_t k = K; k >= 1; --k) {
    acc.add(std::pow(static_cast<long double>(k), -static_cast<long double>(e)));
    s[k - 1] = acc.value();
  }
  return s;
}

std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, std::size_t count) {
  std::vector<std::uint64_t> g;
  if (hi < lo) return g;
  for (std::size_t i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    auto v = static_cast<std::uint64_t>(std::llround(std::exp(std::log(static_cast<double>(lo)) * (1 - t) +
                                                              std::log(static_cast<double>(hi)) * t)));
    if (g.empty() || v != g.back()) g.push_back(v);
  }
  return g;
}

}  // namespace

NonlinearResult nonlinearity_demo(double p, double q, double alpha, std::uint64_t K, bool engine_check) {
  if (!(q > 0 && q < p)) throw ParamError("the non-linearity construction needs 0 < q < p");
  if (!(alpha > 0)) throw ParamError("alpha must be positive");
  if (K < 16) throw ParamError("K must be at least 16");
  NonlinearResult res;
  res.p = p;
  res.q = q;
  res.alpha = alpha;
  res.K = K;
  res.beta = alpha + 1.0 / p;
  res.gamma = alpha + 1.0 / q;
  const double bp = res.beta * p, gq = res.gamma * q;
  res.x_tail_bound = power_tail_bound(bp, K);
  res.y_tail_bound = power_tail_bound(gq, K);
  const auto Sx = suffix_sums(bp, K);
  const auto Sy = suffix_sums(gq, K);

  for (auto N : log_grid(1, K / 2, 60)) {
    res.x_points.push_back({N, static_cast<double>(std::pow(Sx[N], 1.0L / p))});
    res.y_points.push_back({N, static_cast<double>(std::pow(Sy[N], 1.0L / q))});
  }

  PowerCompare cmp(res.beta, res.gamma);
  // Largest J whose greedy block {k <= K_J} stays inside the explicit range.
  std::uint64_t J_max = 1;
  while (cmp.largest_k(J_max + 1) <= K) ++J_max;
  res.J_max = J_max;

  // |A_j| from the defining inequality, one j at a time.
  std::vector<std::uint64_t> largest(J_max + 1, 0);
  for (std::uint64_t j = 1; j <= J_max; ++j) largest[j] = cmp.largest_k(j);
  res.A_sizes.resize(J_max);
  for (std::uint64_t j = 1; j <= J_max; ++j) res.A_sizes[j - 1] = largest[j] - largest[j - 1];
  // Same sizes by assigning every k to its block.
  std::vector<std::uint64_t> direct(J_max + 1, 0);
  for (std::uint64_t k = 1; k <= largest[J_max]; ++k) {
    auto j = cmp.smallest_j(k);
    if (j <= J_max) ++direct[j];
  }
  for (std::uint64_t j = 1; j <= J_max; ++j)
    if (direct[j] != res.A_sizes[j - 1]) res.counts_match = false;
  res.counts_integer_exact = cmp.exact();

  std::vector<std::pair<double, double>> nj_pts, sum_pts;
  for (auto J : log_grid(2, J_max, 60)) {
    std::uint64_t KJ = largest[J];
    std::uint64_t NJ = KJ + J;
    double v = static_cast<double>(std::pow(Sx[KJ], 1.0L / p) + std::pow(Sy[J], 1.0L / q));
    res.sum_points.push_back({J, {NJ, v}});
    nj_pts.emplace_back(static_cast<double>(J), static_cast<double>(NJ));
    sum_pts.emplace_back(static_cast<double>(NJ), v);
  }
  std::vector<std::pair<double, double>> xp, yp;
  for (const auto& pt : res.x_points) xp.emplace_back(static_cast<double>(pt.N), pt.value);
  for (const auto& pt : res.y_points) yp.emplace_back(static_cast<double>(pt.N), pt.value);
  res.x_fit = rate_fit(xp);
  res.y_fit = rate_fit(yp);
  res.NJ_fit = rate_fit(nj_pts);
  res.sum_fit = rate_fit(sum_pts);
  res.insufficient_range = J_max < 20 || res.sum_fit.points_used < 8;

  if (engine_check) {
    // Generic greedy engine on a short truncation against the closed form.
    const std::uint64_t K0 = 300;
    std::vector<Entry> e;
    for (std::uint64_t k = 1; k <= K0; ++k) e.push_back({BasisIndex::pair(0, static_cast<std::int64_t>(k)), std::pow(static_cast<double>(k), -res.beta)});
    for (std::uint64_t j = 1; j <= K0; ++j) e.push_back({BasisIndex::pair(1, static_cast<std::int64_t>(j)), std::pow(static_cast<double>(j), -res.gamma)});
    CoefficientSequence s(Universe::Pair, 1, std::move(e));
    const SpaceSpec spec = SpaceSpec::lplq(p, q);
    double worst = 0;
    for (std::uint64_t J = 2; J <= J_max && cmp.largest_k(J) <= K0 / 2; ++J) {
      std::uint64_t KJ = cmp.largest_k(J);
      CompensatedSum<long double> a, b;
      for (std::uint64_t k = K0; k > KJ; --k) a.add(std::pow(static_cast<long double>(k), -static_cast<long double>(bp)));
      for (std::uint64_t j = K0; j > J; --j) b.add(std::pow(static_cast<long double>(j), -static_cast<long double>(gq)));
      double closed = static_cast<double>(std::pow(a.value(), 1.0L / p) + std::pow(b.value(), 1.0L / q));
      double engine = gamma_n(s, KJ + J, spec).value;
      worst = std::max(worst, std::abs(engine - closed) / closed);
    }
    res.engine_max_rel_diff = worst;
  }
  return res;
}

}  // namespace nterm
