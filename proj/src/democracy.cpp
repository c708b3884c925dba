#include "nterm/democracy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nterm/errors.hpp"
#include "nterm/numeric.hpp"

namespace nterm {

// ---------------------------------------------------------------- universes

IndexUniverse integer_universe(std::size_t n) {
  IndexUniverse u;
  u.kind = Universe::Integer;
  for (std::size_t k = 1; k <= n; ++k) u.indices.push_back(BasisIndex::integer(static_cast<std::int64_t>(k)));
  u.description = "integers 1.." + std::to_string(n);
  return u;
}

IndexUniverse pair_universe(std::size_t per_component) {
  IndexUniverse u;
  u.kind = Universe::Pair;
  for (std::int64_t c = 0; c < 2; ++c)
    for (std::size_t i = 1; i <= per_component; ++i) u.indices.push_back(BasisIndex::pair(c, static_cast<std::int64_t>(i)));
  u.description = "pairs 2x" + std::to_string(per_component);
  return u;
}

namespace {

// Offsets of all cubes of one level inside [0,1)^d, lexicographic.
void append_level(std::vector<BasisIndex>& out, std::size_t d, std::int64_t level) {
  const std::int64_t side = std::int64_t{1} << level;
  std::vector<std::int64_t> off(d, 0);
  while (true) {
    out.push_back(BasisIndex::cube(level, off));
    std::size_t a = d;
    while (a > 0) {
      --a;
      if (++off[a] < side) break;
      off[a] = 0;
      if (a == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace

IndexUniverse cube_universe(std::size_t d, std::int64_t max_level) {
  IndexUniverse u;
  u.kind = Universe::Cube;
  u.dim = d;
  for (std::int64_t l = 0; l <= max_level; ++l) append_level(u.indices, d, l);
  u.description = "dyadic cubes of levels 0.." + std::to_string(max_level) + " in [0,1)^" + std::to_string(d);
  return u;
}

std::vector<BasisIndex> hyperbolic_layer(std::size_t d, std::int64_t n) {
  std::vector<BasisIndex> out;
  std::vector<std::int64_t> lev(d, 0);
  // Enumerate compositions of n into d nonnegative parts.
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t a, std::int64_t left) {
    if (a + 1 == d) {
      lev[a] = left;
      std::vector<std::int64_t> off(d, 0);
      while (true) {
        std::vector<std::pair<std::int64_t, std::int64_t>> iv(d);
        for (std::size_t b = 0; b < d; ++b) iv[b] = {lev[b], off[b]};
        out.push_back(BasisIndex::rect(iv));
        std::size_t b = d;
        bool done = true;
        while (b > 0) {
          --b;
          if (++off[b] < (std::int64_t{1} << lev[b])) {
            done = false;
            break;
          }
          off[b] = 0;
        }
        if (done) return;
      }
    }
    for (std::int64_t j = 0; j <= left; ++j) {
      lev[a] = j;
      rec(a + 1, left - j);
    }
  };
  rec(0, n);
  std::sort(out.begin(), out.end());
  return out;
}

IndexUniverse rect_universe(std::size_t d, std::int64_t max_level_sum) {
  IndexUniverse u;
  u.kind = Universe::Rectangle;
  u.dim = d;
  for (std::int64_t n = 0; n <= max_level_sum; ++n) {
    auto layer = hyperbolic_layer(d, n);
    u.indices.insert(u.indices.end(), layer.begin(), layer.end());
  }
  std::sort(u.indices.begin(), u.indices.end());
  u.description = "dyadic rectangles in [0,1)^" + std::to_string(d) + " with level sum <= " + std::to_string(max_level_sum);
  return u;
}

IndexUniverse default_universe(const SpaceSpec& spec) {
  switch (spec.tag) {
    case SpaceTag::Lp: return integer_universe(64);
    case SpaceTag::LpLq: return pair_universe(32);
    case SpaceTag::Bmo: {
      IndexUniverse u = cube_universe(1, 12);
      u.description = "dyadic intervals of [0,1) to depth 12";
      return u;
    }
    case SpaceTag::Hyp: return rect_universe(spec.geometry_dim(), 10);
    default: {
      std::size_t d = spec.geometry_dim();
      std::int64_t J = 0;
      std::uint64_t total = 1;
      while (true) {
        std::uint64_t next = total + (std::uint64_t{1} << ((J + 1) * static_cast<std::int64_t>(d)));
        if (next > 4096) break;
        total = next;
        ++J;
      }
      return cube_universe(d, J);
    }
  }
}

// ---------------------------------------------------------------- exhaustive

namespace {

std::vector<double> normalized_coefs(const SpaceSpec& spec, const std::vector<BasisIndex>& idx) {
  std::vector<double> c(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) c[i] = 1.0 / basis_norm(spec, idx[i]);
  return c;
}

struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -1.0;
  std::vector<std::size_t> arg_lo, arg_hi;
};

}  // namespace

HResult h_exhaustive(const SpaceSpec& spec, const IndexUniverse& universe, std::size_t N, double cap) {
  if (universe.kind != spec.universe()) throw TypeError("universe kind does not match space " + spec.to_string());
  const std::size_t n = universe.indices.size();
  if (N == 0 || N > n) throw ParamError("h_exhaustive needs 1 <= N <= |universe|");
  double count = binomial(n, N);
  if (count > cap) {
    throw CapExceeded("C(" + std::to_string(n) + "," + std::to_string(N) + ") = " + fmt_double(count) +
                      " subsets exceeds cap " + fmt_double(cap) + "; use structured families");
  }
  auto coef = normalized_coefs(spec, universe.indices);
  // Sequence spaces: the normalized coefficients are all 1, so the p-th power
  // sums can be accumulated directly without building a sequence per subset.
  const bool additive = spec.tag == SpaceTag::Lp || spec.tag == SpaceTag::LpLq;
  std::vector<double> powered(n);
  std::vector<char> second(n, 0);
  if (additive) {
    for (std::size_t i = 0; i < n; ++i) {
      second[i] = spec.tag == SpaceTag::LpLq && universe.indices[i][0] == 1;
      powered[i] = std::pow(std::fabs(coef[i]), second[i] ? spec.q : spec.p);
    }
  }
  const std::size_t chunks = n - N + 1;
  std::vector<Extremes> ex(chunks);
  parallel_for(chunks, [&](std::size_t first) {
    std::vector<Entry> buf(N);
    for_each_combination_from(n, N, first, [&](std::span<const std::size_t> c) {
      double v = 0.0;
      if (additive) {
        CompensatedSum<double> a, b;
        bool any_a = false, any_b = false;
        for (auto i : c) {
          if (second[i]) {
            b.add(powered[i]);
            any_b = true;
          } else {
            a.add(powered[i]);
            any_a = true;
          }
        }
        if (any_a) v += std::pow(a.value(), 1.0 / spec.p);
        if (any_b) v += std::pow(b.value(), 1.0 / spec.q);
      } else {
        for (std::size_t i = 0; i < N; ++i) buf[i] = {universe.indices[c[i]], coef[c[i]]};
        v = space_norm(spec, CoefficientSequence::from_sorted(universe.kind, universe.dim, buf));
      }
      auto& e = ex[first];
      if (v < e.lo) {
        e.lo = v;
        e.arg_lo.assign(c.begin(), c.end());
      }
      if (v > e.hi) {
        e.hi = v;
        e.arg_hi.assign(c.begin(), c.end());
      }
      return true;
    });
  });
  Extremes all;
  for (const auto& e : ex) {
    if (e.arg_lo.empty()) continue;
    if (e.lo < all.lo) {
      all.lo = e.lo;
      all.arg_lo = e.arg_lo;
    }
    if (e.hi > all.hi) {
      all.hi = e.hi;
      all.arg_hi = e.arg_hi;
    }
  }
  HResult r;
  r.h_ell = all.lo;
  r.h_r = all.hi;
  for (auto i : all.arg_lo) r.argmin.push_back(universe.indices[i]);
  for (auto i : all.arg_hi) r.argmax.push_back(universe.indices[i]);
  return r;
}

// ---------------------------------------------------------------- families

std::string family_name(Family f) {
  switch (f) {
    case Family::SameSizeDisjoint: return "same-size-disjoint";
    case Family::NestedTower: return "nested-tower";
    case Family::FullTree: return "full-tree";
    case Family::MixedSizes: return "mixed-sizes";
    case Family::LevelOptimized: return "level-optimized";
    case Family::HyperbolicLayer: return "hyperbolic-layer";
    case Family::FirstComponent: return "first-component";
    case Family::SecondComponent: return "second-component";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::SameSizeDisjoint, Family::NestedTower, Family::FullTree, Family::MixedSizes,
                   Family::LevelOptimized, Family::HyperbolicLayer, Family::FirstComponent, Family::SecondComponent}) {
    if (family_name(f) == name) return f;
  }
  throw ParseError("unknown family '" + name + "'");
}

std::vector<Family> families_for(const SpaceSpec& spec) {
  switch (spec.tag) {
    case SpaceTag::Lp: return {Family::SameSizeDisjoint};
    case SpaceTag::LpLq: return {Family::FirstComponent, Family::SecondComponent};
    case SpaceTag::Bmo:
    case SpaceTag::Fpr:
    case SpaceTag::LorentzFn:
      return {Family::SameSizeDisjoint, Family::NestedTower, Family::FullTree, Family::MixedSizes};
    case SpaceTag::Orlicz:
      return {Family::SameSizeDisjoint, Family::NestedTower, Family::FullTree, Family::MixedSizes,
              Family::LevelOptimized};
    case SpaceTag::Hyp:
      return {Family::SameSizeDisjoint, Family::NestedTower, Family::MixedSizes, Family::HyperbolicLayer};
  }
  return {};
}

namespace {

std::int64_t ceil_log2(std::size_t N) {
  std::int64_t j = 0;
  while ((std::size_t{1} << j) < N) ++j;
  return j;
}

BasisIndex cube_on_axis(std::size_t d, std::int64_t level, std::int64_t offset0) {
  std::vector<std::int64_t> off(d, 0);
  off[0] = offset0;
  return BasisIndex::cube(level, off);
}

BasisIndex rect_on_axis(std::size_t d, std::int64_t level, std::int64_t offset0) {
  std::vector<std::pair<std::int64_t, std::int64_t>> iv(d, {0, 0});
  iv[0] = {level, offset0};
  return BasisIndex::rect(iv);
}

[[noreturn]] void mismatch(const SpaceSpec& spec, Family f) {
  throw ParamError("family " + family_name(f) + " is not defined for space " + spec.to_string());
}

}  // namespace

std::int64_t orlicz_optimal_level(const SpaceSpec& spec, std::size_t N) {
  if (spec.tag != SpaceTag::Orlicz) throw ParamError("level optimization needs an Orlicz space");
  const std::size_t d = spec.geometry_dim();
  std::int64_t best_j = 0;
  real best = -1;
  for (std::int64_t j = -40; j <= 40; ++j) {
    real a = std::ldexp(1.0L, -static_cast<int>(j * static_cast<std::int64_t>(d)));
    real v = spec.phi.fundamental(static_cast<real>(N) * a) / spec.phi.fundamental(a);
    if (v > best * (1 + 1e-12L)) {
      best = v;
      best_j = j;
    }
  }
  return best_j;
}

std::vector<BasisIndex> family_indices(const SpaceSpec& spec, std::size_t N, Family f) {
  if (N == 0) throw ParamError("family size must be positive");
  std::vector<BasisIndex> out;
  out.reserve(N);
  const auto half = static_cast<std::int64_t>(N / 2);
  switch (spec.universe()) {
    case Universe::Integer:
      if (f != Family::SameSizeDisjoint) mismatch(spec, f);
      for (std::size_t k = 1; k <= N; ++k) out.push_back(BasisIndex::integer(static_cast<std::int64_t>(k)));
      return out;
    case Universe::Pair:
      if (f != Family::FirstComponent && f != Family::SecondComponent) mismatch(spec, f);
      for (std::size_t k = 1; k <= N; ++k)
        out.push_back(BasisIndex::pair(f == Family::FirstComponent ? 0 : 1, static_cast<std::int64_t>(k)));
      return out;
    case Universe::Cube: {
      const std::size_t d = spec.tag == SpaceTag::Bmo ? 1 : spec.geometry_dim();
      switch (f) {
        case Family::SameSizeDisjoint: {
          std::int64_t j = ceil_log2(N);
          for (std::size_t i = 0; i < N; ++i) out.push_back(cube_on_axis(d, j, static_cast<std::int64_t>(i)));
          return out;
        }
        case Family::LevelOptimized: {
          std::int64_t j = orlicz_optimal_level(spec, N);
          for (std::size_t i = 0; i < N; ++i) out.push_back(cube_on_axis(d, j, static_cast<std::int64_t>(i)));
          return out;
        }
        case Family::NestedTower:
          // [0, 2^-j)^d for consecutive j centred on 0 to keep measures in range.
          for (std::size_t i = 0; i < N; ++i) out.push_back(cube_on_axis(d, static_cast<std::int64_t>(i) - half, 0));
          return out;
        case Family::MixedSizes:
          // [2^-j, 2^{1-j}) x [0, 2^-j)^{d-1}: pairwise disjoint, all sizes distinct.
          for (std::size_t i = 0; i < N; ++i) out.push_back(cube_on_axis(d, static_cast<std::int64_t>(i) - half + 1, 1));
          std::sort(out.begin(), out.end());
          return out;
        case Family::FullTree:
          for (std::int64_t l = 0; out.size() < N; ++l) append_level(out, d, l);
          out.resize(N);
          return out;
        default: mismatch(spec, f);
      }
    }
    case Universe::Rectangle: {
      const std::size_t d = spec.geometry_dim();
      switch (f) {
        case Family::SameSizeDisjoint: {
          std::int64_t j = ceil_log2(N);
          for (std::size_t i = 0; i < N; ++i) out.push_back(rect_on_axis(d, j, static_cast<std::int64_t>(i)));
          return out;
        }
        case Family::NestedTower:
          for (std::size_t i = 0; i < N; ++i) out.push_back(rect_on_axis(d, static_cast<std::int64_t>(i) - half, 0));
          std::sort(out.begin(), out.end());
          return out;
        case Family::MixedSizes:
          for (std::size_t i = 0; i < N; ++i) out.push_back(rect_on_axis(d, static_cast<std::int64_t>(i) - half + 1, 1));
          std::sort(out.begin(), out.end());
          return out;
        case Family::HyperbolicLayer: {
          for (std::int64_t m = 0;; ++m) {
            auto layer = hyperbolic_layer(d, m);
            if (layer.size() >= N) {
              layer.resize(N);
              return layer;
            }
          }
        }
        default: mismatch(spec, f);
      }
    }
  }
  mismatch(spec, f);
}

double h_structured(const SpaceSpec& spec, std::size_t N, Family f) {
  auto idx = family_indices(spec, N, f);
  return space_norm(spec, normalized_indicator(spec, idx));
}

// ---------------------------------------------------------------- profile

std::string DemocracyProfile::to_csv() const {
  std::ostringstream os;
  os << "N,h_ell,h_r,method,bound_direction\n";
  for (const auto& r : rows)
    os << r.N << ',' << fmt_double(r.h_ell) << ',' << fmt_double(r.h_r) << ',' << r.method << ',' << r.bound_direction
       << '\n';
  return os.str();
}

DemocracyProfile democracy_profile(const SpaceSpec& spec, const std::vector<std::size_t>& N_list, Strategy strategy,
                                   const std::optional<IndexUniverse>& universe, double cap) {
  DemocracyProfile prof;
  prof.space = spec.to_string();
  IndexUniverse U = universe ? *universe : default_universe(spec);
  std::vector<std::size_t> Ns = N_list;
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  for (auto N : Ns) {
    DemocracyRow row;
    row.N = N;
    bool exhaustive = strategy == Strategy::Exhaustive ||
                      (strategy == Strategy::Auto && N <= U.indices.size() && binomial(U.indices.size(), N) <= cap);
    if (exhaustive) {
      auto h = h_exhaustive(spec, U, N, cap);
      row.h_ell = h.h_ell;
      row.h_r = h.h_r;
      row.method = "exhaustive";
      row.argmin = std::move(h.argmin);
      row.argmax = std::move(h.argmax);
    } else {
      row.method = "structured";
      row.h_ell = std::numeric_limits<double>::infinity();
      row.h_r = -1.0;
      for (Family f : families_for(spec)) {
        auto idx = family_indices(spec, N, f);
        double v = space_norm(spec, normalized_indicator(spec, idx));
        if (v < row.h_ell) {
          row.h_ell = v;
          row.ell_family = family_name(f);
          row.argmin = idx;
        }
        if (v > row.h_r) {
          row.h_r = v;
          row.r_family = family_name(f);
          row.argmax = idx;
        }
      }
    }
    prof.rows.push_back(std::move(row));
  }
  const double tol = 1e-9;
  for (std::size_t i = 0; i < prof.rows.size(); ++i) {
    const auto& r = prof.rows[i];
    double upper = std::pow(static_cast<double>(r.N), 1.0 / spec.rho);
    if (r.h_ell < 1.0 - tol || r.h_ell > r.h_r * (1 + tol) || r.h_r > upper * (1 + tol)) {
      prof.bounds_ok = false;
      prof.violations.push_back("bounds at N=" + std::to_string(r.N));
    }
    if (i > 0) {
      const auto& p = prof.rows[i - 1];
      if (r.h_ell < p.h_ell * (1 - tol) || r.h_r < p.h_r * (1 - tol)) {
        prof.monotone_ok = false;
        prof.violations.push_back("monotonicity between N=" + std::to_string(p.N) + " and N=" + std::to_string(r.N));
      }
    }
    for (const auto& o : prof.rows) {
      if (o.N == 2 * r.N) {
        prof.r_doubling = std::max(prof.r_doubling.value_or(0.0), o.h_r / r.h_r);
        prof.ell_doubling = std::max(prof.ell_doubling.value_or(0.0), o.h_ell / r.h_ell);
      }
      if (o.N == r.N + 1) prof.ell_step = std::max(prof.ell_step.value_or(0.0), o.h_ell / r.h_ell);
    }
  }
  return prof;
}

// ---------------------------------------------------------------- Property (H)

PropertyHResult property_h_check(const SpaceSpec& spec, const std::vector<BasisIndex>& gamma, std::size_t samples,
                                 std::uint64_t seed, std::optional<double> reference) {
  PropertyHResult res;
  res.set_size = gamma.size();
  res.half_size = gamma.size() / 2;
  if (res.half_size == 0) throw ParamError("Property (H) needs a set of size >= 2");
  std::vector<BasisIndex> sorted = gamma;
  std::sort(sorted.begin(), sorted.end());
  auto coef = normalized_coefs(spec, sorted);
  std::size_t dim = spec.universe() == Universe::Cube       ? sorted.front().cube_dim()
                    : spec.universe() == Universe::Rectangle ? sorted.front().rect_dim()
                                                             : 1;
  auto eval = [&](std::span<const std::size_t> pos) {
    std::vector<Entry> e;
    e.reserve(pos.size());
    for (auto p : pos) e.push_back({sorted[p], coef[p]});
    return space_norm(spec, CoefficientSequence::from_sorted(spec.universe(), dim, std::move(e)));
  };
  std::vector<double> vals;
  if (binomial(sorted.size(), res.half_size) <= static_cast<double>(samples)) {
    res.exhaustive = true;
    for_each_combination(sorted.size(), res.half_size, [&](std::span<const std::size_t> c) {
      vals.push_back(eval(c));
      return true;
    });
  } else {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> picks(samples);
    std::vector<std::size_t> pool(sorted.size());
    for (auto& pk : picks) {
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      std::shuffle(pool.begin(), pool.end(), rng);
      pk.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(res.half_size));
      std::sort(pk.begin(), pk.end());
    }
    vals.resize(samples);
    parallel_for(samples, [&](std::size_t i) { vals[i] = eval(picks[i]); });
  }
  res.tested = vals.size();
  res.min_value = *std::min_element(vals.begin(), vals.end());
  res.max_value = *std::max_element(vals.begin(), vals.end());
  if (reference) {
    res.reference = *reference;
  } else {
    res.reference = -1.0;
    for (Family f : families_for(spec)) res.reference = std::max(res.reference, h_structured(spec, res.half_size, f));
  }
  double hi = std::max(res.max_value, res.reference);
  double lo = std::min(res.min_value, res.reference);
  res.band = hi / lo;
  res.pass = res.band <= kPropertyHBand;
  return res;
}

std::vector<BasisIndex> property_h_set(const SpaceSpec& spec, unsigned n) {
  const std::size_t N = std::size_t{1} << n;
  switch (spec.tag) {
    case SpaceTag::Orlicz: return family_indices(spec, N, Family::LevelOptimized);
    case SpaceTag::LorentzFn:
      return family_indices(spec, N, spec.p <= spec.q ? Family::SameSizeDisjoint : Family::MixedSizes);
    case SpaceTag::Hyp: return hyperbolic_layer(spec.geometry_dim(), n);
    case SpaceTag::Lp:
    case SpaceTag::Fpr: return family_indices(spec, N, Family::SameSizeDisjoint);
    default: throw ParamError("no Property (H) witness family for " + spec.to_string());
  }
}

// ---------------------------------------------------------------- induced

InducedHResult induced_h(const SpaceSpec& spec, double alpha, double q, InducedMode mode, const IndexUniverse& universe,
                         std::size_t N, const GreedyOptions& opt, double cap) {
  if (universe.kind != spec.universe()) throw TypeError("universe kind does not match space " + spec.to_string());
  const std::size_t n = universe.indices.size();
  if (N == 0 || N > n) throw ParamError("induced_h needs 1 <= N <= |universe|");
  double count = binomial(n, N);
  if (count > cap) throw CapExceeded("induced_h needs " + fmt_double(count) + " subsets (cap " + fmt_double(cap) + ")");
  const ErrorKind kind = mode == InducedMode::Aspace ? ErrorKind::Sigma : ErrorKind::Gamma;
  auto coef = normalized_coefs(spec, universe.indices);
  InducedHResult res;
  {
    CoefficientSequence one = CoefficientSequence::from_sorted(universe.kind, universe.dim, {Entry{universe.indices[0], coef[0]}});
    res.unit = aspace_norm(one, alpha, q, spec, kind, AspaceForm::Full, opt).value;
  }
  const std::size_t chunks = n - N + 1;
  struct Acc {
    double lo = std::numeric_limits<double>::infinity(), hi = -1, alo = std::numeric_limits<double>::infinity(), ahi = -1;
  };
  std::vector<Acc> acc(chunks);
  parallel_for(chunks, [&](std::size_t first) {
    std::vector<Entry> buf(N);
    for_each_combination_from(n, N, first, [&](std::span<const std::size_t> c) {
      for (std::size_t i = 0; i < N; ++i) buf[i] = {universe.indices[c[i]], coef[c[i]]};
      auto s = CoefficientSequence::from_sorted(universe.kind, universe.dim, buf);
      auto a = aspace_norm(s, alpha, q, spec, kind, AspaceForm::Full, opt);
      auto& x = acc[first];
      x.lo = std::min(x.lo, a.value);
      x.hi = std::max(x.hi, a.value);
      x.alo = std::min(x.alo, a.base_norm);
      x.ahi = std::max(x.ahi, a.base_norm);
      return true;
    });
  });
  res.h_ell = std::numeric_limits<double>::infinity();
  res.h_r = -1;
  res.ambient_h_ell = std::numeric_limits<double>::infinity();
  res.ambient_h_r = -1;
  for (const auto& x : acc) {
    res.h_ell = std::min(res.h_ell, x.lo / res.unit);
    res.h_r = std::max(res.h_r, x.hi / res.unit);
    res.ambient_h_ell = std::min(res.ambient_h_ell, x.alo);
    res.ambient_h_r = std::max(res.ambient_h_r, x.ahi);
  }
  return res;
}

}  // namespace nterm
