// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "nterm/democracy.hpp"
#include "nterm/experiments.hpp"
#include "nterm/greedy.hpp"
#include "nterm/lorentz_seq.hpp"
#include "nterm/numeric.hpp"
#include "nterm/spaces.hpp"
#include "nterm/weights.hpp"

using namespace nterm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs < limit_s;
  bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %s | %s | %.2fs (limit %.0fs%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
              limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

// ------------------------------------------------------------------ 1
Outcome exact_lp_democracy() {
  std::vector<std::size_t> Ns;
  for (std::size_t N = 1; N <= 64; ++N) Ns.push_back(N);
  double worst = 0;
  for (double p : {1.0, 2.0, 3.0}) {
    auto prof = democracy_profile(SpaceSpec::lp(p), Ns);
    for (const auto& r : prof.rows) {
      double target = std::pow(static_cast<double>(r.N), 1.0 / p);
      worst = std::max({worst, std::abs(r.h_ell - target) / target, std::abs(r.h_r - target) / target});
    }
  }
  return {worst <= 1e-14, "max relative deviation from N^{1/p} = " + num(worst)};
}

// ------------------------------------------------------------------ 2
Outcome greedy_optimality_oracle() {
  const std::vector<std::string> tags = {"lp:2",       "lplq:2,1",  "fpr:0.5,2,2,1", "lpq:2,4,1",
                                         "orlicz:ulog@1", "hyp:2,2", "bmo:2"};
  std::vector<SpaceSpec> specs;
  std::vector<IndexUniverse> universes;
  for (const auto& t : tags) {
    specs.push_back(SpaceSpec::parse(t));
    universes.push_back(default_universe(specs.back()));
  }
  const double ps[] = {1.0, 1.5, 2.0};
  const std::size_t trials = 500;
  std::vector<std::string> issues(trials);
  parallel_for(trials, [&](std::size_t i) {
    std::mt19937_64 rng(0xacce55 ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    std::uniform_int_distribution<std::size_t> size(1, 14);
    std::uniform_int_distribution<int> small(1, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(size(rng));
    bool ties = i % 2 == 1;
    for (auto& c : v) {
      c = ties ? static_cast<double>(small(rng)) : u(rng);
      if (c == 0.0) c = 0.5;
    }
    SpaceSpec lp = SpaceSpec::lp(ps[i % 3]);
    auto x = CoefficientSequence::from_values(v);
    for (std::size_t N = 0; N <= v.size(); ++N) {
      double up = sigma_n_upper(x, N, lp).value;
      double ex = sigma_n_exact(x, N, lp);
      if (up != ex) issues[i] = "lp upper != exact at trial " + std::to_string(i) + " N=" + std::to_string(N);
    }
    for (std::size_t s = 0; s < specs.size(); ++s) {
      auto y = embed_values(v, universes[s]);
      for (std::size_t N = 0; N <= v.size(); ++N) {
        double sig = sigma_n(y, N, specs[s]).value;
        double gam = gamma_n(y, N, specs[s]).value;
        if (sig > gam) issues[i] = "sigma > gamma for " + tags[s] + " at trial " + std::to_string(i);
      }
    }
  });
  for (const auto& s : issues)
    if (!s.empty()) return {false, s};
  return {true, "500 vectors, all N, 7 space tags"};
}

// ------------------------------------------------------------------ 3
Outcome stechkin_band() {
  auto a = stechkin_check(0.5, 1.0, 100, 64);
  auto b = stechkin_check(0.5, 1.0, 100, 128);
  bool ok = a.band <= 10 && b.band <= 10 && b.band <= a.band;
  return {ok, "band(64) = " + num(a.band) + " [" + num(a.min_ratio) + ", " + num(a.max_ratio) + "], band(128) = " +
                  num(b.band) + " [" + num(b.min_ratio) + ", " + num(b.max_ratio) + "]"};
}

// ------------------------------------------------------------------ 4
Outcome lpq_exponents() {
  std::vector<std::size_t> Ns;
  for (int k = 1; k <= 10; ++k) Ns.push_back(std::size_t{1} << k);
  std::string detail;
  bool ok = true;
  for (auto [p, q] : {std::pair{2.0, 4.0}, std::pair{4.0, 2.0}}) {
    auto prof = democracy_profile(SpaceSpec::lpq(p, q, 1), Ns, Strategy::Structured);
    std::vector<std::pair<double, double>> ell, r;
    for (const auto& row : prof.rows) {
      ell.emplace_back(static_cast<double>(row.N), row.h_ell);
      r.emplace_back(static_cast<double>(row.N), row.h_r);
    }
    double se = rate_fit(ell).slope, sr = rate_fit(r).slope;
    ok = ok && std::abs(se - 0.25) <= 0.05 && std::abs(sr - 0.5) <= 0.05;
    detail += "lpq:" + num(p) + "," + num(q) + " ell " + num(se) + " r " + num(sr) + "; ";
  }
  return {ok, detail};
}

// ------------------------------------------------------------------ 5
Outcome bmo_democracy() {
  const SpaceSpec bmo = SpaceSpec::bmo(2.0);
  std::vector<double> same(4097, 0.0);
  parallel_for(4096, [&](std::size_t i) { same[i + 1] = h_structured(bmo, i + 1, Family::SameSizeDisjoint); });
  double worst = *std::max_element(same.begin(), same.end());
  double lo = 1e300, hi = 0;
  for (int k = 3; k <= 12; ++k) {
    std::size_t N = std::size_t{1} << k;
    double h = h_structured(bmo, N, Family::FullTree);
    double v = h * h / std::log(static_cast<double>(N));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool ok = worst <= 2.0 && lo >= 0.5 && hi <= 3.0;
  return {ok, "max same-level norm " + num(worst) + ", full-tree h^2/ln N in [" + num(lo) + ", " + num(hi) + "]"};
}

// ------------------------------------------------------------------ 6
Outcome hyperbolic_exponent() {
  const SpaceSpec hyp = SpaceSpec::hyp(4.0, 2);
  std::vector<std::pair<double, double>> pts(10);
  parallel_for(10, [&](std::size_t i) {
    auto layer = hyperbolic_layer(2, static_cast<std::int64_t>(i + 1));
    double N = static_cast<double>(layer.size());
    double h = space_norm(hyp, normalized_indicator(hyp, layer));
    pts[i] = {N, h / std::pow(std::log(N), 0.25)};
  });
  double s = rate_fit(pts).slope;
  return {std::abs(s - 0.25) <= 0.05, "slope after log correction = " + num(s)};
}

// ------------------------------------------------------------------ 7
Outcome nonlinearity() {
  auto r = nonlinearity_demo(2, 1, 1, 200000);
  bool ok = std::abs(r.x_fit.slope + 1.0) <= 0.1 && std::abs(r.sum_fit.slope + 0.75) <= 0.1 && r.counts_match &&
            r.counts_integer_exact && !r.insufficient_range;
  return {ok, "slope x " + num(r.x_fit.slope) + ", slope x+y on N_J " + num(r.sum_fit.slope) + ", |A_j| exact for j <= " +
                  std::to_string(r.J_max) + (r.counts_match ? "" : " MISMATCH")};
}

// ------------------------------------------------------------------ 8
Outcome divergence_growth() {
  Schedule sch;
  sch.s = 2;
  sch.r = 1;
  std::vector<std::uint64_t> Ns;
  for (std::uint64_t N = 2; N <= 12; ++N) Ns.push_back(N);
  WitnessOptions opt;
  opt.alpha = 1.0;
  auto res = divergence_witness(SpaceSpec::lpq(2, 4, 1), sch, Ns, opt);
  double slope = res.growth ? res.growth->slope : 0.0;
  double need = opt.alpha * (sch.s - sch.r) / 2;
  std::string ratios;
  for (const auto& r : res.rows) ratios += num(r.ratio) + " ";
  return {res.monotone && slope >= need, "ratios " + ratios + "| monotone " + (res.monotone ? "yes" : "no") +
                                              ", growth exponent " + num(slope) + " (needs >= " + num(need) + ")"};
}

// ------------------------------------------------------------------ 9
Outcome jackson_bernstein() {
  const SpaceSpec l2 = SpaceSpec::lp(2);
  const Weight eta = Weight::power_log(0.5, 0);
  bool ok = true;
  std::string detail;
  for (double alpha : {0.5, 1.0}) {
    VerifierOptions a, b;
    a.alpha = b.alpha = alpha;
    a.support_cap = 256;
    b.support_cap = 512;
    auto j1 = jackson_verifier(l2, eta, a), j2 = jackson_verifier(l2, eta, b);
    auto b1 = bernstein_verifier(l2, eta, a), b2 = bernstein_verifier(l2, eta, b);
    double dj = std::abs(j2.constant / j1.constant - 1), db = std::abs(b2.constant / b1.constant - 1);
    ok = ok && j1.weight_ok && j2.weight_ok && dj < 0.05 && db < 0.05;
    detail += "alpha " + num(alpha) + ": jackson " + num(j1.constant) + "->" + num(j2.constant) + ", bernstein " +
              num(b1.constant) + "->" + num(b2.constant) + "; ";
  }
  return {ok, detail};
}

// ------------------------------------------------------------------ 10
Outcome weight_classes() {
  auto sq = Weight::power_log(0.5, 0);
  auto c1 = classify(sq);
  auto g1 = geometric_sum_check(sq, 2, 60);
  double bound = 1.0 / (1.0 - std::pow(2.0, -0.5)) + 1e-6;
  auto lg = Weight::power_log(0, 1);
  auto c2 = classify(lg);
  auto g2 = geometric_sum_check(lg, 2, 60);
  std::vector<std::pair<double, double>> lin;
  for (unsigned n = 10; n <= 60; ++n) lin.emplace_back(n, g2.per_n[n]);
  // Linear growth: per_n against n is a line of slope ~1/2 in plain coordinates.
  double mx = 0, my = 0;
  for (auto& [x, y] : lin) mx += x, my += y;
  mx /= lin.size();
  my /= lin.size();
  double sxx = 0, sxy = 0;
  for (auto& [x, y] : lin) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
  double slope = sxy / sxx;
  bool ok = c1.in_W_plus && c1.kappa && *c1.kappa == 2 && g1.constant <= bound && c2.in_W && !c2.in_W_plus &&
            slope > 0.4 && slope < 0.6;
  return {ok, "pow:0.5,0 W+ kappa=" + (c1.kappa ? std::to_string(*c1.kappa) : std::string("none")) + " sum " +
                  num(g1.constant) + " (bound " + num(bound) + "); pow:0,1 W+=" + (c2.in_W_plus ? "yes" : "no") +
                  ", sum growth slope " + num(slope)};
}

// ------------------------------------------------------------------ 11
Outcome property_h() {
  const std::vector<SpaceSpec> specs = {SpaceSpec::orlicz("ulog", 1), SpaceSpec::lpq(4, 2, 1), SpaceSpec::hyp(4, 2)};
  bool ok = true;
  std::string detail;
  for (const auto& spec : specs) {
    double worst = 0;
    for (unsigned n = 1; n <= 10; ++n) {
      auto set = property_h_set(spec, n);
      auto r = property_h_check(spec, set, 200, 0x5eed + n);
      worst = std::max(worst, r.band);
      ok = ok && r.pass;
    }
    detail += spec.to_string() + " band " + num(worst) + "; ";
  }
  return {ok, detail};
}

// ------------------------------------------------------------------ 12
Outcome induced() {
  const SpaceSpec l2 = SpaceSpec::lp(2);
  auto U = integer_universe(12);
  bool ok = true;
  std::string detail;
  for (auto mode : {InducedMode::Gclass, InducedMode::Aspace}) {
    double lo = 1e300, hi = 0;
    for (std::size_t N = 1; N <= 6; ++N) {
      auto r = induced_h(l2, 1.0, kInf, mode, U, N);
      for (double v : {r.h_ell / (N * r.ambient_h_ell), r.h_r / (N * r.ambient_h_r)}) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    ok = ok && hi / lo <= 4;
    detail += std::string(mode == InducedMode::Gclass ? "G" : "A") + " band " + num(hi / lo) + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  set_thread_count(std::max(1u, std::thread::hardware_concurrency()));
  run(1, "exact lp democracy", 1, exact_lp_democracy);
  run(2, "greedy optimality oracle", 60, greedy_optimality_oracle);
  run(3, "Stechkin band", 120, stechkin_band);
  run(4, "lpq democracy exponents", 120, lpq_exponents);
  run(5, "bmo democracy", 30, bmo_democracy);
  run(6, "hyperbolic exponent", 120, hyperbolic_exponent);
  run(7, "non-linearity of the greedy class", 300, nonlinearity);
  run(8, "counterexample ratio growth", 300, divergence_growth);
  run(9, "Jackson/Bernstein constants", 120, jackson_bernstein);
  run(10, "weight classification", 10, weight_classes);
  run(11, "Property (H)", 120, property_h);
  run(12, "induced democracy", 120, induced);
  return failures == 0 ? 0 : 1;
}
