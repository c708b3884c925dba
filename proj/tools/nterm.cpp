// nterm: command-line front end for the n-term approximation toolkit.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nterm/democracy.hpp"
#include "nterm/errors.hpp"
#include "nterm/experiments.hpp"
#include "nterm/greedy.hpp"
#include "nterm/lorentz_seq.hpp"
#include "nterm/numeric.hpp"
#include "nterm/sequence.hpp"
#include "nterm/spaces.hpp"
#include "nterm/weights.hpp"

using nlohmann::json;
using namespace nterm;

namespace {

constexpr const char* kVersion = "nterm 1.0.0";

struct Globals {
  std::uint64_t seed = 0x5eed;
  unsigned threads = 0;
  std::string out_dir = "nterm_out";
  std::string format = "csv";
  std::string config;
};

// ---------------------------------------------------------------- parsing helpers

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity" || text == "Inf") return kInf;
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw 0;
    return v;
  } catch (...) {
    throw ParseError("bad number '" + text + "' for " + what);
  }
}

std::uint64_t parse_count(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw 0;
    return v;
  } catch (...) {
    throw ParseError("bad count '" + text + "' for " + what);
  }
}

// "1,2,5", "1..64", or "2,4,...,1024" (geometric when the second term is an
// integer multiple >= 2 of a first term >= 2, arithmetic otherwise).
std::vector<std::uint64_t> parse_list(const std::string& text, const std::string& what) {
  std::vector<std::uint64_t> out;
  auto dots = text.find("..");
  if (dots != std::string::npos && text.find("...") == std::string::npos) {
    std::uint64_t a = parse_count(text.substr(0, dots), what), b = parse_count(text.substr(dots + 2), what);
    for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) parts.push_back(tok);
  if (parts.size() == 4 && parts[2] == "...") {
    std::uint64_t a = parse_count(parts[0], what), b = parse_count(parts[1], what), c = parse_count(parts[3], what);
    if (b <= a) throw ParseError("progression '" + text + "' must increase");
    if (a >= 2 && b % a == 0 && b / a >= 2) {
      for (std::uint64_t v = a; v <= c; v *= b / a) out.push_back(v);
    } else {
      for (std::uint64_t v = a; v <= c; v += b - a) out.push_back(v);
    }
    return out;
  }
  for (const auto& p : parts) out.push_back(parse_count(p, what));
  if (out.empty()) throw ParseError("empty list for " + what);
  return out;
}

std::string first_index_token(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos || line[a] == '#') continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos) return "";
    std::string idx = line.substr(a, comma - a);
    std::erase(idx, '"');
    if (first && idx == "index") {
      first = false;
      continue;
    }
    return idx;
  }
  return "";
}

Universe detect_universe(const std::string& idx) {
  if (idx.find('|') != std::string::npos) return Universe::Rectangle;
  if (idx.find(':') != std::string::npos) return Universe::Cube;
  if (idx.find('/') != std::string::npos) return Universe::Pair;
  return Universe::Integer;
}

std::size_t detect_dim(const std::string& idx, Universe u) {
  if (u == Universe::Cube) {
    auto colon = idx.find(':');
    return static_cast<std::size_t>(std::count(idx.begin() + static_cast<std::ptrdiff_t>(colon), idx.end(), ',')) + 1;
  }
  if (u == Universe::Rectangle) return static_cast<std::size_t>(std::count(idx.begin(), idx.end(), '|')) + 1;
  return 1;
}

struct LoadedSequence {
  CoefficientSequence seq;
  std::string hash;
};

LoadedSequence load_sequence(const std::string& path, std::optional<SpaceSpec> spec) {
  std::string text = read_file(path);
  std::string idx = first_index_token(text);
  Universe u = spec ? spec->universe() : detect_universe(idx);
  std::size_t dim = spec && spec->d != 0 && (u == Universe::Cube || u == Universe::Rectangle) ? spec->d : detect_dim(idx, u);
  return {CoefficientSequence::parse_csv(text, u, dim), hex64(fnv1a(text))};
}

// ---------------------------------------------------------------- output

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw NumericError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

json fit_json(const RateFit& f) {
  return {{"slope", number(f.slope)},       {"intercept", number(f.intercept)}, {"r_squared", number(f.r_squared)},
          {"range_lo", number(f.range_lo)}, {"range_hi", number(f.range_hi)},   {"points_used", f.points_used},
          {"excluded_nonpositive", f.excluded_nonpositive}};
}

class Run {
 public:
  Run(const Globals& g, std::string command) : g_(g), command_(std::move(command)) {
    start_ = std::chrono::steady_clock::now();
  }
  json params = json::object();
  void input(const std::string& role, const std::string& path, const std::string& hash) {
    inputs_[role] = {{"path", path}, {"fnv1a", hash}};
  }

  // Writes <stem>.csv (when csv is nonempty), <stem>.json and the manifest;
  // prints either the CSV (or `plain`) or the JSON summary.
  void finish(const std::string& stem, const std::string& csv, json summary, const std::string& plain = "") {
    json ident = {{"command", command_}, {"params", params}, {"seed", g_.seed}, {"version", kVersion},
                  {"inputs", inputs_}};
    std::string hash = hex64(fnv1a(ident.dump()));
    summary["manifest_hash"] = hash;
    std::filesystem::path dir(g_.out_dir);
    std::vector<std::string> outputs;
    if (!csv.empty()) {
      atomic_write(dir / (stem + ".csv"), csv);
      outputs.push_back((dir / (stem + ".csv")).string());
    }
    std::string summary_text = summary.dump(2) + "\n";
    atomic_write(dir / (stem + ".json"), summary_text);
    outputs.push_back((dir / (stem + ".json")).string());
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest = ident;
    manifest["manifest_hash"] = hash;
    manifest["outputs"] = outputs;
    manifest["wall_time_s"] = wall;
    manifest["threads"] = thread_count();
    manifest["compiler"] = __VERSION__;
    atomic_write(dir / (stem + ".manifest.json"), manifest.dump(2) + "\n");
    if (g_.format == "json")
      std::cout << summary_text;
    else
      std::cout << (plain.empty() ? csv : plain);
  }

 private:
  const Globals& g_;
  std::string command_;
  json inputs_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- config

// Flat JSON config keys become "--key value" arguments placed right after the
// command (and experiment name), so flags given on the command line win.
std::vector<std::string> config_args(const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw ParseError("config '" + path + "' must be a flat JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    out.push_back("--" + key);
    if (value.is_string()) {
      out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      out.push_back(joined);
    } else if (value.is_number_float()) {
      out.push_back(fmt_double(value.get<double>()));
    } else if (value.is_object() || value.is_null()) {
      throw ParseError("config key '" + key + "' must be a scalar or a list");
    } else {
      out.push_back(value.dump());
    }
  }
  return out;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  auto extra = config_args(path);
  static const std::vector<std::string> commands = {"norm", "profile", "aspace", "democracy", "experiment"};
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(commands.begin(), commands.end(), args[i]) == commands.end()) continue;
    std::size_t at = i + 1;
    if (args[i] == "experiment" && at < args.size() && args[at].rfind("-", 0) != 0) ++at;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    return args;
  }
  return args;
}

// ---------------------------------------------------------------- commands

struct NormArgs {
  std::string target;
  std::vector<std::string> rest;
};

int cmd_norm(const Globals& g, const NormArgs& a) {
  Run run(g, "norm");
  double value = 0;
  json summary;
  if (a.target == "lorentz-seq") {
    if (a.rest.size() != 3) throw ParseError("usage: norm lorentz-seq <weight> <q> <sequence.csv>");
    Weight w = Weight::parse(a.rest[0]);
    double q = parse_real(a.rest[1], "q");
    auto s = load_sequence(a.rest[2], std::nullopt);
    run.input("sequence", a.rest[2], s.hash);
    value = lorentz_norm(s.seq, w, q);
    run.params = {{"target", a.target}, {"weight", a.rest[0]}, {"q", a.rest[1]}};
    summary = {{"norm", "lorentz-seq"}, {"weight", w.describe()}, {"q", number(q)}};
  } else {
    if (a.rest.size() != 1) throw ParseError("usage: norm <space> <sequence.csv>");
    SpaceSpec spec = SpaceSpec::parse(a.target);
    auto s = load_sequence(a.rest[0], spec);
    run.input("sequence", a.rest[0], s.hash);
    value = space_norm(spec, s.seq);
    run.params = {{"target", a.target}};
    summary = {{"norm", spec.to_string()}};
  }
  if (!std::isfinite(value)) throw NumericError("norm evaluated to " + fmt_double(value));
  summary["value"] = value;
  run.finish("norm", "", summary, fmt_double(value) + "\n");
  return 0;
}

struct ProfileArgs {
  std::string space, file, kind;
  std::size_t n_max = 0;
  std::size_t tie_cap = kTieCap;
  double subset_cap = kSubsetCap;
};

ErrorKind parse_kind(const std::string& k) {
  if (k == "sigma") return ErrorKind::Sigma;
  if (k == "gamma") return ErrorKind::Gamma;
  throw ParseError("error kind must be sigma or gamma, got '" + k + "'");
}

int cmd_profile(const Globals& g, const ProfileArgs& a) {
  Run run(g, "profile");
  SpaceSpec spec = SpaceSpec::parse(a.space);
  ErrorKind kind = parse_kind(a.kind);
  auto s = load_sequence(a.file, spec);
  run.input("sequence", a.file, s.hash);
  run.params = {{"space", a.space}, {"kind", a.kind}, {"N_max", a.n_max}, {"tie_cap", a.tie_cap},
                {"subset_cap", a.subset_cap}};
  GreedyOptions opt;
  opt.tie_cap = a.tie_cap;
  opt.subset_cap = a.subset_cap;
  opt.seed = g.seed;
  auto prof = approximation_profile(s.seq, spec, kind, a.n_max, opt);
  bool exact = std::all_of(prof.rows.begin(), prof.rows.end(), [](const ProfileRow& r) { return r.flag == ExactFlag::Exact; });
  json summary = {{"space", spec.to_string()}, {"kind", a.kind}, {"rows", prof.rows.size()}, {"all_exact", exact}};
  run.finish("profile", prof.to_csv(), summary);
  return 0;
}

struct AspaceArgs {
  std::string space, file, kind = "sigma", form = "full", q = "inf";
  double alpha = 1.0;
};

int cmd_aspace(const Globals& g, const AspaceArgs& a) {
  Run run(g, "aspace");
  SpaceSpec spec = SpaceSpec::parse(a.space);
  auto s = load_sequence(a.file, spec);
  run.input("sequence", a.file, s.hash);
  double q = parse_real(a.q, "q");
  if (a.form != "full" && a.form != "dyadic") throw ParseError("form must be full or dyadic, got '" + a.form + "'");
  run.params = {{"space", a.space}, {"alpha", a.alpha}, {"q", a.q}, {"kind", a.kind}, {"form", a.form}};
  GreedyOptions opt;
  opt.seed = g.seed;
  auto r = aspace_norm(s.seq, a.alpha, q, spec, parse_kind(a.kind),
                       a.form == "full" ? AspaceForm::Full : AspaceForm::Dyadic, opt);
  json summary = {{"space", spec.to_string()}, {"value", number(r.value)}, {"exact", r.exact},
                  {"base_norm", number(r.base_norm)}, {"tail", number(r.tail)}};
  run.finish("aspace", "", summary, fmt_double(r.value) + "\n");
  return 0;
}

// Options shared by `democracy` and every experiment.
struct ExpArgs {
  std::string name;
  std::string space;
  std::string weight = "pow:0.5,0";
  std::string N;
  std::string n_list = "1..10";
  std::string q;
  std::string tau = "inf";
  std::string strategy = "auto";
  std::string direction = "lorentz-into-G";
  std::string schedule = "power";
  double alpha = -1;
  double p = 2;
  double s = 2, r = 1, a = 1, b = 1;
  double cap = kSubsetCap;
  std::size_t samples = 200;
  std::size_t support_cap = 256;
  std::size_t randoms = 8;
  std::size_t tie_cap = 32;
  std::size_t trials = 100;
  std::uint64_t max_support = 4096;
  std::uint64_t K = 200000;
  std::uint64_t weight_range = kDefaultWeightRange;
};

Strategy parse_strategy(const std::string& s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "exhaustive") return Strategy::Exhaustive;
  if (s == "structured") return Strategy::Structured;
  throw ParseError("strategy must be auto, exhaustive or structured, got '" + s + "'");
}

void democracy_run(Run& run, const std::string& stem, const ExpArgs& a) {
  if (a.space.empty()) throw ParseError("--space is required");
  SpaceSpec spec = SpaceSpec::parse(a.space);
  auto Ns64 = parse_list(a.N.empty() ? "1..8" : a.N, "--N");
  std::vector<std::size_t> Ns(Ns64.begin(), Ns64.end());
  run.params = {{"space", a.space}, {"N", a.N.empty() ? "1..8" : a.N}, {"strategy", a.strategy}, {"cap", a.cap}};
  auto prof = democracy_profile(spec, Ns, parse_strategy(a.strategy), std::nullopt, a.cap);
  json summary = {{"space", prof.space}, {"bounds_ok", prof.bounds_ok}, {"monotone_ok", prof.monotone_ok},
                  {"violations", prof.violations}};
  if (prof.r_doubling) summary["r_doubling"] = number(*prof.r_doubling);
  if (prof.ell_step) summary["ell_step"] = number(*prof.ell_step);
  if (prof.ell_doubling) summary["ell_doubling"] = number(*prof.ell_doubling);
  std::vector<std::pair<double, double>> ell, r;
  json families = json::array();
  for (const auto& row : prof.rows) {
    ell.emplace_back(static_cast<double>(row.N), row.h_ell);
    r.emplace_back(static_cast<double>(row.N), row.h_r);
    families.push_back({{"N", row.N}, {"method", row.method}, {"ell_family", row.ell_family}, {"r_family", row.r_family}});
  }
  summary["rows"] = families;
  try {
    summary["h_ell_fit"] = fit_json(rate_fit(ell));
    summary["h_r_fit"] = fit_json(rate_fit(r));
  } catch (const ParamError&) {
    summary["fit_note"] = "fewer than 4 points in the fit range";
  }
  run.finish(stem, prof.to_csv(), summary);
}

int cmd_democracy(const Globals& g, const ExpArgs& a) {
  Run run(g, "democracy");
  democracy_run(run, "democracy", a);
  return 0;
}

VerifierOptions verifier_options(const Globals& g, const ExpArgs& a) {
  VerifierOptions v;
  v.alpha = a.alpha > 0 ? a.alpha : 0.5;
  v.q = a.q.empty() ? kInf : parse_real(a.q, "--q");
  v.support_cap = a.support_cap;
  v.randoms = a.randoms;
  v.tie_cap = a.tie_cap;
  v.seed = g.seed;
  v.classify_range = a.weight_range;
  return v;
}

int cmd_experiment(const Globals& g, const ExpArgs& a) {
  static const std::vector<std::string> names = {"jackson",  "bernstein",  "stechkin", "embedding",
                                                 "democracy", "property-h", "prop71",   "nonlinear"};
  if (std::find(names.begin(), names.end(), a.name) == names.end()) {
    std::cerr << "unknown experiment '" << a.name << "'\nusage: nterm experiment <name> [options]\n  names:";
    for (const auto& n : names) std::cerr << ' ' << n;
    std::cerr << '\n';
    return 2;
  }
  Run run(g, "experiment " + a.name);
  const std::string stem = "experiment-" + a.name;
  if (a.name == "democracy") {
    democracy_run(run, stem, a);
    return 0;
  }
  if (a.name == "jackson" || a.name == "bernstein" || a.name == "embedding") {
    SpaceSpec spec = SpaceSpec::parse(a.space.empty() ? "lp:2" : a.space);
    Weight eta = Weight::parse(a.weight);
    auto v = verifier_options(g, a);
    run.params = {{"space", spec.to_string()}, {"weight", a.weight}, {"alpha", v.alpha}, {"q", a.q.empty() ? "inf" : a.q},
                  {"support_cap", v.support_cap}, {"randoms", v.randoms}, {"tie_cap", v.tie_cap},
                  {"weight_range", v.classify_range}};
    ConstantTable t;
    if (a.name == "jackson") {
      t = jackson_verifier(spec, eta, v);
    } else if (a.name == "bernstein") {
      t = bernstein_verifier(spec, eta, v);
    } else {
      run.params["direction"] = a.direction;
      t = embedding_verifier(parse_direction(a.direction), spec, eta, v);
    }
    json summary = {{"experiment", t.name}, {"constant", number(t.constant)}, {"weight_ok", t.weight_ok}};
    if (!t.diagnostic.empty()) summary["diagnostic"] = t.diagnostic;
    if (t.left_democracy) summary["left_democracy"] = number(*t.left_democracy);
    run.finish(stem, t.to_csv(), summary);
    return t.weight_ok ? 0 : 2;
  }
  if (a.name == "stechkin") {
    double alpha = a.alpha > 0 ? a.alpha : 0.5;
    double q = a.q.empty() ? 1.0 : parse_real(a.q, "--q");
    std::size_t cap = a.support_cap;
    run.params = {{"alpha", alpha}, {"q", a.q.empty() ? "1" : a.q}, {"trials", a.trials}, {"support_cap", cap}};
    auto r = stechkin_check(alpha, q, a.trials, cap, g.seed);
    std::ostringstream csv;
    csv << "trial,support,ratio\n";
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
      csv << i << ',' << r.ratios[i].first << ',' << fmt_double(r.ratios[i].second) << '\n';
    json summary = {{"alpha", alpha},           {"q", number(q)},         {"tau", number(r.tau)},
                    {"trials", r.trials},       {"support_cap", cap},     {"min_ratio", number(r.min_ratio)},
                    {"max_ratio", number(r.max_ratio)}, {"band", number(r.band)}};
    run.finish(stem, csv.str(), summary);
    return 0;
  }
  if (a.name == "property-h") {
    if (a.space.empty()) throw ParseError("--space is required");
    SpaceSpec spec = SpaceSpec::parse(a.space);
    auto ns = parse_list(a.n_list, "--n");
    run.params = {{"space", a.space}, {"n", a.n_list}, {"samples", a.samples}};
    std::ostringstream csv;
    csv << "n,set_size,half_size,tested,exhaustive,min,max,reference,band,pass\n";
    bool all = true;
    double worst = 0;
    for (auto n : ns) {
      auto set = property_h_set(spec, static_cast<unsigned>(n));
      auto r = property_h_check(spec, set, a.samples, g.seed + n);
      all = all && r.pass;
      worst = std::max(worst, r.band);
      csv << n << ',' << r.set_size << ',' << r.half_size << ',' << r.tested << ',' << (r.exhaustive ? "true" : "false")
          << ',' << fmt_double(r.min_value) << ',' << fmt_double(r.max_value) << ',' << fmt_double(r.reference) << ','
          << fmt_double(r.band) << ',' << (r.pass ? "true" : "false") << '\n';
    }
    json summary = {{"space", spec.to_string()}, {"band_limit", kPropertyHBand}, {"worst_band", number(worst)}, {"pass", all}};
    run.finish(stem, csv.str(), summary);
    return 0;
  }
  if (a.name == "prop71") {
    SpaceSpec spec = SpaceSpec::parse(a.space.empty() ? "lpq:2,4,1" : a.space);
    Schedule sch;
    if (a.schedule == "power") {
      sch.kind = Schedule::Kind::Power;
    } else if (a.schedule == "exponential") {
      sch.kind = Schedule::Kind::Exponential;
    } else {
      throw ParseError("schedule must be power or exponential, got '" + a.schedule + "'");
    }
    sch.s = a.s;
    sch.r = a.r;
    sch.a = a.a;
    sch.b = a.b;
    WitnessOptions opt;
    opt.alpha = a.alpha > 0 ? a.alpha : 1.0;
    opt.tau = parse_real(a.tau, "--tau");
    opt.max_support = a.max_support;
    opt.tie_samples = a.tie_cap;
    opt.seed = g.seed;
    std::string N = a.N.empty() ? "2..12" : a.N;
    run.params = {{"space", spec.to_string()}, {"schedule", sch.describe()}, {"N", N},    {"alpha", opt.alpha},
                  {"tau", a.tau},              {"max_support", a.max_support}, {"tie_samples", a.tie_cap}};
    auto res = divergence_witness(spec, sch, parse_list(N, "--N"), opt);
    json summary = {{"space", spec.to_string()}, {"schedule", sch.describe()}, {"monotone", res.monotone},
                    {"largest_feasible_N", res.largest_feasible_N}};
    if (res.growth) summary["growth_fit"] = fit_json(*res.growth);
    run.finish(stem, res.to_csv(), summary);
    return 0;
  }
  // nonlinear
  if (a.q.empty()) throw ParseError("--q is required for the non-linearity experiment");
  double q = parse_real(a.q, "--q");
  double alpha = a.alpha > 0 ? a.alpha : 1.0;
  run.params = {{"p", a.p}, {"q", a.q}, {"alpha", alpha}, {"K", a.K}};
  auto r = nonlinearity_demo(a.p, q, alpha, a.K);
  auto r2 = nonlinearity_demo(a.p, q, alpha, 2 * a.K, false);
  json summary = {{"p", a.p},
                  {"q", q},
                  {"alpha", alpha},
                  {"beta", r.beta},
                  {"gamma", r.gamma},
                  {"K", a.K},
                  {"slope_x", fit_json(r.x_fit)},
                  {"slope_y", fit_json(r.y_fit)},
                  {"slope_sum_on_NJ", fit_json(r.sum_fit)},
                  {"expected_slope_sum", -alpha * r.beta / r.gamma},
                  {"NJ_exponent", fit_json(r.NJ_fit)},
                  {"expected_NJ_exponent", r.gamma / r.beta},
                  {"A_counts_match", r.counts_match},
                  {"A_counts_integer_exact", r.counts_integer_exact},
                  {"J_max", r.J_max},
                  {"x_tail_bound", number(r.x_tail_bound)},
                  {"y_tail_bound", number(r.y_tail_bound)},
                  {"insufficient_range", r.insufficient_range},
                  {"slope_shift_K_doubled",
                   {{"x", number(r2.x_fit.slope - r.x_fit.slope)}, {"sum", number(r2.sum_fit.slope - r.sum_fit.slope)}}}};
  if (r.engine_max_rel_diff) summary["engine_max_rel_diff"] = number(*r.engine_max_rel_diff);
  run.finish(stem, r.to_csv(), summary);
  return 0;
}

void add_exp_options(CLI::App* c, ExpArgs& a) {
  c->add_option("--space", a.space, "space spec, e.g. lp:2, lpq:2,4, bmo:2");
  c->add_option("--weight", a.weight, "eta weight (pow:a,b or table:path)");
  c->add_option("--N", a.N, "N list: 1,2,5 | 1..64 | 2,4,...,1024");
  c->add_option("--n", a.n_list, "Property (H) set exponents (list)");
  c->add_option("--alpha", a.alpha, "smoothness exponent");
  c->add_option("--q", a.q, "Lorentz/approximation q (or second exponent for nonlinear)");
  c->add_option("--p", a.p, "first exponent for nonlinear");
  c->add_option("--tau", a.tau, "approximation-space exponent for prop71");
  c->add_option("--K", a.K, "truncation length for nonlinear");
  c->add_option("--strategy", a.strategy, "auto | exhaustive | structured");
  c->add_option("--cap", a.cap, "subset enumeration cap");
  c->add_option("--samples", a.samples, "half-subset samples for property-h");
  c->add_option("--support-cap", a.support_cap, "largest test support");
  c->add_option("--randoms", a.randoms, "random vectors per test set");
  c->add_option("--tie-cap", a.tie_cap, "admissible greedy sets per N");
  c->add_option("--trials", a.trials, "Stechkin trials");
  c->add_option("--direction", a.direction, "lorentz-into-G | lorentz-into-A | A-into-lorentz");
  c->add_option("--schedule", a.schedule, "power | exponential");
  c->add_option("--s", a.s, "power schedule p_N exponent");
  c->add_option("--r", a.r, "power schedule q_N exponent");
  c->add_option("--a", a.a, "exponential schedule polynomial exponent");
  c->add_option("--b", a.b, "exponential schedule inner exponent");
  c->add_option("--max-support", a.max_support, "largest feasible witness support");
  c->add_option("--weight-range", a.weight_range, "range K for weight classification maxima");
}

int run_cli(int argc, char** argv) {
  Globals g;
  CLI::App app{"n-term approximation toolkit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.add_option("--seed", g.seed, "seed for every sampled quantity");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--out-dir", g.out_dir, "directory for CSV/JSON/manifest outputs");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config, "flat JSON config; command-line flags override it");

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "space norm or weighted Lorentz norm of a sequence");
  norm->add_option("target", na.target, "space spec or lorentz-seq")->required();
  norm->add_option("rest", na.rest, "<sequence.csv> | <weight> <q> <sequence.csv>")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->required();

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "sigma_N or gamma_N profile");
  profile->add_option("space", pa.space)->required();
  profile->add_option("sequence", pa.file)->required();
  profile->add_option("kind", pa.kind, "sigma | gamma")->required();
  profile->add_option("N_max", pa.n_max)->required();
  profile->add_option("--tie-cap", pa.tie_cap);
  profile->add_option("--subset-cap", pa.subset_cap);

  AspaceArgs aa;
  auto* aspace = app.add_subcommand("aspace", "approximation-space or greedy-class norm");
  aspace->add_option("space", aa.space)->required();
  aspace->add_option("sequence", aa.file)->required();
  aspace->add_option("--alpha", aa.alpha)->required();
  aspace->add_option("--q", aa.q, "q (inf allowed)");
  aspace->add_option("--kind", aa.kind, "sigma | gamma");
  aspace->add_option("--form", aa.form, "full | dyadic");

  ExpArgs da;
  auto* democracy = app.add_subcommand("democracy", "democracy profile h_ell / h_r");
  democracy->add_option("spec", da.space, "space spec (or --space)");
  add_exp_options(democracy, da);

  ExpArgs ea;
  auto* experiment = app.add_subcommand("experiment", "run a named experiment");
  experiment->add_option("name", ea.name, "jackson | bernstein | stechkin | embedding | democracy | property-h | prop71 | nonlinear")
      ->required();
  add_exp_options(experiment, ea);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  set_thread_count(g.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : g.threads);

  if (*norm) return cmd_norm(g, na);
  if (*profile) return cmd_profile(g, pa);
  if (*aspace) return cmd_aspace(g, aa);
  if (*democracy) return cmd_democracy(g, da);
  return cmd_experiment(g, ea);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ParamError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << '\n';
    return 2;
  }
}
