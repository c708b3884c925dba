#include "nterm/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "nterm/errors.hpp"
#include "nterm/numeric.hpp"

namespace nterm {

namespace {

double parse_num(const std::string& tok, const std::string& whole) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw 0;
    return v;
  } catch (...) {
    throw ParseError("bad number '" + tok + "' in '" + whole + "'");
  }
}

std::vector<double> parse_list(const std::string& body, const std::string& whole) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(body);
  while (std::getline(is, cur, ',')) out.push_back(parse_num(cur, whole));
  return out;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParamError(std::string(what) + " must be in (0, inf)");
}

std::size_t to_dim(double v, const std::string& whole) {
  if (v < 1 || v > 4 || v != std::floor(v)) throw ParamError("dimension in '" + whole + "' must be an integer in 1..4");
  return static_cast<std::size_t>(v);
}

}  // namespace

// ---------------------------------------------------------------- Orlicz Phi

OrliczPhi OrliczPhi::power(double p) {
  require_positive(p, "Orlicz power");
  if (p < 1.0) throw ParamError("Orlicz power must be >= 1 (convex Phi)");
  OrliczPhi f;
  f.kind_ = Kind::Pow;
  f.p_ = p;
  f.name_ = "pow" + fmt_double(p);
  return f;
}

OrliczPhi OrliczPhi::parse(const std::string& name) {
  auto starts = [&](const char* pre) { return name.rfind(pre, 0) == 0; };
  OrliczPhi f;
  f.name_ = name;
  if (name == "ulog") {
    f.kind_ = Kind::ULog;
    return f;
  }
  if (starts("maxpow")) {
    auto v = parse_list(name.substr(6), name);
    if (v.size() != 2) throw ParseError("maxpow needs two exponents: '" + name + "'");
    require_positive(v[0], "Orlicz exponent");
    require_positive(v[1], "Orlicz exponent");
    if (std::min(v[0], v[1]) < 1.0) throw ParamError("Orlicz exponents must be >= 1");
    f.kind_ = Kind::MaxPow;
    f.p_ = v[0];
    f.q_ = v[1];
    return f;
  }
  if (starts("plog")) {
    f.kind_ = Kind::PLog;
    f.p_ = parse_num(name.substr(4), name);
    if (f.p_ < 1.0) throw ParamError("plog exponent must be >= 1");
    return f;
  }
  if (starts("pow")) {
    OrliczPhi g = power(parse_num(name.substr(3), name));
    g.name_ = name;
    return g;
  }
  throw ParseError("unknown Orlicz function '" + name + "'");
}

real OrliczPhi::operator()(real u) const {
  if (u <= 0) return 0;
  switch (kind_) {
    case Kind::Pow: return std::pow(u, static_cast<real>(p_));
    case Kind::ULog: return u * std::log1p(u);
    case Kind::PLog: return std::pow(u, static_cast<real>(p_)) * std::log(std::numbers::e_v<real> + u);
    case Kind::MaxPow:
      return std::max(std::pow(u, static_cast<real>(p_)), std::pow(u, static_cast<real>(q_)));
  }
  return 0;
}

real OrliczPhi::inverse(real y) const {
  if (y <= 0) return 0;
  if (kind_ == Kind::Pow) return std::pow(y, 1 / static_cast<real>(p_));
  if (kind_ == Kind::MaxPow) {
    real e = y >= 1 ? static_cast<real>(std::max(p_, q_)) : static_cast<real>(std::min(p_, q_));
    return std::pow(y, 1 / e);
  }
  real lo = 0, hi = 1;
  while ((*this)(hi) < y) {
    lo = hi;
    hi *= 2;
    if (!std::isfinite(hi)) throw NumericError("Orlicz inverse bracket overflow");
  }
  if (lo == 0) {
    lo = hi / 2;
    while ((*this)(lo) >= y && lo > 0) {
      hi = lo;
      lo /= 2;
    }
  }
  for (int it = 0; it < 200 && hi - lo > hi * 1e-18L; ++it) {
    real mid = (lo + hi) / 2;
    if ((*this)(mid) < y) lo = mid; else hi = mid;
  }
  return (lo + hi) / 2;
}

real OrliczPhi::fundamental(real t) const {
  if (t <= 0) return 0;
  return 1 / inverse(1 / t);
}

// ---------------------------------------------------------------- SpaceSpec

SpaceSpec SpaceSpec::lp(double p) {
  require_positive(p, "p");
  SpaceSpec s;
  s.tag = SpaceTag::Lp;
  s.p = p;
  s.rho = std::min(1.0, p);
  return s;
}

SpaceSpec SpaceSpec::lplq(double p, double q) {
  require_positive(p, "p");
  require_positive(q, "q");
  SpaceSpec s;
  s.tag = SpaceTag::LpLq;
  s.p = p;
  s.q = q;
  s.rho = std::min({1.0, p, q});
  return s;
}

SpaceSpec SpaceSpec::fpr(double smooth, double p, double r, std::size_t d) {
  require_positive(p, "p");
  require_positive(r, "r");
  if (!std::isfinite(smooth)) throw ParamError("s must be finite");
  SpaceSpec s;
  s.tag = SpaceTag::Fpr;
  s.s = smooth;
  s.p = p;
  s.r = r;
  s.d = d;
  s.rho = std::min({1.0, p, r});
  return s;
}

SpaceSpec SpaceSpec::lpq(double p, double q, std::size_t d) {
  require_positive(p, "p");
  require_positive(q, "q");
  SpaceSpec s;
  s.tag = SpaceTag::LorentzFn;
  s.p = p;
  s.q = q;
  s.r = 2.0;
  s.d = d;
  s.rho = std::min({1.0, p, q});
  return s;
}

SpaceSpec SpaceSpec::orlicz(const std::string& name, std::size_t d) {
  SpaceSpec s;
  s.tag = SpaceTag::Orlicz;
  s.phi = OrliczPhi::parse(name);
  s.r = 2.0;
  s.d = d;
  s.rho = 1.0;
  return s;
}

SpaceSpec SpaceSpec::hyp(double p, std::size_t d) {
  require_positive(p, "p");
  SpaceSpec s;
  s.tag = SpaceTag::Hyp;
  s.p = p;
  s.r = 2.0;
  s.d = d;
  s.rho = std::min(1.0, p);
  return s;
}

SpaceSpec SpaceSpec::bmo(double r) {
  require_positive(r, "r");
  SpaceSpec s;
  s.tag = SpaceTag::Bmo;
  s.r = r;
  s.d = 1;
  s.rho = std::min(1.0, r);
  return s;
}

SpaceSpec SpaceSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("space '" + text + "' lacks a tag prefix");
  std::string tag = text.substr(0, colon);
  std::string body = text.substr(colon + 1);
  if (tag == "orlicz") {
    auto at = body.find('@');
    if (at == std::string::npos) return orlicz(body);
    return orlicz(body.substr(0, at), to_dim(parse_num(body.substr(at + 1), text), text));
  }
  auto v = parse_list(body, text);
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (v.size() < lo || v.size() > hi)
      throw ParseError("space '" + text + "' has " + std::to_string(v.size()) + " parameters");
  };
  if (tag == "lp") { need(1, 1); return lp(v[0]); }
  if (tag == "lplq") { need(2, 2); return lplq(v[0], v[1]); }
  if (tag == "fpr") { need(4, 4); return fpr(v[0], v[1], v[2], to_dim(v[3], text)); }
  if (tag == "lpq") { need(2, 3); return lpq(v[0], v[1], v.size() == 3 ? to_dim(v[2], text) : 0); }
  if (tag == "hyp") { need(2, 2); return hyp(v[0], to_dim(v[1], text)); }
  if (tag == "bmo") { need(1, 1); return bmo(v[0]); }
  throw ParseError("unknown space tag '" + tag + "'");
}

std::string SpaceSpec::to_string() const {
  std::ostringstream os;
  switch (tag) {
    case SpaceTag::Lp: os << "lp:" << fmt_double(p); break;
    case SpaceTag::LpLq: os << "lplq:" << fmt_double(p) << ',' << fmt_double(q); break;
    case SpaceTag::Fpr: os << "fpr:" << fmt_double(s) << ',' << fmt_double(p) << ',' << fmt_double(r) << ',' << d; break;
    case SpaceTag::LorentzFn:
      os << "lpq:" << fmt_double(p) << ',' << fmt_double(q);
      if (d) os << ',' << d;
      break;
    case SpaceTag::Orlicz:
      os << "orlicz:" << phi.name();
      if (d) os << '@' << d;
      break;
    case SpaceTag::Hyp: os << "hyp:" << fmt_double(p) << ',' << d; break;
    case SpaceTag::Bmo: os << "bmo:" << fmt_double(r); break;
  }
  return os.str();
}

Universe SpaceSpec::universe() const {
  switch (tag) {
    case SpaceTag::Lp: return Universe::Integer;
    case SpaceTag::LpLq: return Universe::Pair;
    case SpaceTag::Hyp: return Universe::Rectangle;
    default: return Universe::Cube;
  }
}

// ---------------------------------------------------------------- step functions

real PiecewiseConstant::total_measure() const {
  CompensatedSum<real> acc;
  for (const auto& a : atoms) acc.add(a.measure);
  return acc.value();
}

namespace {

real cube_measure(const BasisIndex& q) {
  return std::ldexp(1.0L, -static_cast<int>(q.level() * static_cast<std::int64_t>(q.cube_dim())));
}

real rect_measure(const BasisIndex& r) {
  std::int64_t tot = 0;
  for (std::size_t a = 0; a < r.rect_dim(); ++a) tot += r.rect_level(a);
  return std::ldexp(1.0L, -static_cast<int>(tot));
}

std::int64_t floor_shift(std::int64_t k, std::int64_t sh) {
  if (sh >= 63) return k < 0 ? -1 : 0;
  return k >> sh;  // arithmetic shift is floor division by 2^sh
}

bool cube_contains(const BasisIndex& outer, const BasisIndex& inner) {
  if (outer.level() > inner.level()) return false;
  std::int64_t sh = inner.level() - outer.level();
  for (std::size_t a = 0; a < inner.cube_dim(); ++a)
    if (floor_shift(inner.offset(a), sh) != outer.offset(a)) return false;
  return true;
}

BasisIndex cube_ancestor(const BasisIndex& q, std::int64_t level) {
  std::vector<std::int64_t> off(q.cube_dim());
  for (std::size_t a = 0; a < off.size(); ++a) off[a] = floor_shift(q.offset(a), q.level() - level);
  return BasisIndex::cube(level, off);
}

PiecewiseConstant cube_square_function(const CoefficientSequence& s, double r, double smooth) {
  std::vector<const Entry*> nz;
  for (const auto& e : s.entries())
    if (e.coef != 0.0) nz.push_back(&e);  // entries are sorted by level first
  const std::size_t n = nz.size();
  const std::size_t d = s.dim();
  std::vector<real> w(n), meas(n), own(n);
  for (std::size_t i = 0; i < n; ++i) {
    meas[i] = cube_measure(nz[i]->index);
    real scale = std::pow(meas[i], static_cast<real>(-smooth / static_cast<double>(d) - 0.5));
    w[i] = std::pow(scale * std::fabs(static_cast<real>(nz[i]->coef)), static_cast<real>(r));
    own[i] = meas[i];
  }
  std::vector<std::ptrdiff_t> parent(n, -1);
  if (n <= 64) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j-- > 0;) {
        if (nz[j]->index.level() < nz[i]->index.level() && cube_contains(nz[j]->index, nz[i]->index)) {
          if (parent[i] < 0 || nz[j]->index.level() > nz[parent[i]]->index.level()) parent[i] = static_cast<std::ptrdiff_t>(j);
        }
      }
    }
  } else {
    std::unordered_map<BasisIndex, std::size_t, BasisIndexHash> pos;
    pos.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) pos.emplace(nz[i]->index, i);
    std::int64_t min_level = n ? nz.front()->index.level() : 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::int64_t l = nz[i]->index.level() - 1; l >= min_level; --l) {
        auto it = pos.find(cube_ancestor(nz[i]->index, l));
        if (it != pos.end()) {
          parent[i] = static_cast<std::ptrdiff_t>(it->second);
          break;
        }
      }
    }
  }
  std::vector<real> acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] = w[i] + (parent[i] >= 0 ? acc[parent[i]] : 0);
    if (parent[i] >= 0) own[parent[i]] -= meas[i];
  }
  PiecewiseConstant f;
  for (std::size_t i = 0; i < n; ++i) {
    if (own[i] <= meas[i] * 1e-15L) continue;
    f.atoms.push_back({own[i], std::pow(acc[i], 1 / static_cast<real>(r))});
  }
  return f;
}

PiecewiseConstant rect_square_function(const CoefficientSequence& s, double r, double smooth) {
  const std::size_t d = s.dim();
  std::vector<const Entry*> nz;
  for (const auto& e : s.entries())
    if (e.coef != 0.0) nz.push_back(&e);
  PiecewiseConstant f;
  if (nz.empty()) return f;
  // Endpoint grid per axis.
  std::vector<std::vector<real>> pts(d);
  for (const auto* e : nz) {
    for (std::size_t a = 0; a < d; ++a) {
      real lo = std::ldexp(static_cast<real>(e->index.rect_offset(a)), -static_cast<int>(e->index.rect_level(a)));
      real hi = std::ldexp(static_cast<real>(e->index.rect_offset(a) + 1), -static_cast<int>(e->index.rect_level(a)));
      pts[a].push_back(lo);
      pts[a].push_back(hi);
    }
  }
  std::vector<std::size_t> dims(d), stride(d);
  double cells = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    std::sort(pts[a].begin(), pts[a].end());
    pts[a].erase(std::unique(pts[a].begin(), pts[a].end()), pts[a].end());
    dims[a] = pts[a].size();  // one extra slot per axis for the difference array
    cells *= static_cast<double>(dims[a]);
  }
  if (cells > 6e7) throw CapExceeded("rectangle grid too large (" + fmt_double(cells) + " cells)");
  std::size_t total = 1;
  for (std::size_t a = d; a-- > 0;) {
    stride[a] = total;
    total *= dims[a];
  }
  // Terms are grouped by binary magnitude so that the prefix sums of one group
  // never cancel terms many orders of magnitude larger than what a cell holds.
  struct Mark {
    int group;
    real w;
    const Entry* e;
  };
  std::vector<Mark> marks;
  marks.reserve(nz.size());
  for (const auto* e : nz) {
    real m = rect_measure(e->index);
    real scale = std::pow(m, static_cast<real>(-smooth / static_cast<double>(d) - 0.5));
    real w = std::pow(scale * std::fabs(static_cast<real>(e->coef)), static_cast<real>(r));
    int g = std::ilogb(w);
    marks.push_back({g >= 0 ? g / 24 : -((-g + 23) / 24), w, e});
  }
  std::stable_sort(marks.begin(), marks.end(), [](const Mark& x, const Mark& y) { return x.group < y.group; });

  std::vector<real> value(total, 0), diff(total);
  std::vector<std::int32_t> cover(total), covered(total, 0);
  std::vector<std::size_t> lo(d), hi(d);
  for (std::size_t g0 = 0; g0 < marks.size();) {
    std::size_t g1 = g0;
    while (g1 < marks.size() && marks[g1].group == marks[g0].group) ++g1;
    std::fill(diff.begin(), diff.end(), 0);
    std::fill(cover.begin(), cover.end(), 0);
    for (std::size_t i = g0; i < g1; ++i) {
      const Entry* e = marks[i].e;
      for (std::size_t a = 0; a < d; ++a) {
        real l = std::ldexp(static_cast<real>(e->index.rect_offset(a)), -static_cast<int>(e->index.rect_level(a)));
        real h = std::ldexp(static_cast<real>(e->index.rect_offset(a) + 1), -static_cast<int>(e->index.rect_level(a)));
        lo[a] = static_cast<std::size_t>(std::lower_bound(pts[a].begin(), pts[a].end(), l) - pts[a].begin());
        hi[a] = static_cast<std::size_t>(std::lower_bound(pts[a].begin(), pts[a].end(), h) - pts[a].begin());
      }
      for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
        std::size_t off = 0;
        int sign = 1;
        for (std::size_t a = 0; a < d; ++a) {
          if (corner >> a & 1) {
            off += hi[a] * stride[a];
            sign = -sign;
          } else {
            off += lo[a] * stride[a];
          }
        }
        diff[off] += sign * marks[i].w;
        cover[off] += sign;
      }
    }
    // Prefix sums along every axis turn the corner marks into per-cell totals.
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t st = stride[a], span = st * dims[a];
      for (std::size_t block = 0; block < total; block += span)
        for (std::size_t idx = block + st; idx < block + span; ++idx) {
          diff[idx] += diff[idx - st];
          cover[idx] += cover[idx - st];
        }
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (cover[idx] > 0) {
        value[idx] += std::max<real>(diff[idx], 0);
        covered[idx] = 1;
      }
    }
    g0 = g1;
  }

  std::vector<std::vector<real>> width(d);
  for (std::size_t a = 0; a < d; ++a) {
    width[a].resize(dims[a], 0);
    for (std::size_t k = 0; k + 1 < dims[a]; ++k) width[a][k] = pts[a][k + 1] - pts[a][k];
  }
  const bool square = r == 2.0;
  std::vector<std::size_t> c(d, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (idx > 0) {
      for (std::size_t a = d; a-- > 0;) {
        if (++c[a] < dims[a]) break;
        c[a] = 0;
      }
    }
    if (!covered[idx]) continue;
    real meas = 1;
    for (std::size_t a = 0; a < d; ++a) meas *= width[a][c[a]];
    if (meas == 0) continue;
    real v = square ? std::sqrt(value[idx]) : std::pow(value[idx], 1 / static_cast<real>(r));
    // Neighbouring cells often share a value; merge them.
    if (!f.atoms.empty() && f.atoms.back().value == v)
      f.atoms.back().measure += meas;
    else
      f.atoms.push_back({meas, v});
  }
  return f;
}

}  // namespace

PiecewiseConstant square_function(const CoefficientSequence& s, double r, double smooth) {
  if (!(r > 0.0)) throw ParamError("inner exponent r must be positive");
  if (s.universe() == Universe::Cube) return cube_square_function(s, r, smooth);
  if (s.universe() == Universe::Rectangle) return rect_square_function(s, r, smooth);
  throw TypeError("square function needs cube or rectangle indices, got " + universe_name(s.universe()));
}

real lp_step_norm(const PiecewiseConstant& f, double p) {
  require_positive(p, "p");
  CompensatedSum<real> acc;
  const int ip = static_cast<int>(p);
  if (ip == p && ip >= 1 && ip <= 8) {
    for (const auto& a : f.atoms) {
      real t = a.value;
      for (int i = 1; i < ip; ++i) t *= a.value;
      acc.add(a.measure * t);
    }
  } else {
    for (const auto& a : f.atoms) acc.add(a.measure * std::pow(a.value, static_cast<real>(p)));
  }
  return std::pow(acc.value(), 1 / static_cast<real>(p));
}

real lorentz_step_norm(const PiecewiseConstant& f, double p, double q) {
  require_positive(p, "p");
  require_positive(q, "q");
  std::vector<Atom> at = f.atoms;
  std::stable_sort(at.begin(), at.end(), [](const Atom& x, const Atom& y) { return x.value > y.value; });
  const real e = static_cast<real>(q) / static_cast<real>(p);
  const real coef = static_cast<real>(p) / static_cast<real>(q);
  CompensatedSum<real> acc;
  real a = 0;
  for (const auto& atom : at) {
    real b = a + atom.measure;
    // b^e - a^e without cancellation when a >> measure.
    real span = a > 0 ? std::pow(a, e) * std::expm1(e * std::log1p(atom.measure / a)) : std::pow(b, e);
    acc.add(coef * span * std::pow(atom.value, static_cast<real>(q)));
    a = b;
  }
  return std::pow(acc.value(), 1 / static_cast<real>(q));
}

real orlicz_luxemburg_norm(const PiecewiseConstant& f, const OrliczPhi& phi) {
  real mass = 0;
  for (const auto& a : f.atoms) mass += a.measure * a.value;
  if (mass == 0) return 0;
  // g(t) = modular(e^t) - 1 is decreasing in t.
  auto g = [&](real t) {
    real lambda = std::exp(t);
    CompensatedSum<real> acc;
    for (const auto& a : f.atoms) acc.add(a.measure * phi(a.value / lambda));
    return acc.value() - 1;
  };
  real start = mass / phi.inverse(1);
  if (!(start > 0) || !std::isfinite(start)) start = 1;
  real t0 = std::log(start);
  real lo = t0, hi = t0;
  real glo = g(lo), ghi = glo;
  int guard = 0;
  while (ghi > 0) {
    lo = hi;
    glo = ghi;
    hi += std::log(2.0L);
    ghi = g(hi);
    if (++guard > 20000) throw NumericError("Luxemburg bracket did not close");
  }
  if (lo == hi) {
    while (glo <= 0) {
      hi = lo;
      ghi = glo;
      lo -= std::log(2.0L);
      glo = g(lo);
      if (++guard > 20000) throw NumericError("Luxemburg bracket did not close");
    }
  }
  if (!(glo > ghi)) throw ParamError("Orlicz function is not increasing on the probed range");
  // Illinois false position on the log scale; the bracket width is the
  // relative error in lambda.
  int side = 0;
  for (int it = 0; it < 500 && hi - lo > 1e-12L; ++it) {
    real t = (it % 8 == 7) ? (lo + hi) / 2 : (lo * ghi - hi * glo) / (ghi - glo);
    if (!(t > lo && t < hi)) t = (lo + hi) / 2;
    real gt = g(t);
    if (gt == 0) return std::exp(t);
    if (gt > 0) {
      lo = t;
      glo = gt;
      if (side == -1) ghi /= 2;
      side = -1;
    } else {
      hi = t;
      ghi = gt;
      if (side == 1) glo /= 2;
      side = 1;
    }
  }
  return std::exp(hi);
}

// ---------------------------------------------------------------- bmo

double bmo_norm(const CoefficientSequence& s, double r) {
  require_positive(r, "r");
  if (s.universe() != Universe::Cube || s.dim() != 1) throw TypeError("bmo needs 1-d dyadic intervals");
  std::vector<const Entry*> nz;
  for (const auto& e : s.entries())
    if (e.coef != 0.0) nz.push_back(&e);
  if (nz.empty()) return 0.0;
  // Coarsest level at which every ancestor chain has reached [0,2^-l) or
  // [-2^-l,0). Going coarser never merges more support, so candidates stop there.
  std::int64_t stop = nz.front()->index.level();
  for (const auto* e : nz) {
    std::int64_t level = e->index.level();
    std::int64_t k = e->index.offset(0);
    while (k != 0 && k != -1) {
      k = floor_shift(k, 1);
      --level;
    }
    stop = std::min(stop, level);
  }
  std::unordered_map<BasisIndex, real, BasisIndexHash> mass;
  mass.reserve(nz.size() * 8);
  for (const auto* e : nz) {
    real w = std::pow(std::fabs(static_cast<real>(e->coef)), static_cast<real>(r)) * cube_measure(e->index);
    std::int64_t k = e->index.offset(0);
    for (std::int64_t level = e->index.level(); level >= stop; --level) {
      mass[BasisIndex::cube1(level, k)] += w;
      k = floor_shift(k, 1);
    }
  }
  real best = 0;
  for (const auto& [idx, m] : mass) best = std::max(best, m / cube_measure(idx));
  return static_cast<double>(std::pow(best, 1 / static_cast<real>(r)));
}

// ---------------------------------------------------------------- dispatch

namespace {

void expect(const SpaceSpec& spec, const CoefficientSequence& s, Universe u) {
  if (s.universe() != u)
    throw TypeError("space " + spec.to_string() + " expects " + universe_name(u) + " indices, got " +
                    universe_name(s.universe()));
  if (spec.d != 0 && (u == Universe::Cube || u == Universe::Rectangle) && s.dim() != spec.d)
    throw TypeError("space " + spec.to_string() + " expects dimension " + std::to_string(spec.d) + ", got " +
                    std::to_string(s.dim()));
}

double sorted_power_norm(std::vector<double>& mags, double p) {
  std::sort(mags.begin(), mags.end(), std::greater<>());
  CompensatedSum<double> acc;
  for (double m : mags) acc.add(std::pow(m, p));
  return std::pow(acc.value(), 1.0 / p);
}

}  // namespace

double space_norm(const SpaceSpec& spec, const CoefficientSequence& s) {
  switch (spec.tag) {
    case SpaceTag::Lp: {
      expect(spec, s, Universe::Integer);
      std::vector<double> m;
      m.reserve(s.size());
      for (const auto& e : s.entries()) m.push_back(std::fabs(e.coef));
      return sorted_power_norm(m, spec.p);
    }
    case SpaceTag::LpLq: {
      expect(spec, s, Universe::Pair);
      std::vector<double> a, b;
      for (const auto& e : s.entries()) (e.index[0] == 0 ? a : b).push_back(std::fabs(e.coef));
      return sorted_power_norm(a, spec.p) + sorted_power_norm(b, spec.q);
    }
    case SpaceTag::Fpr:
      expect(spec, s, Universe::Cube);
      return static_cast<double>(lp_step_norm(square_function(s, spec.r, spec.s), spec.p));
    case SpaceTag::LorentzFn:
      expect(spec, s, Universe::Cube);
      return static_cast<double>(lorentz_step_norm(square_function(s, 2.0, 0.0), spec.p, spec.q));
    case SpaceTag::Orlicz:
      expect(spec, s, Universe::Cube);
      return static_cast<double>(orlicz_luxemburg_norm(square_function(s, 2.0, 0.0), spec.phi));
    case SpaceTag::Hyp:
      expect(spec, s, Universe::Rectangle);
      return static_cast<double>(lp_step_norm(square_function(s, 2.0, 0.0), spec.p));
    case SpaceTag::Bmo:
      expect(spec, s, Universe::Cube);
      return bmo_norm(s, spec.r);
  }
  return 0.0;
}

namespace {

std::size_t index_dim(const SpaceSpec& spec, const BasisIndex& idx) {
  switch (spec.universe()) {
    case Universe::Cube: return idx.cube_dim();
    case Universe::Rectangle: return idx.rect_dim();
    default: return 1;
  }
}

}  // namespace

double basis_norm(const SpaceSpec& spec, const BasisIndex& idx) {
  switch (spec.tag) {
    case SpaceTag::Lp:
    case SpaceTag::LpLq:
    case SpaceTag::Bmo:
      return 1.0;
    default:
      break;
  }
  CoefficientSequence e(spec.universe(), index_dim(spec, idx), {Entry{idx, 1.0}});
  return space_norm(spec, e);
}

CoefficientSequence normalized_indicator(const SpaceSpec& spec, const std::vector<BasisIndex>& indices, double value) {
  std::vector<Entry> e;
  e.reserve(indices.size());
  for (const auto& i : indices) e.push_back({i, value / basis_norm(spec, i)});
  std::size_t dim = indices.empty() ? spec.geometry_dim() : index_dim(spec, indices.front());
  return CoefficientSequence(spec.universe(), dim, std::move(e));
}

CoefficientSequence normalize_coefficients(const SpaceSpec& spec, const CoefficientSequence& s) {
  std::vector<Entry> e = s.entries();
  for (auto& x : e) x.coef /= basis_norm(spec, x.index);
  return CoefficientSequence(s.universe(), s.dim(), std::move(e));
}

}  // namespace nterm
